#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <optional>

#include "geonet/camera.hpp"
#include "geonet/d2n.hpp"
#include "geonet/io.hpp"
#include "geonet/metrics.hpp"
#include "geonet/n2d.hpp"
#include "geonet/pipeline.hpp"
#include "geonet/synth.hpp"

namespace py = pybind11;
using namespace geonet;

namespace {

using DArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using BArray = py::array_t<bool, py::array::c_style | py::array::forcecast>;

Grid<double> grid_from(const DArray& a, const char* what) {
    if (a.ndim() != 2) throw py::value_error(std::string(what) + ": expected a 2D array");
    Grid<double> g(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
    std::copy(a.data(), a.data() + a.size(), g.data.begin());
    return g;
}

Mask mask_from(const BArray& a, const char* what) {
    if (a.ndim() != 2) throw py::value_error(std::string(what) + ": expected a 2D mask");
    Mask m(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
    for (py::ssize_t i = 0; i < a.size(); ++i) m.data[i] = a.data()[i] ? 1 : 0;
    return m;
}

DepthMap depth_from(const DArray& z, const BArray& valid) {
    DepthMap d;
    d.z = grid_from(z, "depth");
    d.valid = mask_from(valid, "depth mask");
    if (!d.z.same_shape(d.valid)) throw py::value_error("depth: mask shape mismatch");
    return d;
}

NormalMap normals_from(const DArray& n, const BArray& valid) {
    if (n.ndim() != 3 || n.shape(2) != 3) throw py::value_error("normals: expected an (H, W, 3) array");
    NormalMap m(static_cast<int>(n.shape(1)), static_cast<int>(n.shape(0)));
    const double* p = n.data();
    for (size_t i = 0; i < m.n.size(); ++i) m.n.data[i] = {p[3 * i], p[3 * i + 1], p[3 * i + 2]};
    m.valid = mask_from(valid, "normal mask");
    if (!m.n.same_shape(m.valid)) throw py::value_error("normals: mask shape mismatch");
    return m;
}

py::array grid_to(const Grid<double>& g) {
    py::array_t<double> a({g.height, g.width});
    std::copy(g.data.begin(), g.data.end(), a.mutable_data());
    return a;
}

py::array mask_to(const Mask& m) {
    py::array_t<bool> a({m.height, m.width});
    for (size_t i = 0; i < m.data.size(); ++i) a.mutable_data()[i] = m.data[i] != 0;
    return a;
}

py::array vec3_grid_to(const Grid<Vec3>& g) {
    py::array_t<double> a({g.height, g.width, 3});
    double* p = a.mutable_data();
    for (size_t i = 0; i < g.data.size(); ++i) {
        p[3 * i] = g.data[i].x;
        p[3 * i + 1] = g.data[i].y;
        p[3 * i + 2] = g.data[i].z;
    }
    return a;
}

EdgeWeightMaps weights_from(const DArray& w) {
    if (w.ndim() != 3 || w.shape(2) != 4) throw py::value_error("weights: expected an (H, W, 4) array");
    EdgeWeightMaps maps(static_cast<int>(w.shape(1)), static_cast<int>(w.shape(0)));
    const double* p = w.data();
    for (size_t i = 0; i < maps.w[0].size(); ++i)
        for (int k = 0; k < 4; ++k) maps.w[k].data[i] = p[4 * i + k];
    return maps;
}

py::array weights_to(const EdgeWeightMaps& maps) {
    py::array_t<double> a({maps.height(), maps.width(), 4});
    double* p = a.mutable_data();
    for (size_t i = 0; i < maps.w[0].size(); ++i)
        for (int k = 0; k < 4; ++k) p[4 * i + k] = maps.w[k].data[i];
    return a;
}

std::optional<ResidualMaps> residual_from(const py::object& obj) {
    if (obj.is_none()) return std::nullopt;
    const EdgeWeightMaps maps = weights_from(obj.cast<DArray>());
    return ResidualMaps{maps.w[0], maps.w[1], maps.w[2], maps.w[3]};
}

py::dict depth_metrics_to(const DepthMetrics& m) {
    py::dict d;
    d["rmse"] = m.rmse;
    d["log10"] = m.log10;
    d["rel"] = m.rel;
    d["delta1"] = m.delta1;
    d["delta2"] = m.delta2;
    d["delta3"] = m.delta3;
    d["count"] = m.count;
    return d;
}

py::dict normal_metrics_to(const NormalMetrics& m) {
    py::dict d;
    d["mean"] = m.mean;
    d["median"] = m.median;
    d["rmse"] = m.rmse;
    d["acc_1125"] = m.acc_1125;
    d["acc_225"] = m.acc_225;
    d["acc_30"] = m.acc_30;
    d["count"] = m.count;
    return d;
}

GrayImage image_from(const DArray& a) {
    GrayImage img;
    img.intensity = grid_from(a, "image");
    return img;
}

}  // namespace

PYBIND11_MODULE(_geonetpp, m) {
    m.doc() = "Geometric depth/normal refinement core";

    py::class_<CameraIntrinsics>(m, "Intrinsics")
        .def(py::init<double, double, double, double>(), py::arg("fx"), py::arg("fy"), py::arg("cx"), py::arg("cy"))
        .def_readwrite("fx", &CameraIntrinsics::fx)
        .def_readwrite("fy", &CameraIntrinsics::fy)
        .def_readwrite("cx", &CameraIntrinsics::cx)
        .def_readwrite("cy", &CameraIntrinsics::cy);

    py::class_<GeoConfig>(m, "Config")
        .def(py::init<>())
        .def_readwrite("alpha", &GeoConfig::alpha)
        .def_readwrite("beta", &GeoConfig::beta)
        .def_readwrite("gamma", &GeoConfig::gamma)
        .def_readwrite("t_prop", &GeoConfig::t_prop)
        .def_readwrite("iterations", &GeoConfig::iterations)
        .def_readwrite("ridge_eps", &GeoConfig::ridge_eps)
        .def_readwrite("blend_w", &GeoConfig::blend_w)
        .def_readwrite("base_w", &GeoConfig::base_w)
        .def_readwrite("canny_low", &GeoConfig::canny_low)
        .def_readwrite("canny_high", &GeoConfig::canny_high)
        .def_readwrite("recursive_within_pass", &GeoConfig::recursive_within_pass)
        .def_readwrite("tv_strength", &GeoConfig::tv_strength)
        .def_readwrite("tv_iters", &GeoConfig::tv_iters);

    m.def(
        "unproject",
        [](const DArray& z, const BArray& valid, const CameraIntrinsics& intr) {
            const PointCloud c = unproject(depth_from(z, valid), intr);
            return py::make_tuple(vec3_grid_to(c.points), mask_to(c.valid));
        },
        py::arg("z"), py::arg("valid"), py::arg("intrinsics"));

    m.def(
        "fit_normal_ls",
        [](const DArray& pts, double ridge_eps) -> py::object {
            if (pts.ndim() != 2 || pts.shape(1) != 3) throw py::value_error("points: expected a (K, 3) array");
            std::vector<Vec3> v(pts.shape(0));
            for (py::ssize_t i = 0; i < pts.shape(0); ++i)
                v[i] = {pts.data()[3 * i], pts.data()[3 * i + 1], pts.data()[3 * i + 2]};
            const auto n = fit_normal_ls(v, ridge_eps);
            if (!n) return py::none();
            py::array_t<double> out(3);
            out.mutable_data()[0] = n->x;
            out.mutable_data()[1] = n->y;
            out.mutable_data()[2] = n->z;
            return out;
        },
        py::arg("points"), py::arg("ridge_eps") = 1e-8);

    m.def(
        "depth_to_normals",
        [](const DArray& z, const BArray& valid, const CameraIntrinsics& intr, const GeoConfig& cfg) {
            const NormalMap n = depth_to_normals(depth_from(z, valid), intr, cfg);
            return py::make_tuple(vec3_grid_to(n.n), mask_to(n.valid));
        },
        py::arg("z"), py::arg("valid"), py::arg("intrinsics"), py::arg("config") = GeoConfig{});

    m.def(
        "normals_to_depth",
        [](const DArray& z, const DArray& n, const BArray& valid, const CameraIntrinsics& intr,
           const GeoConfig& cfg) {
            const DepthMap d = normals_to_depth(depth_from(z, valid), normals_from(n, valid), intr, cfg);
            return py::make_tuple(grid_to(d.z), mask_to(d.valid));
        },
        py::arg("z"), py::arg("normals"), py::arg("valid"), py::arg("intrinsics"), py::arg("config") = GeoConfig{});

    m.def(
        "canny",
        [](const DArray& img, double low, double high) { return mask_to(canny(image_from(img), low, high)); },
        py::arg("image"), py::arg("low"), py::arg("high"));

    m.def(
        "mean_intensity", [](const DArray& img) { return mean_intensity(image_from(img)); }, py::arg("image"));

    m.def(
        "build_weight_maps",
        [](const BArray& edges, double base_w, const py::object& residual) {
            const auto res = residual_from(residual);
            return weights_to(build_weight_maps(mask_from(edges, "edges"), res ? &*res : nullptr, base_w));
        },
        py::arg("edges"), py::arg("base_w") = 0.7, py::arg("residual") = py::none());

    m.def(
        "propagate",
        [](const py::array& x, const DArray& w, int t_prop, bool recursive_within_pass, bool renormalize_vec3) {
            const EdgeWeightMaps maps = weights_from(w);
            const DArray xs = x.cast<DArray>();
            std::vector<Grid<double>> channels;
            const bool flat = xs.ndim() == 2;
            if (flat) {
                channels.push_back(grid_from(xs, "signal"));
            } else if (xs.ndim() == 3) {
                const int C = static_cast<int>(xs.shape(2));
                channels.assign(C, Grid<double>(static_cast<int>(xs.shape(1)), static_cast<int>(xs.shape(0))));
                for (size_t i = 0; i < channels[0].size(); ++i)
                    for (int c = 0; c < C; ++c) channels[c].data[i] = xs.data()[i * C + c];
            } else {
                throw py::value_error("signal: expected an (H, W) or (H, W, C) array");
            }
            const auto out = propagate(channels, maps, {t_prop, recursive_within_pass, renormalize_vec3});
            if (flat) return py::array(grid_to(out[0]));
            py::array_t<double> a({static_cast<py::ssize_t>(out[0].height), static_cast<py::ssize_t>(out[0].width),
                                   static_cast<py::ssize_t>(out.size())});
            for (size_t i = 0; i < out[0].size(); ++i)
                for (size_t c = 0; c < out.size(); ++c) a.mutable_data()[i * out.size() + c] = out[c].data[i];
            return py::array(a);
        },
        py::arg("x"), py::arg("weights"), py::arg("t_prop") = 3, py::arg("recursive_within_pass") = true,
        py::arg("renormalize_vec3") = false);

    m.def(
        "geonet_step",
        [](const DArray& z, const DArray& n, const BArray& valid, const DArray& image, const CameraIntrinsics& intr,
           const GeoConfig& cfg, const py::object& residual) {
            const auto res = residual_from(residual);
            const auto r = geonet_step(depth_from(z, valid), normals_from(n, valid), image_from(image), intr, cfg,
                                       res ? &*res : nullptr);
            return py::make_tuple(grid_to(r.depth.z), vec3_grid_to(r.normals.n), mask_to(r.depth.valid));
        },
        py::arg("z"), py::arg("normals"), py::arg("valid"), py::arg("image"), py::arg("intrinsics"),
        py::arg("config") = GeoConfig{}, py::arg("residual") = py::none());

    m.def(
        "geonet_iterate",
        [](const DArray& z, const DArray& n, const BArray& valid, const DArray& image, const CameraIntrinsics& intr,
           const GeoConfig& cfg, const py::object& residual) {
            const auto res = residual_from(residual);
            const auto r = geonet_iterate(depth_from(z, valid), normals_from(n, valid), image_from(image), intr, cfg,
                                          res ? &*res : nullptr);
            return py::make_tuple(grid_to(r.depth.z), vec3_grid_to(r.normals.n), mask_to(r.depth.valid));
        },
        py::arg("z"), py::arg("normals"), py::arg("valid"), py::arg("image"), py::arg("intrinsics"),
        py::arg("config") = GeoConfig{}, py::arg("residual") = py::none());

    m.def(
        "depth_metrics",
        [](const DArray& pred, const BArray& pvalid, const DArray& gt, const BArray& gvalid) {
            return depth_metrics_to(depth_metrics(depth_from(pred, pvalid), depth_from(gt, gvalid)));
        },
        py::arg("pred"), py::arg("pred_valid"), py::arg("gt"), py::arg("gt_valid"));

    m.def(
        "normal_metrics",
        [](const DArray& pred, const BArray& pvalid, const DArray& gt, const BArray& gvalid) {
            return normal_metrics_to(normal_metrics(normals_from(pred, pvalid), normals_from(gt, gvalid)));
        },
        py::arg("pred"), py::arg("pred_valid"), py::arg("gt"), py::arg("gt_valid"));

    m.def(
        "tv_denoise_normals",
        [](const DArray& n, const BArray& valid, double strength, int iters) {
            return py::object(vec3_grid_to(tv_denoise_normals(normals_from(n, valid), strength, iters).n));
        },
        py::arg("normals"), py::arg("valid"), py::arg("strength") = 0.1, py::arg("iters") = 30);

    m.def(
        "three_dgm",
        [](const DArray& pred, const BArray& pvalid, const DArray& gt, const BArray& gvalid,
           const CameraIntrinsics& intr, const GeoConfig& cfg, double tv_strength, int tv_iters) {
            return normal_metrics_to(
                three_dgm(depth_from(pred, pvalid), depth_from(gt, gvalid), intr, cfg, tv_strength, tv_iters));
        },
        py::arg("pred"), py::arg("pred_valid"), py::arg("gt"), py::arg("gt_valid"), py::arg("intrinsics"),
        py::arg("config") = GeoConfig{}, py::arg("tv_strength") = 0.1, py::arg("tv_iters") = 30);

    m.def(
        "generate_scene",
        [](const std::string& spec_json) {
            const Scene s = generate(io::scene_spec_from_json(spec_json));
            return py::make_tuple(grid_to(s.depth.z), vec3_grid_to(s.normals.n), mask_to(s.depth.valid));
        },
        py::arg("spec_json"));

    m.def(
        "add_noise",
        [](const DArray& z, const BArray& valid, double sigma_rel, uint64_t seed) {
            return py::object(grid_to(add_noise(depth_from(z, valid), sigma_rel, seed).z));
        },
        py::arg("z"), py::arg("valid"), py::arg("sigma_rel"), py::arg("seed") = 0);

    m.def(
        "shade",
        [](const DArray& z, const DArray& n, const BArray& valid) {
            return py::object(grid_to(shade(depth_from(z, valid), normals_from(n, valid)).intensity));
        },
        py::arg("z"), py::arg("normals"), py::arg("valid"));

    m.def(
        "read_depth_pfm",
        [](const std::string& path) {
            std::ifstream in(path, std::ios::binary);
            if (!in) throw io::IoError("cannot open " + path);
            const DepthMap d = io::read_depth_pfm(in);
            return py::make_tuple(grid_to(d.z), mask_to(d.valid));
        },
        py::arg("path"));

    m.def(
        "write_depth_pfm",
        [](const std::string& path, const DArray& z, const BArray& valid) {
            std::ofstream out(path, std::ios::binary);
            if (!out) throw io::IoError("cannot write " + path);
            io::write_depth_pfm(depth_from(z, valid), out);
        },
        py::arg("path"), py::arg("z"), py::arg("valid"));

    m.def(
        "read_normal_pfm",
        [](const std::string& path) {
            std::ifstream in(path, std::ios::binary);
            if (!in) throw io::IoError("cannot open " + path);
            const NormalMap n = io::read_normal_pfm(in);
            return py::make_tuple(vec3_grid_to(n.n), mask_to(n.valid));
        },
        py::arg("path"));

    m.def(
        "write_normal_pfm",
        [](const std::string& path, const DArray& n, const BArray& valid) {
            std::ofstream out(path, std::ios::binary);
            if (!out) throw io::IoError("cannot write " + path);
            io::write_normal_pfm(normals_from(n, valid), out);
        },
        py::arg("path"), py::arg("normals"), py::arg("valid"));

    py::register_exception<io::IoError>(m, "IoError", PyExc_RuntimeError);
}
