#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "geonet/camera.hpp"
#include "geonet/d2n.hpp"
#include "geonet/io.hpp"
#include "geonet/metrics.hpp"
#include "geonet/n2d.hpp"
#include "geonet/pipeline.hpp"
#include "geonet/synth.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

geonet::GeoConfig load_config(const std::string& path) {
    if (path.empty()) return {};
    return geonet::io::config_from_json(geonet::io::read_file(path));
}

geonet::CameraIntrinsics load_intrinsics(const std::string& path) {
    return geonet::io::intrinsics_from_json(geonet::io::read_file(path));
}

geonet::DepthMap load_depth(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw geonet::io::IoError("cannot open " + path);
    return geonet::io::read_depth_pfm(in);
}

geonet::NormalMap load_normals(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw geonet::io::IoError("cannot open " + path);
    return geonet::io::read_normal_pfm(in);
}

template <typename Writer>
void save_stream(const std::string& path, Writer&& write) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw geonet::io::IoError("cannot write " + path);
    write(out);
}

// Every non-JSON artifact gets a `<path>.json` sidecar echoing the command,
// its inputs, and the effective config, so runs are reproducible.
void write_sidecar(const std::string& out_path, const std::string& command, const json& inputs,
                   const geonet::GeoConfig& cfg) {
    json side;
    side["command"] = command;
    side["inputs"] = inputs;
    side["config"] = json::parse(geonet::io::config_to_json(cfg));
    geonet::io::write_file(out_path + ".json", side.dump(2) + "\n");
}

json metrics_to_json(const geonet::DepthMetrics& m) {
    return json{{"rmse", m.rmse},     {"log10", m.log10},   {"rel", m.rel},  {"delta1", m.delta1},
                {"delta2", m.delta2}, {"delta3", m.delta3}, {"count", m.count}};
}

json metrics_to_json(const geonet::NormalMetrics& m) {
    return json{{"mean", m.mean},         {"median", m.median},   {"rmse", m.rmse}, {"acc_1125", m.acc_1125},
                {"acc_225", m.acc_225},   {"acc_30", m.acc_30},   {"count", m.count}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Depth/normal geometric refinement toolkit"};
    app.require_subcommand(1);

    std::string depth_path, normals_path, image_path, intr_path, config_path, residual_path;
    std::string pred_path, gt_path, normals_pred_path, normals_gt_path, color_path, spec_path;
    std::string out_path, out_depth_path, out_normals_path, out_image_path;
    bool do_3dgm = false;

    auto* d2n = app.add_subcommand("depth2normal", "Estimate surface normals from a depth map");
    d2n->add_option("--depth", depth_path, "Input depth PFM")->required();
    d2n->add_option("--intrinsics", intr_path, "Camera intrinsics JSON")->required();
    d2n->add_option("--config", config_path, "Config JSON (defaults if omitted)");
    d2n->add_option("--out", out_path, "Output normal PFM")->required();

    auto* n2d = app.add_subcommand("normal2depth", "Refine a depth map from surface normals");
    n2d->add_option("--depth", depth_path, "Input depth PFM")->required();
    n2d->add_option("--normals", normals_path, "Input normal PFM")->required();
    n2d->add_option("--intrinsics", intr_path, "Camera intrinsics JSON")->required();
    n2d->add_option("--config", config_path, "Config JSON (defaults if omitted)");
    n2d->add_option("--out", out_path, "Output depth PFM")->required();

    auto* refine = app.add_subcommand("refine", "Iterative geometric + edge-aware refinement");
    refine->add_option("--depth", depth_path, "Input depth PFM")->required();
    refine->add_option("--normals", normals_path, "Input normal PFM")->required();
    refine->add_option("--image", image_path, "Grayscale image (PGM or PNG)")->required();
    refine->add_option("--intrinsics", intr_path, "Camera intrinsics JSON")->required();
    refine->add_option("--config", config_path, "Config JSON (defaults if omitted)");
    refine->add_option("--residual-weights", residual_path, "Residual weight maps PFM (4 stacked planes)");
    refine->add_option("--out-depth", out_depth_path, "Output depth PFM")->required();
    refine->add_option("--out-normals", out_normals_path, "Output normal PFM")->required();

    auto* eval = app.add_subcommand("eval", "Depth/normal metrics and the 3D geometric metric");
    eval->add_option("--pred", pred_path, "Predicted depth PFM")->required();
    eval->add_option("--gt", gt_path, "Ground-truth depth PFM")->required();
    eval->add_option("--normals-pred", normals_pred_path, "Predicted normal PFM");
    eval->add_option("--normals-gt", normals_gt_path, "Ground-truth normal PFM");
    eval->add_option("--intrinsics", intr_path, "Camera intrinsics JSON")->required();
    eval->add_option("--config", config_path, "Config JSON (defaults if omitted)");
    eval->add_flag("--3dgm", do_3dgm, "Also compute the 3D geometric metric");
    eval->add_option("--out", out_path, "Output metrics JSON")->required();

    auto* cast = app.add_subcommand("cast", "Unproject a depth map to an ASCII PLY point cloud");
    cast->add_option("--depth", depth_path, "Input depth PFM")->required();
    cast->add_option("--intrinsics", intr_path, "Camera intrinsics JSON")->required();
    cast->add_option("--color", color_path, "RGB PNG supplying per-point colors");
    cast->add_option("--out", out_path, "Output PLY")->required();

    auto* synth = app.add_subcommand("synth", "Generate a synthetic scene with analytic ground truth");
    synth->add_option("--spec", spec_path, "Scene spec JSON")->required();
    synth->add_option("--out-depth", out_depth_path, "Output depth PFM")->required();
    synth->add_option("--out-normals", out_normals_path, "Output normal PFM")->required();
    synth->add_option("--out-image", out_image_path, "Output shaded PGM");

    CLI11_PARSE(app, argc, argv);

    try {
        if (d2n->parsed()) {
            const auto cfg = load_config(config_path);
            const auto normals = geonet::depth_to_normals(load_depth(depth_path), load_intrinsics(intr_path), cfg);
            save_stream(out_path, [&](std::ostream& o) { geonet::io::write_normal_pfm(normals, o); });
            write_sidecar(out_path, "depth2normal", {{"depth", depth_path}, {"intrinsics", intr_path}}, cfg);
        } else if (n2d->parsed()) {
            const auto cfg = load_config(config_path);
            const auto depth = geonet::normals_to_depth(load_depth(depth_path), load_normals(normals_path),
                                                        load_intrinsics(intr_path), cfg);
            save_stream(out_path, [&](std::ostream& o) { geonet::io::write_depth_pfm(depth, o); });
            write_sidecar(out_path, "normal2depth",
                          {{"depth", depth_path}, {"normals", normals_path}, {"intrinsics", intr_path}}, cfg);
        } else if (refine->parsed()) {
            const auto cfg = load_config(config_path);
            std::optional<geonet::ResidualMaps> residual;
            if (!residual_path.empty()) {
                std::ifstream in(residual_path, std::ios::binary);
                if (!in) throw geonet::io::IoError("cannot open " + residual_path);
                residual = geonet::io::read_residual_pfm(in);
            }
            const auto result =
                geonet::geonet_iterate(load_depth(depth_path), load_normals(normals_path),
                                       geonet::io::read_gray_image(image_path), load_intrinsics(intr_path), cfg,
                                       residual ? &*residual : nullptr);
            save_stream(out_depth_path, [&](std::ostream& o) { geonet::io::write_depth_pfm(result.depth, o); });
            save_stream(out_normals_path, [&](std::ostream& o) { geonet::io::write_normal_pfm(result.normals, o); });
            const json inputs{{"depth", depth_path},
                              {"normals", normals_path},
                              {"image", image_path},
                              {"intrinsics", intr_path},
                              {"residual_weights", residual_path}};
            write_sidecar(out_depth_path, "refine", inputs, cfg);
            write_sidecar(out_normals_path, "refine", inputs, cfg);
        } else if (eval->parsed()) {
            if (normals_pred_path.empty() != normals_gt_path.empty())
                throw geonet::io::IoError("eval: --normals-pred and --normals-gt must be given together");
            const auto cfg = load_config(config_path);
            const auto intr = load_intrinsics(intr_path);
            const auto pred = load_depth(pred_path);
            const auto gt = load_depth(gt_path);

            json report;
            report["config"] = json::parse(geonet::io::config_to_json(cfg));
            report["inputs"] = {{"pred", pred_path}, {"gt", gt_path}};
            report["depth"] = metrics_to_json(geonet::depth_metrics(pred, gt));
            if (!normals_pred_path.empty()) {
                report["inputs"]["normals_pred"] = normals_pred_path;
                report["inputs"]["normals_gt"] = normals_gt_path;
                report["normals"] =
                    metrics_to_json(geonet::normal_metrics(load_normals(normals_pred_path), load_normals(normals_gt_path)));
            }
            if (do_3dgm) {
                auto m = metrics_to_json(geonet::three_dgm(pred, gt, intr, cfg, cfg.tv_strength, cfg.tv_iters));
                m["tv_strength"] = cfg.tv_strength;
                m["tv_iters"] = cfg.tv_iters;
                report["three_dgm"] = m;
            }
            geonet::io::write_file(out_path, report.dump(2) + "\n");
        } else if (cast->parsed()) {
            const auto cloud = geonet::unproject(load_depth(depth_path), load_intrinsics(intr_path));
            std::optional<geonet::RgbGrid> colors;
            if (!color_path.empty()) colors = geonet::io::read_rgb_png(color_path);
            save_stream(out_path, [&](std::ostream& o) { geonet::export_ply(cloud, colors ? &*colors : nullptr, o); });
            write_sidecar(out_path, "cast", {{"depth", depth_path}, {"intrinsics", intr_path}, {"color", color_path}},
                          {});
        } else if (synth->parsed()) {
            const std::string spec_text = geonet::io::read_file(spec_path);
            const auto spec = geonet::io::scene_spec_from_json(spec_text);
            auto scene = geonet::generate(spec);
            if (spec.noise_sigma_rel > 0.0)
                scene.depth = geonet::add_noise(scene.depth, spec.noise_sigma_rel, spec.seed);
            save_stream(out_depth_path, [&](std::ostream& o) { geonet::io::write_depth_pfm(scene.depth, o); });
            save_stream(out_normals_path, [&](std::ostream& o) { geonet::io::write_normal_pfm(scene.normals, o); });
            if (!out_image_path.empty()) {
                const auto img = geonet::shade(scene.depth, scene.normals);
                save_stream(out_image_path, [&](std::ostream& o) { geonet::io::write_pgm(img, o); });
            }
            json side;
            side["command"] = "synth";
            side["inputs"] = {{"spec", spec_path}};
            side["spec"] = json::parse(spec_text);
            geonet::io::write_file(out_depth_path + ".json", side.dump(2) + "\n");
            geonet::io::write_file(out_normals_path + ".json", side.dump(2) + "\n");
        }
    } catch (const std::exception& e) {
        std::cerr << app.get_name() << ": " << e.what() << "\n";
        return 1;
    }
    return 0;
}
