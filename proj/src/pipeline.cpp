#include "geonet/pipeline.hpp"

#include <stdexcept>

#include "geonet/d2n.hpp"
#include "geonet/n2d.hpp"

namespace geonet {

DepthMap blend(const DepthMap& a, const DepthMap& b, double w) {
    if (!a.z.same_shape(b.z)) throw std::invalid_argument("blend: shape mismatch");
    if (a.valid != b.valid) throw std::invalid_argument("blend: masks differ");
    if (w == 0.0) return a;
    if (w == 1.0) return b;
    DepthMap out = a;
    for (size_t i = 0; i < a.z.size(); ++i)
        if (a.valid.data[i]) out.z.data[i] = (1.0 - w) * a.z.data[i] + w * b.z.data[i];
    return out;
}

NormalMap blend(const NormalMap& a, const NormalMap& b, double w) {
    if (!a.n.same_shape(b.n)) throw std::invalid_argument("blend: shape mismatch");
    if (a.valid != b.valid) throw std::invalid_argument("blend: masks differ");
    if (w == 0.0) return a;
    if (w == 1.0) return b;
    NormalMap out = a;
    for (size_t i = 0; i < a.n.size(); ++i) {
        if (!a.valid.data[i]) continue;
        const Vec3 m = a.n.data[i] * (1.0 - w) + b.n.data[i] * w;
        const double sq = m.dot(m);
        // Antipodal blends can cancel out; keep the first input there.
        out.n.data[i] = sq > 1e-24 ? renormalize(m) : a.n.data[i];
    }
    return out;
}

EdgeWeightMaps make_weight_maps(const GrayImage& image, const GeoConfig& cfg, const ResidualMaps* residual) {
    const double mean = mean_intensity(image);
    const double low = cfg.canny_low.value_or(mean);
    const double high = cfg.canny_high.value_or(2.0 * mean);
    if (low > high) throw std::invalid_argument("make_weight_maps: canny_low exceeds canny_high");
    return build_weight_maps(canny(image, low, high), residual, cfg.base_w);
}

namespace {

DepthMap propagate_depth(const DepthMap& d, const EdgeWeightMaps& weights, const GeoConfig& cfg) {
    const EdgeWeightMaps blocked = block_at_invalid(weights, d.valid);
    PropagateOptions opts{cfg.t_prop, cfg.recursive_within_pass, false};
    std::vector<Grid<double>> ch = propagate({d.z}, blocked, opts);
    DepthMap out = d;
    for (size_t i = 0; i < out.z.size(); ++i)
        if (out.valid.data[i]) out.z.data[i] = ch[0].data[i];
    return out;
}

NormalMap propagate_normals(const NormalMap& n, const EdgeWeightMaps& weights, const GeoConfig& cfg) {
    const EdgeWeightMaps blocked = block_at_invalid(weights, n.valid);
    PropagateOptions opts{cfg.t_prop, cfg.recursive_within_pass, true};
    std::vector<Grid<double>> ch(3, Grid<double>(n.width(), n.height()));
    for (size_t i = 0; i < n.n.size(); ++i) {
        ch[0].data[i] = n.n.data[i].x;
        ch[1].data[i] = n.n.data[i].y;
        ch[2].data[i] = n.n.data[i].z;
    }
    ch = propagate(ch, blocked, opts);
    NormalMap out = n;
    for (size_t i = 0; i < out.n.size(); ++i)
        if (out.valid.data[i]) out.n.data[i] = {ch[0].data[i], ch[1].data[i], ch[2].data[i]};
    return out;
}

}  // namespace

GeoNetResult geonet_step_with_weights(const DepthMap& depth, const NormalMap& normals, const EdgeWeightMaps& weights,
                                      const CameraIntrinsics& intr, const GeoConfig& cfg) {
    if (!depth.z.same_shape(normals.n) || !depth.z.same_shape(weights.w[0]))
        throw std::invalid_argument("geonet_step: shape mismatch");

    // Depth-to-normal branch. Degenerate fits fall back to the input normal
    // so downstream masks stay intact.
    NormalMap n_geo = depth_to_normals(depth, intr, cfg);
    for (size_t i = 0; i < n_geo.n.size(); ++i) {
        if (normals.valid.data[i] && !n_geo.valid.data[i]) {
            n_geo.n.data[i] = normals.n.data[i];
            n_geo.valid.data[i] = 1;
        } else if (!normals.valid.data[i]) {
            n_geo.n.data[i] = Vec3{};
            n_geo.valid.data[i] = 0;
        }
    }
    const NormalMap normals_out = propagate_normals(blend(normals, n_geo, cfg.blend_w), weights, cfg);

    // Normal-to-depth branch, driven by the input normals.
    const DepthMap d_geo = normals_to_depth(depth, normals, intr, cfg);
    const DepthMap depth_out = propagate_depth(blend(depth, d_geo, cfg.blend_w), weights, cfg);

    return {depth_out, normals_out};
}

GeoNetResult geonet_step(const DepthMap& depth, const NormalMap& normals, const GrayImage& image,
                         const CameraIntrinsics& intr, const GeoConfig& cfg, const ResidualMaps* residual) {
    cfg.validate();
    if (!depth.z.same_shape(image.intensity)) throw std::invalid_argument("geonet_step: image shape mismatch");
    return geonet_step_with_weights(depth, normals, make_weight_maps(image, cfg, residual), intr, cfg);
}

GeoNetResult geonet_iterate(const DepthMap& depth, const NormalMap& normals, const GrayImage& image,
                            const CameraIntrinsics& intr, const GeoConfig& cfg, const ResidualMaps* residual) {
    cfg.validate();
    if (!depth.z.same_shape(image.intensity)) throw std::invalid_argument("geonet_iterate: image shape mismatch");
    const EdgeWeightMaps weights = make_weight_maps(image, cfg, residual);
    GeoNetResult cur{depth, normals};
    for (int it = 0; it < cfg.iterations; ++it)
        cur = geonet_step_with_weights(cur.depth, cur.normals, weights, intr, cfg);
    return cur;
}

}  // namespace geonet
