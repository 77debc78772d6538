#include "geonet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "geonet/d2n.hpp"

namespace geonet {

namespace {
constexpr double kRadToDeg = 180.0 / std::numbers::pi;
}

DepthMetrics depth_metrics(const DepthMap& pred, const DepthMap& gt) {
    if (!pred.z.same_shape(gt.z)) throw std::invalid_argument("depth_metrics: shape mismatch");

    DepthMetrics m;
    double sq = 0.0, lg = 0.0, rel = 0.0;
    size_t d1 = 0, d2 = 0, d3 = 0;
    for (size_t i = 0; i < pred.z.size(); ++i) {
        if (!pred.valid.data[i] || !gt.valid.data[i]) continue;
        const double zp = pred.z.data[i], zg = gt.z.data[i];
        if (!(zp > 0.0) || !(zg > 0.0)) continue;
        const double d = zp - zg;
        sq += d * d;
        lg += std::abs(std::log10(zp) - std::log10(zg));
        rel += std::abs(d) / zg;
        const double ratio = std::max(zp / zg, zg / zp);
        if (ratio < 1.25) ++d1;
        if (ratio < 1.25 * 1.25) ++d2;
        if (ratio < 1.25 * 1.25 * 1.25) ++d3;
        ++m.count;
    }
    if (m.count == 0) throw std::invalid_argument("depth_metrics: no jointly valid pixels");
    const double n = static_cast<double>(m.count);
    m.rmse = std::sqrt(sq / n);
    m.log10 = lg / n;
    m.rel = rel / n;
    m.delta1 = d1 / n;
    m.delta2 = d2 / n;
    m.delta3 = d3 / n;
    return m;
}

NormalMetrics normal_metrics(const NormalMap& pred, const NormalMap& gt) {
    if (!pred.n.same_shape(gt.n)) throw std::invalid_argument("normal_metrics: shape mismatch");

    std::vector<double> angles;
    angles.reserve(pred.n.size());
    for (size_t i = 0; i < pred.n.size(); ++i) {
        if (!pred.valid.data[i] || !gt.valid.data[i]) continue;
        if (pred.n.data[i] == gt.n.data[i]) {  // identical vectors: exactly zero
            angles.push_back(0.0);
            continue;
        }
        const double dot = std::clamp(pred.n.data[i].dot(gt.n.data[i]), -1.0, 1.0);
        angles.push_back(std::acos(dot) * kRadToDeg);
    }
    if (angles.empty()) throw std::invalid_argument("normal_metrics: no jointly valid pixels");

    NormalMetrics m;
    m.count = angles.size();
    double sum = 0.0, sq = 0.0;
    size_t a1 = 0, a2 = 0, a3 = 0;
    for (double a : angles) {
        sum += a;
        sq += a * a;
        if (a < 11.25) ++a1;
        if (a < 22.5) ++a2;
        if (a < 30.0) ++a3;
    }
    const double n = static_cast<double>(m.count);
    m.mean = sum / n;
    m.rmse = std::sqrt(sq / n);
    m.acc_1125 = a1 / n;
    m.acc_225 = a2 / n;
    m.acc_30 = a3 / n;

    std::sort(angles.begin(), angles.end());
    const size_t h = angles.size() / 2;
    m.median = angles.size() % 2 ? angles[h] : 0.5 * (angles[h - 1] + angles[h]);
    return m;
}

namespace {

// Dual fixed-point TV iterations (projected gradient on the dual of the
// ROF objective): u = f - theta * div(p), tau = 1/4.
Grid<double> tv_channel(const Grid<double>& f, double theta, int iters) {
    const int W = f.width, H = f.height;
    const double tau = 0.25;
    Grid<double> p1(W, H, 0.0), p2(W, H, 0.0), g(W, H, 0.0);

    auto divergence_minus = [&](Grid<double>& out) {
        // out = div(p) - f / theta
        for (int v = 0; v < H; ++v)
            for (int u = 0; u < W; ++u) {
                double d = 0.0;
                if (u < W - 1) d += p1.at(u, v);
                if (u > 0) d -= p1.at(u - 1, v);
                if (v < H - 1) d += p2.at(u, v);
                if (v > 0) d -= p2.at(u, v - 1);
                out.at(u, v) = d - f.at(u, v) / theta;
            }
    };

    for (int it = 0; it < iters; ++it) {
        divergence_minus(g);
        for (int v = 0; v < H; ++v)
            for (int u = 0; u < W; ++u) {
                const double gx = u < W - 1 ? g.at(u + 1, v) - g.at(u, v) : 0.0;
                const double gy = v < H - 1 ? g.at(u, v + 1) - g.at(u, v) : 0.0;
                const double denom = 1.0 + tau * std::sqrt(gx * gx + gy * gy);
                p1.at(u, v) = (p1.at(u, v) + tau * gx) / denom;
                p2.at(u, v) = (p2.at(u, v) + tau * gy) / denom;
            }
    }

    Grid<double> out(W, H, 0.0);
    for (int v = 0; v < H; ++v)
        for (int u = 0; u < W; ++u) {
            double d = 0.0;
            if (u < W - 1) d += p1.at(u, v);
            if (u > 0) d -= p1.at(u - 1, v);
            if (v < H - 1) d += p2.at(u, v);
            if (v > 0) d -= p2.at(u, v - 1);
            out.at(u, v) = f.at(u, v) - theta * d;
        }
    return out;
}

}  // namespace

NormalMap tv_denoise_normals(const NormalMap& normals, double strength, int iters) {
    if (!(strength >= 0.0)) throw std::invalid_argument("tv_denoise_normals: strength must be >= 0");
    if (iters < 1) throw std::invalid_argument("tv_denoise_normals: iters must be >= 1");
    if (normals.n.empty()) throw std::invalid_argument("tv_denoise_normals: empty map");
    if (strength == 0.0) return normals;

    Grid<double> cx(normals.width(), normals.height()), cy = cx, cz = cx;
    for (size_t i = 0; i < normals.n.size(); ++i) {
        cx.data[i] = normals.n.data[i].x;
        cy.data[i] = normals.n.data[i].y;
        cz.data[i] = normals.n.data[i].z;
    }
    cx = tv_channel(cx, strength, iters);
    cy = tv_channel(cy, strength, iters);
    cz = tv_channel(cz, strength, iters);

    NormalMap out = normals;
    for (size_t i = 0; i < out.n.size(); ++i) {
        if (!out.valid.data[i]) continue;
        const Vec3 m{cx.data[i], cy.data[i], cz.data[i]};
        const double sq = m.dot(m);
        out.n.data[i] = sq > 1e-24 ? renormalize(m) : normals.n.data[i];
    }
    return out;
}

NormalMetrics three_dgm(const DepthMap& pred_depth, const DepthMap& gt_depth, const CameraIntrinsics& intr,
                        const GeoConfig& cfg, double tv_strength, int tv_iters) {
    if (!pred_depth.z.same_shape(gt_depth.z)) throw std::invalid_argument("three_dgm: shape mismatch");
    const NormalMap np = tv_denoise_normals(depth_to_normals(pred_depth, intr, cfg), tv_strength, tv_iters);
    const NormalMap ng = tv_denoise_normals(depth_to_normals(gt_depth, intr, cfg), tv_strength, tv_iters);
    return normal_metrics(np, ng);
}

}  // namespace geonet
