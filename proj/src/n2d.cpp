#include "geonet/n2d.hpp"

#include <algorithm>
#include <cmath>

namespace geonet {

namespace {
constexpr double kDenominatorTol = 1e-8;
}

std::vector<PixelIndex> coplanar_neighborhood(const NormalMap& normals, int u, int v, double alpha, int beta) {
    if (!normals.n.in_bounds(u, v) || !normals.valid.at(u, v))
        throw std::invalid_argument("coplanar_neighborhood: pixel not valid");
    const Vec3 ni = normals.n.at(u, v);
    const int u0 = std::max(0, u - beta + 1), u1 = std::min(normals.width() - 1, u + beta - 1);
    const int v0 = std::max(0, v - beta + 1), v1 = std::min(normals.height() - 1, v + beta - 1);
    std::vector<PixelIndex> out;
    for (int vj = v0; vj <= v1; ++vj)
        for (int uj = u0; uj <= u1; ++uj)
            if (normals.valid.at(uj, vj) && normals.n.at(uj, vj).dot(ni) > alpha) out.push_back({uj, vj});
    return out;
}

std::optional<double> vote_depth(PixelIndex j, PixelIndex i, const DepthMap& depth, const NormalMap& normals,
                                 const CameraIntrinsics& intr) {
    const double zj = depth.z.at(j.u, j.v);
    const Vec3 nj = normals.n.at(j.u, j.v);
    const Vec3 pj{(j.u - intr.cx) * zj / intr.fx, (j.v - intr.cy) * zj / intr.fy, zj};

    const double num = nj.x * pj.x + nj.y * pj.y + nj.z * pj.z;
    const double den = (i.u - intr.cx) * nj.x / intr.fx + (i.v - intr.cy) * nj.y / intr.fy + nj.z;
    if (std::abs(den) < kDenominatorTol) return std::nullopt;
    const double z = num / den;
    if (!(z > 0.0) || !std::isfinite(z)) return std::nullopt;
    return z;
}

DepthMap normals_to_depth(const DepthMap& depth_init, const NormalMap& normals, const CameraIntrinsics& intr,
                          const GeoConfig& cfg) {
    cfg.validate();
    intr.validate();
    if (!depth_init.z.same_shape(normals.n)) throw std::invalid_argument("normals_to_depth: shape mismatch");
    if (depth_init.valid != normals.valid) throw std::invalid_argument("normals_to_depth: masks differ");

    const int W = depth_init.width(), H = depth_init.height();
    DepthMap out = depth_init;
    for (int v = 0; v < H; ++v) {
        for (int u = 0; u < W; ++u) {
            if (!depth_init.valid.at(u, v)) continue;
            const Vec3 ni = normals.n.at(u, v);
            const int u0 = std::max(0, u - cfg.beta + 1), u1 = std::min(W - 1, u + cfg.beta - 1);
            const int v0 = std::max(0, v - cfg.beta + 1), v1 = std::min(H - 1, v + cfg.beta - 1);
            double num = 0.0, den = 0.0;
            for (int vj = v0; vj <= v1; ++vj) {
                for (int uj = u0; uj <= u1; ++uj) {
                    if (!depth_init.valid.at(uj, vj)) continue;
                    const double k = normals.n.at(uj, vj).dot(ni);
                    if (!(k > cfg.alpha)) continue;
                    const auto vote = vote_depth({uj, vj}, {u, v}, depth_init, normals, intr);
                    if (!vote) continue;
                    num += k * *vote;
                    den += k;
                }
            }
            if (den > 0.0) out.z.at(u, v) = num / den;  // zero accepted votes: keep initial
        }
    }
    return out;
}

}  // namespace geonet
