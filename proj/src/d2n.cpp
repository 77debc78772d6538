#include "geonet/d2n.hpp"

#include <algorithm>
#include <cmath>

#include "geonet/camera.hpp"

namespace geonet {

namespace {

// Relative determinant floor below which the 3x3 system counts as singular.
constexpr double kSingularTol = 1e-12;

void gather_neighborhood(const PointCloud& cloud, int u, int v, int beta, double gamma, std::vector<Vec3>& out) {
    out.clear();
    const double zi = cloud.points.at(u, v).z;
    const int u0 = std::max(0, u - beta + 1), u1 = std::min(cloud.width() - 1, u + beta - 1);
    const int v0 = std::max(0, v - beta + 1), v1 = std::min(cloud.height() - 1, v + beta - 1);
    for (int vj = v0; vj <= v1; ++vj) {
        for (int uj = u0; uj <= u1; ++uj) {
            if (!cloud.valid.at(uj, vj)) continue;
            const Vec3& p = cloud.points.at(uj, vj);
            if (std::abs(zi - p.z) < gamma * zi) out.push_back(p);
        }
    }
}

}  // namespace

std::vector<Vec3> tangent_neighborhood(const PointCloud& cloud, int u, int v, int beta, double gamma) {
    if (!cloud.points.in_bounds(u, v) || !cloud.valid.at(u, v))
        throw std::invalid_argument("tangent_neighborhood: pixel not valid");
    std::vector<Vec3> pts;
    gather_neighborhood(cloud, u, v, beta, gamma, pts);
    return pts;
}

std::optional<Vec3> fit_normal_ls(std::span<const Vec3> points, double ridge_eps) {
    if (points.size() < 3) return std::nullopt;

    // A^T A (symmetric) and A^T 1, accumulated in gather order.
    double m00 = 0, m01 = 0, m02 = 0, m11 = 0, m12 = 0, m22 = 0;
    double b0 = 0, b1 = 0, b2 = 0;
    for (const Vec3& p : points) {
        m00 += p.x * p.x;
        m01 += p.x * p.y;
        m02 += p.x * p.z;
        m11 += p.y * p.y;
        m12 += p.y * p.z;
        m22 += p.z * p.z;
        b0 += p.x;
        b1 += p.y;
        b2 += p.z;
    }
    const double eps = ridge_eps * (m00 + m11 + m22) / 3.0;
    m00 += eps;
    m11 += eps;
    m22 += eps;

    const double c00 = m11 * m22 - m12 * m12;
    const double c01 = m02 * m12 - m01 * m22;
    const double c02 = m01 * m12 - m02 * m11;
    const double det = m00 * c00 + m01 * c01 + m02 * c02;
    const double scale = (m00 + m11 + m22) / 3.0;
    if (!(std::abs(det) > kSingularTol * scale * scale * scale)) return std::nullopt;

    const double c11 = m00 * m22 - m02 * m02;
    const double c12 = m01 * m02 - m00 * m12;
    const double c22 = m00 * m11 - m01 * m01;

    // (A^T A + eps I)^-1 A^T 1 via the adjugate.
    const double i00 = c00 / det, i01 = c01 / det, i02 = c02 / det;
    const double i11 = c11 / det, i12 = c12 / det, i22 = c22 / det;
    const Vec3 n{i00 * b0 + i01 * b1 + i02 * b2, i01 * b0 + i11 * b1 + i12 * b2, i02 * b0 + i12 * b1 + i22 * b2};

    const double len = n.norm();
    if (!(len > 0.0) || !std::isfinite(len)) return std::nullopt;
    return n / len;
}

Vec3 orient_to_camera(const Vec3& normal, const Vec3& point) {
    return normal.dot(point) <= 0.0 ? normal : -normal;
}

NormalMap depth_to_normals(const DepthMap& depth, const CameraIntrinsics& intr, const GeoConfig& cfg) {
    cfg.validate();
    const PointCloud cloud = unproject(depth, intr);

    NormalMap out(depth.width(), depth.height());
    std::vector<Vec3> pts;
    pts.reserve(static_cast<size_t>(2 * cfg.beta - 1) * (2 * cfg.beta - 1));
    for (int v = 0; v < depth.height(); ++v) {
        for (int u = 0; u < depth.width(); ++u) {
            if (!cloud.valid.at(u, v)) continue;
            gather_neighborhood(cloud, u, v, cfg.beta, cfg.gamma, pts);
            const auto n = fit_normal_ls(pts, cfg.ridge_eps);
            if (!n) continue;  // degenerate: leave invalid
            out.n.at(u, v) = orient_to_camera(*n, cloud.points.at(u, v));
            out.valid.at(u, v) = 1;
        }
    }
    return out;
}

}  // namespace geonet
