#pragma once

// Shared fixtures and independent oracles for the test suites. The oracles
// deliberately re-derive results through routes separate from the library
// (Eigen decompositions, literal equation transcriptions) so agreement is
// meaningful.

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "geonet/synth.hpp"
#include "geonet/types.hpp"

namespace testutil {

using geonet::Vec3;

// Portable uniform double in [lo, hi) from the fixed-algorithm engine.
inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
}

// Rounds through float32. The volatile keeps the optimizer from folding the
// narrow-widen pair away (gcc elides it in vectorized aggregate stores).
inline double quantize_f32(double v) {
    volatile float f = static_cast<float>(v);
    return static_cast<double>(f);
}

inline double angle_deg(const Vec3& a, const Vec3& b) {
    const double d = std::clamp(a.dot(b), -1.0, 1.0);
    return std::acos(d) * 180.0 / std::numbers::pi;
}

// Angle treating opposite signs as equal (plane fits are sign-free).
inline double angle_deg_signfree(const Vec3& a, const Vec3& b) {
    return std::min(angle_deg(a, b), angle_deg(a, -b));
}

inline double max_component_diff_signfree(const Vec3& a, const Vec3& b) {
    auto diff = [](const Vec3& p, const Vec3& q) {
        return std::max({std::abs(p.x - q.x), std::abs(p.y - q.y), std::abs(p.z - q.z)});
    };
    return std::min(diff(a, b), diff(a, -b));
}

// Plane-fit oracle: eigen-decomposition of the centered covariance (the SVD
// plane fit). Returns a unit normal with unspecified sign.
inline Vec3 svd_plane_normal(const std::vector<Vec3>& pts) {
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (const Vec3& p : pts) mean += Eigen::Vector3d(p.x, p.y, p.z);
    mean /= static_cast<double>(pts.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const Vec3& p : pts) {
        const Eigen::Vector3d d = Eigen::Vector3d(p.x, p.y, p.z) - mean;
        cov += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
    const Eigen::Vector3d n = es.eigenvectors().col(0);
    return {n.x(), n.y(), n.z()};
}

// Unregularized least-squares route through full-pivoting LU on the normal
// equations (A^T A) n = A^T 1.
inline std::optional<Vec3> lu_plane_normal(const std::vector<Vec3>& pts) {
    Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
    Eigen::Vector3d b = Eigen::Vector3d::Zero();
    for (const Vec3& p : pts) {
        const Eigen::Vector3d v(p.x, p.y, p.z);
        m += v * v.transpose();
        b += v;
    }
    Eigen::FullPivLU<Eigen::Matrix3d> lu(m);
    if (!lu.isInvertible()) return std::nullopt;
    const Eigen::Vector3d n = lu.solve(b).normalized();
    return Vec3{n.x(), n.y(), n.z()};
}

// Literal transcription of the closed-form fit: build A and b, form the
// normal matrix entry by entry, invert by adjugate, multiply, normalize.
inline std::optional<Vec3> naive_fit_eq4(const std::vector<Vec3>& pts, double ridge_eps) {
    const size_t K = pts.size();
    if (K < 3) return std::nullopt;
    std::vector<std::array<double, 3>> A(K);
    for (size_t k = 0; k < K; ++k) A[k] = {pts[k].x, pts[k].y, pts[k].z};

    double M[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    double b[3] = {0, 0, 0};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            for (size_t k = 0; k < K; ++k) M[r][c] += A[k][r] * A[k][c];
    for (int r = 0; r < 3; ++r)
        for (size_t k = 0; k < K; ++k) b[r] += A[k][r];

    const double eps = ridge_eps * (M[0][0] + M[1][1] + M[2][2]) / 3.0;
    M[0][0] += eps;
    M[1][1] += eps;
    M[2][2] += eps;

    const double C00 = M[1][1] * M[2][2] - M[1][2] * M[2][1];
    const double C01 = M[0][2] * M[2][1] - M[0][1] * M[2][2];
    const double C02 = M[0][1] * M[1][2] - M[0][2] * M[1][1];
    const double det = M[0][0] * C00 + M[0][1] * C01 + M[0][2] * C02;
    const double scale = (M[0][0] + M[1][1] + M[2][2]) / 3.0;
    if (!(std::abs(det) > 1e-12 * scale * scale * scale)) return std::nullopt;
    const double C11 = M[0][0] * M[2][2] - M[0][2] * M[2][0];
    const double C12 = M[0][1] * M[0][2] - M[0][0] * M[1][2];
    const double C22 = M[0][0] * M[1][1] - M[0][1] * M[1][0];

    const double inv[3][3] = {{C00 / det, C01 / det, C02 / det},
                              {C01 / det, C11 / det, C12 / det},
                              {C02 / det, C12 / det, C22 / det}};
    Vec3 n{inv[0][0] * b[0] + inv[0][1] * b[1] + inv[0][2] * b[2],
           inv[1][0] * b[0] + inv[1][1] * b[1] + inv[1][2] * b[2],
           inv[2][0] * b[0] + inv[2][1] * b[1] + inv[2][2] * b[2]};
    const double len = std::sqrt(n.x * n.x + n.y * n.y + n.z * n.z);
    if (!(len > 0.0) || !std::isfinite(len)) return std::nullopt;
    return n / len;
}

// Literal per-neighbor depth vote.
inline std::optional<double> naive_vote_eq6(int uj, int vj, int ui, int vi, const geonet::DepthMap& depth,
                                            const geonet::NormalMap& normals, const geonet::CameraIntrinsics& intr) {
    const double zj = depth.z.at(uj, vj);
    const Vec3 nj = normals.n.at(uj, vj);
    const double xj = (uj - intr.cx) * zj / intr.fx;
    const double yj = (vj - intr.cy) * zj / intr.fy;
    const double num = nj.x * xj + nj.y * yj + nj.z * zj;
    const double den = (ui - intr.cx) * nj.x / intr.fx + (vi - intr.cy) * nj.y / intr.fy + nj.z;
    if (std::abs(den) < 1e-8) return std::nullopt;
    const double z = num / den;
    if (!(z > 0.0) || !std::isfinite(z)) return std::nullopt;
    return z;
}

// Literal kernel-regression aggregation over the coplanar window.
inline geonet::DepthMap naive_aggregate_eq7(const geonet::DepthMap& depth, const geonet::NormalMap& normals,
                                            const geonet::CameraIntrinsics& intr, const geonet::GeoConfig& cfg) {
    geonet::DepthMap out = depth;
    const int W = depth.width(), H = depth.height();
    for (int vi = 0; vi < H; ++vi) {
        for (int ui = 0; ui < W; ++ui) {
            if (!depth.valid.at(ui, vi)) continue;
            const Vec3 ni = normals.n.at(ui, vi);
            double num = 0.0, den = 0.0;
            for (int vj = std::max(0, vi - cfg.beta + 1); vj <= std::min(H - 1, vi + cfg.beta - 1); ++vj) {
                for (int uj = std::max(0, ui - cfg.beta + 1); uj <= std::min(W - 1, ui + cfg.beta - 1); ++uj) {
                    if (!depth.valid.at(uj, vj)) continue;
                    const double k = normals.n.at(uj, vj).x * ni.x + normals.n.at(uj, vj).y * ni.y +
                                     normals.n.at(uj, vj).z * ni.z;
                    if (!(k > cfg.alpha)) continue;
                    const auto vote = naive_vote_eq6(uj, vj, ui, vi, depth, normals, intr);
                    if (!vote) continue;
                    num += k * *vote;
                    den += k;
                }
            }
            if (den > 0.0) out.z.at(ui, vi) = num / den;
        }
    }
    return out;
}

// Literal four-sweep propagator over one channel.
inline geonet::Grid<double> naive_propagate(const geonet::Grid<double>& x, const geonet::EdgeWeightMaps& w,
                                            int t_prop, bool recursive) {
    geonet::Grid<double> cur = x;
    const int W = x.width, H = x.height;
    for (int t = 0; t < t_prop; ++t) {
        geonet::Grid<double> s = cur;
        for (int v = 0; v < H; ++v)
            for (int u = 1; u < W; ++u) {
                const double wi = w.w[0].at(u, v);
                const double pred = recursive ? s.at(u - 1, v) : cur.at(u - 1, v);
                s.at(u, v) = (1.0 - wi) * pred + wi * cur.at(u, v);
            }
        geonet::Grid<double> s2 = s;
        for (int v = 0; v < H; ++v)
            for (int u = W - 2; u >= 0; --u) {
                const double wi = w.w[1].at(u, v);
                const double pred = recursive ? s2.at(u + 1, v) : s.at(u + 1, v);
                s2.at(u, v) = (1.0 - wi) * pred + wi * s2.at(u, v);
            }
        geonet::Grid<double> s3 = s2;
        for (int v = 1; v < H; ++v)
            for (int u = 0; u < W; ++u) {
                const double wi = w.w[2].at(u, v);
                const double pred = recursive ? s3.at(u, v - 1) : s2.at(u, v - 1);
                s3.at(u, v) = (1.0 - wi) * pred + wi * s3.at(u, v);
            }
        geonet::Grid<double> s4 = s3;
        for (int v = H - 2; v >= 0; --v)
            for (int u = 0; u < W; ++u) {
                const double wi = w.w[3].at(u, v);
                const double pred = recursive ? s4.at(u, v + 1) : s3.at(u, v + 1);
                s4.at(u, v) = (1.0 - wi) * pred + wi * s4.at(u, v);
            }
        cur = s4;
    }
    return cur;
}

// Random slanted plane covering the full image, tilt bounded so every pixel
// intersects in front of the camera.
inline geonet::SceneSpec random_plane_spec(std::mt19937_64& rng, int width, int height) {
    geonet::SceneSpec spec;
    spec.kind = geonet::SceneKind::Plane;
    spec.width = width;
    spec.height = height;
    spec.intrinsics = {0.8 * width, 0.8 * width, width / 2.0, height / 2.0};
    const Vec3 n{uniform(rng, -0.4, 0.4), uniform(rng, -0.4, 0.4), -1.0};
    spec.plane_normal = n.normalized();
    spec.plane_offset = -uniform(rng, 1.5, 3.5);
    return spec;
}

inline geonet::SceneSpec sphere_spec(int width, int height) {
    geonet::SceneSpec spec;
    spec.kind = geonet::SceneKind::Sphere;
    spec.width = width;
    spec.height = height;
    spec.intrinsics = {0.8 * width, 0.8 * width, width / 2.0, height / 2.0};
    spec.sphere_center = {0.1, -0.15, 3.0};
    spec.sphere_radius = 1.2;
    return spec;
}

}  // namespace testutil
