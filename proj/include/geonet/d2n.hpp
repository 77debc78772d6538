#pragma once

#include <optional>
#include <span>
#include <vector>

#include "geonet/types.hpp"

namespace geonet {

/// Collects the 3D points of the tangent neighborhood of pixel (u, v):
/// every valid point j (including i itself) with |u_i - u_j| < beta,
/// |v_i - v_j| < beta and |z_i - z_j| < gamma * z_i. Rows are scanned
/// top-to-bottom, columns left-to-right.
std::vector<Vec3> tangent_neighborhood(const PointCloud& cloud, int u, int v, int beta, double gamma);

/// Least-squares tangent-plane normal of a point set: solves
/// (A^T A + eps I)^-1 A^T 1 with eps = ridge_eps * trace(A^T A) / 3 and
/// normalizes the result. Returns nullopt for fewer than 3 points or a
/// numerically singular system.
std::optional<Vec3> fit_normal_ls(std::span<const Vec3> points, double ridge_eps);

/// Flips the normal so it faces the camera: returns n if n . p <= 0, else -n.
Vec3 orient_to_camera(const Vec3& normal, const Vec3& point);

/// Per-pixel tangent-plane fit over the gated neighborhood. Degenerate pixels
/// are marked invalid in the output mask.
NormalMap depth_to_normals(const DepthMap& depth, const CameraIntrinsics& intr, const GeoConfig& cfg);

}  // namespace geonet
