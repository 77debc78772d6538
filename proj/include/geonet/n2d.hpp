#pragma once

#include <optional>
#include <vector>

#include "geonet/types.hpp"

namespace geonet {

struct PixelIndex {
    int u = 0;
    int v = 0;
    bool operator==(const PixelIndex&) const = default;
};

/// Pixels j near i whose normals are approximately coplanar with n_i:
/// n_j . n_i > alpha, |u_i - u_j| < beta, |v_i - v_j| < beta. Includes i.
std::vector<PixelIndex> coplanar_neighborhood(const NormalMap& normals, int u, int v, double alpha, int beta);

/// Depth vote for pixel i from the tangent plane of neighbor j:
/// z'_ji = (n_j . p_j) / ((u_i - cx) n_jx / fx + (v_i - cy) n_jy / fy + n_jz).
/// Returns nullopt when |denominator| < 1e-8 or the vote is not positive.
std::optional<double> vote_depth(PixelIndex j, PixelIndex i, const DepthMap& depth, const NormalMap& normals,
                                 const CameraIntrinsics& intr);

/// Kernel regression over accepted votes with the linear kernel
/// K(n_j, n_i) = n_j . n_i. Pixels with zero accepted votes keep their
/// initial depth; the validity mask is preserved.
DepthMap normals_to_depth(const DepthMap& depth_init, const NormalMap& normals, const CameraIntrinsics& intr,
                          const GeoConfig& cfg);

}  // namespace geonet
