#pragma once

#include <array>
#include <ostream>

#include "geonet/types.hpp"

namespace geonet {

/// Casts a depth map into a 3D point cloud under the pinhole model:
/// x = (u - cx) * z / fx, y = (v - cy) * z / fy. Pixel coordinates are
/// zero-based (column, row) at pixel centers. Invalid pixels carry no point.
PointCloud unproject(const DepthMap& depth, const CameraIntrinsics& intr);

using RgbGrid = Grid<std::array<uint8_t, 3>>;

/// Writes the valid points as an ASCII PLY vertex list (properties x y z,
/// plus red green blue when colors are supplied). Vertex order is row-major
/// scan order over valid pixels.
void export_ply(const PointCloud& cloud, const RgbGrid* colors, std::ostream& out);

}  // namespace geonet
