#pragma once

#include <optional>

#include "geonet/edge_refine.hpp"
#include "geonet/types.hpp"

namespace geonet {

/// Per-pixel convex blend (1 - w) * a + w * b over valid pixels. Masks must
/// agree. w = 0 and w = 1 return exact copies. The normal overload
/// re-normalizes blended vectors.
DepthMap blend(const DepthMap& a, const DepthMap& b, double w);
NormalMap blend(const NormalMap& a, const NormalMap& b, double w);

struct GeoNetResult {
    DepthMap depth;
    NormalMap normals;
};

/// Builds the propagation weight maps for an image under the config's Canny
/// thresholds (defaults: per-image mean and 2x mean) and optional residual.
EdgeWeightMaps make_weight_maps(const GrayImage& image, const GeoConfig& cfg, const ResidualMaps* residual = nullptr);

/// One refinement step: geometric cross-refinement of both maps, blending
/// with the inputs, then edge-aware propagation. Weight maps are built once
/// from the image and shared by both propagations. Pixels where the
/// depth-to-normal fit is degenerate fall back to the input normal so masks
/// are preserved end to end; propagation never crosses invalid pixels.
GeoNetResult geonet_step(const DepthMap& depth, const NormalMap& normals, const GrayImage& image,
                         const CameraIntrinsics& intr, const GeoConfig& cfg, const ResidualMaps* residual = nullptr);

/// Applies geonet_step cfg.iterations times, feeding each output into the
/// next step. Weight maps are computed once (the image does not change).
GeoNetResult geonet_iterate(const DepthMap& depth, const NormalMap& normals, const GrayImage& image,
                            const CameraIntrinsics& intr, const GeoConfig& cfg,
                            const ResidualMaps* residual = nullptr);

/// Single step against prebuilt weight maps (used by the iteration loop).
GeoNetResult geonet_step_with_weights(const DepthMap& depth, const NormalMap& normals, const EdgeWeightMaps& weights,
                                      const CameraIntrinsics& intr, const GeoConfig& cfg);

}  // namespace geonet
