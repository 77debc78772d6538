#pragma once

#include <cstddef>

#include "geonet/types.hpp"

namespace geonet {

struct DepthMetrics {
    double rmse = 0.0;    // meters
    double log10 = 0.0;   // mean |log10 z - log10 z_gt|
    double rel = 0.0;     // mean |z - z_gt| / z_gt
    double delta1 = 0.0;  // fraction with max(z/z_gt, z_gt/z) < 1.25
    double delta2 = 0.0;  // ... < 1.25^2
    double delta3 = 0.0;  // ... < 1.25^3
    size_t count = 0;     // evaluated pixels
};

struct NormalMetrics {
    double mean = 0.0;      // degrees
    double median = 0.0;    // degrees (average of the two middle values for even counts)
    double rmse = 0.0;      // degrees
    double acc_1125 = 0.0;  // fraction strictly below 11.25 degrees
    double acc_225 = 0.0;
    double acc_30 = 0.0;
    size_t count = 0;
};

/// 2D depth metrics over pixels valid in both maps with positive depth on
/// both sides. Throws when no pixel qualifies.
DepthMetrics depth_metrics(const DepthMap& pred, const DepthMap& gt);

/// Angle-error metrics over jointly valid pixels; the per-pixel angle is
/// arccos(clamp(n . n_gt, -1, 1)) in degrees. Throws when no pixel qualifies.
NormalMetrics normal_metrics(const NormalMap& pred, const NormalMap& gt);

/// Per-channel total-variation denoising (dual fixed-point iterations on the
/// TV-regularized least-squares objective with fidelity weight 1/strength),
/// followed by re-normalization to unit vectors. strength = 0 is the identity.
NormalMap tv_denoise_normals(const NormalMap& normals, double strength, int iters);

/// 3D geometric metric: both depth maps are cast to normals with the same
/// tangent-plane fit, TV-denoised identically, and compared with
/// normal_metrics. Pixels degenerate on either side are excluded.
NormalMetrics three_dgm(const DepthMap& pred_depth, const DepthMap& gt_depth, const CameraIntrinsics& intr,
                        const GeoConfig& cfg, double tv_strength, int tv_iters);

}  // namespace geonet
