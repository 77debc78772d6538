#pragma once

#include <optional>
#include <vector>

#include "geonet/types.hpp"

namespace geonet {

/// Standard Canny edge extraction: Gaussian smoothing (sigma 1.4, 5x5),
/// Sobel gradients, non-maximum suppression along the quantized gradient
/// direction, then double-threshold hysteresis linking weak edges
/// 8-connected to strong ones. A pixel is weak when its magnitude exceeds
/// `low`, strong when it exceeds `high` (both strict).
Mask canny(const GrayImage& img, double low, double high);

double mean_intensity(const GrayImage& img);

/// Four residual channels in sweep order (L-to-R, R-to-L, T-to-B, B-to-T).
using ResidualMaps = std::array<Grid<double>, 4>;

/// Per-direction propagation weights:
/// w_k = clamp(base_w + edge * (1 - base_w) + residual_k, 0, 1).
/// Without a residual this yields base_w off-edge and exactly 1 on edges.
EdgeWeightMaps build_weight_maps(const Mask& edges, const ResidualMaps* residual, double base_w);

struct PropagateOptions {
    int t_prop = 3;
    bool recursive_within_pass = true;
    /// Treat the channels as 3-vectors and re-normalize after each full
    /// four-sweep step (used when propagating normal maps).
    bool renormalize_vec3 = false;
};

/// Four-direction recursive propagator. Each step cascades the sweeps
/// L-to-R, R-to-L, T-to-B, B-to-T; a sweep computes
/// S(i) = (1 - w) * predecessor + w * current, where the predecessor is the
/// already-updated value when recursive_within_pass is set and the pre-sweep
/// value otherwise. Pixels without a predecessor keep their value.
std::vector<Grid<double>> propagate(const std::vector<Grid<double>>& channels, const EdgeWeightMaps& w,
                                    const PropagateOptions& opts);

/// Blocks sweeps from reading across invalid pixels: the weight of any pixel
/// whose directional predecessor is invalid is raised to 1 in that channel.
EdgeWeightMaps block_at_invalid(EdgeWeightMaps w, const Mask& valid);

}  // namespace geonet
