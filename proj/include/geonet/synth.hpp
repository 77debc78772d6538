#pragma once

#include <cstdint>

#include "geonet/types.hpp"

namespace geonet {

enum class SceneKind { Plane, Sphere, Step, Wedge };

/// Parametric test scene with analytic ground truth. Only the parameter
/// block matching `kind` is read.
struct SceneSpec {
    SceneKind kind = SceneKind::Plane;
    int width = 0;
    int height = 0;
    CameraIntrinsics intrinsics;

    // plane: n . p = offset
    Vec3 plane_normal{0.0, 0.0, -1.0};
    double plane_offset = 0.0;

    // sphere
    Vec3 sphere_center{0.0, 0.0, 0.0};
    double sphere_radius = 0.0;

    // step: z = near_z left of split_col, far_z from split_col on
    double near_z = 0.0;
    double far_z = 0.0;
    int split_col = 0;

    // wedge: two planes meeting at a vertical crease, tilted +-tilt_deg
    // about the vertical axis
    int crease_col = 0;
    double crease_z = 0.0;
    double tilt_deg = 0.0;

    double noise_sigma_rel = 0.0;
    uint64_t seed = 0;
};

struct Scene {
    DepthMap depth;
    NormalMap normals;
};

/// Exact ray-surface intersection depth plus analytic camera-facing normals.
/// Pixels whose ray misses the surface are invalid; throws when no pixel
/// sees the surface. Noise fields of the spec are ignored here (see add_noise).
Scene generate(const SceneSpec& spec);

/// Multiplicative depth noise z' = z * (1 + e), e ~ Normal(0, sigma_rel),
/// clamped positive. Draws come from a seeded xoshiro-free portable stream
/// (std::mt19937_64 + Box-Muller) so vectors match across platforms.
DepthMap add_noise(const DepthMap& depth, double sigma_rel, uint64_t seed);

/// Simple shaded grayscale rendering (Lambertian toward the camera with
/// inverse-square falloff, normalized to the nearest valid depth) used to
/// exercise the edge-extraction path. Invalid pixels render black.
GrayImage shade(const DepthMap& depth, const NormalMap& normals);

}  // namespace geonet
