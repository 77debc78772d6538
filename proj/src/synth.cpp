#include "geonet/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "geonet/d2n.hpp"

namespace geonet {

namespace {

// Unnormalized viewing ray of pixel (u, v): (x/z, y/z, 1).
Vec3 pixel_ray(int u, int v, const CameraIntrinsics& intr) {
    return {(u - intr.cx) / intr.fx, (v - intr.cy) / intr.fy, 1.0};
}

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

Scene generate(const SceneSpec& spec) {
    spec.intrinsics.validate();
    require(spec.width > 0 && spec.height > 0, "scene: size must be positive");

    Scene scene;
    scene.depth = DepthMap(spec.width, spec.height);
    scene.normals = NormalMap(spec.width, spec.height);

    auto set_pixel = [&](int u, int v, double z, const Vec3& n) {
        if (!(z > 0.0) || !std::isfinite(z)) return;
        scene.depth.z.at(u, v) = z;
        scene.depth.valid.at(u, v) = 1;
        scene.normals.n.at(u, v) = orient_to_camera(n, pixel_ray(u, v, spec.intrinsics) * z);
        scene.normals.valid.at(u, v) = 1;
    };

    switch (spec.kind) {
        case SceneKind::Plane: {
            require(spec.plane_offset != 0.0, "scene: plane offset must be nonzero");
            const Vec3 n = spec.plane_normal.normalized();
            for (int v = 0; v < spec.height; ++v)
                for (int u = 0; u < spec.width; ++u) {
                    const double denom = n.dot(pixel_ray(u, v, spec.intrinsics));
                    if (denom == 0.0) continue;
                    set_pixel(u, v, spec.plane_offset / denom, n);
                }
            break;
        }
        case SceneKind::Sphere: {
            require(spec.sphere_radius > 0.0, "scene: sphere radius must be positive");
            const Vec3 c = spec.sphere_center;
            for (int v = 0; v < spec.height; ++v)
                for (int u = 0; u < spec.width; ++u) {
                    const Vec3 d = pixel_ray(u, v, spec.intrinsics);
                    const double a = d.dot(d);
                    const double b = d.dot(c);
                    const double disc = b * b - a * (c.dot(c) - spec.sphere_radius * spec.sphere_radius);
                    if (disc < 0.0) continue;
                    const double root = std::sqrt(disc);
                    double t = (b - root) / a;           // front surface
                    if (!(t > 0.0)) t = (b + root) / a;  // camera inside: back surface
                    if (!(t > 0.0)) continue;
                    const Vec3 p = d * t;
                    set_pixel(u, v, t, (p - c) / spec.sphere_radius);
                }
            break;
        }
        case SceneKind::Step: {
            require(spec.near_z > 0.0 && spec.far_z > 0.0, "scene: step depths must be positive");
            require(spec.split_col >= 0 && spec.split_col <= spec.width, "scene: split column out of range");
            for (int v = 0; v < spec.height; ++v)
                for (int u = 0; u < spec.width; ++u)
                    set_pixel(u, v, u < spec.split_col ? spec.near_z : spec.far_z, Vec3{0.0, 0.0, -1.0});
            break;
        }
        case SceneKind::Wedge: {
            require(spec.crease_z > 0.0, "scene: crease depth must be positive");
            require(spec.crease_col >= 0 && spec.crease_col < spec.width, "scene: crease column out of range");
            require(spec.tilt_deg > 0.0 && spec.tilt_deg < 90.0, "scene: tilt must be in (0, 90) degrees");
            const double t = spec.tilt_deg * std::numbers::pi / 180.0;
            const Vec3 nl = Vec3{std::sin(t), 0.0, -std::cos(t)};
            const Vec3 nr = Vec3{-std::sin(t), 0.0, -std::cos(t)};
            // Both planes contain the vertical crease line at crease_col.
            const Vec3 p0 = pixel_ray(spec.crease_col, 0, spec.intrinsics) * spec.crease_z;
            const double dl = nl.x * p0.x + nl.z * p0.z;
            const double dr = nr.x * p0.x + nr.z * p0.z;
            for (int v = 0; v < spec.height; ++v)
                for (int u = 0; u < spec.width; ++u) {
                    const Vec3& n = u < spec.crease_col ? nl : nr;
                    const double d = u < spec.crease_col ? dl : dr;
                    const double denom = n.dot(pixel_ray(u, v, spec.intrinsics));
                    if (denom == 0.0) continue;
                    set_pixel(u, v, d / denom, n);
                }
            break;
        }
    }

    bool any = false;
    for (uint8_t m : scene.depth.valid.data) any = any || m;
    if (!any) throw std::invalid_argument("scene: no visible surface");
    return scene;
}

namespace {

// Portable Gaussian draw: two 53-bit uniforms from mt19937_64 through
// Box-Muller. std::normal_distribution is implementation-defined, this is not.
double next_gaussian(std::mt19937_64& rng) {
    const double u1 = (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;          // [0, 1)
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

DepthMap add_noise(const DepthMap& depth, double sigma_rel, uint64_t seed) {
    if (!(sigma_rel >= 0.0)) throw std::invalid_argument("add_noise: sigma_rel must be >= 0");
    if (sigma_rel == 0.0) return depth;

    std::mt19937_64 rng(seed);
    DepthMap out = depth;
    for (size_t i = 0; i < out.z.size(); ++i) {
        const double e = next_gaussian(rng);  // drawn per pixel, valid or not
        if (!out.valid.data[i]) continue;
        out.z.data[i] = std::max(out.z.data[i] * (1.0 + sigma_rel * e), 1e-12);
    }
    return out;
}

GrayImage shade(const DepthMap& depth, const NormalMap& normals) {
    if (!depth.z.same_shape(normals.n)) throw std::invalid_argument("shade: shape mismatch");
    GrayImage img(depth.width(), depth.height(), 0.0);

    double z_ref = 0.0;
    for (size_t i = 0; i < depth.z.size(); ++i)
        if (depth.valid.data[i] && (z_ref == 0.0 || depth.z.data[i] < z_ref)) z_ref = depth.z.data[i];
    if (z_ref == 0.0) return img;

    for (int v = 0; v < depth.height(); ++v)
        for (int u = 0; u < depth.width(); ++u) {
            if (!depth.valid.at(u, v) || !normals.valid.at(u, v)) continue;
            const double z = depth.z.at(u, v);
            // Headlight shading with inverse-square falloff.
            const Vec3 n = normals.n.at(u, v);
            const double lambert = std::max(0.0, -n.z);
            const double fall = (z_ref / z) * (z_ref / z);
            img.intensity.at(u, v) = std::clamp(255.0 * lambert * fall, 0.0, 255.0);
        }
    return img;
}

}  // namespace geonet
