#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace geonet {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(x * x + y * y + z * z); }

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    bool operator==(const Vec3&) const = default;

    Vec3 normalized() const {
        const double n = norm();
        return {x / n, y / n, z / n};
    }
};

/// Re-normalizes a near-unit vector. Vectors already unit within 1e-12 are
/// returned untouched so that identity transforms stay bit-exact.
inline Vec3 renormalize(const Vec3& v) {
    const double sq = v.dot(v);
    if (std::abs(sq - 1.0) <= 1e-12) return v;
    return v / std::sqrt(sq);
}

/// Row-major H x W grid. `u` is the column, `v` the row, matching the
/// pixel-coordinate convention used throughout (zero-based, pixel centers).
template <typename T>
struct Grid {
    int width = 0;
    int height = 0;
    std::vector<T> data;

    Grid() = default;
    Grid(int w, int h, T fill = T{}) : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {}

    T& at(int u, int v) { return data[static_cast<size_t>(v) * width + u]; }
    const T& at(int u, int v) const { return data[static_cast<size_t>(v) * width + u]; }

    bool in_bounds(int u, int v) const { return u >= 0 && u < width && v >= 0 && v < height; }

    template <typename U>
    bool same_shape(const Grid<U>& o) const {
        return width == o.width && height == o.height;
    }
    size_t size() const { return data.size(); }
    bool empty() const { return data.empty(); }

    bool operator==(const Grid&) const = default;
};

using Mask = Grid<uint8_t>;

struct CameraIntrinsics {
    double fx = 0.0;  // focal length, pixels
    double fy = 0.0;
    double cx = 0.0;  // principal point, pixels
    double cy = 0.0;

    void validate() const {
        if (!(fx > 0.0) || !(fy > 0.0)) throw std::invalid_argument("intrinsics: fx and fy must be positive");
        if (!std::isfinite(fx) || !std::isfinite(fy) || !std::isfinite(cx) || !std::isfinite(cy))
            throw std::invalid_argument("intrinsics: values must be finite");
    }
};

/// Per-pixel depth along the optical axis, meters. Valid pixels carry z > 0;
/// invalid pixels are excluded from every computation.
struct DepthMap {
    Grid<double> z;
    Mask valid;

    DepthMap() = default;
    DepthMap(int w, int h) : z(w, h, 0.0), valid(w, h, 0) {}

    int width() const { return z.width; }
    int height() const { return z.height; }
};

/// Per-pixel unit surface normals. Valid normals are unit length within 1e-6
/// and face the camera (n . p <= 0 for the pixel's 3D point).
struct NormalMap {
    Grid<Vec3> n;
    Mask valid;

    NormalMap() = default;
    NormalMap(int w, int h) : n(w, h, Vec3{}), valid(w, h, 0) {}

    int width() const { return n.width; }
    int height() const { return n.height; }
};

/// Per-pixel 3D points on the image lattice. Mask matches the source depth map.
struct PointCloud {
    Grid<Vec3> points;
    Mask valid;

    PointCloud() = default;
    PointCloud(int w, int h) : points(w, h, Vec3{}), valid(w, h, 0) {}

    int width() const { return points.width; }
    int height() const { return points.height; }
};

/// Grayscale image with intensities in [0, 255].
struct GrayImage {
    Grid<double> intensity;

    GrayImage() = default;
    GrayImage(int w, int h, double fill = 0.0) : intensity(w, h, fill) {}

    int width() const { return intensity.width; }
    int height() const { return intensity.height; }
};

/// H x W x 4 propagation weights in [0, 1]. Channel order: L-to-R, R-to-L,
/// T-to-B, B-to-T.
struct EdgeWeightMaps {
    std::array<Grid<double>, 4> w;

    EdgeWeightMaps() = default;
    EdgeWeightMaps(int width, int height, double fill = 0.0) {
        for (auto& g : w) g = Grid<double>(width, height, fill);
    }

    int width() const { return w[0].width; }
    int height() const { return w[0].height; }
};

/// All tunables of the geometric pipeline.
struct GeoConfig {
    double alpha = 0.95;     // cosine-similarity gate for coplanar neighborhoods
    int beta = 9;            // neighborhood half-extent, pixels (strict |du| < beta)
    double gamma = 0.05;     // relative-depth gate for tangent neighborhoods
    int t_prop = 3;          // recursive-propagation repetitions per refinement
    int iterations = 2;      // outer pipeline repetitions
    double ridge_eps = 1e-8; // least-squares regularizer scale
    double blend_w = 0.5;    // weight of the geometric estimate in the blend
    double base_w = 0.7;     // off-edge propagation weight
    std::optional<double> canny_low;   // absolute gradient thresholds; default:
    std::optional<double> canny_high;  // per-image mean and 2x mean
    bool recursive_within_pass = true; // sweep uses already-updated predecessor
    double tv_strength = 0.1;          // TV-denoise fidelity (0 = identity)
    int tv_iters = 30;

    void validate() const {
        if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("config: alpha must be in (0,1)");
        if (beta < 1) throw std::invalid_argument("config: beta must be >= 1");
        if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("config: gamma must be in (0,1)");
        if (t_prop < 1) throw std::invalid_argument("config: t_prop must be >= 1");
        if (iterations < 1) throw std::invalid_argument("config: iterations must be >= 1");
        if (!(ridge_eps >= 0.0)) throw std::invalid_argument("config: ridge_eps must be >= 0");
        if (!(blend_w >= 0.0 && blend_w <= 1.0)) throw std::invalid_argument("config: blend_w must be in [0,1]");
        if (!(base_w >= 0.0 && base_w <= 1.0)) throw std::invalid_argument("config: base_w must be in [0,1]");
        if (canny_low && canny_high && *canny_low > *canny_high)
            throw std::invalid_argument("config: canny_low must be <= canny_high");
        if (!(tv_strength >= 0.0)) throw std::invalid_argument("config: tv_strength must be >= 0");
        if (tv_iters < 1) throw std::invalid_argument("config: tv_iters must be >= 1");
    }
};

}  // namespace geonet
