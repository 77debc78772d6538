#include "geonet/edge_refine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace geonet {

namespace {

// Normalized 5-tap Gaussian, sigma 1.4.
std::array<double, 5> gaussian5() {
    std::array<double, 5> k{};
    double sum = 0.0;
    for (int d = -2; d <= 2; ++d) {
        k[d + 2] = std::exp(-(d * d) / (2.0 * 1.4 * 1.4));
        sum += k[d + 2];
    }
    for (double& v : k) v /= sum;
    return k;
}

int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

Grid<double> smooth(const Grid<double>& img) {
    const auto k = gaussian5();
    const int W = img.width, H = img.height;
    Grid<double> tmp(W, H), out(W, H);
    for (int v = 0; v < H; ++v)
        for (int u = 0; u < W; ++u) {
            double s = 0.0;
            for (int d = -2; d <= 2; ++d) s += k[d + 2] * img.at(clampi(u + d, 0, W - 1), v);
            tmp.at(u, v) = s;
        }
    for (int v = 0; v < H; ++v)
        for (int u = 0; u < W; ++u) {
            double s = 0.0;
            for (int d = -2; d <= 2; ++d) s += k[d + 2] * tmp.at(u, clampi(v + d, 0, H - 1));
            out.at(u, v) = s;
        }
    return out;
}

}  // namespace

double mean_intensity(const GrayImage& img) {
    if (img.intensity.empty()) throw std::invalid_argument("mean_intensity: empty image");
    double sum = 0.0;
    for (double v : img.intensity.data) sum += v;
    return sum / static_cast<double>(img.intensity.size());
}

Mask canny(const GrayImage& img, double low, double high) {
    if (img.width() <= 0 || img.height() <= 0) throw std::invalid_argument("canny: empty image");
    if (low > high) throw std::invalid_argument("canny: low threshold exceeds high");
    const int W = img.width(), H = img.height();

    const Grid<double> sm = smooth(img.intensity);

    Grid<double> mag(W, H, 0.0);
    Grid<double> gxg(W, H, 0.0), gyg(W, H, 0.0);
    auto S = [&](int u, int v) { return sm.at(clampi(u, 0, W - 1), clampi(v, 0, H - 1)); };
    for (int v = 0; v < H; ++v) {
        for (int u = 0; u < W; ++u) {
            const double gx = S(u + 1, v - 1) - S(u - 1, v - 1) + 2.0 * (S(u + 1, v) - S(u - 1, v)) +
                              S(u + 1, v + 1) - S(u - 1, v + 1);
            const double gy = S(u - 1, v + 1) - S(u - 1, v - 1) + 2.0 * (S(u, v + 1) - S(u, v - 1)) +
                              S(u + 1, v + 1) - S(u + 1, v - 1);
            gxg.at(u, v) = gx;
            gyg.at(u, v) = gy;
            mag.at(u, v) = std::sqrt(gx * gx + gy * gy);
        }
    }

    // Non-maximum suppression along the quantized gradient direction. Ties on
    // the first neighbor are suppressed so plateau edges come out single-pixel.
    Grid<uint8_t> keep(W, H, 0);
    auto M = [&](int u, int v) { return mag.in_bounds(u, v) ? mag.at(u, v) : 0.0; };
    for (int v = 0; v < H; ++v) {
        for (int u = 0; u < W; ++u) {
            const double m = mag.at(u, v);
            if (m <= 0.0) continue;
            double ang = std::atan2(gyg.at(u, v), gxg.at(u, v)) * 180.0 / std::numbers::pi;
            if (ang < 0.0) ang += 180.0;
            double n1, n2;
            if (ang < 22.5 || ang >= 157.5) {  // edge vertical, compare left/right
                n1 = M(u - 1, v);
                n2 = M(u + 1, v);
            } else if (ang < 67.5) {  // gradient down-right
                n1 = M(u - 1, v - 1);
                n2 = M(u + 1, v + 1);
            } else if (ang < 112.5) {  // edge horizontal, compare up/down
                n1 = M(u, v - 1);
                n2 = M(u, v + 1);
            } else {  // gradient down-left
                n1 = M(u + 1, v - 1);
                n2 = M(u - 1, v + 1);
            }
            if (m > n1 && m >= n2) keep.at(u, v) = 1;
        }
    }

    // Double-threshold hysteresis: strong seeds flood 8-connected weak pixels.
    Mask edges(W, H, 0);
    struct Px {
        int u, v;
    };
    std::vector<Px> stack;
    for (int v = 0; v < H; ++v)
        for (int u = 0; u < W; ++u)
            if (keep.at(u, v) && mag.at(u, v) > high) {
                edges.at(u, v) = 1;
                stack.push_back({u, v});
            }
    while (!stack.empty()) {
        const auto [cu, cv] = stack.back();
        stack.pop_back();
        for (int dv = -1; dv <= 1; ++dv) {
            for (int du = -1; du <= 1; ++du) {
                const int nu = cu + du, nv = cv + dv;
                if (!edges.in_bounds(nu, nv) || edges.at(nu, nv)) continue;
                if (keep.at(nu, nv) && mag.at(nu, nv) > low) {
                    edges.at(nu, nv) = 1;
                    stack.push_back({nu, nv});
                }
            }
        }
    }
    return edges;
}

EdgeWeightMaps build_weight_maps(const Mask& edges, const ResidualMaps* residual, double base_w) {
    if (edges.empty()) throw std::invalid_argument("build_weight_maps: empty edge mask");
    if (!(base_w >= 0.0 && base_w <= 1.0)) throw std::invalid_argument("build_weight_maps: base_w out of [0,1]");
    if (residual)
        for (const auto& r : *residual)
            if (!r.same_shape(edges)) throw std::invalid_argument("build_weight_maps: residual shape mismatch");

    EdgeWeightMaps maps(edges.width, edges.height);
    for (int k = 0; k < 4; ++k) {
        for (int v = 0; v < edges.height; ++v) {
            for (int u = 0; u < edges.width; ++u) {
                double w = base_w + (edges.at(u, v) ? 1.0 - base_w : 0.0);
                if (residual) w += (*residual)[k].at(u, v);
                maps.w[k].at(u, v) = std::clamp(w, 0.0, 1.0);
            }
        }
    }
    return maps;
}

namespace {

// One of the four directional sweeps over a single channel, in place.
// du/dv point from the predecessor toward the current pixel.
void sweep(Grid<double>& cur, const Grid<double>& w, int du, int dv, bool recursive) {
    const int W = cur.width, H = cur.height;
    Grid<double> pre;
    if (!recursive) pre = cur;
    const Grid<double>& src = recursive ? cur : pre;

    if (du != 0) {
        const int ustart = du > 0 ? 1 : W - 2;
        for (int v = 0; v < H; ++v)
            for (int u = ustart; u >= 0 && u < W; u += du) {
                const double wi = w.at(u, v);
                cur.at(u, v) = (1.0 - wi) * src.at(u - du, v) + wi * cur.at(u, v);
            }
    } else {
        const int vstart = dv > 0 ? 1 : H - 2;
        for (int v = vstart; v >= 0 && v < H; v += dv)
            for (int u = 0; u < W; ++u) {
                const double wi = w.at(u, v);
                cur.at(u, v) = (1.0 - wi) * src.at(u, v - dv) + wi * cur.at(u, v);
            }
    }
}

}  // namespace

std::vector<Grid<double>> propagate(const std::vector<Grid<double>>& channels, const EdgeWeightMaps& w,
                                    const PropagateOptions& opts) {
    if (channels.empty()) throw std::invalid_argument("propagate: no channels");
    for (const auto& c : channels)
        if (!c.same_shape(w.w[0])) throw std::invalid_argument("propagate: shape mismatch");
    if (opts.t_prop < 1) throw std::invalid_argument("propagate: t_prop must be >= 1");
    if (opts.renormalize_vec3 && channels.size() != 3)
        throw std::invalid_argument("propagate: renormalize_vec3 needs 3 channels");

    std::vector<Grid<double>> out = channels;
    for (int t = 0; t < opts.t_prop; ++t) {
        for (auto& c : out) {
            sweep(c, w.w[0], +1, 0, opts.recursive_within_pass);   // L -> R
            sweep(c, w.w[1], -1, 0, opts.recursive_within_pass);   // R -> L
            sweep(c, w.w[2], 0, +1, opts.recursive_within_pass);   // T -> B
            sweep(c, w.w[3], 0, -1, opts.recursive_within_pass);   // B -> T
        }
        if (opts.renormalize_vec3) {
            for (size_t i = 0; i < out[0].size(); ++i) {
                const Vec3 v{out[0].data[i], out[1].data[i], out[2].data[i]};
                if (!(v.dot(v) > 0.0)) continue;  // zero vectors stay put
                const Vec3 n = renormalize(v);
                out[0].data[i] = n.x;
                out[1].data[i] = n.y;
                out[2].data[i] = n.z;
            }
        }
    }
    return out;
}

EdgeWeightMaps block_at_invalid(EdgeWeightMaps w, const Mask& valid) {
    if (!valid.same_shape(w.w[0])) throw std::invalid_argument("block_at_invalid: shape mismatch");
    const int W = valid.width, H = valid.height;
    constexpr int kPredU[4] = {-1, +1, 0, 0};
    constexpr int kPredV[4] = {0, 0, -1, +1};
    for (int k = 0; k < 4; ++k)
        for (int v = 0; v < H; ++v)
            for (int u = 0; u < W; ++u) {
                const int pu = u + kPredU[k], pv = v + kPredV[k];
                if (valid.in_bounds(pu, pv) && !valid.at(pu, pv)) w.w[k].at(u, v) = 1.0;
            }
    return w;
}

}  // namespace geonet
