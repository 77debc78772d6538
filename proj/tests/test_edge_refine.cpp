#include "doctest.h"
#include "geonet/edge_refine.hpp"
#include "helpers.hpp"

using namespace geonet;

namespace {

GrayImage vertical_step(int w, int h, int split, double lo, double hi) {
    GrayImage img(w, h);
    for (int v = 0; v < h; ++v)
        for (int u = 0; u < w; ++u) img.intensity.at(u, v) = u < split ? lo : hi;
    return img;
}

Grid<double> random_grid(std::mt19937_64& rng, int w, int h, double lo, double hi) {
    Grid<double> g(w, h);
    for (auto& v : g.data) v = testutil::uniform(rng, lo, hi);
    return g;
}

EdgeWeightMaps uniform_weights(int w, int h, double value) {
    EdgeWeightMaps maps(w, h);
    for (auto& g : maps.w)
        for (auto& v : g.data) v = value;
    return maps;
}

// The 1D oracle for the step edge: smooth the step profile with the same
// normalized 5-tap Gaussian, take central differences scaled like the Sobel
// row response, and find the column the suppression tie rule keeps.
int expected_step_edge_column(int w, int split, double lo, double hi) {
    std::vector<double> k(5);
    double sum = 0.0;
    for (int d = -2; d <= 2; ++d) {
        k[d + 2] = std::exp(-(d * d) / (2.0 * 1.4 * 1.4));
        sum += k[d + 2];
    }
    for (double& v : k) v /= sum;

    auto value = [&](int u) { return u < split ? lo : hi; };
    std::vector<double> sm(w);
    for (int u = 0; u < w; ++u) {
        double s = 0.0;
        for (int d = -2; d <= 2; ++d) s += k[d + 2] * value(std::clamp(u + d, 0, w - 1));
        sm[u] = s;
    }
    std::vector<double> mag(w, 0.0);
    for (int u = 0; u < w; ++u) {
        const double l = sm[std::max(0, u - 1)], r = sm[std::min(w - 1, u + 1)];
        mag[u] = std::abs(4.0 * (r - l));
    }
    for (int u = 0; u < w; ++u) {
        const double left = u > 0 ? mag[u - 1] : 0.0;
        const double right = u < w - 1 ? mag[u + 1] : 0.0;
        if (mag[u] > 0.0 && mag[u] > left && mag[u] >= right) return u;
    }
    return -1;
}

}  // namespace

TEST_CASE("canny finds nothing on a constant image") {
    GrayImage img(32, 24, 140.0);
    const Mask edges = canny(img, 0.0, 0.0);
    for (uint8_t e : edges.data) CHECK(e == 0);
}

TEST_CASE("canny marks a vertical step with a single one-pixel line") {
    const GrayImage img = vertical_step(64, 40, 32, 0.0, 255.0);
    const double mean = mean_intensity(img);
    const Mask edges = canny(img, mean, 2.0 * mean);

    const int expected = expected_step_edge_column(64, 32, 0.0, 255.0);
    REQUIRE(expected >= 0);
    for (int v = 0; v < 40; ++v)
        for (int u = 0; u < 64; ++u) CHECK(static_cast<int>(edges.at(u, v)) == (u == expected ? 1 : 0));
}

TEST_CASE("hysteresis thresholds are monotone") {
    std::mt19937_64 rng(67);
    GrayImage img(48, 36);
    img.intensity = random_grid(rng, 48, 36, 0.0, 255.0);
    const Mask lo = canny(img, 0.0, 0.0);
    const Mask hi = canny(img, 255.0, 255.0);
    for (size_t i = 0; i < lo.data.size(); ++i) CHECK(lo.data[i] >= hi.data[i]);
}

TEST_CASE("build_weight_maps") {
    Mask edges(8, 6, 0);

    SUBCASE("no edges, no residual: uniform base weight") {
        const EdgeWeightMaps maps = build_weight_maps(edges, nullptr, 0.7);
        for (const auto& g : maps.w)
            for (double v : g.data) CHECK(v == 0.7);
    }
    SUBCASE("edge pixels saturate to 1") {
        edges.at(3, 2) = 1;
        const EdgeWeightMaps maps = build_weight_maps(edges, nullptr, 0.3);
        for (const auto& g : maps.w) {
            CHECK(g.at(3, 2) == 1.0);
            CHECK(g.at(0, 0) == 0.3);
        }
    }
    SUBCASE("residuals are clamped to [0, 1]") {
        ResidualMaps res;
        for (auto& r : res) r = Grid<double>(8, 6, -0.7);
        const EdgeWeightMaps maps = build_weight_maps(edges, &res, 0.7);
        for (const auto& g : maps.w)
            for (double v : g.data) CHECK(v == 0.0);
    }
    SUBCASE("shape mismatch is rejected") {
        ResidualMaps res;
        for (auto& r : res) r = Grid<double>(7, 6, 0.0);
        CHECK_THROWS_AS(build_weight_maps(edges, &res, 0.7), std::invalid_argument);
    }
}

TEST_CASE("propagate is the bit-exact identity at unit weights") {
    std::mt19937_64 rng(71);
    const EdgeWeightMaps w = uniform_weights(17, 9, 1.0);
    const std::vector<Grid<double>> x{random_grid(rng, 17, 9, -5.0, 5.0), random_grid(rng, 17, 9, 0.0, 1.0)};
    for (int t : {1, 2, 3})
        for (bool rec : {false, true}) {
            const auto out = propagate(x, w, {t, rec, false});
            CHECK(out[0].data == x[0].data);
            CHECK(out[1].data == x[1].data);
        }
}

TEST_CASE("propagate reproduces the hand-derived single sweep on a 1x3 row") {
    const double a = 0.3, b = -1.25, c = 2.5, w = 0.6;
    std::vector<Grid<double>> x{Grid<double>(3, 1)};
    x[0].data = {a, b, c};
    EdgeWeightMaps maps = uniform_weights(3, 1, 1.0);
    for (auto& v : maps.w[0].data) v = w;  // only the L-to-R sweep acts

    const auto out = propagate(x, maps, {1, false, false});
    CHECK(out[0].data[0] == doctest::Approx(a).epsilon(1e-12));
    CHECK(out[0].data[1] == doctest::Approx((1 - w) * a + w * b).epsilon(1e-12));
    CHECK(out[0].data[2] == doctest::Approx((1 - w) * b + w * c).epsilon(1e-12));
}

TEST_CASE("propagate keeps constant inputs constant across random shapes") {
    std::mt19937_64 rng(73);
    for (int trial = 0; trial < 50; ++trial) {
        const int W = 1 + static_cast<int>(rng() % 12), H = 1 + static_cast<int>(rng() % 12);
        EdgeWeightMaps w(W, H);
        for (auto& g : w.w)
            for (auto& v : g.data) v = testutil::uniform(rng, 0.0, 1.0);
        const std::vector<Grid<double>> x{Grid<double>(W, H, 3.25)};
        const auto out = propagate(x, w, {1 + static_cast<int>(rng() % 3), rng() % 2 == 0, false});
        for (double v : out[0].data) CHECK(v == 3.25);
    }
}

TEST_CASE("propagate respects the per-channel convex hull") {
    std::mt19937_64 rng(79);
    for (int trial = 0; trial < 200; ++trial) {
        const int W = 1 + static_cast<int>(rng() % 8), H = 1 + static_cast<int>(rng() % 8);
        EdgeWeightMaps w(W, H);
        for (auto& g : w.w)
            for (auto& v : g.data) v = testutil::uniform(rng, 0.0, 1.0);
        std::vector<Grid<double>> x{random_grid(rng, W, H, -10.0, 10.0)};
        const auto out = propagate(x, w, {1 + static_cast<int>(rng() % 3), rng() % 2 == 0, false});
        const auto [lo, hi] = std::minmax_element(x[0].data.begin(), x[0].data.end());
        for (double v : out[0].data) {
            CHECK(v >= *lo - 1e-12);
            CHECK(v <= *hi + 1e-12);
        }
    }
}

TEST_CASE("a unit-weight column blocks horizontal propagation") {
    std::mt19937_64 rng(83);
    const int W = 31, H = 17, barrier = 15;
    EdgeWeightMaps w = uniform_weights(W, H, 0.3);
    for (auto& g : w.w)
        for (int v = 0; v < H; ++v) g.at(barrier, v) = 1.0;
    const Grid<double> x = random_grid(rng, W, H, -4.0, 4.0);

    // Propagating the two sides separately (barrier column included in both)
    // must reproduce the full result exactly.
    auto slice = [&](const Grid<double>& g, int u0, int u1) {
        Grid<double> s(u1 - u0 + 1, H);
        for (int v = 0; v < H; ++v)
            for (int u = u0; u <= u1; ++u) s.at(u - u0, v) = g.at(u, v);
        return s;
    };
    auto slice_w = [&](int u0, int u1) {
        EdgeWeightMaps s(u1 - u0 + 1, H);
        for (int k = 0; k < 4; ++k) s.w[k] = slice(w.w[k], u0, u1);
        return s;
    };

    const PropagateOptions opts{3, true, false};
    const auto full = propagate({x}, w, opts)[0];
    const auto left = propagate({slice(x, 0, barrier)}, slice_w(0, barrier), opts)[0];
    const auto right = propagate({slice(x, barrier, W - 1)}, slice_w(barrier, W - 1), opts)[0];

    for (int v = 0; v < H; ++v) {
        for (int u = 0; u <= barrier; ++u) CHECK(full.at(u, v) == left.at(u, v));
        for (int u = barrier; u < W; ++u) CHECK(full.at(u, v) == right.at(u - barrier, v));
    }
}

TEST_CASE("propagate matches the literal sweep transcription bit-for-bit") {
    std::mt19937_64 rng(89);
    for (bool rec : {false, true}) {
        EdgeWeightMaps w(8, 8);
        for (auto& g : w.w)
            for (auto& v : g.data) v = testutil::uniform(rng, 0.0, 1.0);
        const Grid<double> x = random_grid(rng, 8, 8, -2.0, 2.0);
        const auto prod = propagate({x}, w, {3, rec, false});
        const auto naive = testutil::naive_propagate(x, w, 3, rec);
        CHECK(prod[0].data == naive.data);
    }
}

TEST_CASE("block_at_invalid raises successor weights to 1") {
    Mask valid(5, 4, 1);
    valid.at(2, 1) = 0;
    const EdgeWeightMaps blocked = block_at_invalid(uniform_weights(5, 4, 0.4), valid);
    CHECK(blocked.w[0].at(3, 1) == 1.0);  // L-to-R successor of the hole
    CHECK(blocked.w[1].at(1, 1) == 1.0);  // R-to-L successor
    CHECK(blocked.w[2].at(2, 2) == 1.0);  // T-to-B successor
    CHECK(blocked.w[3].at(2, 0) == 1.0);  // B-to-T successor
    CHECK(blocked.w[0].at(1, 1) == 0.4);
}

TEST_CASE("propagate rejects invalid arguments") {
    CHECK_THROWS_AS(propagate({}, uniform_weights(3, 3, 1.0), {}), std::invalid_argument);
    CHECK_THROWS_AS(propagate({Grid<double>(2, 3)}, uniform_weights(3, 3, 1.0), {}), std::invalid_argument);
    CHECK_THROWS_AS(propagate({Grid<double>(3, 3)}, uniform_weights(3, 3, 1.0), {0, true, false}),
                    std::invalid_argument);
}
