#include "doctest.h"
#include "geonet/n2d.hpp"
#include "geonet/synth.hpp"
#include "helpers.hpp"

using namespace geonet;

TEST_CASE("fronto-parallel plane scene") {
    SceneSpec spec;
    spec.kind = SceneKind::Plane;
    spec.width = 32;
    spec.height = 24;
    spec.intrinsics = {100.0, 100.0, 16.0, 12.0};
    spec.plane_normal = {0.0, 0.0, -1.0};
    spec.plane_offset = -2.5;  // n . p = -z = -2.5
    const Scene s = generate(spec);
    for (int v = 0; v < 24; ++v)
        for (int u = 0; u < 32; ++u) {
            REQUIRE(s.depth.valid.at(u, v) == 1);
            CHECK(s.depth.z.at(u, v) == doctest::Approx(2.5).epsilon(1e-12));
            CHECK(s.normals.n.at(u, v) == Vec3{0.0, 0.0, -1.0});
        }
}

TEST_CASE("slanted plane depth satisfies the plane equation at the unprojected point") {
    std::mt19937_64 rng(167);
    const SceneSpec spec = testutil::random_plane_spec(rng, 64, 48);
    const Scene s = generate(spec);
    const Vec3 n = spec.plane_normal.normalized();
    for (int v = 0; v < 48; ++v)
        for (int u = 0; u < 64; ++u) {
            REQUIRE(s.depth.valid.at(u, v) == 1);
            const double z = s.depth.z.at(u, v);
            const Vec3 p{(u - spec.intrinsics.cx) * z / spec.intrinsics.fx,
                         (v - spec.intrinsics.cy) * z / spec.intrinsics.fy, z};
            CHECK(n.dot(p) == doctest::Approx(spec.plane_offset).epsilon(1e-12));
        }
}

TEST_CASE("sphere scene geometry") {
    const SceneSpec spec = testutil::sphere_spec(64, 48);
    const Scene s = generate(spec);

    size_t valid = 0;
    for (int v = 0; v < 48; ++v)
        for (int u = 0; u < 64; ++u) {
            if (!s.depth.valid.at(u, v)) continue;
            ++valid;
            const double z = s.depth.z.at(u, v);
            const Vec3 p{(u - spec.intrinsics.cx) * z / spec.intrinsics.fx,
                         (v - spec.intrinsics.cy) * z / spec.intrinsics.fy, z};
            CHECK((p - spec.sphere_center).norm() == doctest::Approx(spec.sphere_radius).epsilon(1e-9));
            CHECK(std::abs(s.normals.n.at(u, v).norm() - 1.0) < 1e-9);
        }
    CHECK(valid > 0);
    CHECK(valid < s.depth.z.size());  // the silhouette clips the image

    SUBCASE("the ray through the center sees a normal opposite the ray") {
        // Aim the principal ray at the center.
        SceneSpec axial = spec;
        axial.sphere_center = {0.0, 0.0, 3.0};
        const Scene sa = generate(axial);
        const int cu = static_cast<int>(axial.intrinsics.cx), cv = static_cast<int>(axial.intrinsics.cy);
        CHECK(testutil::angle_deg(sa.normals.n.at(cu, cv), Vec3{0, 0, -1}) < 0.5);
    }
}

TEST_CASE("step and wedge scenes") {
    SceneSpec spec;
    spec.width = 40;
    spec.height = 30;
    spec.intrinsics = {60.0, 60.0, 20.0, 15.0};

    SUBCASE("step") {
        spec.kind = SceneKind::Step;
        spec.near_z = 1.0;
        spec.far_z = 2.0;
        spec.split_col = 20;
        const Scene s = generate(spec);
        CHECK(s.depth.z.at(0, 10) == 1.0);
        CHECK(s.depth.z.at(25, 10) == 2.0);
        CHECK(s.normals.n.at(5, 5) == Vec3{0, 0, -1});
    }
    SUBCASE("wedge faces meet at the crease with mirrored tilts") {
        spec.kind = SceneKind::Wedge;
        spec.crease_col = 20;
        spec.crease_z = 2.0;
        spec.tilt_deg = 25.0;
        const Scene s = generate(spec);
        CHECK(s.depth.z.at(20, 0) == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(s.depth.z.at(20, 29) == doctest::Approx(2.0).epsilon(1e-12));
        const Vec3 nl = s.normals.n.at(2, 15), nr = s.normals.n.at(38, 15);
        CHECK(nl.x == doctest::Approx(-nr.x).epsilon(1e-12));
        CHECK(nl.z == doctest::Approx(nr.z).epsilon(1e-12));
        CHECK(testutil::angle_deg(nl, nr) == doctest::Approx(50.0).epsilon(1e-9));
    }
}

TEST_CASE("generated scenes are geometrically consistent with the depth votes") {
    std::mt19937_64 rng(173);
    const SceneSpec spec = testutil::random_plane_spec(rng, 48, 36);
    const Scene s = generate(spec);
    for (int trial = 0; trial < 200; ++trial) {
        const PixelIndex i{static_cast<int>(rng() % 48), static_cast<int>(rng() % 36)};
        const PixelIndex j{static_cast<int>(rng() % 48), static_cast<int>(rng() % 36)};
        const auto z = vote_depth(j, i, s.depth, s.normals, spec.intrinsics);
        REQUIRE(z.has_value());
        CHECK(std::abs(*z - s.depth.z.at(i.u, i.v)) / s.depth.z.at(i.u, i.v) < 1e-9);
    }
}

TEST_CASE("generate is deterministic and rejects invisible scenes") {
    std::mt19937_64 rng(179);
    const SceneSpec spec = testutil::random_plane_spec(rng, 32, 24);
    const Scene a = generate(spec);
    const Scene b = generate(spec);
    CHECK(a.depth.z == b.depth.z);
    CHECK(a.normals.n == b.normals.n);

    SceneSpec miss = testutil::sphere_spec(32, 24);
    miss.sphere_center = {100.0, 100.0, 3.0};  // far outside the frustum
    CHECK_THROWS_AS(generate(miss), std::invalid_argument);
}

TEST_CASE("add_noise") {
    SceneSpec spec;
    spec.kind = SceneKind::Plane;
    spec.width = 640;
    spec.height = 480;
    spec.intrinsics = {500.0, 500.0, 320.0, 240.0};
    spec.plane_normal = {0.0, 0.0, -1.0};
    spec.plane_offset = -2.0;
    const Scene s = generate(spec);

    SUBCASE("sigma zero is the identity") {
        CHECK(add_noise(s.depth, 0.0, 9).z == s.depth.z);
    }
    SUBCASE("equal seeds reproduce, different seeds differ") {
        const DepthMap a = add_noise(s.depth, 0.02, 11);
        const DepthMap b = add_noise(s.depth, 0.02, 11);
        const DepthMap c = add_noise(s.depth, 0.02, 12);
        CHECK(a.z == b.z);
        CHECK(a.z != c.z);
    }
    SUBCASE("the empirical relative deviation matches sigma within 5 percent") {
        const double sigma = 0.02;
        const DepthMap noisy = add_noise(s.depth, sigma, 2024);
        double sum = 0.0, sq = 0.0;
        for (size_t i = 0; i < noisy.z.size(); ++i) {
            const double r = (noisy.z.data[i] - s.depth.z.data[i]) / s.depth.z.data[i];
            sum += r;
            sq += r * r;
        }
        const double n = static_cast<double>(noisy.z.size());
        const double stddev = std::sqrt(sq / n - (sum / n) * (sum / n));
        CHECK(stddev == doctest::Approx(sigma).epsilon(0.05));
    }
}

TEST_CASE("shade renders brighter near surfaces facing the camera") {
    SceneSpec spec;
    spec.kind = SceneKind::Step;
    spec.width = 32;
    spec.height = 24;
    spec.intrinsics = {50.0, 50.0, 16.0, 12.0};
    spec.near_z = 1.0;
    spec.far_z = 2.0;
    spec.split_col = 16;
    const Scene s = generate(spec);
    const GrayImage img = shade(s.depth, s.normals);
    CHECK(img.intensity.at(2, 12) == 255.0);
    CHECK(img.intensity.at(30, 12) == doctest::Approx(255.0 / 4.0).epsilon(1e-12));
}
