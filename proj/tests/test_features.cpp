#include <doctest.h>

#include <cmath>

#include "parttrack/features.hpp"
#include "parttrack/rng.hpp"
#include "test_support.hpp"

using namespace parttrack;
using test::flat_image;

namespace {

// Two flat plates: the whole raster at `base_z`, with a raised plate at
// base_z - 0.3 covering a fixed world-space rectangle. The raised extent is
// defined in meters so the scene is the same physical object at any depth.
DepthImage two_plate_scene(double base_z, const CameraIntrinsics& k) {
    DepthImage img(201, 201);
    for (int y = 0; y < 201; ++y) {
        for (int x = 0; x < 201; ++x) {
            const double wx = (x - k.cx) * base_z / k.fx;
            const double wy = (y - k.cy) * base_z / k.fy;
            const bool raised = wx >= 0.05 && wx <= 0.25 && wy >= -0.1 && wy <= 0.1;
            img.set(x, y, static_cast<float>(raised ? base_z - 0.3 : base_z));
        }
    }
    return img;
}

}  // namespace

TEST_CASE("feature is the difference of two normalized-offset probes") {
    DepthImage img(4, 4);
    for (int y = 0; y < 4; ++y) {
        for (int x = 0; x < 4; ++x) img.set(x, y, 2.0f);
    }
    img.set(2, 1, 1.5f);
    img.set(1, 2, 2.5f);
    // At depth 2, a 2 px*m offset reaches exactly 1 px.
    const double f = depth_feature(img, {1, 1}, {{2.0, 0.0}, {0.0, 2.0}});
    CHECK(f == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("probes landing off-image or on invalid pixels read the background sentinel") {
    DepthImage img(4, 4);
    for (int y = 0; y < 4; ++y) {
        for (int x = 0; x < 4; ++x) img.set(x, y, 2.0f);
    }
    img.set(2, 1, 1.5f);
    img.set(1, 0, 0.0f);  // dropout

    // u probe 50 px off the raster, v probe at 1.5 m.
    CHECK(depth_feature(img, {1, 1}, {{100.0, 0.0}, {2.0, 0.0}}) ==
          doctest::Approx(kBackgroundDepth - 1.5).epsilon(1e-12));
    // v probe hits the dropout pixel.
    CHECK(depth_feature(img, {1, 1}, {{2.0, 0.0}, {0.0, -2.0}}) ==
          doctest::Approx(1.5 - kBackgroundDepth).epsilon(1e-12));
    // Zero offsets probe the center pixel itself.
    CHECK(depth_feature(img, {1, 1}, {{0.0, 0.0}, {0.0, 0.0}}) == 0.0);
}

TEST_CASE("feature throws when the center pixel has no depth") {
    DepthImage img(4, 4);
    img.set(1, 1, 0.0f);
    CHECK_THROWS_AS(depth_feature(img, {1, 1}, {{1.0, 0.0}, {0.0, 1.0}}), NoDepthError);
}

TEST_CASE("swapping u and v negates the feature") {
    Rng rng(77);
    DepthImage img(32, 32);
    for (int y = 0; y < 32; ++y) {
        for (int x = 0; x < 32; ++x) {
            img.set(x, y, static_cast<float>(rng.uniform(0.5, 5.0)));
        }
    }
    for (int trial = 0; trial < 200; ++trial) {
        const Pixel px{static_cast<int>(rng.below(32)), static_cast<int>(rng.below(32))};
        OffsetPair o;
        o.u = {rng.uniform(-60.0, 60.0), rng.uniform(-60.0, 60.0)};
        o.v = {rng.uniform(-60.0, 60.0), rng.uniform(-60.0, 60.0)};
        const OffsetPair swapped{o.v, o.u};
        CHECK(depth_feature(img, px, o) == -depth_feature(img, px, swapped));
    }
}

TEST_CASE("normalized offsets make on-object features depth-invariant") {
    CameraIntrinsics k;
    k.fx = k.fy = 500.0;
    k.cx = k.cy = 100.0;
    const Pixel center{100, 100};
    // u lands on the raised plate (world x 0.15 m), v on the base plate.
    const OffsetPair cross{{75.0, 0.0}, {-100.0, 0.0}};
    const OffsetPair base_only{{-100.0, 0.0}, {0.0, 50.0}};
    double f_cross[2];
    double f_base[2];
    int i = 0;
    for (double z : {1.6, 2.4}) {
        const DepthImage img = two_plate_scene(z, k);
        f_cross[i] = depth_feature(img, center, cross);
        f_base[i] = depth_feature(img, center, base_only);
        ++i;
    }
    CHECK(f_cross[0] == doctest::Approx(-0.3).epsilon(1e-6));
    CHECK(f_cross[1] == doctest::Approx(-0.3).epsilon(1e-6));
    CHECK(std::abs(f_cross[0] - f_cross[1]) < 1e-6);
    CHECK(std::abs(f_base[0]) < 1e-6);
    CHECK(std::abs(f_base[1]) < 1e-6);
}

TEST_CASE("candidate pool is the offset x threshold cross product in declared order") {
    const std::vector<OffsetPair> offsets = {{{1.0, 2.0}, {3.0, 4.0}}, {{-1.0, 0.0}, {0.0, 5.0}}};
    const std::vector<double> taus = {0.3, -0.2, 0.1};
    const CandidatePool pool(offsets, taus);
    CHECK(pool.size() == 6);
    for (std::size_t i = 0; i < offsets.size(); ++i) {
        for (std::size_t j = 0; j < taus.size(); ++j) {
            const SplitCandidate c = pool.candidate(i * taus.size() + j);
            CHECK(c.offsets.u.x == offsets[i].u.x);
            CHECK(c.offsets.v.y == offsets[i].v.y);
            CHECK(c.tau == taus[j]);
        }
    }
    const std::vector<SplitCandidate> flat = pool.flatten();
    REQUIRE(flat.size() == 6);
    for (std::size_t idx = 0; idx < flat.size(); ++idx) {
        CHECK(flat[idx].tau == pool.candidate(idx).tau);
        CHECK(flat[idx].offsets.u.x == pool.candidate(idx).offsets.u.x);
    }
    // Sorted view is ascending and a permutation of the originals.
    const std::vector<double>& sorted = pool.sorted_thresholds();
    REQUIRE(sorted.size() == 3);
    CHECK(sorted[0] == -0.2);
    CHECK(sorted[1] == 0.1);
    CHECK(sorted[2] == 0.3);
    for (std::size_t j = 0; j < sorted.size(); ++j) {
        CHECK(sorted[j] == taus[pool.sorted_threshold_indices()[j]]);
    }
    CHECK_THROWS_AS(CandidatePool({}, {0.1}), InvalidInputError);
    CHECK_THROWS_AS(CandidatePool(offsets, {}), InvalidInputError);
}

TEST_CASE("generated candidates respect counts, ranges, and the seed") {
    const CandidatePool pool = generate_candidates(3000, 100, 500.0, 1.0, 42);
    CHECK(pool.size() == 300000);
    CHECK(pool.offset_count() == 3000);
    CHECK(pool.threshold_count() == 100);
    for (const OffsetPair& o : pool.offsets()) {
        for (double c : {o.u.x, o.u.y, o.v.x, o.v.y}) {
            CHECK(std::abs(c) <= 500.0);
        }
    }
    for (double t : pool.thresholds()) CHECK(std::abs(t) <= 1.0);

    const CandidatePool again = generate_candidates(3000, 100, 500.0, 1.0, 42);
    CHECK(again.thresholds() == pool.thresholds());
    CHECK(again.offsets()[0].u.x == pool.offsets()[0].u.x);
    CHECK(again.offsets()[2999].v.y == pool.offsets()[2999].v.y);

    const CandidatePool other = generate_candidates(3000, 100, 500.0, 1.0, 43);
    CHECK(other.thresholds() != pool.thresholds());

    const CandidatePool tiny = generate_candidates(1, 1, 500.0, 1.0, 7);
    CHECK(tiny.size() == 1);
    CHECK_THROWS_AS(generate_candidates(0, 5, 500.0, 1.0, 1), InvalidInputError);
}
