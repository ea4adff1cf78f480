#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "parttrack/activity.hpp"
#include "parttrack/image.hpp"
#include "parttrack/synth.hpp"
#include "parttrack/errors.hpp"

using namespace parttrack;

namespace {

ScriptFrame bare_frame(double floor_depth = 2.4) {
    ScriptFrame frame;
    frame.floor_depth = floor_depth;
    return frame;
}

PartPose pose(double x, double y, double z, double rx, double ry, double rz) {
    return {true, {x, y, z}, rx, ry, rz};
}

int count_label(const LabelImage& labels, std::uint8_t value) {
    int n = 0;
    for (int y = 0; y < labels.height(); ++y)
        for (int x = 0; x < labels.width(); ++x)
            if (labels.at(x, y) == value) ++n;
    return n;
}

}  // namespace

TEST_CASE("an empty scene renders the bare floor") {
    const CameraIntrinsics k = CameraIntrinsics::scaled_default(64, 48);
    const RenderedFrame out = render_frame(bare_frame(2.4), k, 64, 48, 0.0, 7);
    for (int y = 0; y < 48; ++y) {
        for (int x = 0; x < 64; ++x) {
            CHECK(out.depth.at(x, y) == 2.4f);
            CHECK(out.labels.at(x, y) == kBackgroundLabel);
        }
    }
    for (const auto& part : out.parts) CHECK(!part.present);
}

TEST_CASE("a centered ellipsoid renders at its analytic depth") {
    const CameraIntrinsics k{200.0, 200.0, 63.5, 47.5};
    ScriptFrame frame = bare_frame();
    frame.head = pose(0.0, 0.0, 1.6, 0.10, 0.08, 0.06);
    const RenderedFrame out = render_frame(frame, k, 128, 96, 0.0, 7);

    // The nearest visible point (apex) is at z = 1.54; the principal ray is a
    // quarter pixel off centre, so allow a hair of curvature.
    float min_depth = 100.0f;
    for (const float d : out.depth.data()) min_depth = std::min(min_depth, d);
    CHECK(min_depth == doctest::Approx(1.54).epsilon(1e-4));

    const std::uint8_t head = label_of(BodyPart::head);
    const int pixels = count_label(out.labels, head);
    CHECK(pixels > 0);
    CHECK(pixels == out.parts[2].pixel_count);
    CHECK(out.parts[2].present);
    CHECK(out.parts[2].center.z == 1.6);
    CHECK(out.parts[2].surface_mean.z == doctest::Approx(1.6 - 0.04).epsilon(1e-12));

    // Projected footprint area: ellipse with world semi-axes 0.10 x 0.08 at
    // z ~ 1.55 maps to roughly pi * (0.10*200/1.56) * (0.08*200/1.56) pixels.
    CHECK(pixels > 300);
    CHECK(pixels < 700);

    // Labeled pixels sit strictly above the floor, the rest on it.
    for (int y = 0; y < 96; ++y) {
        for (int x = 0; x < 128; ++x) {
            if (out.labels.at(x, y) == head)
                CHECK(out.depth.at(x, y) < 1.661f);
            else
                CHECK(out.depth.at(x, y) == 2.4f);
        }
    }
}

TEST_CASE("the center of mass of a rendered part tracks the analytic surface mean") {
    const CameraIntrinsics k = CameraIntrinsics::scaled_default(320, 240);
    ScriptFrame frame = bare_frame();
    frame.right_hand = pose(0.1, 0.05, 1.95, 0.045, 0.045, 0.03);
    const RenderedFrame out = render_frame(frame, k, 320, 240, 0.0, 3);
    const auto com = part_center_of_mass(out.labels, out.depth, BodyPart::right_hand, k);
    REQUIRE(com.has_value());
    const WorldPoint expect = out.parts[1].surface_mean;
    CHECK(std::abs(com->x - expect.x) < 0.01);
    CHECK(std::abs(com->y - expect.y) < 0.01);
    CHECK(std::abs(com->z - expect.z) < 0.01);
    // And the surface mean itself hangs two-thirds of a semi-axis above center.
    CHECK(expect.z == doctest::Approx(1.95 - 2.0 / 3.0 * 0.03).epsilon(1e-12));
}

TEST_CASE("arms occlude the floor with body labels") {
    const CameraIntrinsics k = CameraIntrinsics::scaled_default(160, 120);
    ScriptFrame frame = bare_frame();
    frame.arms.push_back({{-0.3, 0.0, 1.8}, {0.3, 0.0, 1.8}, 0.03});
    const RenderedFrame out = render_frame(frame, k, 160, 120, 0.0, 7);
    const int body = count_label(out.labels, label_of(BodyPart::body));
    CHECK(body > 100);
    CHECK(count_label(out.labels, label_of(BodyPart::head)) == 0);
    // Capsule surface depth along the axis is 1.8 - 0.03.
    float min_depth = 100.0f;
    for (const float d : out.depth.data()) min_depth = std::min(min_depth, d);
    CHECK(min_depth == doctest::Approx(1.77).epsilon(1e-3));
}

TEST_CASE("nearer surfaces win the depth test") {
    const CameraIntrinsics k = CameraIntrinsics::scaled_default(64, 48);
    ScriptFrame frame = bare_frame();
    frame.head = pose(0.0, 0.0, 1.6, 0.10, 0.10, 0.06);
    frame.right_hand = pose(0.0, 0.0, 1.2, 0.04, 0.04, 0.03);  // in front of the head
    const RenderedFrame out = render_frame(frame, k, 64, 48, 0.0, 7);
    CHECK(out.parts[1].pixel_count > 0);
    CHECK(out.parts[2].pixel_count > 0);
    // Every hand pixel is nearer than any head pixel.
    float deepest_hand = 0.0f, nearest_head = 100.0f;
    for (int y = 0; y < 48; ++y) {
        for (int x = 0; x < 64; ++x) {
            if (out.labels.at(x, y) == label_of(BodyPart::right_hand))
                deepest_hand = std::max(deepest_hand, out.depth.at(x, y));
            if (out.labels.at(x, y) == label_of(BodyPart::head))
                nearest_head = std::min(nearest_head, out.depth.at(x, y));
        }
    }
    CHECK(deepest_hand < nearest_head);
}

TEST_CASE("sensor noise is seed-deterministic") {
    const CameraIntrinsics k = CameraIntrinsics::scaled_default(96, 72);
    ScriptFrame frame = bare_frame();
    frame.head = pose(0.0, -0.1, 1.6, 0.10, 0.08, 0.06);
    const RenderedFrame a = render_frame(frame, k, 96, 72, 0.003, 41);
    const RenderedFrame b = render_frame(frame, k, 96, 72, 0.003, 41);
    const RenderedFrame c = render_frame(frame, k, 96, 72, 0.003, 42);
    CHECK(a.depth.data() == b.depth.data());
    CHECK(a.labels.data() == b.labels.data());
    CHECK(a.depth.data() != c.depth.data());
    CHECK(a.labels.data() == c.labels.data());  // noise never moves labels
    // Noise perturbs depth but stays small.
    double max_dev = 0.0;
    for (std::size_t i = 0; i < a.depth.data().size(); ++i) {
        if (a.labels.data()[i] == kBackgroundLabel)
            max_dev = std::max(max_dev, std::abs(double(a.depth.data()[i]) - 2.4));
    }
    CHECK(max_dev > 0.0);
    CHECK(max_dev < 0.003 * 6);
}

TEST_CASE("depth samples clamp to the sensor range") {
    const CameraIntrinsics k = CameraIntrinsics::scaled_default(32, 24);
    const RenderedFrame far = render_frame(bare_frame(15.0), k, 32, 24, 0.0, 7);
    CHECK(far.depth.at(16, 12) == 9.99f);
    ScriptFrame close = bare_frame();
    close.head = pose(0.0, 0.0, 0.08, 0.05, 0.05, 0.05);
    const RenderedFrame near = render_frame(close, k, 32, 24, 0.0, 7);
    CHECK(near.depth.at(16, 12) == 0.05f);
}

TEST_CASE("impossible scenes are rejected") {
    const CameraIntrinsics k = CameraIntrinsics::scaled_default(32, 24);
    CHECK_THROWS_AS(render_frame(bare_frame(), k, 0, 24, 0.0, 7), InvalidInputError);
    CHECK_THROWS_AS(render_frame(bare_frame(0.0), k, 32, 24, 0.0, 7), ScriptError);
    ScriptFrame behind = bare_frame();
    behind.head = pose(0.0, 0.0, -1.0, 0.1, 0.1, 0.1);
    CHECK_THROWS_AS(render_frame(behind, k, 32, 24, 0.0, 7), ScriptError);
    ScriptFrame arm_behind = bare_frame();
    arm_behind.arms.push_back({{0.0, 0.0, -0.5}, {0.0, 0.0, 1.5}, 0.03});
    CHECK_THROWS_AS(render_frame(arm_behind, k, 32, 24, 0.0, 7), ScriptError);
    // An absent pose behind the camera is ignored.
    ScriptFrame absent = bare_frame();
    absent.head = {false, {0.0, 0.0, -1.0}, 0.1, 0.1, 0.1};
    CHECK_NOTHROW(render_frame(absent, k, 32, 24, 0.0, 7));
}

TEST_CASE("the default counter regions are five disjoint ellipsoids in view") {
    const SceneConfig config;
    const auto regions = default_regions(config);
    REQUIRE(regions.size() == 5);
    CHECK_NOTHROW(validate_regions(regions));
    std::set<Activity> seen;
    for (const auto& r : regions) {
        seen.insert(r.activity);
        CHECK(r.center.z == config.hand_plane_z);
        const auto [u, v] = project_to_pixel(r.center, config.k);
        CHECK(u >= 0.0);
        CHECK(u <= config.width - 1);
        CHECK(v >= 0.0);
        CHECK(v <= config.height - 1);
    }
    CHECK(seen == std::set<Activity>{Activity::soap, Activity::tap, Activity::water,
                                     Activity::sink, Activity::towel});
    // The hand transit plane passes beneath every region.
    for (const auto& r : regions)
        CHECK(!region_contains(r, {r.center.x, r.center.y, config.transit_z}));
}

TEST_CASE("trial scripts dwell inside the scripted regions and transit below them") {
    const SceneConfig config;
    const auto regions = default_regions(config);
    const SceneScript script = script_trial(template_by_name("canonical"), 11, config);
    CHECK(script.template_name == "canonical");
    REQUIRE(!script.frames.empty());

    int tap_frames = 0, move_frames = 0, idle_frames = 0;
    for (const auto& frame : script.frames) {
        CHECK(frame.left_hand.present);
        CHECK(frame.right_hand.present);
        CHECK(frame.head.present);
        REQUIRE(!frame.arms.empty());
        if (frame.activity == "away") {
            // Transits and idles must not put either hand inside a region.
            CHECK(locate(frame.left_hand.center, regions) == Activity::away);
            CHECK(locate(frame.right_hand.center, regions) == Activity::away);
            if (frame.action == "move") {
                ++move_frames;
                CHECK(frame.right_hand.center.z == config.transit_z);
            } else {
                ++idle_frames;
            }
        } else {
            const Activity a = activity_from_name(frame.activity);
            CHECK(locate(frame.right_hand.center, regions) == a);
            CHECK(locate(frame.left_hand.center, regions) == Activity::away);
            if (a == Activity::tap) ++tap_frames;
        }
    }
    CHECK(tap_frames == 12);  // two six-frame faucet visits
    CHECK(idle_frames >= 3);
    CHECK(move_frames >= 5);
}

TEST_CASE("scripts are seed-deterministic") {
    const SceneScript a = script_trial(template_by_name("canonical"), 19);
    const SceneScript b = script_trial(template_by_name("canonical"), 19);
    const SceneScript c = script_trial(template_by_name("canonical"), 20);
    REQUIRE(a.frames.size() == b.frames.size());
    bool same_ac = a.frames.size() == c.frames.size();
    for (std::size_t i = 0; i < a.frames.size(); ++i) {
        CHECK(a.frames[i].right_hand.center.x == b.frames[i].right_hand.center.x);
        CHECK(a.frames[i].head.center.y == b.frames[i].head.center.y);
        if (same_ac && a.frames[i].right_hand.center.x != c.frames[i].right_hand.center.x)
            same_ac = false;
    }
    CHECK(!same_ac);
}

TEST_CASE("absent segments drop the actor from the scene") {
    const SceneScript script = script_trial(template_by_name("absent_mid"), 5);
    int absent_frames = 0;
    for (const auto& frame : script.frames) {
        if (frame.action == "away") {
            ++absent_frames;
            CHECK(!frame.left_hand.present);
            CHECK(!frame.right_hand.present);
            CHECK(!frame.head.present);
            CHECK(frame.body_shapes.empty());
            CHECK(frame.arms.empty());
        }
    }
    CHECK(absent_frames == 5);
}

TEST_CASE("left-handed templates move the left hand") {
    const SceneConfig config;
    const auto regions = default_regions(config);
    const SceneScript script = script_trial(template_by_name("left_handed"), 3, config);
    int left_dwells = 0;
    for (const auto& frame : script.frames) {
        if (frame.activity == "away") continue;
        CHECK(locate(frame.left_hand.center, regions) == activity_from_name(frame.activity));
        CHECK(locate(frame.right_hand.center, regions) == Activity::away);
        ++left_dwells;
    }
    CHECK(left_dwells == 30);
}

TEST_CASE("malformed templates are rejected") {
    CHECK_THROWS_AS(script_trial({"empty", {}, {}}, 1), ScriptError);
    CHECK_THROWS_AS(script_trial({"zero", {{TemplateSegment::Kind::dwell, Activity::tap, 0,
                                            Hand::right}}, {}}, 1),
                    ScriptError);
    CHECK_THROWS_AS(script_trial({"nowhere", {{TemplateSegment::Kind::dwell, Activity::away, 4,
                                               Hand::right}}, {}}, 1),
                    ScriptError);
    CHECK_THROWS_AS(template_by_name("does_not_exist"), ScriptError);
}

TEST_CASE("every registry template plays back to its intended step flags") {
    const SceneConfig config;
    const auto regions = default_regions(config);
    REQUIRE(template_registry().size() >= 10);
    for (const auto& tmpl : template_registry()) {
        for (const std::uint64_t seed : {101u, 202u, 303u}) {
            CAPTURE(tmpl.name);
            CAPTURE(seed);
            const SceneScript script = script_trial(tmpl, seed, config);
            TrialTracker tracker(regions, StepPrecedence::standard());
            for (const auto& frame : script.frames) {
                const auto hand = [](const PartPose& p) -> std::optional<WorldPoint> {
                    if (!p.present) return std::nullopt;
                    return p.center;
                };
                tracker.observe(hand(frame.left_hand), hand(frame.right_hand));
            }
            for (int s = 0; s < kStepCount; ++s) {
                CHECK(tracker.flags()[static_cast<std::size_t>(s)] ==
                      tmpl.intended_steps[static_cast<std::size_t>(s)]);
            }
        }
    }
}
