#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "parttrack/errors.hpp"
#include "parttrack/synth.hpp"
#include "parttrack/trial_io.hpp"
#include "test_support.hpp"

using namespace parttrack;
using test::TempDir;

namespace fs = std::filesystem;

namespace {

SceneConfig small_config() {
    SceneConfig config;
    config.width = 64;
    config.height = 48;
    config.k = CameraIntrinsics::scaled_default(64, 48);
    config.noise_sigma = 0.0;
    return config;
}

TrialTemplate tap_touch() {
    return {"tap_touch",
            {{TemplateSegment::Kind::dwell, Activity::tap, 2, Hand::right}},
            StepFlags{}};
}

}  // namespace

TEST_CASE("trials round trip through the manifest") {
    TempDir dir("parttrack_trial");
    const SceneConfig config = small_config();
    const SceneScript script = script_trial(tap_touch(), 5, config);
    const std::string trial_dir = (dir.path() / "t01").string();
    const TrialManifest written = write_trial(trial_dir, "t01", script, config, 99);

    CHECK(written.trial_id == "t01");
    CHECK(written.template_name == "tap_touch");
    CHECK(written.frame_count == static_cast<int>(script.frames.size()));
    CHECK(written.width == 64);
    CHECK(written.height == 48);
    REQUIRE(written.frames.size() == script.frames.size());
    CHECK(written.frames[0].depth_file == "frame_0000.pgm");
    CHECK(written.frames[0].label_file == "frame_0000_labels.pgm");
    for (const auto& record : written.frames) {
        CHECK(fs::exists(fs::path(trial_dir) / record.depth_file));
        CHECK(fs::exists(fs::path(trial_dir) / record.label_file));
    }

    const TrialManifest loaded = load_manifest(trial_dir);
    CHECK(loaded.trial_id == written.trial_id);
    CHECK(loaded.template_name == written.template_name);
    CHECK(loaded.frame_count == written.frame_count);
    CHECK(loaded.width == written.width);
    CHECK(loaded.height == written.height);
    CHECK(loaded.k.fx == written.k.fx);
    CHECK(loaded.k.cy == written.k.cy);
    CHECK(loaded.segmentation_threshold == written.segmentation_threshold);
    CHECK(loaded.intended_steps == written.intended_steps);
    REQUIRE(loaded.frames.size() == written.frames.size());
    for (std::size_t i = 0; i < loaded.frames.size(); ++i) {
        const auto& a = loaded.frames[i];
        const auto& b = written.frames[i];
        CHECK(a.depth_file == b.depth_file);
        CHECK(a.action == b.action);
        CHECK(a.activity == b.activity);
        for (int p = 0; p < 3; ++p) {
            CHECK(a.parts[p].present == b.parts[p].present);
            if (a.parts[p].present) {
                CHECK(a.parts[p].center.x == b.parts[p].center.x);
                CHECK(a.parts[p].center.y == b.parts[p].center.y);
                CHECK(a.parts[p].center.z == b.parts[p].center.z);
            }
        }
    }
}

TEST_CASE("frames load raw with the background plane intact") {
    TempDir dir("parttrack_trial");
    const SceneConfig config = small_config();
    const SceneScript script = script_trial(tap_touch(), 5, config);
    const std::string trial_dir = (dir.path() / "t01").string();
    const TrialManifest manifest = write_trial(trial_dir, "t01", script, config, 99);

    const TrialFrameData frame = load_frame(trial_dir, manifest.frames[0]);
    CHECK(frame.depth.width() == 64);
    CHECK(frame.depth.height() == 48);
    CHECK(frame.labels.width() == 64);
    // Top-left corner is bare floor: valid depth at the floor plane.
    CHECK(frame.depth.valid(0, 0));
    CHECK(frame.depth.at(0, 0) == doctest::Approx(config.floor_z).epsilon(1e-3));

    CHECK_THROWS_AS(load_frame(trial_dir, TrialFrameRecord{"nope.pgm", "nope.pgm", "", "", {}}),
                    IoError);
}

TEST_CASE("trial directories expand from parents and deduplicate") {
    TempDir dir("parttrack_trials");
    const SceneConfig config = small_config();
    const SceneScript script = script_trial(tap_touch(), 5, config);
    const std::string t1 = (dir.path() / "t01").string();
    const std::string t2 = (dir.path() / "t02").string();
    write_trial(t1, "t01", script, config, 1);
    write_trial(t2, "t02", script, config, 2);

    const std::vector<std::string> direct = {t2, t1};
    CHECK(expand_trial_dirs(direct) == std::vector<std::string>{t1, t2});

    const std::vector<std::string> parent = {dir.path().string()};
    CHECK(expand_trial_dirs(parent) == std::vector<std::string>{t1, t2});

    const std::vector<std::string> both = {dir.path().string(), t1};
    CHECK(expand_trial_dirs(both) == std::vector<std::string>{t1, t2});

    const std::vector<std::string> missing = {(dir.path() / "ghost").string()};
    CHECK_THROWS_AS(expand_trial_dirs(missing), IoError);

    TempDir empty("parttrack_empty");
    const std::vector<std::string> childless = {empty.path().string()};
    CHECK_THROWS_AS(expand_trial_dirs(childless), IoError);
}

TEST_CASE("training frames arrive segmented to the manifest threshold") {
    TempDir dir("parttrack_trials");
    const SceneConfig config = small_config();
    const SceneScript script = script_trial(tap_touch(), 5, config);
    const std::string t1 = (dir.path() / "t01").string();
    write_trial(t1, "t01", script, config, 1);

    const std::vector<std::string> dirs = {t1};
    const std::vector<LabeledFrame> frames = load_training_frames(dirs);
    REQUIRE(frames.size() == script.frames.size());
    for (const auto& frame : frames) {
        CHECK(frame.depth.width() == 64);
        // The floor is past the segmentation threshold, so corners go invalid.
        CHECK(!frame.depth.valid(0, 0));
        for (int y = 0; y < frame.depth.height(); ++y) {
            for (int x = 0; x < frame.depth.width(); ++x) {
                if (frame.labels.at(x, y) != kBackgroundLabel) CHECK(frame.depth.valid(x, y));
                if (frame.depth.valid(x, y))
                    CHECK(frame.depth.at(x, y) < config.segmentation_threshold);
            }
        }
    }
    // Foreground survives: the settle frames show torso, head, and hands.
    CHECK(frames[0].depth.count_valid() > 50);
}

TEST_CASE("manifest loading rejects missing and malformed files") {
    TempDir dir("parttrack_manifest");
    CHECK_THROWS_AS(load_manifest(dir.path().string()), IoError);

    auto write_manifest = [&](const std::string& body) {
        std::ofstream out(dir.path() / "manifest.json");
        out << body;
    };
    write_manifest("not json");
    CHECK_THROWS_AS(load_manifest(dir.path().string()), IoError);
    write_manifest(R"({"trial_id":"x"})");
    CHECK_THROWS_AS(load_manifest(dir.path().string()), IoError);

    // frame_count must agree with the frame list.
    write_manifest(R"({
 "trial_id": "x", "template": "t", "frame_count": 2, "width": 4, "height": 4,
 "intrinsics": {"fx": 10, "fy": 10, "cx": 1.5, "cy": 1.5},
 "segmentation_threshold": 2.0,
 "intended_steps": {"turn_on_water": false, "get_soap": false, "rinse_hands": false,
                    "turn_off_water": false, "dry_hands": false},
 "frames": []
})");
    CHECK_THROWS_AS(load_manifest(dir.path().string()), IoError);
}
