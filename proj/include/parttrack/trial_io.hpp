#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "parttrack/activity.hpp"
#include "parttrack/forest.hpp"
#include "parttrack/image.hpp"
#include "parttrack/synth.hpp"

namespace parttrack {

struct FramePartTruth {
    bool present = false;
    WorldPoint center;
};

struct TrialFrameRecord {
    std::string depth_file;
    std::string label_file;
    std::string action;
    std::string activity;
    std::array<FramePartTruth, 3> parts;  // left hand, right hand, head
};

struct TrialManifest {
    std::string trial_id;
    std::string template_name;
    int frame_count = 0;
    int width = 0;
    int height = 0;
    CameraIntrinsics k;
    double segmentation_threshold = 0.0;
    StepFlags intended_steps{};
    std::vector<TrialFrameRecord> frames;
};

// Renders every script frame (per-frame seeds derived from rng_seed), writes
// the PGM pair per frame plus manifest.json, and returns the manifest.
TrialManifest write_trial(const std::string& dir, const std::string& trial_id,
                          const SceneScript& script, const SceneConfig& config,
                          std::uint64_t rng_seed);

TrialManifest load_manifest(const std::string& dir);

struct TrialFrameData {
    DepthImage depth;    // raw, background plane intact
    LabelImage labels;
};

TrialFrameData load_frame(const std::string& dir, const TrialFrameRecord& record);

// Paths that are trial directories pass through; other directories are
// scanned one level deep for manifest.json children. Sorted, deduplicated.
std::vector<std::string> expand_trial_dirs(std::span<const std::string> paths);

// Loads every frame of every trial with foreground segmentation applied
// (each manifest's own threshold).
std::vector<LabeledFrame> load_training_frames(std::span<const std::string> trial_dirs);

}  // namespace parttrack
