#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "parttrack/activity.hpp"
#include "parttrack/image.hpp"

namespace parttrack {

struct PartPose {
    bool present = false;
    WorldPoint center;
    double rx = 0.0, ry = 0.0, rz = 0.0;
};

struct Capsule {
    WorldPoint a, b;
    double radius = 0.0;
};

struct ScriptFrame {
    PartPose head;
    PartPose left_hand;
    PartPose right_hand;
    std::vector<PartPose> body_shapes;  // torso etc., labeled body
    std::vector<Capsule> arms;          // labeled body
    double floor_depth = 2.4;
    std::string action;
    std::string activity;  // ground-truth activity for the acting hand
};

struct SceneScript {
    std::string template_name;
    std::vector<ScriptFrame> frames;
    StepFlags intended_steps{};
};

// Scene geometry for an overhead sink-counter mock-up. Activity regions sit
// on a counter plane in front of the actor; the camera looks straight down
// from the origin.
struct SceneConfig {
    int width = 320;
    int height = 240;
    CameraIntrinsics k = CameraIntrinsics::scaled_default(320, 240);
    double floor_z = 2.4;
    double segmentation_threshold = 2.25;
    double noise_sigma = 0.003;

    double hand_plane_z = 1.95;
    double transit_z = 1.65;  // below every region: transits never activate
    int transit_frames = 5;

    WorldPoint head_center{0.0, -0.42, 1.60};
    std::array<double, 3> head_radii{0.10, 0.08, 0.06};
    WorldPoint torso_center{0.0, -0.40, 1.80};
    std::array<double, 3> torso_radii{0.17, 0.13, 0.11};
    std::array<double, 3> hand_radii{0.045, 0.045, 0.03};
    WorldPoint left_shoulder{-0.15, -0.38, 1.82};
    WorldPoint right_shoulder{0.15, -0.38, 1.82};
    WorldPoint left_rest{-0.28, -0.30, 1.95};
    WorldPoint right_rest{0.28, -0.30, 1.95};
    double arm_radius = 0.028;
};

// The five counter regions (soap, tap, water, sink, towel) in a
// non-overlapping row.
std::vector<ActivityRegion> default_regions(const SceneConfig& config = {});

struct TemplateSegment {
    enum class Kind { dwell, absent } kind = Kind::dwell;
    Activity activity = Activity::away;
    int frames = 4;
    Hand hand = Hand::right;
};

struct TrialTemplate {
    std::string name;
    std::vector<TemplateSegment> segments;
    StepFlags intended_steps{};  // derived by hand from the segment order
};

const std::vector<TrialTemplate>& template_registry();
const TrialTemplate& template_by_name(const std::string& name);

// Builds the per-frame pose sequence for one trial: jittered dwell targets
// inside each region, flat low-z transits between them (so only dwell frames
// sit inside a region), and optional walked-away gaps.
SceneScript script_trial(const TrialTemplate& tmpl, std::uint64_t rng_seed,
                         const SceneConfig& config = {});

struct PartRender {
    bool present = false;
    WorldPoint center;        // ellipsoid center (scoring ground truth)
    WorldPoint surface_mean;  // analytic mean of the visible surface
    int pixel_count = 0;
};

struct RenderedFrame {
    DepthImage depth;
    LabelImage labels;
    std::array<PartRender, 3> parts;  // left hand, right hand, head
};

RenderedFrame render_frame(const ScriptFrame& frame, const CameraIntrinsics& k, int width,
                           int height, double noise_sigma, std::uint64_t rng_seed);

}  // namespace parttrack
