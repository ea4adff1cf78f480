#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "parttrack/image.hpp"
#include "parttrack/metrics.hpp"

namespace parttrack {

enum class Activity { away = 0, soap, tap, water, sink, towel };
inline constexpr int kActivityCount = 6;
inline constexpr std::array<const char*, kActivityCount> kActivityNames = {
    "away", "soap", "tap", "water", "sink", "towel"};

const char* activity_name(Activity a);
Activity activity_from_name(const std::string& name);

// Axis-aligned world-space spheroid; containment is boundary-inclusive.
struct ActivityRegion {
    Activity activity = Activity::soap;
    WorldPoint center;
    double rx = 0.0, ry = 0.0, rz = 0.0;
};

bool region_contains(const ActivityRegion& region, const WorldPoint& p);

// Exact distance from a point to a solid axis-aligned ellipsoid (0 inside).
double ellipsoid_distance(const WorldPoint& p, const WorldPoint& center, double rx, double ry,
                          double rz);

// Duplicate activities, non-positive radii, or any pairwise overlap
// (touching counts) raise ConfigError.
void validate_regions(std::span<const ActivityRegion> regions);

std::vector<ActivityRegion> load_regions(const std::string& path);
void save_regions(const std::string& path, std::span<const ActivityRegion> regions);

Activity locate(const WorldPoint& hand, std::span<const ActivityRegion> regions);

inline constexpr int kPersistenceFrames = 3;

enum class Hand { left = 0, right = 1 };

// Per-hand activation with the 3-consecutive-frame persistence rule. An
// absent hand counts as away; any region change resets the streak.
class ActivityState {
public:
    explicit ActivityState(std::span<const ActivityRegion> regions);

    std::array<Activity, 2> update(const std::optional<WorldPoint>& left,
                                   const std::optional<WorldPoint>& right);
    std::array<Activity, 2> active() const { return {hands_[0].active, hands_[1].active}; }

private:
    struct HandState {
        Activity region = Activity::away;
        int streak = 0;
        Activity active = Activity::away;
    };
    void update_hand(HandState& hand, const std::optional<WorldPoint>& position) const;

    std::vector<ActivityRegion> regions_;
    std::array<HandState, 2> hands_;
};

enum class Step { turn_on_water = 0, get_soap, rinse_hands, turn_off_water, dry_hands };
inline constexpr int kStepCount = 5;
inline constexpr std::array<const char*, kStepCount> kStepNames = {
    "turn_on_water", "get_soap", "rinse_hands", "turn_off_water", "dry_hands"};

const char* step_name(Step s);
Step step_from_name(const std::string& name);

using StepFlags = std::array<bool, kStepCount>;

// deps[s] lists the steps that must be complete before s can complete.
struct StepPrecedence {
    std::array<std::vector<Step>, kStepCount> deps;

    // turn_on_water and get_soap are unordered; both gate rinse_hands;
    // rinse_hands gates turn_off_water and dry_hands.
    static StepPrecedence standard();
};

StepPrecedence load_precedence(const std::string& path);

// Consumes activity activation events and accumulates step completions.
// The shared tap region means turn_on_water until rinse_hands completes,
// then turn_off_water. sink maps to no step.
class StepTracker {
public:
    StepTracker() : StepTracker(StepPrecedence::standard()) {}
    explicit StepTracker(StepPrecedence precedence);

    void on_activation(Activity a);
    const StepFlags& flags() const { return flags_; }
    int completed_count() const;

private:
    bool deps_met(Step s) const;
    void try_complete(Step s);

    StepPrecedence precedence_;
    StepFlags flags_{};
};

// Feeds per-frame hand observations through persistence into step tracking;
// activations fire on rising edges, left hand processed before right.
class TrialTracker {
public:
    TrialTracker(std::span<const ActivityRegion> regions, StepPrecedence precedence);

    std::array<Activity, 2> observe(const std::optional<WorldPoint>& left,
                                    const std::optional<WorldPoint>& right);
    const StepFlags& flags() const { return tracker_.flags(); }
    int completed_count() const { return tracker_.completed_count(); }

private:
    ActivityState state_;
    StepTracker tracker_;
    std::array<Activity, 2> prev_active_{Activity::away, Activity::away};
};

// Per-step agreement between tracked and ground-truth completion flags.
BinaryCounts trial_confusion(const StepFlags& tracked, const StepFlags& truth);

}  // namespace parttrack
