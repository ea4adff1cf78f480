#include "parttrack/activity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "parttrack/errors.hpp"

namespace parttrack {

const char* activity_name(Activity a) {
    return kActivityNames[static_cast<std::size_t>(a)];
}

Activity activity_from_name(const std::string& name) {
    for (int i = 0; i < kActivityCount; ++i)
        if (name == kActivityNames[static_cast<std::size_t>(i)]) return static_cast<Activity>(i);
    throw ConfigError("unknown activity: " + name);
}

bool region_contains(const ActivityRegion& region, const WorldPoint& p) {
    const double dx = (p.x - region.center.x) / region.rx;
    const double dy = (p.y - region.center.y) / region.ry;
    const double dz = (p.z - region.center.z) / region.rz;
    return dx * dx + dy * dy + dz * dz <= 1.0;
}

double ellipsoid_distance(const WorldPoint& p, const WorldPoint& center, double rx, double ry,
                          double rz) {
    const double dx = p.x - center.x;
    const double dy = p.y - center.y;
    const double dz = p.z - center.z;
    const double nx = dx / rx, ny = dy / ry, nz = dz / rz;
    if (nx * nx + ny * ny + nz * nz <= 1.0) return 0.0;

    // Closest surface point has components r_i^2 d_i / (t + r_i^2) for the
    // unique t >= 0 where the point lands on the surface; g(t) below is
    // strictly decreasing with g(0) > 1.
    const double r2[3] = {rx * rx, ry * ry, rz * rz};
    const double d[3] = {dx, dy, dz};
    const auto g = [&](double t) {
        double s = 0.0;
        for (int i = 0; i < 3; ++i) {
            const double q = std::sqrt(r2[i]) * d[i] / (t + r2[i]);
            s += q * q;
        }
        return s;
    };
    double lo = 0.0;
    double hi = std::max({r2[0], r2[1], r2[2]});
    while (g(hi) > 1.0) hi *= 2.0;
    for (int iter = 0; iter < 200 && hi - lo > 1e-14 * (1.0 + hi); ++iter) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) > 1.0 ? lo : hi) = mid;
    }
    const double t = 0.5 * (lo + hi);
    double dist_sq = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double diff = d[i] - r2[i] * d[i] / (t + r2[i]);
        dist_sq += diff * diff;
    }
    return std::sqrt(dist_sq);
}

namespace {

bool regions_overlap(const ActivityRegion& a, const ActivityRegion& b) {
    // Scale space so that a becomes the unit ball at the origin; b stays an
    // axis-aligned ellipsoid, and the sets intersect iff the scaled b comes
    // within distance 1 of the origin.
    const WorldPoint center{(b.center.x - a.center.x) / a.rx, (b.center.y - a.center.y) / a.ry,
                            (b.center.z - a.center.z) / a.rz};
    const double dist =
        ellipsoid_distance(WorldPoint{0.0, 0.0, 0.0}, center, b.rx / a.rx, b.ry / a.ry,
                           b.rz / a.rz);
    return dist <= 1.0;
}

}  // namespace

void validate_regions(std::span<const ActivityRegion> regions) {
    for (const auto& r : regions) {
        if (!(r.rx > 0.0 && r.ry > 0.0 && r.rz > 0.0))
            throw ConfigError("region radii must be positive");
        if (r.activity == Activity::away)
            throw ConfigError("away is not a region activity");
    }
    for (std::size_t i = 0; i < regions.size(); ++i) {
        for (std::size_t j = i + 1; j < regions.size(); ++j) {
            if (regions[i].activity == regions[j].activity)
                throw ConfigError(std::string("duplicate region activity: ") +
                                  activity_name(regions[i].activity));
            if (regions_overlap(regions[i], regions[j]))
                throw ConfigError(std::string("regions overlap: ") +
                                  activity_name(regions[i].activity) + " and " +
                                  activity_name(regions[j].activity));
        }
    }
}

std::vector<ActivityRegion> load_regions(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read region config " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("malformed region config " + path + ": " + e.what());
    }
    if (!doc.is_array()) throw ConfigError("region config must be a JSON list");
    std::vector<ActivityRegion> regions;
    try {
        for (const auto& item : doc) {
            ActivityRegion r;
            r.activity = activity_from_name(item.at("activity").get<std::string>());
            const auto& c = item.at("center");
            const auto& radii = item.at("radii");
            if (c.size() != 3 || radii.size() != 3)
                throw ConfigError("center and radii must have 3 components");
            r.center = {c[0].get<double>(), c[1].get<double>(), c[2].get<double>()};
            r.rx = radii[0].get<double>();
            r.ry = radii[1].get<double>();
            r.rz = radii[2].get<double>();
            regions.push_back(r);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("malformed region config " + path + ": " + e.what());
    }
    validate_regions(regions);
    return regions;
}

void save_regions(const std::string& path, std::span<const ActivityRegion> regions) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (const auto& r : regions) {
        nlohmann::ordered_json item;
        item["activity"] = activity_name(r.activity);
        item["center"] = {r.center.x, r.center.y, r.center.z};
        item["radii"] = {r.rx, r.ry, r.rz};
        doc.push_back(item);
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot write region config " + path);
    out << doc.dump(1) << '\n';
}

Activity locate(const WorldPoint& hand, std::span<const ActivityRegion> regions) {
    for (const auto& region : regions)
        if (region_contains(region, hand)) return region.activity;
    return Activity::away;
}

ActivityState::ActivityState(std::span<const ActivityRegion> regions)
    : regions_(regions.begin(), regions.end()) {
    validate_regions(regions_);
}

void ActivityState::update_hand(HandState& hand, const std::optional<WorldPoint>& position) const {
    const Activity region = position ? locate(*position, regions_) : Activity::away;
    hand.streak = region == hand.region ? hand.streak + 1 : 1;
    hand.region = region;
    hand.active =
        (region != Activity::away && hand.streak >= kPersistenceFrames) ? region : Activity::away;
}

std::array<Activity, 2> ActivityState::update(const std::optional<WorldPoint>& left,
                                              const std::optional<WorldPoint>& right) {
    update_hand(hands_[0], left);
    update_hand(hands_[1], right);
    return active();
}

const char* step_name(Step s) { return kStepNames[static_cast<std::size_t>(s)]; }

Step step_from_name(const std::string& name) {
    for (int i = 0; i < kStepCount; ++i)
        if (name == kStepNames[static_cast<std::size_t>(i)]) return static_cast<Step>(i);
    throw ConfigError("unknown step: " + name);
}

StepPrecedence StepPrecedence::standard() {
    StepPrecedence p;
    p.deps[static_cast<std::size_t>(Step::rinse_hands)] = {Step::turn_on_water, Step::get_soap};
    p.deps[static_cast<std::size_t>(Step::turn_off_water)] = {Step::rinse_hands};
    p.deps[static_cast<std::size_t>(Step::dry_hands)] = {Step::rinse_hands};
    return p;
}

StepPrecedence load_precedence(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read precedence config " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("malformed precedence config " + path + ": " + e.what());
    }
    if (!doc.is_object()) throw ConfigError("precedence config must be a JSON object");
    StepPrecedence p;
    for (const auto& [key, value] : doc.items()) {
        const Step step = step_from_name(key);
        if (!value.is_array()) throw ConfigError("precedence entries must be lists");
        auto& deps = p.deps[static_cast<std::size_t>(step)];
        deps.clear();
        for (const auto& dep : value) deps.push_back(step_from_name(dep.get<std::string>()));
    }
    return p;
}

StepTracker::StepTracker(StepPrecedence precedence) : precedence_(std::move(precedence)) {}

bool StepTracker::deps_met(Step s) const {
    for (const Step dep : precedence_.deps[static_cast<std::size_t>(s)])
        if (!flags_[static_cast<std::size_t>(dep)]) return false;
    return true;
}

void StepTracker::try_complete(Step s) {
    if (!flags_[static_cast<std::size_t>(s)] && deps_met(s))
        flags_[static_cast<std::size_t>(s)] = true;
}

void StepTracker::on_activation(Activity a) {
    switch (a) {
        case Activity::tap:
            if (flags_[static_cast<std::size_t>(Step::rinse_hands)])
                try_complete(Step::turn_off_water);
            else
                try_complete(Step::turn_on_water);
            break;
        case Activity::soap: try_complete(Step::get_soap); break;
        case Activity::water: try_complete(Step::rinse_hands); break;
        case Activity::towel: try_complete(Step::dry_hands); break;
        case Activity::sink:
        case Activity::away: break;
    }
}

int StepTracker::completed_count() const {
    return static_cast<int>(std::count(flags_.begin(), flags_.end(), true));
}

TrialTracker::TrialTracker(std::span<const ActivityRegion> regions, StepPrecedence precedence)
    : state_(regions), tracker_(std::move(precedence)) {}

std::array<Activity, 2> TrialTracker::observe(const std::optional<WorldPoint>& left,
                                              const std::optional<WorldPoint>& right) {
    const std::array<Activity, 2> active = state_.update(left, right);
    for (int h = 0; h < 2; ++h) {
        if (active[static_cast<std::size_t>(h)] != Activity::away &&
            active[static_cast<std::size_t>(h)] != prev_active_[static_cast<std::size_t>(h)])
            tracker_.on_activation(active[static_cast<std::size_t>(h)]);
    }
    prev_active_ = active;
    return active;
}

BinaryCounts trial_confusion(const StepFlags& tracked, const StepFlags& truth) {
    BinaryCounts c;
    for (int s = 0; s < kStepCount; ++s) {
        const bool t = tracked[static_cast<std::size_t>(s)];
        const bool g = truth[static_cast<std::size_t>(s)];
        if (t && g)
            ++c.tp;
        else if (!t && !g)
            ++c.tn;
        else if (t)
            ++c.fp;
        else
            ++c.fn;
    }
    return c;
}

}  // namespace parttrack
