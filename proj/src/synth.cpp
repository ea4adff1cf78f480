#include "parttrack/synth.hpp"

#include <algorithm>
#include <cmath>

#include "parttrack/errors.hpp"
#include "parttrack/rng.hpp"

namespace parttrack {

namespace {

constexpr double kMinT = 1e-6;

struct Vec3 {
    double x, y, z;
};

double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

Vec3 sub(const WorldPoint& a, const WorldPoint& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }

// Ray p = t*dir from the origin; returns the smallest t beyond kMinT.
std::optional<double> ray_ellipsoid(const Vec3& dir, const WorldPoint& c, double rx, double ry,
                                    double rz) {
    const double ax = dir.x / rx, ay = dir.y / ry, az = dir.z / rz;
    const double bx = c.x / rx, by = c.y / ry, bz = c.z / rz;
    const double a = ax * ax + ay * ay + az * az;
    const double b = ax * bx + ay * by + az * bz;
    const double cterm = bx * bx + by * by + bz * bz - 1.0;
    const double disc = b * b - a * cterm;
    if (disc < 0.0) return std::nullopt;
    const double sq = std::sqrt(disc);
    const double t1 = (b - sq) / a;
    if (t1 > kMinT) return t1;
    const double t2 = (b + sq) / a;
    if (t2 > kMinT) return t2;
    return std::nullopt;
}

std::optional<double> ray_sphere(const Vec3& dir, const WorldPoint& c, double r) {
    return ray_ellipsoid(dir, c, r, r, r);
}

std::optional<double> ray_capsule(const Vec3& dir, const Capsule& cap) {
    std::optional<double> best = ray_sphere(dir, cap.a, cap.radius);
    if (const auto t = ray_sphere(dir, cap.b, cap.radius); t && (!best || *t < *best)) best = t;

    const Vec3 axis = sub(cap.b, cap.a);
    const double len = std::sqrt(dot(axis, axis));
    if (len > 1e-9) {
        const Vec3 u{axis.x / len, axis.y / len, axis.z / len};
        const Vec3 ca{cap.a.x, cap.a.y, cap.a.z};
        const double du = dot(dir, u);
        const double au = dot(ca, u);
        const Vec3 m{dir.x - du * u.x, dir.y - du * u.y, dir.z - du * u.z};
        const Vec3 n{-ca.x + au * u.x, -ca.y + au * u.y, -ca.z + au * u.z};
        const double a = dot(m, m);
        if (a > 1e-12) {
            const double b = dot(m, n);
            const double c = dot(n, n) - cap.radius * cap.radius;
            const double disc = b * b - a * c;
            if (disc >= 0.0) {
                const double sq = std::sqrt(disc);
                for (const double t : {(-b - sq) / a, (-b + sq) / a}) {
                    if (t <= kMinT) continue;
                    const double s = t * du - au;
                    if (s < 0.0 || s > len) continue;
                    if (!best || t < *best) best = t;
                    break;  // roots are ordered; the first valid is nearer
                }
            }
        }
    }
    return best;
}

void check_in_front(const PartPose& pose, const char* what) {
    if (pose.present && pose.center.z <= 0.05)
        throw ScriptError(std::string(what) + " is behind the camera");
}

}  // namespace

std::vector<ActivityRegion> default_regions(const SceneConfig& config) {
    const double y = 0.05;
    const double z = config.hand_plane_z;
    std::vector<ActivityRegion> regions = {
        {Activity::soap, {-0.40, y, z}, 0.08, 0.10, 0.14},
        {Activity::tap, {-0.20, y, z}, 0.08, 0.10, 0.14},
        {Activity::water, {0.00, y, z}, 0.08, 0.10, 0.14},
        {Activity::sink, {0.20, y, z}, 0.08, 0.10, 0.14},
        {Activity::towel, {0.42, y, z}, 0.08, 0.10, 0.14},
    };
    validate_regions(regions);
    return regions;
}

RenderedFrame render_frame(const ScriptFrame& frame, const CameraIntrinsics& k, int width,
                           int height, double noise_sigma, std::uint64_t rng_seed) {
    if (width <= 0 || height <= 0) throw InvalidInputError("raster dimensions must be positive");
    if (!(frame.floor_depth > 0.0)) throw ScriptError("floor plane must be in front of the camera");
    check_in_front(frame.head, "head");
    check_in_front(frame.left_hand, "left hand");
    check_in_front(frame.right_hand, "right hand");
    for (const auto& shape : frame.body_shapes) check_in_front(shape, "body shape");
    for (const auto& arm : frame.arms)
        if (arm.a.z <= 0.05 || arm.b.z <= 0.05) throw ScriptError("arm is behind the camera");

    struct Surface {
        const PartPose* pose;
        std::uint8_t label;
    };
    std::vector<Surface> ellipsoids;
    const auto add = [&ellipsoids](const PartPose& pose, BodyPart part) {
        if (pose.present) ellipsoids.push_back({&pose, label_of(part)});
    };
    add(frame.head, BodyPart::head);
    add(frame.left_hand, BodyPart::left_hand);
    add(frame.right_hand, BodyPart::right_hand);
    for (const auto& shape : frame.body_shapes) add(shape, BodyPart::body);

    RenderedFrame out{DepthImage(width, height), LabelImage(width, height), {}};
    std::array<int, kPartCount> pixel_counts{};
    Rng rng(rng_seed);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const Vec3 dir{(x - k.cx) / k.fx, (y - k.cy) / k.fy, 1.0};
            // dir.z == 1, so ray parameter t equals camera-space depth z.
            double best = frame.floor_depth;
            std::uint8_t label = kBackgroundLabel;
            for (const auto& surf : ellipsoids) {
                const auto t = ray_ellipsoid(dir, surf.pose->center, surf.pose->rx,
                                             surf.pose->ry, surf.pose->rz);
                if (t && *t < best) {
                    best = *t;
                    label = surf.label;
                }
            }
            for (const auto& arm : frame.arms) {
                const auto t = ray_capsule(dir, arm);
                if (t && *t < best) {
                    best = *t;
                    label = label_of(BodyPart::body);
                }
            }
            double depth = best;
            if (noise_sigma > 0.0) depth += rng.normal(noise_sigma);
            depth = std::clamp(depth, 0.05, 9.99);
            out.depth.set(x, y, static_cast<float>(depth));
            out.labels.set(x, y, label);
            if (label != kBackgroundLabel)
                ++pixel_counts[static_cast<std::size_t>(label - 1)];
        }
    }

    const auto record = [&](const PartPose& pose, BodyPart part, int slot) {
        PartRender& pr = out.parts[static_cast<std::size_t>(slot)];
        if (!pose.present) return;
        pr.center = pose.center;
        pr.surface_mean = {pose.center.x, pose.center.y, pose.center.z - (2.0 / 3.0) * pose.rz};
        pr.pixel_count = pixel_counts[static_cast<std::size_t>(part)];
        pr.present = pr.pixel_count > 0;
    };
    record(frame.left_hand, BodyPart::left_hand, 0);
    record(frame.right_hand, BodyPart::right_hand, 1);
    record(frame.head, BodyPart::head, 2);
    return out;
}

namespace {

const char* dwell_action(Activity a) {
    switch (a) {
        case Activity::soap: return "get_soap";
        case Activity::tap: return "use_tap";
        case Activity::water: return "rinse";
        case Activity::sink: return "at_sink";
        case Activity::towel: return "dry_hands";
        case Activity::away: break;
    }
    return "idle";
}

double blend(double a, double b, double t) {
    return a + (b - a) * (0.5 - 0.5 * std::cos(t * 3.14159265358979323846));
}

}  // namespace

SceneScript script_trial(const TrialTemplate& tmpl, std::uint64_t rng_seed,
                         const SceneConfig& config) {
    if (tmpl.segments.empty()) throw ScriptError("template has no segments");
    const std::vector<ActivityRegion> regions = default_regions(config);
    const auto region_center = [&regions](Activity a) -> const WorldPoint& {
        for (const auto& r : regions)
            if (r.activity == a) return r.center;
        throw ScriptError(std::string("no region for activity ") + activity_name(a));
    };

    const auto in_view = [&config](const WorldPoint& p, const char* what) {
        const auto [u, v] = project_to_pixel(p, config.k);
        if (u < 0.0 || u > config.width - 1 || v < 0.0 || v > config.height - 1)
            throw ScriptError(std::string(what) + " is outside the camera view");
    };

    Rng rng(rng_seed);
    const auto jitter = [&rng](const WorldPoint& base, double jx, double jy, double jz) {
        return WorldPoint{base.x + rng.uniform(-jx, jx), base.y + rng.uniform(-jy, jy),
                          base.z + rng.uniform(-jz, jz)};
    };

    const WorldPoint head = jitter(config.head_center, 0.02, 0.02, 0.01);
    const WorldPoint rest_left = jitter(config.left_rest, 0.01, 0.01, 0.0);
    const WorldPoint rest_right = jitter(config.right_rest, 0.01, 0.01, 0.0);
    in_view(head, "head");
    in_view(rest_left, "left rest position");
    in_view(rest_right, "right rest position");
    for (const auto& r : regions) in_view(r.center, "activity region");

    SceneScript script;
    script.template_name = tmpl.name;
    script.intended_steps = tmpl.intended_steps;

    WorldPoint left = rest_left;
    WorldPoint right = rest_right;

    const auto emit = [&](const WorldPoint& l, const WorldPoint& r, bool present,
                          const std::string& action, const std::string& activity) {
        ScriptFrame frame;
        frame.floor_depth = config.floor_z;
        frame.action = action;
        frame.activity = activity;
        const auto& hr = config.hand_radii;
        frame.left_hand = {present, l, hr[0], hr[1], hr[2]};
        frame.right_hand = {present, r, hr[0], hr[1], hr[2]};
        if (present) {
            frame.head = {true, head, config.head_radii[0], config.head_radii[1],
                          config.head_radii[2]};
            frame.body_shapes.push_back({true, config.torso_center, config.torso_radii[0],
                                         config.torso_radii[1], config.torso_radii[2]});
            const auto arm = [&config](const WorldPoint& shoulder, const WorldPoint& hand) {
                const Vec3 d = sub(shoulder, hand);
                const double len = std::sqrt(dot(d, d));
                const double pull = config.hand_radii[0] + 0.005;
                const WorldPoint wrist{hand.x + d.x / len * pull, hand.y + d.y / len * pull,
                                       hand.z + d.z / len * pull};
                return Capsule{shoulder, wrist, config.arm_radius};
            };
            frame.arms.push_back(arm(config.left_shoulder, l));
            frame.arms.push_back(arm(config.right_shoulder, r));
        }
        script.frames.push_back(std::move(frame));
    };

    const auto transit = [&](const WorldPoint& target_left, const WorldPoint& target_right) {
        const bool move_left = distance(left, target_left) > 1e-9;
        const bool move_right = distance(right, target_right) > 1e-9;
        if (!move_left && !move_right) return;
        for (int f = 1; f <= config.transit_frames; ++f) {
            const double t = static_cast<double>(f) / (config.transit_frames + 1);
            WorldPoint l = left, r = right;
            if (move_left)
                l = {blend(left.x, target_left.x, t), blend(left.y, target_left.y, t),
                     config.transit_z};
            if (move_right)
                r = {blend(right.x, target_right.x, t), blend(right.y, target_right.y, t),
                     config.transit_z};
            emit(l, r, true, "move", activity_name(Activity::away));
        }
        left = target_left;
        right = target_right;
    };

    // A short settle at rest gives body-only context frames at trial start.
    for (int f = 0; f < 3; ++f) emit(left, right, true, "idle", activity_name(Activity::away));

    for (const auto& seg : tmpl.segments) {
        if (seg.frames < 1) throw ScriptError("segment must span at least one frame");
        if (seg.kind == TemplateSegment::Kind::absent) {
            for (int f = 0; f < seg.frames; ++f)
                emit(left, right, false, "away", activity_name(Activity::away));
            left = rest_left;
            right = rest_right;
            continue;
        }
        if (seg.activity == Activity::away)
            throw ScriptError("dwell segments need a region activity");
        const WorldPoint target = jitter(region_center(seg.activity), 0.02, 0.02, 0.01);
        in_view(target, "dwell target");
        const WorldPoint target_left = seg.hand == Hand::left ? target : rest_left;
        const WorldPoint target_right = seg.hand == Hand::right ? target : rest_right;
        transit(target_left, target_right);
        for (int f = 0; f < seg.frames; ++f)
            emit(left, right, true, dwell_action(seg.activity), activity_name(seg.activity));
    }
    return script;
}

namespace {

StepFlags flags_of(bool on, bool soap, bool rinse, bool off, bool dry) {
    StepFlags f{};
    f[static_cast<std::size_t>(Step::turn_on_water)] = on;
    f[static_cast<std::size_t>(Step::get_soap)] = soap;
    f[static_cast<std::size_t>(Step::rinse_hands)] = rinse;
    f[static_cast<std::size_t>(Step::turn_off_water)] = off;
    f[static_cast<std::size_t>(Step::dry_hands)] = dry;
    return f;
}

TemplateSegment dwell(Activity a, int frames, Hand hand = Hand::right) {
    return {TemplateSegment::Kind::dwell, a, frames, hand};
}

TemplateSegment absent(int frames) {
    return {TemplateSegment::Kind::absent, Activity::away, frames, Hand::right};
}

std::vector<TrialTemplate> build_registry() {
    using A = Activity;
    std::vector<TrialTemplate> reg;
    reg.push_back({"canonical",
                   {dwell(A::tap, 6), dwell(A::soap, 6), dwell(A::water, 6), dwell(A::tap, 6),
                    dwell(A::towel, 6)},
                   flags_of(true, true, true, true, true)});
    reg.push_back({"soap_first",
                   {dwell(A::soap, 6), dwell(A::tap, 6), dwell(A::water, 6), dwell(A::tap, 6),
                    dwell(A::towel, 6)},
                   flags_of(true, true, true, true, true)});
    reg.push_back({"skip_towel",
                   {dwell(A::tap, 6), dwell(A::soap, 6), dwell(A::water, 6), dwell(A::tap, 6)},
                   flags_of(true, true, true, true, false)});
    // Without soap, rinse stays blocked, and with it everything downstream.
    reg.push_back({"skip_soap",
                   {dwell(A::tap, 6), dwell(A::water, 6), dwell(A::towel, 6)},
                   flags_of(true, false, false, false, false)});
    reg.push_back({"skip_tap_off",
                   {dwell(A::tap, 6), dwell(A::soap, 6), dwell(A::water, 6), dwell(A::towel, 6)},
                   flags_of(true, true, true, false, true)});
    reg.push_back({"water_only",
                   {dwell(A::water, 6), dwell(A::sink, 6)},
                   flags_of(false, false, false, false, false)});
    // Two-frame touches stay below the persistence rule.
    reg.push_back({"brief_touches",
                   {dwell(A::tap, 2), dwell(A::soap, 2), dwell(A::water, 2)},
                   flags_of(false, false, false, false, false)});
    reg.push_back({"left_handed",
                   {dwell(A::tap, 6, Hand::left), dwell(A::soap, 6, Hand::left),
                    dwell(A::water, 6, Hand::left), dwell(A::tap, 6, Hand::left),
                    dwell(A::towel, 6, Hand::left)},
                   flags_of(true, true, true, true, true)});
    reg.push_back({"absent_mid",
                   {dwell(A::tap, 6), dwell(A::soap, 6), absent(5), dwell(A::water, 6),
                    dwell(A::tap, 6), dwell(A::towel, 6)},
                   flags_of(true, true, true, true, true)});
    reg.push_back({"sink_distraction",
                   {dwell(A::tap, 6), dwell(A::sink, 6), dwell(A::soap, 6), dwell(A::water, 6),
                    dwell(A::towel, 6)},
                   flags_of(true, true, true, false, true)});
    return reg;
}

}  // namespace

const std::vector<TrialTemplate>& template_registry() {
    static const std::vector<TrialTemplate> registry = build_registry();
    return registry;
}

const TrialTemplate& template_by_name(const std::string& name) {
    for (const auto& tmpl : template_registry())
        if (tmpl.name == name) return tmpl;
    throw ScriptError("unknown trial template: " + name);
}

}  // namespace parttrack
