#include "parttrack/image.hpp"

#include <cmath>

namespace parttrack {

const char* part_name(BodyPart p) { return kPartNames[static_cast<int>(p)]; }

std::optional<BodyPart> part_from_name(const std::string& name) {
    for (int i = 0; i < kPartCount; ++i) {
        if (name == kPartNames[i]) return static_cast<BodyPart>(i);
    }
    return std::nullopt;
}

double squared_distance(const WorldPoint& a, const WorldPoint& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return dx * dx + dy * dy + dz * dz;
}

double distance(const WorldPoint& a, const WorldPoint& b) {
    return std::sqrt(squared_distance(a, b));
}

CameraIntrinsics CameraIntrinsics::scaled_default(int width, int height) {
    CameraIntrinsics k;
    k.fx = 571.4 * width / 640.0;
    k.fy = 571.4 * height / 480.0;
    k.cx = (width - 1) / 2.0;
    k.cy = (height - 1) / 2.0;
    return k;
}

namespace {

void check_dims(int width, int height) {
    if (width <= 0 || height <= 0) {
        throw InvalidInputError("raster dimensions must be positive");
    }
}

void check_depth_value(float d) {
    if (!(d >= 0.0f) || d > DepthImage::kMaxDepthMeters) {
        throw InvalidInputError("depth out of range [0, 10] m: " + std::to_string(d));
    }
}

}  // namespace

DepthImage::DepthImage(int width, int height) : width_(width), height_(height) {
    check_dims(width, height);
    depths_.assign(static_cast<std::size_t>(width) * height, 0.0f);
}

DepthImage::DepthImage(int width, int height, std::vector<float> depths)
    : width_(width), height_(height), depths_(std::move(depths)) {
    check_dims(width, height);
    if (depths_.size() != static_cast<std::size_t>(width) * height) {
        throw InvalidInputError("depth raster size does not match dimensions");
    }
    for (float d : depths_) check_depth_value(d);
}

void DepthImage::set(int x, int y, float depth) {
    check_depth_value(depth);
    depths_[static_cast<std::size_t>(y) * width_ + x] = depth;
}

std::size_t DepthImage::count_valid() const {
    std::size_t n = 0;
    for (float d : depths_) n += d > 0.0f;
    return n;
}

std::vector<Pixel> DepthImage::valid_pixels() const {
    std::vector<Pixel> out;
    out.reserve(count_valid());
    for (int y = 0; y < height_; ++y) {
        for (int x = 0; x < width_; ++x) {
            if (at(x, y) > 0.0f) out.push_back({x, y});
        }
    }
    return out;
}

LabelImage::LabelImage(int width, int height) : width_(width), height_(height) {
    check_dims(width, height);
    labels_.assign(static_cast<std::size_t>(width) * height, kBackgroundLabel);
}

LabelImage::LabelImage(int width, int height, std::vector<std::uint8_t> labels)
    : width_(width), height_(height), labels_(std::move(labels)) {
    check_dims(width, height);
    if (labels_.size() != static_cast<std::size_t>(width) * height) {
        throw InvalidInputError("label raster size does not match dimensions");
    }
    for (std::uint8_t l : labels_) {
        if (l > kPartCount) throw InvalidInputError("label value out of range");
    }
}

void LabelImage::set(int x, int y, std::uint8_t label) {
    if (label > kPartCount) throw InvalidInputError("label value out of range");
    labels_[static_cast<std::size_t>(y) * width_ + x] = label;
}

DepthImage segment_foreground(const DepthImage& raw, double background_threshold) {
    if (raw.width() <= 0 || raw.height() <= 0) {
        throw InvalidInputError("segment_foreground: empty image");
    }
    if (!(background_threshold > 0.0) || background_threshold > DepthImage::kMaxDepthMeters) {
        throw InvalidInputError("segment_foreground: threshold must be in (0, 10] m");
    }
    std::vector<float> out(raw.data());
    for (float& d : out) {
        if (d >= static_cast<float>(background_threshold)) d = 0.0f;
    }
    return DepthImage(raw.width(), raw.height(), std::move(out));
}

WorldPoint project_to_world(const DepthImage& img, Pixel px, const CameraIntrinsics& k) {
    if (!img.in_bounds(px)) throw InvalidInputError("project_to_world: pixel out of bounds");
    const double z = img.at(px);
    if (z <= 0.0) throw NoDepthError("project_to_world: pixel has no depth reading");
    return {(px.x - k.cx) * z / k.fx, (px.y - k.cy) * z / k.fy, z};
}

std::pair<double, double> project_to_pixel(const WorldPoint& p, const CameraIntrinsics& k) {
    if (p.z <= 0.0) throw InvalidInputError("project_to_pixel: point behind camera");
    return {p.x * k.fx / p.z + k.cx, p.y * k.fy / p.z + k.cy};
}

std::optional<WorldPoint> part_center_of_mass(const LabelImage& labels, const DepthImage& img,
                                              BodyPart part, const CameraIntrinsics& k) {
    if (labels.width() != img.width() || labels.height() != img.height()) {
        throw InvalidInputError("part_center_of_mass: raster dimensions differ");
    }
    const std::uint8_t wanted = label_of(part);
    WorldPoint sum;
    std::size_t n = 0;
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            if (labels.at(x, y) != wanted) continue;
            const WorldPoint p = project_to_world(img, {x, y}, k);
            sum.x += p.x;
            sum.y += p.y;
            sum.z += p.z;
            ++n;
        }
    }
    if (n == 0) return std::nullopt;
    return WorldPoint{sum.x / n, sum.y / n, sum.z / n};
}

LabelImage apply_body_fallback(const LabelImage& partial, const DepthImage& foreground) {
    if (partial.width() != foreground.width() || partial.height() != foreground.height()) {
        throw InvalidInputError("apply_body_fallback: raster dimensions differ");
    }
    LabelImage out = partial;
    for (int y = 0; y < out.height(); ++y) {
        for (int x = 0; x < out.width(); ++x) {
            if (out.at(x, y) == kBackgroundLabel && foreground.valid(x, y)) {
                out.set(x, y, label_of(BodyPart::body));
            }
        }
    }
    return out;
}

}  // namespace parttrack
