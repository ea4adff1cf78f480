#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "parttrack/errors.hpp"

namespace parttrack {

// Body part classes carried by leaf PDFs, in PDF index order. Label rasters
// store part index + 1; 0 is background/unlabeled.
enum class BodyPart : int { left_hand = 0, right_hand = 1, head = 2, body = 3 };

inline constexpr int kPartCount = 4;
inline constexpr std::array<const char*, kPartCount> kPartNames = {
    "left_hand", "right_hand", "head", "body"};

inline constexpr std::uint8_t kBackgroundLabel = 0;

inline std::uint8_t label_of(BodyPart p) { return static_cast<std::uint8_t>(static_cast<int>(p) + 1); }
inline BodyPart part_of_label(std::uint8_t label) { return static_cast<BodyPart>(label - 1); }
const char* part_name(BodyPart p);
std::optional<BodyPart> part_from_name(const std::string& name);

using Pdf = std::array<double, kPartCount>;

struct Pixel {
    int x = 0;
    int y = 0;
    bool operator==(const Pixel&) const = default;
};

struct WorldPoint {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

double distance(const WorldPoint& a, const WorldPoint& b);
double squared_distance(const WorldPoint& a, const WorldPoint& b);

struct CameraIntrinsics {
    double fx = 571.4;
    double fy = 571.4;
    double cx = 319.5;
    double cy = 239.5;

    // Default intrinsics rescaled to a non-640x480 raster, principal point at
    // the raster center.
    static CameraIntrinsics scaled_default(int width, int height);
};

// Range raster in meters; 0 marks a pixel the sensor could not resolve.
class DepthImage {
public:
    static constexpr float kMaxDepthMeters = 10.0f;

    DepthImage() = default;
    DepthImage(int width, int height);
    DepthImage(int width, int height, std::vector<float> depths);

    int width() const { return width_; }
    int height() const { return height_; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width_ && y >= 0 && y < height_; }
    bool in_bounds(Pixel px) const { return in_bounds(px.x, px.y); }

    float at(int x, int y) const { return depths_[static_cast<std::size_t>(y) * width_ + x]; }
    float at(Pixel px) const { return at(px.x, px.y); }
    bool valid(int x, int y) const { return in_bounds(x, y) && at(x, y) > 0.0f; }
    bool valid(Pixel px) const { return valid(px.x, px.y); }

    void set(int x, int y, float depth);
    const std::vector<float>& data() const { return depths_; }

    std::size_t count_valid() const;
    std::vector<Pixel> valid_pixels() const;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<float> depths_;
};

// Per-pixel part labels; dimensions must match the paired DepthImage.
class LabelImage {
public:
    LabelImage() = default;
    LabelImage(int width, int height);
    LabelImage(int width, int height, std::vector<std::uint8_t> labels);

    int width() const { return width_; }
    int height() const { return height_; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width_ && y >= 0 && y < height_; }

    std::uint8_t at(int x, int y) const { return labels_[static_cast<std::size_t>(y) * width_ + x]; }
    std::uint8_t at(Pixel px) const { return at(px.x, px.y); }
    void set(int x, int y, std::uint8_t label);
    const std::vector<std::uint8_t>& data() const { return labels_; }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> labels_;
};

// Pixels at or beyond the threshold become invalid; pixels already invalid
// stay that way. Idempotent.
DepthImage segment_foreground(const DepthImage& raw, double background_threshold);

// Pinhole back-projection of a valid pixel into the camera-centered frame.
WorldPoint project_to_world(const DepthImage& img, Pixel px, const CameraIntrinsics& k);

// Forward projection to continuous pixel coordinates.
std::pair<double, double> project_to_pixel(const WorldPoint& p, const CameraIntrinsics& k);

// Unweighted world-space mean of the pixels carrying `part`; absent when the
// part has no pixels.
std::optional<WorldPoint> part_center_of_mass(const LabelImage& labels, const DepthImage& img,
                                              BodyPart part, const CameraIntrinsics& k);

// Unlabeled foreground pixels become `body`; labeled pixels are untouched.
LabelImage apply_body_fallback(const LabelImage& partial, const DepthImage& foreground);

}  // namespace parttrack
