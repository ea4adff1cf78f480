#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "parttrack/image.hpp"

namespace parttrack {

// Probe value when an offset lands off-image, on background, or on an invalid
// pixel. Anything greater than the maximum valid depth works; 100 m keeps the
// sentinel far from real readings.
inline constexpr double kBackgroundDepth = 100.0;

// Offset probe pair in pixel-meters. Dividing by the center pixel's depth
// turns each into a pixel offset covering a fixed world-space extent.
struct Offset {
    double x = 0.0;
    double y = 0.0;
};

struct OffsetPair {
    Offset u;
    Offset v;
};

struct SplitCandidate {
    OffsetPair offsets;
    double tau = 0.0;  // meters
};

inline int round_to_pixel(double v) { return static_cast<int>(std::lrint(v)); }

// Depth at px + off/depth(px), or the background sentinel.
inline double probe_depth(const DepthImage& img, Pixel px, const Offset& off, double inv_depth) {
    const int x = px.x + round_to_pixel(off.x * inv_depth);
    const int y = px.y + round_to_pixel(off.y * inv_depth);
    if (!img.in_bounds(x, y)) return kBackgroundDepth;
    const float d = img.at(x, y);
    return d > 0.0f ? static_cast<double>(d) : kBackgroundDepth;
}

// Difference of the two depth probes around a valid foreground pixel.
double depth_feature(const DepthImage& img, Pixel px, const OffsetPair& offsets);

// Split candidates drawn as the cross product of `count_offsets` offset pairs
// and `count_thresholds` thresholds. Candidate i*count_thresholds + j pairs
// offset i with threshold j; tie-breaking during training relies on this
// ordering.
class CandidatePool {
public:
    CandidatePool(std::vector<OffsetPair> offsets, std::vector<double> thresholds);

    std::size_t size() const { return offsets_.size() * thresholds_.size(); }
    std::size_t offset_count() const { return offsets_.size(); }
    std::size_t threshold_count() const { return thresholds_.size(); }

    const std::vector<OffsetPair>& offsets() const { return offsets_; }
    const std::vector<double>& thresholds() const { return thresholds_; }

    SplitCandidate candidate(std::size_t index) const;
    std::vector<SplitCandidate> flatten() const;

    // Thresholds in ascending order with their original indices, for bucketed
    // split scans.
    const std::vector<double>& sorted_thresholds() const { return sorted_thresholds_; }
    const std::vector<std::uint32_t>& sorted_threshold_indices() const { return sorted_index_; }

private:
    std::vector<OffsetPair> offsets_;
    std::vector<double> thresholds_;
    std::vector<double> sorted_thresholds_;
    std::vector<std::uint32_t> sorted_index_;
};

// Offsets uniform per component on [-theta_max, theta_max], thresholds uniform
// on [-tau_max, tau_max]; deterministic under the seed.
CandidatePool generate_candidates(int count_offsets, int count_thresholds, double theta_max,
                                  double tau_max, std::uint64_t rng_seed);

}  // namespace parttrack
