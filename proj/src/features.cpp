#include "parttrack/features.hpp"

#include <algorithm>
#include <numeric>

#include "parttrack/rng.hpp"

namespace parttrack {

double depth_feature(const DepthImage& img, Pixel px, const OffsetPair& offsets) {
    if (!img.valid(px)) throw NoDepthError("depth_feature: center pixel is invalid");
    const double inv_depth = 1.0 / img.at(px);
    return probe_depth(img, px, offsets.u, inv_depth) - probe_depth(img, px, offsets.v, inv_depth);
}

CandidatePool::CandidatePool(std::vector<OffsetPair> offsets, std::vector<double> thresholds)
    : offsets_(std::move(offsets)), thresholds_(std::move(thresholds)) {
    if (offsets_.empty() || thresholds_.empty()) {
        throw InvalidInputError("candidate pool needs at least one offset and one threshold");
    }
    sorted_index_.resize(thresholds_.size());
    std::iota(sorted_index_.begin(), sorted_index_.end(), 0u);
    std::stable_sort(sorted_index_.begin(), sorted_index_.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return thresholds_[a] < thresholds_[b]; });
    sorted_thresholds_.reserve(thresholds_.size());
    for (std::uint32_t i : sorted_index_) sorted_thresholds_.push_back(thresholds_[i]);
}

SplitCandidate CandidatePool::candidate(std::size_t index) const {
    return {offsets_[index / thresholds_.size()], thresholds_[index % thresholds_.size()]};
}

std::vector<SplitCandidate> CandidatePool::flatten() const {
    std::vector<SplitCandidate> out;
    out.reserve(size());
    for (const OffsetPair& o : offsets_) {
        for (double t : thresholds_) out.push_back({o, t});
    }
    return out;
}

CandidatePool generate_candidates(int count_offsets, int count_thresholds, double theta_max,
                                  double tau_max, std::uint64_t rng_seed) {
    if (count_offsets < 1 || count_thresholds < 1) {
        throw InvalidInputError("generate_candidates: counts must be >= 1");
    }
    Rng rng(rng_seed);
    std::vector<OffsetPair> offsets;
    offsets.reserve(static_cast<std::size_t>(count_offsets));
    for (int i = 0; i < count_offsets; ++i) {
        OffsetPair p;
        p.u.x = rng.uniform(-theta_max, theta_max);
        p.u.y = rng.uniform(-theta_max, theta_max);
        p.v.x = rng.uniform(-theta_max, theta_max);
        p.v.y = rng.uniform(-theta_max, theta_max);
        offsets.push_back(p);
    }
    std::vector<double> thresholds;
    thresholds.reserve(static_cast<std::size_t>(count_thresholds));
    for (int j = 0; j < count_thresholds; ++j) {
        thresholds.push_back(rng.uniform(-tau_max, tau_max));
    }
    return CandidatePool(std::move(offsets), std::move(thresholds));
}

}  // namespace parttrack
