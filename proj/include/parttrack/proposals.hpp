#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "parttrack/forest.hpp"
#include "parttrack/image.hpp"

namespace parttrack {

// Parts that get 3D proposals (body is classified but never localized).
inline constexpr int kProposablePartCount = 3;
inline constexpr std::array<BodyPart, kProposablePartCount> kProposableParts = {
    BodyPart::left_hand, BodyPart::right_hand, BodyPart::head};

struct ClassifiedPixel {
    WorldPoint world;
    Pdf pdf{};
    double depth = 0.0;
};

struct PartMode {
    BodyPart part = BodyPart::left_hand;
    WorldPoint position;
    double confidence = 0.0;  // kernel mass at the mode, Eq. 10 style
};

struct ProposalConfig {
    // Indexed by kProposableParts order: left hand, right hand, head.
    std::array<double, kProposablePartCount> start_threshold = {0.65, 0.60, 0.95};
    std::array<double, kProposablePartCount> bandwidth = {0.05, 0.05, 0.10};
    double merge_radius = 0.01;
    int max_iterations = 100;
    double convergence_epsilon = 1e-4;
    int seed_cap = 500;
    // Use the literal printed recursion (kernel-only denominator) instead of
    // the standard weighted mean shift.
    bool unweighted_denominator = false;

    void validate() const;
    static int part_slot(BodyPart part);
};

double pixel_weight(const ClassifiedPixel& px, BodyPart part);

// Indices of pixels with pdf[part] strictly above the threshold, ascending.
std::vector<std::size_t> select_seed_indices(std::span<const ClassifiedPixel> pixels,
                                             BodyPart part, double threshold);

// Deterministic uniform subsample: keeps floor(i*n/cap) for i in [0, cap).
std::vector<std::size_t> subsample_indices(std::vector<std::size_t> indices, std::size_t cap);

// Kernel density support for one part over a fixed pixel population. Points
// whose kernel value would fall below 1e-15 are skipped via a coarse spatial
// grid; the truncation is identical on every run.
class PartDensity {
public:
    PartDensity(std::span<const ClassifiedPixel> pixels, BodyPart part,
                const ProposalConfig& config);

    bool empty() const { return total_weight_ == 0.0; }
    double bandwidth() const { return bandwidth_; }

    // Mean-shift iteration from seed; optionally records every iterate
    // (seed first, converged point last).
    WorldPoint converge(const WorldPoint& seed, std::vector<WorldPoint>* trace = nullptr) const;

    // Weighted kernel mass at a point (the Eq. 10 confidence).
    double kernel_mass(const WorldPoint& at) const;

    // Weighted KDE objective the iteration ascends; exposed for the
    // monotonicity property.
    double kde_value(const WorldPoint& at) const { return kernel_mass(at); }

private:
    struct Cell {
        std::int64_t key;
        std::uint32_t begin;
        std::uint32_t end;
    };

    template <typename Fn>
    void for_neighbors(const WorldPoint& at, Fn&& fn) const;
    std::int64_t cell_key(int cx, int cy, int cz) const;

    std::vector<double> xs_, ys_, zs_, ws_;
    std::vector<Cell> cells_;
    double bandwidth_ = 0.0;
    double inv_h2_ = 0.0;
    double cutoff_sq_ = 0.0;
    double cell_size_ = 0.0;
    double total_weight_ = 0.0;
    int max_iterations_ = 0;
    double epsilon_ = 0.0;
    bool unweighted_denominator_ = false;
};

// Greedy merge of converged points (descending kernel mass, ties by input
// order); cluster position is the mass-weighted mean of its members and the
// reported confidence is the kernel mass at that merged position.
std::vector<PartMode> merge_modes(std::span<const WorldPoint> converged,
                                  const PartDensity& density, double merge_radius,
                                  BodyPart part);

std::vector<PartMode> mean_shift(std::span<const WorldPoint> seeds,
                                 std::span<const ClassifiedPixel> pixels, BodyPart part,
                                 const ProposalConfig& config);

// Samples up to n valid foreground pixels (ascending raster order) and runs
// the forest on each.
std::vector<ClassifiedPixel> classify_population(const DecisionForest& forest,
                                                 const DepthImage& img,
                                                 const CameraIntrinsics& k, int n,
                                                 std::uint64_t rng_seed);

struct PartProposals {
    std::array<std::vector<PartMode>, kProposablePartCount> modes;

    const std::vector<PartMode>& for_part(BodyPart part) const {
        return modes[static_cast<std::size_t>(ProposalConfig::part_slot(part))];
    }
    std::optional<PartMode> final_proposal(BodyPart part) const;
};

PartProposals propose_parts(const DecisionForest& forest, const DepthImage& img,
                            const CameraIntrinsics& k, int n, const ProposalConfig& config,
                            std::uint64_t rng_seed);

// Re-runs seed selection + merge across many thresholds over one fixed
// population, memoizing per-seed convergence. modes_at(t) returns exactly
// what mean_shift would for the seeds selected at t.
class ThresholdSweeper {
public:
    ThresholdSweeper(std::span<const ClassifiedPixel> pixels, BodyPart part,
                     const ProposalConfig& config);

    std::vector<PartMode> modes_at(double threshold);

private:
    std::span<const ClassifiedPixel> pixels_;
    BodyPart part_;
    ProposalConfig config_;
    PartDensity density_;
    std::unordered_map<std::size_t, WorldPoint> converged_;
};

}  // namespace parttrack
