#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "parttrack/features.hpp"
#include "parttrack/image.hpp"

namespace parttrack {

struct LabeledFrame {
    DepthImage depth;
    LabelImage labels;
};

struct TrainingConfig {
    int n_trees = 3;
    int max_depth = 20;
    double min_gain = 0.05;
    int samples_per_image = 4000;
    double theta_max = 500.0;  // pixel-meters
    double tau_max = 1.0;      // meters
    int count_offsets = 3000;
    int count_thresholds = 100;
    std::uint64_t rng_seed = 1;
    int threads = 1;

    // Settings found by the single-parameter sweeps; everything else keeps its
    // default.
    static TrainingConfig optimal() {
        TrainingConfig c;
        c.max_depth = 12;
        c.min_gain = 0.0;
        c.theta_max = 250.0;
        c.samples_per_image = 3000;
        return c;
    }
};

struct TrainingSample {
    std::uint32_t image_id = 0;
    Pixel px;
    BodyPart label = BodyPart::body;
};

struct SampleSet {
    std::vector<TrainingSample> samples;
    int skipped_images = 0;  // images with no foreground
};

// Per image, min(N, foreground size) pixels drawn uniformly without
// replacement; labels attached from the frame's LabelImage (background-labeled
// foreground counts as body).
SampleSet sample_pixels(std::span<const LabeledFrame> images, int samples_per_image,
                        std::uint64_t rng_seed);

using ClassHistogram = std::array<std::int64_t, kPartCount>;

// Shannon entropy (base 2) of the empirical class distribution; empty -> 0.
double entropy(const ClassHistogram& hist);
double entropy(std::span<const BodyPart> labels);

double information_gain(const ClassHistogram& parent, double parent_entropy,
                        const ClassHistogram& left);

// Left: samples whose depth feature is below the candidate threshold.
std::pair<std::vector<TrainingSample>, std::vector<TrainingSample>> partition(
    std::span<const LabeledFrame> images, std::span<const TrainingSample> samples,
    const SplitCandidate& candidate);

struct SplitChoice {
    std::size_t candidate_index = 0;
    double gain = 0.0;
};

// Exhaustive argmax of information gain; ties broken by lowest candidate
// index.
SplitChoice best_split(std::span<const LabeledFrame> images,
                       std::span<const TrainingSample> samples,
                       std::span<const SplitCandidate> candidates);

// Interior nodes hold a split and child indices into the tree's node vector;
// leaves hold the class PDF.
struct TreeNode {
    bool is_leaf = true;
    SplitCandidate split;
    std::int32_t left = -1;
    std::int32_t right = -1;
    Pdf pdf{};
};

struct Tree {
    std::vector<TreeNode> nodes;  // root at index 0

    const TreeNode& root() const { return nodes.front(); }
    std::size_t leaf_count() const;
    int depth() const;
};

Tree train_tree(std::span<const LabeledFrame> images, std::span<const TrainingSample> samples,
                const CandidatePool& pool, const TrainingConfig& config);

struct DecisionForest {
    std::vector<Tree> trees;
    TrainingConfig config;
};

// T trees, each on an independently seeded sample set and candidate pool.
// Deterministic under config.rng_seed regardless of config.threads.
DecisionForest train_forest(std::span<const LabeledFrame> images, const TrainingConfig& config);

Pdf classify_leaf(const Tree& tree, const DepthImage& img, Pixel px);

// Mean of the per-tree leaf PDFs at a valid foreground pixel.
Pdf classify_pixel(const DecisionForest& forest, const DepthImage& img, Pixel px);

// Most likely part; ties go to the lowest class index.
BodyPart argmax_part(const Pdf& pdf);

// JSON (de)serialization; round-trips preserve classification outputs exactly.
std::string forest_to_json(const DecisionForest& forest);
DecisionForest forest_from_json(const std::string& text);
void save_forest(const std::string& path, const DecisionForest& forest);
DecisionForest load_forest(const std::string& path);

}  // namespace parttrack
