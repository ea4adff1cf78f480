#include "parttrack/forest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "parttrack/parallel.hpp"
#include "parttrack/rng.hpp"

namespace parttrack {

using json = nlohmann::ordered_json;

SampleSet sample_pixels(std::span<const LabeledFrame> images, int samples_per_image,
                        std::uint64_t rng_seed) {
    if (samples_per_image < 1) throw InvalidInputError("sample_pixels: N must be >= 1");
    SampleSet out;
    for (std::uint32_t id = 0; id < images.size(); ++id) {
        const LabeledFrame& frame = images[id];
        std::vector<Pixel> fg = frame.depth.valid_pixels();
        if (fg.empty()) {
            ++out.skipped_images;
            continue;
        }
        // Partial Fisher-Yates; each image gets its own derived stream so the
        // draw is independent of how many pixels earlier images had.
        Rng rng(Rng::derive(rng_seed, id));
        const std::size_t take = std::min<std::size_t>(fg.size(), samples_per_image);
        for (std::size_t i = 0; i < take; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.below(fg.size() - i));
            std::swap(fg[i], fg[j]);
            const std::uint8_t label = frame.labels.at(fg[i]);
            const BodyPart part =
                label == kBackgroundLabel ? BodyPart::body : part_of_label(label);
            out.samples.push_back({id, fg[i], part});
        }
    }
    return out;
}

double entropy(const ClassHistogram& hist) {
    std::int64_t n = 0;
    for (std::int64_t c : hist) n += c;
    if (n == 0) return 0.0;
    double h = 0.0;
    for (std::int64_t c : hist) {
        if (c > 0) {
            const double p = static_cast<double>(c) / static_cast<double>(n);
            h -= p * std::log2(p);
        }
    }
    return h;
}

double entropy(std::span<const BodyPart> labels) {
    ClassHistogram hist{};
    for (BodyPart p : labels) ++hist[static_cast<int>(p)];
    return entropy(hist);
}

double information_gain(const ClassHistogram& parent, double parent_entropy,
                        const ClassHistogram& left) {
    ClassHistogram right{};
    std::int64_t n = 0;
    std::int64_t nl = 0;
    for (int c = 0; c < kPartCount; ++c) {
        right[c] = parent[c] - left[c];
        n += parent[c];
        nl += left[c];
    }
    const std::int64_t nr = n - nl;
    const double wl = static_cast<double>(nl) / static_cast<double>(n);
    const double wr = static_cast<double>(nr) / static_cast<double>(n);
    // Non-negative in exact arithmetic; clamp away rounding noise so
    // degenerate splits never report a negative gain.
    return std::max(0.0, parent_entropy - wl * entropy(left) - wr * entropy(right));
}

std::pair<std::vector<TrainingSample>, std::vector<TrainingSample>> partition(
    std::span<const LabeledFrame> images, std::span<const TrainingSample> samples,
    const SplitCandidate& candidate) {
    std::pair<std::vector<TrainingSample>, std::vector<TrainingSample>> out;
    for (const TrainingSample& s : samples) {
        const double f = depth_feature(images[s.image_id].depth, s.px, candidate.offsets);
        (f < candidate.tau ? out.first : out.second).push_back(s);
    }
    return out;
}

SplitChoice best_split(std::span<const LabeledFrame> images,
                       std::span<const TrainingSample> samples,
                       std::span<const SplitCandidate> candidates) {
    if (samples.empty() || candidates.empty()) {
        throw InvalidInputError("best_split: needs at least one sample and one candidate");
    }
    ClassHistogram parent{};
    for (const TrainingSample& s : samples) ++parent[static_cast<int>(s.label)];
    const double parent_entropy = entropy(parent);

    SplitChoice best{0, -1.0};
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        ClassHistogram left{};
        for (const TrainingSample& s : samples) {
            const double f = depth_feature(images[s.image_id].depth, s.px, candidates[i].offsets);
            if (f < candidates[i].tau) ++left[static_cast<int>(s.label)];
        }
        const double gain = information_gain(parent, parent_entropy, left);
        if (gain > best.gain) best = {i, gain};
    }
    return best;
}

namespace {

// Sample layout for the training hot loop. inv_depth is kept in double with
// the same arithmetic as depth_feature so both paths probe identical pixels.
struct PreparedSample {
    const DepthImage* img = nullptr;
    std::int32_t x = 0;
    std::int32_t y = 0;
    std::int32_t label = 0;
    double inv_depth = 0.0;
};

double prepared_feature(const PreparedSample& s, const OffsetPair& offsets) {
    const Pixel px{s.x, s.y};
    return probe_depth(*s.img, px, offsets.u, s.inv_depth) -
           probe_depth(*s.img, px, offsets.v, s.inv_depth);
}

// Gain argmax over the whole pool for one node. Features are evaluated once
// per offset; left histograms for every threshold come from bucket prefix
// sums over the sorted threshold list. Ties resolve to the lowest candidate
// index in pool order (offset-major), matching best_split on the flattened
// pool.
SplitChoice scan_node(const std::vector<PreparedSample>& prepared,
                      std::span<const std::uint32_t> order, const CandidatePool& pool,
                      const ClassHistogram& parent, double parent_entropy, int threads) {
    const std::vector<double>& taus = pool.sorted_thresholds();
    const std::vector<std::uint32_t>& tau_index = pool.sorted_threshold_indices();
    const std::size_t n_thresholds = taus.size();

    const std::size_t n_offsets = pool.offset_count();
    std::vector<SplitChoice> chunk_best(n_offsets, SplitChoice{0, -1.0});

    const bool parallel = threads > 1 && order.size() * n_offsets > 250000;
    parallel_chunks(n_offsets, parallel ? threads : 1, [&](std::size_t begin, std::size_t end) {
        std::vector<ClassHistogram> buckets(n_thresholds + 1);
        for (std::size_t o = begin; o < end; ++o) {
            std::fill(buckets.begin(), buckets.end(), ClassHistogram{});
            const OffsetPair& off = pool.offsets()[o];
            for (std::uint32_t idx : order) {
                const PreparedSample& s = prepared[idx];
                const double f = prepared_feature(s, off);
                // Sample goes left for every threshold strictly above f.
                const std::size_t pos =
                    std::upper_bound(taus.begin(), taus.end(), f) - taus.begin();
                ++buckets[pos][s.label];
            }
            SplitChoice best{0, -1.0};
            ClassHistogram left{};
            for (std::size_t j = 0; j < n_thresholds; ++j) {
                for (int c = 0; c < kPartCount; ++c) left[c] += buckets[j][c];
                const double gain = information_gain(parent, parent_entropy, left);
                const std::size_t cand = o * n_thresholds + tau_index[j];
                if (gain > best.gain || (gain == best.gain && cand < best.candidate_index)) {
                    best = {cand, gain};
                }
            }
            chunk_best[o] = best;
        }
    });

    SplitChoice best{0, -1.0};
    for (const SplitChoice& c : chunk_best) {
        if (c.gain > best.gain || (c.gain == best.gain && c.candidate_index < best.candidate_index)) {
            best = c;
        }
    }
    return best;
}

class TreeBuilder {
public:
    TreeBuilder(const std::vector<PreparedSample>& prepared, const CandidatePool& pool,
                const TrainingConfig& config)
        : prepared_(prepared), pool_(pool), config_(config) {}

    Tree build(std::vector<std::uint32_t> order) {
        tree_.nodes.clear();
        build_node(std::span<std::uint32_t>(order), 0);
        return std::move(tree_);
    }

private:
    std::int32_t make_leaf(const ClassHistogram& hist) {
        std::int64_t n = 0;
        for (std::int64_t c : hist) n += c;
        TreeNode node;
        node.is_leaf = true;
        for (int c = 0; c < kPartCount; ++c) {
            node.pdf[c] = static_cast<double>(hist[c]) / static_cast<double>(n);
        }
        tree_.nodes.push_back(node);
        return static_cast<std::int32_t>(tree_.nodes.size() - 1);
    }

    std::int32_t build_node(std::span<std::uint32_t> order, int depth) {
        ClassHistogram hist{};
        for (std::uint32_t idx : order) ++hist[prepared_[idx].label];

        if (depth >= config_.max_depth) return make_leaf(hist);

        const double parent_entropy = entropy(hist);
        const SplitChoice choice =
            scan_node(prepared_, order, pool_, hist, parent_entropy, config_.threads);
        if (!(choice.gain > config_.min_gain)) return make_leaf(hist);

        const SplitCandidate cand = pool_.candidate(choice.candidate_index);
        auto mid = std::stable_partition(order.begin(), order.end(), [&](std::uint32_t idx) {
            return prepared_feature(prepared_[idx], cand.offsets) < cand.tau;
        });
        const std::size_t n_left = static_cast<std::size_t>(mid - order.begin());
        if (n_left == 0 || n_left == order.size()) return make_leaf(hist);

        const std::int32_t self = static_cast<std::int32_t>(tree_.nodes.size());
        TreeNode node;
        node.is_leaf = false;
        node.split = cand;
        tree_.nodes.push_back(node);
        const std::int32_t left = build_node(order.subspan(0, n_left), depth + 1);
        const std::int32_t right = build_node(order.subspan(n_left), depth + 1);
        tree_.nodes[self].left = left;
        tree_.nodes[self].right = right;
        return self;
    }

    const std::vector<PreparedSample>& prepared_;
    const CandidatePool& pool_;
    const TrainingConfig& config_;
    Tree tree_;
};

std::vector<PreparedSample> prepare_samples(std::span<const LabeledFrame> images,
                                            std::span<const TrainingSample> samples) {
    std::vector<PreparedSample> prepared;
    prepared.reserve(samples.size());
    for (const TrainingSample& s : samples) {
        const DepthImage& img = images[s.image_id].depth;
        PreparedSample p;
        p.img = &img;
        p.x = s.px.x;
        p.y = s.px.y;
        p.label = static_cast<int>(s.label);
        p.inv_depth = 1.0 / img.at(s.px);
        prepared.push_back(p);
    }
    return prepared;
}

}  // namespace

std::size_t Tree::leaf_count() const {
    std::size_t n = 0;
    for (const TreeNode& node : nodes) n += node.is_leaf;
    return n;
}

int Tree::depth() const {
    // Iterative depth over the arena.
    std::vector<std::pair<std::int32_t, int>> stack{{0, 0}};
    int max_depth = 0;
    while (!stack.empty()) {
        auto [idx, d] = stack.back();
        stack.pop_back();
        max_depth = std::max(max_depth, d);
        const TreeNode& node = nodes[static_cast<std::size_t>(idx)];
        if (!node.is_leaf) {
            stack.push_back({node.left, d + 1});
            stack.push_back({node.right, d + 1});
        }
    }
    return max_depth;
}

Tree train_tree(std::span<const LabeledFrame> images, std::span<const TrainingSample> samples,
                const CandidatePool& pool, const TrainingConfig& config) {
    if (samples.empty()) throw InvalidInputError("train_tree: no training samples");
    const std::vector<PreparedSample> prepared = prepare_samples(images, samples);
    std::vector<std::uint32_t> order(prepared.size());
    std::iota(order.begin(), order.end(), 0u);
    TreeBuilder builder(prepared, pool, config);
    return builder.build(std::move(order));
}

DecisionForest train_forest(std::span<const LabeledFrame> images, const TrainingConfig& config) {
    if (images.empty()) throw InvalidInputError("train_forest: no training images");
    if (config.n_trees < 1) throw InvalidInputError("train_forest: n_trees must be >= 1");
    DecisionForest forest;
    forest.config = config;
    forest.trees.resize(static_cast<std::size_t>(config.n_trees));
    for (int t = 0; t < config.n_trees; ++t) {
        const std::uint64_t sample_seed = Rng::derive(config.rng_seed, 2 * static_cast<std::uint64_t>(t));
        const std::uint64_t cand_seed = Rng::derive(config.rng_seed, 2 * static_cast<std::uint64_t>(t) + 1);
        const SampleSet set = sample_pixels(images, config.samples_per_image, sample_seed);
        if (set.samples.empty()) {
            throw InvalidInputError("train_forest: sampled zero pixels (empty foregrounds?)");
        }
        const CandidatePool pool =
            generate_candidates(config.count_offsets, config.count_thresholds, config.theta_max,
                                config.tau_max, cand_seed);
        forest.trees[static_cast<std::size_t>(t)] = train_tree(images, set.samples, pool, config);
    }
    return forest;
}

Pdf classify_leaf(const Tree& tree, const DepthImage& img, Pixel px) {
    const double inv_depth = 1.0 / img.at(px);
    std::int32_t idx = 0;
    while (true) {
        const TreeNode& node = tree.nodes[static_cast<std::size_t>(idx)];
        if (node.is_leaf) return node.pdf;
        const double f = probe_depth(img, px, node.split.offsets.u, inv_depth) -
                         probe_depth(img, px, node.split.offsets.v, inv_depth);
        idx = f < node.split.tau ? node.left : node.right;
    }
}

Pdf classify_pixel(const DecisionForest& forest, const DepthImage& img, Pixel px) {
    if (!img.valid(px)) throw NoDepthError("classify_pixel: pixel is invalid or out of bounds");
    Pdf sum{};
    for (const Tree& tree : forest.trees) {
        const Pdf leaf = classify_leaf(tree, img, px);
        for (int c = 0; c < kPartCount; ++c) sum[c] += leaf[c];
    }
    const double n = static_cast<double>(forest.trees.size());
    for (int c = 0; c < kPartCount; ++c) sum[c] /= n;
    return sum;
}

BodyPart argmax_part(const Pdf& pdf) {
    int best = 0;
    for (int c = 1; c < kPartCount; ++c) {
        if (pdf[c] > pdf[best]) best = c;
    }
    return static_cast<BodyPart>(best);
}

namespace {

json node_to_json(const Tree& tree, std::int32_t idx) {
    const TreeNode& node = tree.nodes[static_cast<std::size_t>(idx)];
    if (node.is_leaf) {
        return json{{"leaf", node.pdf}};
    }
    json j;
    j["split"] = {{"u", {node.split.offsets.u.x, node.split.offsets.u.y}},
                  {"v", {node.split.offsets.v.x, node.split.offsets.v.y}},
                  {"tau", node.split.tau}};
    j["left"] = node_to_json(tree, node.left);
    j["right"] = node_to_json(tree, node.right);
    return j;
}

std::int32_t node_from_json(const json& j, Tree& tree) {
    TreeNode node;
    if (j.contains("leaf")) {
        node.is_leaf = true;
        const auto& pdf = j.at("leaf");
        if (pdf.size() != kPartCount) throw IoError("forest file: leaf PDF has wrong arity");
        double sum = 0.0;
        for (int c = 0; c < kPartCount; ++c) {
            node.pdf[c] = pdf.at(c).get<double>();
            if (node.pdf[c] < 0.0) throw IoError("forest file: negative leaf probability");
            sum += node.pdf[c];
        }
        if (std::abs(sum - 1.0) > 1e-9) throw IoError("forest file: leaf PDF does not sum to 1");
        tree.nodes.push_back(node);
        return static_cast<std::int32_t>(tree.nodes.size() - 1);
    }
    const auto& split = j.at("split");
    node.is_leaf = false;
    node.split.offsets.u = {split.at("u").at(0).get<double>(), split.at("u").at(1).get<double>()};
    node.split.offsets.v = {split.at("v").at(0).get<double>(), split.at("v").at(1).get<double>()};
    node.split.tau = split.at("tau").get<double>();
    const std::int32_t self = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.push_back(node);
    const std::int32_t left = node_from_json(j.at("left"), tree);
    const std::int32_t right = node_from_json(j.at("right"), tree);
    tree.nodes[static_cast<std::size_t>(self)].left = left;
    tree.nodes[static_cast<std::size_t>(self)].right = right;
    return self;
}

json config_to_json(const TrainingConfig& c) {
    return json{{"n_trees", c.n_trees},
                {"max_depth", c.max_depth},
                {"min_gain", c.min_gain},
                {"samples_per_image", c.samples_per_image},
                {"theta_max", c.theta_max},
                {"tau_max", c.tau_max},
                {"count_offsets", c.count_offsets},
                {"count_thresholds", c.count_thresholds},
                {"rng_seed", c.rng_seed}};
}

TrainingConfig config_from_json(const json& j) {
    TrainingConfig c;
    c.n_trees = j.at("n_trees").get<int>();
    c.max_depth = j.at("max_depth").get<int>();
    c.min_gain = j.at("min_gain").get<double>();
    c.samples_per_image = j.at("samples_per_image").get<int>();
    c.theta_max = j.at("theta_max").get<double>();
    c.tau_max = j.at("tau_max").get<double>();
    c.count_offsets = j.at("count_offsets").get<int>();
    c.count_thresholds = j.at("count_thresholds").get<int>();
    c.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    return c;
}

}  // namespace

std::string forest_to_json(const DecisionForest& forest) {
    json j;
    j["format_version"] = 1;
    j["class_names"] = kPartNames;
    j["training_config"] = config_to_json(forest.config);
    json trees = json::array();
    for (const Tree& tree : forest.trees) trees.push_back(node_to_json(tree, 0));
    j["trees"] = std::move(trees);
    return j.dump(1) + "\n";
}

DecisionForest forest_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw IoError(std::string("forest file: invalid JSON: ") + e.what());
    }
    try {
        if (j.at("format_version").get<int>() != 1) {
            throw IoError("forest file: unsupported format_version");
        }
        const auto names = j.at("class_names").get<std::vector<std::string>>();
        for (int c = 0; c < kPartCount; ++c) {
            if (names.size() != kPartCount || names[static_cast<std::size_t>(c)] != kPartNames[c]) {
                throw IoError("forest file: class names do not match");
            }
        }
        DecisionForest forest;
        forest.config = config_from_json(j.at("training_config"));
        for (const json& t : j.at("trees")) {
            Tree tree;
            node_from_json(t, tree);
            forest.trees.push_back(std::move(tree));
        }
        if (forest.trees.empty()) throw IoError("forest file: no trees");
        return forest;
    } catch (const json::exception& e) {
        throw IoError(std::string("forest file: missing or mistyped field: ") + e.what());
    }
}

void save_forest(const std::string& path, const DecisionForest& forest) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    const std::string text = forest_to_json(forest);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("write failed: " + path);
}

DecisionForest load_forest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return forest_from_json(ss.str());
}

}  // namespace parttrack
