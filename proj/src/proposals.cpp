#include "parttrack/proposals.hpp"

#include <algorithm>
#include <cmath>

#include "parttrack/errors.hpp"
#include "parttrack/rng.hpp"

namespace parttrack {

namespace {

// exp(-34.6) < 1e-15: contributions beyond this radius are dropped.
constexpr double kLogKernelFloor = 34.6;

}  // namespace

void ProposalConfig::validate() const {
    for (const double t : start_threshold)
        if (!(t >= 0.0 && t <= 1.0))
            throw ConfigError("seed threshold must lie in [0, 1]");
    for (const double h : bandwidth)
        if (!(h > 0.0)) throw ConfigError("bandwidth must be positive");
    if (!(merge_radius >= 0.0)) throw ConfigError("merge radius must be non-negative");
    if (max_iterations < 1) throw ConfigError("max_iterations must be at least 1");
    if (!(convergence_epsilon > 0.0)) throw ConfigError("convergence epsilon must be positive");
    if (seed_cap < 1) throw ConfigError("seed cap must be at least 1");
}

int ProposalConfig::part_slot(BodyPart part) {
    switch (part) {
        case BodyPart::left_hand: return 0;
        case BodyPart::right_hand: return 1;
        case BodyPart::head: return 2;
        default: throw InvalidInputError("part has no proposal slot");
    }
}

double pixel_weight(const ClassifiedPixel& px, BodyPart part) {
    return px.pdf[static_cast<std::size_t>(part)] * px.depth * px.depth;
}

std::vector<std::size_t> select_seed_indices(std::span<const ClassifiedPixel> pixels,
                                             BodyPart part, double threshold) {
    std::vector<std::size_t> out;
    const auto p = static_cast<std::size_t>(part);
    for (std::size_t i = 0; i < pixels.size(); ++i)
        if (pixels[i].pdf[p] > threshold) out.push_back(i);
    return out;
}

std::vector<std::size_t> subsample_indices(std::vector<std::size_t> indices, std::size_t cap) {
    if (indices.size() <= cap) return indices;
    std::vector<std::size_t> out;
    out.reserve(cap);
    for (std::size_t i = 0; i < cap; ++i) out.push_back(indices[i * indices.size() / cap]);
    return out;
}

PartDensity::PartDensity(std::span<const ClassifiedPixel> pixels, BodyPart part,
                         const ProposalConfig& config) {
    config.validate();
    const int slot = ProposalConfig::part_slot(part);
    bandwidth_ = config.bandwidth[static_cast<std::size_t>(slot)];
    inv_h2_ = 1.0 / (bandwidth_ * bandwidth_);
    cutoff_sq_ = kLogKernelFloor * bandwidth_ * bandwidth_;
    cell_size_ = std::sqrt(cutoff_sq_);
    max_iterations_ = config.max_iterations;
    epsilon_ = config.convergence_epsilon;
    unweighted_denominator_ = config.unweighted_denominator;

    // With the weighted denominator, zero-weight pixels contribute nothing
    // anywhere; the literal printed recursion still counts them in the
    // denominator, so they must stay.
    std::vector<std::size_t> kept;
    kept.reserve(pixels.size());
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        const double w = pixel_weight(pixels[i], part);
        if (w > 0.0 || unweighted_denominator_) kept.push_back(i);
        total_weight_ += w;
    }

    std::vector<std::pair<std::int64_t, std::size_t>> keyed;
    keyed.reserve(kept.size());
    for (const std::size_t i : kept) {
        const auto& p = pixels[i].world;
        const int cx = static_cast<int>(std::floor(p.x / cell_size_));
        const int cy = static_cast<int>(std::floor(p.y / cell_size_));
        const int cz = static_cast<int>(std::floor(p.z / cell_size_));
        keyed.emplace_back(cell_key(cx, cy, cz), i);
    }
    std::stable_sort(keyed.begin(), keyed.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    xs_.reserve(keyed.size());
    ys_.reserve(keyed.size());
    zs_.reserve(keyed.size());
    ws_.reserve(keyed.size());
    for (std::size_t pos = 0; pos < keyed.size(); ++pos) {
        const auto& px = pixels[keyed[pos].second];
        xs_.push_back(px.world.x);
        ys_.push_back(px.world.y);
        zs_.push_back(px.world.z);
        ws_.push_back(pixel_weight(px, part));
        if (pos == 0 || keyed[pos].first != keyed[pos - 1].first)
            cells_.push_back({keyed[pos].first, static_cast<std::uint32_t>(pos),
                              static_cast<std::uint32_t>(pos + 1)});
        else
            cells_.back().end = static_cast<std::uint32_t>(pos + 1);
    }
}

std::int64_t PartDensity::cell_key(int cx, int cy, int cz) const {
    constexpr std::int64_t bias = 1 << 20;
    return (((static_cast<std::int64_t>(cx) + bias) << 42) |
            ((static_cast<std::int64_t>(cy) + bias) << 21) |
            (static_cast<std::int64_t>(cz) + bias));
}

template <typename Fn>
void PartDensity::for_neighbors(const WorldPoint& at, Fn&& fn) const {
    const int cx = static_cast<int>(std::floor(at.x / cell_size_));
    const int cy = static_cast<int>(std::floor(at.y / cell_size_));
    const int cz = static_cast<int>(std::floor(at.z / cell_size_));
    for (int dx = -1; dx <= 1; ++dx) {
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dz = -1; dz <= 1; ++dz) {
                const std::int64_t key = cell_key(cx + dx, cy + dy, cz + dz);
                const auto it = std::lower_bound(
                    cells_.begin(), cells_.end(), key,
                    [](const Cell& c, std::int64_t k) { return c.key < k; });
                if (it == cells_.end() || it->key != key) continue;
                for (std::uint32_t i = it->begin; i < it->end; ++i) fn(i);
            }
        }
    }
}

WorldPoint PartDensity::converge(const WorldPoint& seed, std::vector<WorldPoint>* trace) const {
    WorldPoint y = seed;
    if (trace) trace->push_back(y);
    for (int iter = 0; iter < max_iterations_; ++iter) {
        double nx = 0.0, ny = 0.0, nz = 0.0, den = 0.0;
        for_neighbors(y, [&](std::uint32_t i) {
            const double dx = xs_[i] - y.x;
            const double dy = ys_[i] - y.y;
            const double dz = zs_[i] - y.z;
            const double d2 = dx * dx + dy * dy + dz * dz;
            if (d2 > cutoff_sq_) return;
            const double k = std::exp(-d2 * inv_h2_);
            const double wk = ws_[i] * k;
            nx += wk * xs_[i];
            ny += wk * ys_[i];
            nz += wk * zs_[i];
            den += unweighted_denominator_ ? k : wk;
        });
        if (den == 0.0) break;  // stranded seed: no support within the cutoff
        const WorldPoint next{nx / den, ny / den, nz / den};
        const double step = distance(next, y);
        y = next;
        if (trace) trace->push_back(y);
        if (step < epsilon_) break;
    }
    return y;
}

double PartDensity::kernel_mass(const WorldPoint& at) const {
    double mass = 0.0;
    for_neighbors(at, [&](std::uint32_t i) {
        const double dx = xs_[i] - at.x;
        const double dy = ys_[i] - at.y;
        const double dz = zs_[i] - at.z;
        const double d2 = dx * dx + dy * dy + dz * dz;
        if (d2 > cutoff_sq_) return;
        mass += ws_[i] * std::exp(-d2 * inv_h2_);
    });
    return mass;
}

std::vector<PartMode> merge_modes(std::span<const WorldPoint> converged,
                                  const PartDensity& density, double merge_radius,
                                  BodyPart part) {
    struct Candidate {
        std::size_t index;
        double mass;
    };
    std::vector<Candidate> order;
    order.reserve(converged.size());
    for (std::size_t i = 0; i < converged.size(); ++i) {
        const double mass = density.kernel_mass(converged[i]);
        if (mass > 0.0) order.push_back({i, mass});
    }
    std::stable_sort(order.begin(), order.end(),
                     [](const Candidate& a, const Candidate& b) { return a.mass > b.mass; });

    struct Cluster {
        WorldPoint position;
        double mass;
    };
    std::vector<Cluster> clusters;
    for (const auto& cand : order) {
        const WorldPoint& p = converged[cand.index];
        bool assigned = false;
        for (auto& cluster : clusters) {
            if (distance(cluster.position, p) <= merge_radius) {
                const double total = cluster.mass + cand.mass;
                cluster.position.x =
                    (cluster.position.x * cluster.mass + p.x * cand.mass) / total;
                cluster.position.y =
                    (cluster.position.y * cluster.mass + p.y * cand.mass) / total;
                cluster.position.z =
                    (cluster.position.z * cluster.mass + p.z * cand.mass) / total;
                cluster.mass = total;
                assigned = true;
                break;
            }
        }
        if (!assigned) clusters.push_back({p, cand.mass});
    }

    std::vector<PartMode> modes;
    modes.reserve(clusters.size());
    for (const auto& cluster : clusters)
        modes.push_back({part, cluster.position, density.kernel_mass(cluster.position)});
    std::stable_sort(modes.begin(), modes.end(),
                     [](const PartMode& a, const PartMode& b) {
                         return a.confidence > b.confidence;
                     });
    return modes;
}

std::vector<PartMode> mean_shift(std::span<const WorldPoint> seeds,
                                 std::span<const ClassifiedPixel> pixels, BodyPart part,
                                 const ProposalConfig& config) {
    if (seeds.empty()) return {};
    const PartDensity density(pixels, part, config);
    std::vector<WorldPoint> converged;
    converged.reserve(seeds.size());
    for (const auto& seed : seeds) converged.push_back(density.converge(seed));
    return merge_modes(converged, density, config.merge_radius, part);
}

std::vector<ClassifiedPixel> classify_population(const DecisionForest& forest,
                                                 const DepthImage& img,
                                                 const CameraIntrinsics& k, int n,
                                                 std::uint64_t rng_seed) {
    if (n <= 0) throw InvalidInputError("population size must be positive");
    std::vector<Pixel> valid = img.valid_pixels();
    if (valid.size() > static_cast<std::size_t>(n)) {
        Rng rng(rng_seed);
        for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
            const std::size_t j = i + rng.below(valid.size() - i);
            std::swap(valid[i], valid[j]);
        }
        valid.resize(static_cast<std::size_t>(n));
        std::sort(valid.begin(), valid.end(), [&img](const Pixel& a, const Pixel& b) {
            return a.y != b.y ? a.y < b.y : a.x < b.x;
        });
    }

    std::vector<ClassifiedPixel> out;
    out.reserve(valid.size());
    for (const Pixel& px : valid) {
        ClassifiedPixel cp;
        cp.world = project_to_world(img, px, k);
        cp.pdf = classify_pixel(forest, img, px);
        cp.depth = img.at(px);
        out.push_back(cp);
    }
    return out;
}

std::optional<PartMode> PartProposals::final_proposal(BodyPart part) const {
    const auto& list = for_part(part);
    if (list.empty()) return std::nullopt;
    return list.front();
}

PartProposals propose_parts(const DecisionForest& forest, const DepthImage& img,
                            const CameraIntrinsics& k, int n, const ProposalConfig& config,
                            std::uint64_t rng_seed) {
    config.validate();
    PartProposals out;
    const std::vector<ClassifiedPixel> population =
        classify_population(forest, img, k, n, rng_seed);
    if (population.empty()) return out;
    for (const BodyPart part : kProposableParts) {
        const int slot = ProposalConfig::part_slot(part);
        const auto seed_indices = subsample_indices(
            select_seed_indices(population, part,
                                config.start_threshold[static_cast<std::size_t>(slot)]),
            static_cast<std::size_t>(config.seed_cap));
        std::vector<WorldPoint> seeds;
        seeds.reserve(seed_indices.size());
        for (const std::size_t i : seed_indices) seeds.push_back(population[i].world);
        out.modes[static_cast<std::size_t>(slot)] = mean_shift(seeds, population, part, config);
    }
    return out;
}

ThresholdSweeper::ThresholdSweeper(std::span<const ClassifiedPixel> pixels, BodyPart part,
                                   const ProposalConfig& config)
    : pixels_(pixels), part_(part), config_(config), density_(pixels, part, config) {}

std::vector<PartMode> ThresholdSweeper::modes_at(double threshold) {
    const auto seed_indices =
        subsample_indices(select_seed_indices(pixels_, part_, threshold),
                          static_cast<std::size_t>(config_.seed_cap));
    if (seed_indices.empty()) return {};
    std::vector<WorldPoint> converged;
    converged.reserve(seed_indices.size());
    for (const std::size_t i : seed_indices) {
        auto it = converged_.find(i);
        if (it == converged_.end())
            it = converged_.emplace(i, density_.converge(pixels_[i].world)).first;
        converged.push_back(it->second);
    }
    return merge_modes(converged, density_, config_.merge_radius, part_);
}

}  // namespace parttrack
