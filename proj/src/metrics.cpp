#include "parttrack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "parttrack/errors.hpp"

namespace parttrack {

ConfusionMatrix::ConfusionMatrix(int classes) : classes_(classes) {
    if (classes <= 0) throw InvalidInputError("confusion matrix needs at least one class");
    counts_.assign(static_cast<std::size_t>(classes) * classes, 0);
}

void ConfusionMatrix::add(int truth, int predicted, std::int64_t n) {
    if (truth < 0 || truth >= classes_ || predicted < 0 || predicted >= classes_)
        throw InvalidInputError("confusion matrix index out of range");
    counts_[static_cast<std::size_t>(truth) * classes_ + predicted] += n;
}

std::int64_t ConfusionMatrix::at(int truth, int predicted) const {
    if (truth < 0 || truth >= classes_ || predicted < 0 || predicted >= classes_)
        throw InvalidInputError("confusion matrix index out of range");
    return counts_[static_cast<std::size_t>(truth) * classes_ + predicted];
}

std::int64_t ConfusionMatrix::row_sum(int truth) const {
    std::int64_t total = 0;
    for (int p = 0; p < classes_; ++p) total += at(truth, p);
    return total;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
    if (other.classes_ != classes_)
        throw InvalidInputError("confusion matrix class count mismatch");
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
    return *this;
}

double uar(const ConfusionMatrix& cm) {
    double total = 0.0;
    int populated = 0;
    for (int t = 0; t < cm.classes(); ++t) {
        const std::int64_t row = cm.row_sum(t);
        if (row == 0) continue;
        total += static_cast<double>(cm.at(t, t)) / static_cast<double>(row);
        ++populated;
    }
    if (populated == 0) throw UndefinedMetricError("no ground-truth samples in any class");
    return total / populated;
}

BinaryCounts score_proposals_all_modes(std::span<const ModeFrameObservation> frames,
                                       double delta_p, bool conventional_scoring) {
    if (!(delta_p > 0.0)) throw InvalidInputError("delta_p must be positive");
    BinaryCounts c;
    const double delta_sq = delta_p * delta_p;
    for (const auto& frame : frames) {
        if (frame.present) {
            bool matched = false;
            for (const auto& mode : frame.modes) {
                if (!matched && squared_distance(mode, frame.truth) <= delta_sq) {
                    ++c.tp;
                    matched = true;
                } else {
                    ++c.fp;
                }
            }
        } else if (frame.modes.empty()) {
            ++c.tn;
        } else {
            auto& miss = conventional_scoring ? c.fp : c.fn;
            miss += static_cast<std::int64_t>(frame.modes.size());
        }
    }
    return c;
}

BinaryCounts score_final_proposals(std::span<const FinalFrameObservation> frames, double delta_p,
                                   bool conventional_scoring) {
    if (!(delta_p > 0.0)) throw InvalidInputError("delta_p must be positive");
    BinaryCounts c;
    const double delta_sq = delta_p * delta_p;
    for (const auto& frame : frames) {
        if (frame.present) {
            if (!frame.proposal.has_value())
                ++c.fn;
            else if (squared_distance(*frame.proposal, frame.truth) <= delta_sq)
                ++c.tp;
            else
                ++c.fp;
        } else if (!frame.proposal.has_value()) {
            ++c.tn;
        } else if (conventional_scoring) {
            ++c.fp;
        } else {
            ++c.fn;
        }
    }
    return c;
}

double precision(const BinaryCounts& c) {
    const std::int64_t denom = c.tp + c.fp;
    if (denom == 0) return 1.0;
    return static_cast<double>(c.tp) / static_cast<double>(denom);
}

double recall(const BinaryCounts& c) {
    const std::int64_t denom = c.tp + c.fn;
    if (denom == 0) return 0.0;
    return static_cast<double>(c.tp) / static_cast<double>(denom);
}

std::vector<double> default_threshold_grid() {
    std::vector<double> grid(101);
    for (int i = 0; i <= 100; ++i) grid[static_cast<std::size_t>(i)] = i / 100.0;
    return grid;
}

PRCurve pr_curve(std::span<const double> grid,
                 const std::function<BinaryCounts(double)>& score_at) {
    if (grid.size() < 2) throw InvalidInputError("threshold grid needs at least two points");
    if (std::abs(grid.front()) > 1e-12 || std::abs(grid.back() - 1.0) > 1e-12)
        throw InvalidInputError("threshold grid must span [0, 1]");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw InvalidInputError("threshold grid must be strictly increasing");

    PRCurve curve;
    curve.points.reserve(grid.size());
    bool any_tp = false;
    for (const double t : grid) {
        const BinaryCounts c = score_at(t);
        if (c.tp > 0) any_tp = true;
        curve.points.push_back({t, precision(c), recall(c)});
    }
    if (!any_tp)
        throw UndefinedMetricError("no true positives at any threshold; PR curve undefined");
    return curve;
}

double average_precision(const PRCurve& curve) {
    if (curve.points.empty()) throw InvalidInputError("empty PR curve");
    // Sort by recall; at equal recall keep the higher precision first so the
    // left anchor uses the best precision attained at the lowest recall.
    std::vector<PRPoint> pts(curve.points.begin(), curve.points.end());
    std::stable_sort(pts.begin(), pts.end(), [](const PRPoint& a, const PRPoint& b) {
        if (a.recall != b.recall) return a.recall < b.recall;
        return a.precision > b.precision;
    });
    double area = pts.front().recall * pts.front().precision;  // flat extension to recall 0
    for (std::size_t i = 1; i < pts.size(); ++i) {
        area += (pts[i].recall - pts[i - 1].recall) *
                (pts[i].precision + pts[i - 1].precision) * 0.5;
    }
    return area;
}

double eer_threshold(const PRCurve& curve) {
    if (curve.points.empty()) throw InvalidInputError("empty PR curve");
    double best_gap = std::numeric_limits<double>::infinity();
    double best_threshold = curve.points.front().threshold;
    for (const auto& pt : curve.points) {
        const double gap = std::abs(pt.precision - pt.recall);
        if (gap < best_gap) {
            best_gap = gap;
            best_threshold = pt.threshold;
        }
    }
    return best_threshold;
}

double f_beta(const BinaryCounts& counts, double beta) {
    if (!(beta > 0.0)) throw InvalidInputError("beta must be positive");
    if (counts.tp + counts.fp == 0 || counts.tp + counts.fn == 0)
        throw UndefinedMetricError("F-score undefined without predictions and positives");
    const double p = static_cast<double>(counts.tp) / static_cast<double>(counts.tp + counts.fp);
    const double r = static_cast<double>(counts.tp) / static_cast<double>(counts.tp + counts.fn);
    if (p == 0.0 && r == 0.0) return 0.0;
    const double b2 = beta * beta;
    return (1.0 + b2) * p * r / (b2 * p + r);
}

namespace {

std::ofstream open_csv(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    return out;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

}  // namespace

void write_pr_csv(const std::string& path, const PRCurve& curve) {
    auto out = open_csv(path);
    out << "threshold,precision,recall\n";
    for (const auto& pt : curve.points)
        out << fmt(pt.threshold) << ',' << fmt(pt.precision) << ',' << fmt(pt.recall) << '\n';
}

void write_part_summary_csv(const std::string& path, std::span<const PartSummary> rows) {
    auto out = open_csv(path);
    out << "part,ap,eer_threshold\n";
    for (const auto& row : rows)
        out << row.part << ',' << fmt(row.ap) << ',' << fmt(row.eer_threshold) << '\n';
}

void write_confusion_csv(const std::string& path, const ConfusionMatrix& cm,
                         std::span<const char* const> class_names) {
    if (static_cast<int>(class_names.size()) != cm.classes())
        throw InvalidInputError("class name count mismatch");
    auto out = open_csv(path);
    out << "truth";
    for (const char* name : class_names) out << ',' << name;
    out << '\n';
    for (int t = 0; t < cm.classes(); ++t) {
        out << class_names[static_cast<std::size_t>(t)];
        for (int p = 0; p < cm.classes(); ++p) out << ',' << cm.at(t, p);
        out << '\n';
    }
}

void write_uar_csv(const std::string& path, const ConfusionMatrix& cm,
                   std::span<const char* const> class_names) {
    if (static_cast<int>(class_names.size()) != cm.classes())
        throw InvalidInputError("class name count mismatch");
    auto out = open_csv(path);
    out << "class,recall,support\n";
    std::int64_t total = 0;
    for (int t = 0; t < cm.classes(); ++t) {
        const std::int64_t row = cm.row_sum(t);
        total += row;
        const double rec =
            row == 0 ? 0.0 : static_cast<double>(cm.at(t, t)) / static_cast<double>(row);
        out << class_names[static_cast<std::size_t>(t)] << ',' << fmt(rec) << ',' << row << '\n';
    }
    out << "uar," << fmt(uar(cm)) << ',' << total << '\n';
}

}  // namespace parttrack
