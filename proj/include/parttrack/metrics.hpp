#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "parttrack/image.hpp"

namespace parttrack {

// Rows are ground truth, columns are predictions.
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(int classes);

    int classes() const { return classes_; }
    void add(int truth, int predicted, std::int64_t n = 1);
    std::int64_t at(int truth, int predicted) const;
    std::int64_t row_sum(int truth) const;

    ConfusionMatrix& operator+=(const ConfusionMatrix& other);

private:
    int classes_;
    std::vector<std::int64_t> counts_;
};

// Mean per-class recall; classes with no ground-truth rows are excluded.
double uar(const ConfusionMatrix& cm);

struct BinaryCounts {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t tn = 0;
    std::int64_t fn = 0;

    BinaryCounts& operator+=(const BinaryCounts& o) {
        tp += o.tp;
        fp += o.fp;
        tn += o.tn;
        fn += o.fn;
        return *this;
    }
};

// One part in one frame, with every surviving mode in confidence order.
struct ModeFrameObservation {
    bool present = false;
    WorldPoint truth;
    std::vector<WorldPoint> modes;
};

// Part-present frames: the first mode within delta_p is a TP and every other
// mode an FP. Part-absent frames: no modes is a TN; otherwise each mode is an
// FN, or an FP when conventional_scoring is set.
BinaryCounts score_proposals_all_modes(std::span<const ModeFrameObservation> frames,
                                       double delta_p, bool conventional_scoring = false);

// One part in one frame, reduced to the highest-confidence proposal.
struct FinalFrameObservation {
    bool present = false;
    WorldPoint truth;
    std::optional<WorldPoint> proposal;
};

BinaryCounts score_final_proposals(std::span<const FinalFrameObservation> frames, double delta_p,
                                   bool conventional_scoring = false);

// tp+fp == 0 counts as precision 1 (nothing proposed, nothing wrong);
// tp+fn == 0 counts as recall 0.
double precision(const BinaryCounts& c);
double recall(const BinaryCounts& c);

struct PRPoint {
    double threshold = 0.0;
    double precision = 0.0;
    double recall = 0.0;
};

struct PRCurve {
    std::vector<PRPoint> points;  // thresholds strictly increasing
};

// 101 thresholds, 0.00 to 1.00.
std::vector<double> default_threshold_grid();

// Sweeps the grid; throws UndefinedMetricError when no threshold yields a
// true positive.
PRCurve pr_curve(std::span<const double> grid,
                 const std::function<BinaryCounts(double)>& score_at);

// Trapezoidal area over recall, with the curve extended flat from its
// lowest-recall point down to recall 0.
double average_precision(const PRCurve& curve);

// Grid threshold minimizing |precision - recall|; ties go to the lower
// threshold.
double eer_threshold(const PRCurve& curve);

double f_beta(const BinaryCounts& counts, double beta);

// CSV report writers. Headers documented in the README.
void write_pr_csv(const std::string& path, const PRCurve& curve);

struct PartSummary {
    std::string part;
    double ap = 0.0;
    double eer_threshold = 0.0;
};

void write_part_summary_csv(const std::string& path, std::span<const PartSummary> rows);
void write_confusion_csv(const std::string& path, const ConfusionMatrix& cm,
                         std::span<const char* const> class_names);
void write_uar_csv(const std::string& path, const ConfusionMatrix& cm,
                   std::span<const char* const> class_names);

}  // namespace parttrack
