#pragma once

#include <optional>
#include <string>
#include <vector>

#include "f2f/setpoint.hpp"
#include "f2f/synth.hpp"

namespace f2f {

struct EvalConfig {
    double p_cutoff = kDefaultPCutoff;
    double vert_tol_px = kDefaultVertTolPx;
    bool center_align = false;
};

// One cell of the report: error statistics over the frames of a sequence.
// std_px is the population standard deviation; failed frames are dropped
// from the statistics and counted.
struct EvaluationRow {
    std::string pose_label;
    double distance_m = 0.0;
    double mean_px = 0.0;
    double std_px = 0.0;
    double min_px = 0.0;
    int n_frames_used = 0;
    int n_frames_failed = 0;
};

struct FrameScore {
    long frame_id = 0;
    bool ok = false;
    std::string failure_code;
    double sum_px = 0.0;
    std::array<double, kKeypointCount> per_keypoint_px{};
};

// Full pipeline on one stereo frame: confidence filter, completeness check,
// triangulation, body frame, anti-aligned projection of the observed pose at
// the baseline's standoff, then the error against the baseline. Geometric
// failures are captured in the score rather than thrown.
FrameScore score_frame(const StereoRig& rig, const StereoObservation& frame,
                       const Setpoint& baseline, const EvalConfig& config);

// Streaming accumulator for mean / population std / min.
class RowAccumulator {
public:
    void add(const FrameScore& score);
    // Throws AllFramesFailed when no frame scored.
    EvaluationRow finalize(std::string pose_label, double distance_m) const;

private:
    double sum_ = 0.0;
    double sum_sq_ = 0.0;
    double min_ = 0.0;
    int n_used_ = 0;
    int n_failed_ = 0;
};

EvaluationRow evaluate_sequence(const StereoRig& rig,
                                const std::vector<StereoObservation>& frames,
                                const Setpoint& baseline, const EvalConfig& config,
                                const std::string& pose_label = "sequence",
                                std::vector<FrameScore>* per_frame = nullptr);

// Tallies of categorical ratings: one row per item, one column per
// category; every row sums to the (identical) number of raters.
class RatingMatrix {
public:
    static RatingMatrix from_counts(std::vector<std::vector<int>> counts);

    int n_subjects() const noexcept { return n_subjects_; }
    int n_items() const noexcept { return static_cast<int>(counts_.size()); }
    int n_categories() const noexcept {
        return counts_.empty() ? 0 : static_cast<int>(counts_.front().size());
    }
    const std::vector<std::vector<int>>& counts() const noexcept { return counts_; }

private:
    RatingMatrix() = default;
    std::vector<std::vector<int>> counts_;
    int n_subjects_ = 0;
};

// Chance-corrected multi-rater agreement (P_bar - P_e) / (1 - P_e).
// Throws DegenerateAgreement when every rating falls in one category.
double fleiss_kappa(const RatingMatrix& matrix);

// Report with the evaluation's row/column layout: pose rows, distance
// columns, plus "Across distances" and "Across poses" marginals computed as
// unweighted means of the cell means and cell stds.
struct Report {
    std::vector<std::string> pose_labels;                        // row order
    std::vector<double> distances;                               // ascending
    std::vector<std::vector<std::optional<EvaluationRow>>> cells; // [row][col]
};

Report build_report(const std::vector<EvaluationRow>& rows);
std::string render_report_csv(const Report& report);
std::string render_report_text(const Report& report);

} // namespace f2f
