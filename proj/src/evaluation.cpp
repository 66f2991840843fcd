#include "f2f/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <stdexcept>

namespace f2f {

namespace {

std::string format(const char* fmt, double a) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, a);
    return buf;
}

std::string format2(const char* fmt, double a, double b) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), fmt, a, b);
    return buf;
}

// Canonical pose labels sort in the report's row order; anything else
// follows alphabetically.
int pose_rank(const std::string& label) {
    for (std::size_t i = 0; i < kReportPoseOrder.size(); ++i) {
        if (label == pose_token(kReportPoseOrder[i]) ||
            label == pose_display(kReportPoseOrder[i]))
            return static_cast<int>(i);
    }
    return static_cast<int>(kReportPoseOrder.size());
}

std::string display_label(const std::string& label) {
    if (auto pose = pose_from_token(label)) return pose_display(*pose);
    return label;
}

// Unweighted means of the cell means and cell stds.
std::optional<std::pair<double, double>>
marginal(const std::vector<const EvaluationRow*>& cells) {
    if (cells.empty()) return std::nullopt;
    double mean = 0.0;
    double std_dev = 0.0;
    for (const EvaluationRow* row : cells) {
        mean += row->mean_px;
        std_dev += row->std_px;
    }
    const double n = static_cast<double>(cells.size());
    return std::make_pair(mean / n, std_dev / n);
}

} // namespace

FrameScore score_frame(const StereoRig& rig, const StereoObservation& frame,
                       const Setpoint& baseline, const EvalConfig& config) {
    FrameScore score;
    score.frame_id = frame.left.frame_id();
    try {
        const PoseObservation2D left = filter_by_confidence(frame.left, config.p_cutoff);
        const PoseObservation2D right = filter_by_confidence(frame.right, config.p_cutoff);
        const TorsoPose3D pose = triangulate_pose(rig, left, right, config.vert_tol_px);
        const BodyFrame body = build_body_frame(pose);
        const Setpoint projected =
            compute_setpoint(pose, body, rig.intrinsics, baseline.distance_m);

        std::map<KeypointId, Eigen::Vector2d> observed;
        for (KeypointId id : kAllKeypointIds) observed[id] = projected[id];
        const SetpointError err = setpoint_error(observed, baseline, config.center_align);
        score.ok = true;
        score.sum_px = err.sum_euclidean_px;
        score.per_keypoint_px = err.per_keypoint_px;
    } catch (const Error& e) {
        score.failure_code = e.code();
    }
    return score;
}

void RowAccumulator::add(const FrameScore& score) {
    if (!score.ok) {
        ++n_failed_;
        return;
    }
    if (n_used_ == 0 || score.sum_px < min_) min_ = score.sum_px;
    sum_ += score.sum_px;
    sum_sq_ += score.sum_px * score.sum_px;
    ++n_used_;
}

EvaluationRow RowAccumulator::finalize(std::string pose_label, double distance_m) const {
    if (n_used_ == 0) throw AllFramesFailed(n_failed_);
    EvaluationRow row;
    row.pose_label = std::move(pose_label);
    row.distance_m = distance_m;
    row.n_frames_used = n_used_;
    row.n_frames_failed = n_failed_;
    row.mean_px = sum_ / n_used_;
    row.std_px = std::sqrt(std::max(0.0, sum_sq_ / n_used_ - row.mean_px * row.mean_px));
    row.min_px = min_;
    return row;
}

EvaluationRow evaluate_sequence(const StereoRig& rig,
                                const std::vector<StereoObservation>& frames,
                                const Setpoint& baseline, const EvalConfig& config,
                                const std::string& pose_label,
                                std::vector<FrameScore>* per_frame) {
    if (frames.empty()) throw std::invalid_argument("evaluate_sequence: no frames");
    RowAccumulator acc;
    for (const StereoObservation& frame : frames) {
        const FrameScore score = score_frame(rig, frame, baseline, config);
        acc.add(score);
        if (per_frame) per_frame->push_back(score);
    }
    return acc.finalize(pose_label, baseline.distance_m);
}

RatingMatrix RatingMatrix::from_counts(std::vector<std::vector<int>> counts) {
    if (counts.empty()) throw std::invalid_argument("rating matrix: need at least one item");
    const std::size_t categories = counts.front().size();
    if (categories < 2) throw std::invalid_argument("rating matrix: need at least 2 categories");

    int n_subjects = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i].size() != categories)
            throw std::invalid_argument("rating matrix: ragged rows");
        int row_sum = 0;
        for (int c : counts[i]) {
            if (c < 0) throw std::invalid_argument("rating matrix: negative count");
            row_sum += c;
        }
        if (i == 0)
            n_subjects = row_sum;
        else if (row_sum != n_subjects)
            throw std::invalid_argument("rating matrix: row " + std::to_string(i) +
                                        " sums to " + std::to_string(row_sum) + ", expected " +
                                        std::to_string(n_subjects));
    }
    if (n_subjects < 2) throw std::invalid_argument("rating matrix: need at least 2 raters");

    RatingMatrix matrix;
    matrix.counts_ = std::move(counts);
    matrix.n_subjects_ = n_subjects;
    return matrix;
}

double fleiss_kappa(const RatingMatrix& matrix) {
    const auto& counts = matrix.counts();
    const double n = matrix.n_subjects();
    const double items = matrix.n_items();

    double p_bar = 0.0;
    std::vector<double> category_share(matrix.n_categories(), 0.0);
    for (const auto& row : counts) {
        double agreement = 0.0;
        for (std::size_t j = 0; j < row.size(); ++j) {
            agreement += static_cast<double>(row[j]) * row[j];
            category_share[j] += row[j];
        }
        p_bar += (agreement - n) / (n * (n - 1.0));
    }
    p_bar /= items;

    double p_expected = 0.0;
    for (double share : category_share) {
        const double p = share / (items * n);
        p_expected += p * p;
    }

    if (1.0 - p_expected <= 0.0) throw DegenerateAgreement();
    return (p_bar - p_expected) / (1.0 - p_expected);
}

Report build_report(const std::vector<EvaluationRow>& rows) {
    std::vector<std::string> labels;
    std::set<double> distance_set;
    for (const EvaluationRow& row : rows) {
        if (std::find(labels.begin(), labels.end(), row.pose_label) == labels.end())
            labels.push_back(row.pose_label);
        distance_set.insert(row.distance_m);
    }
    std::sort(labels.begin(), labels.end(), [](const std::string& a, const std::string& b) {
        const int ra = pose_rank(a);
        const int rb = pose_rank(b);
        return ra != rb ? ra < rb : a < b;
    });

    Report report;
    report.pose_labels = labels;
    report.distances.assign(distance_set.begin(), distance_set.end());
    report.cells.assign(labels.size(),
                        std::vector<std::optional<EvaluationRow>>(report.distances.size()));
    for (const EvaluationRow& row : rows) {
        const auto r = std::find(labels.begin(), labels.end(), row.pose_label) - labels.begin();
        const auto c = std::find(report.distances.begin(), report.distances.end(),
                                 row.distance_m) -
                       report.distances.begin();
        if (report.cells[r][c].has_value())
            throw std::invalid_argument("report: duplicate cell for pose " + row.pose_label);
        report.cells[r][c] = row;
    }
    return report;
}

std::string render_report_csv(const Report& report) {
    std::string out = "pose,distance_m,mean_px,std_px,min_px,n_frames_used,n_frames_failed\n";
    for (std::size_t r = 0; r < report.pose_labels.size(); ++r) {
        for (std::size_t c = 0; c < report.distances.size(); ++c) {
            const auto& cell = report.cells[r][c];
            if (!cell) continue;
            out += report.pose_labels[r] + "," + format("%.6f", report.distances[c]) + "," +
                   format("%.6f", cell->mean_px) + "," + format("%.6f", cell->std_px) + "," +
                   format("%.6f", cell->min_px) + "," + std::to_string(cell->n_frames_used) +
                   "," + std::to_string(cell->n_frames_failed) + "\n";
        }
        std::vector<const EvaluationRow*> cells;
        for (const auto& cell : report.cells[r])
            if (cell) cells.push_back(&*cell);
        if (const auto m = marginal(cells))
            out += report.pose_labels[r] + ",across_distances," + format("%.6f", m->first) +
                   "," + format("%.6f", m->second) + ",,,\n";
    }
    for (std::size_t c = 0; c < report.distances.size(); ++c) {
        std::vector<const EvaluationRow*> cells;
        for (std::size_t r = 0; r < report.pose_labels.size(); ++r)
            if (report.cells[r][c]) cells.push_back(&*report.cells[r][c]);
        if (const auto m = marginal(cells))
            out += "across_poses," + format("%.6f", report.distances[c]) + "," +
                   format("%.6f", m->first) + "," + format("%.6f", m->second) + ",,,\n";
    }
    return out;
}

std::string render_report_text(const Report& report) {
    constexpr int kPoseWidth = 18;
    constexpr int kCellWidth = 17;

    auto pad_left = [](std::string s, int width) {
        if (static_cast<int>(s.size()) < width) s.insert(0, width - s.size(), ' ');
        return s;
    };
    auto pad_right = [](std::string s, int width) {
        if (static_cast<int>(s.size()) < width) s.append(width - s.size(), ' ');
        return s;
    };

    std::string out = pad_right("Pose", kPoseWidth);
    for (double d : report.distances)
        out += " | " + pad_left(format("%.0f m", d), kCellWidth);
    out += " | " + pad_left("Across distances", kCellWidth) + "\n";
    out += std::string(kPoseWidth, '-');
    for (std::size_t c = 0; c < report.distances.size() + 1; ++c)
        out += "-+-" + std::string(kCellWidth, '-');
    out += "\n";

    int dropped = 0;
    for (std::size_t r = 0; r < report.pose_labels.size(); ++r) {
        out += pad_right(display_label(report.pose_labels[r]), kPoseWidth);
        std::vector<const EvaluationRow*> cells;
        for (std::size_t c = 0; c < report.distances.size(); ++c) {
            const auto& cell = report.cells[r][c];
            if (cell) {
                out += " | " +
                       pad_left(format2("%.2f +- %.2f", cell->mean_px, cell->std_px), kCellWidth);
                cells.push_back(&*cell);
                dropped += cell->n_frames_failed;
            } else {
                out += " | " + pad_left("-", kCellWidth);
            }
        }
        const auto m = marginal(cells);
        out += " | " +
               pad_left(m ? format2("%.2f +- %.2f", m->first, m->second) : std::string("-"),
                        kCellWidth) +
               "\n";
    }

    out += pad_right("Across poses", kPoseWidth);
    for (std::size_t c = 0; c < report.distances.size(); ++c) {
        std::vector<const EvaluationRow*> cells;
        for (std::size_t r = 0; r < report.pose_labels.size(); ++r)
            if (report.cells[r][c]) cells.push_back(&*report.cells[r][c]);
        const auto m = marginal(cells);
        out += " | " +
               pad_left(m ? format2("%.2f +- %.2f", m->first, m->second) : std::string("-"),
                        kCellWidth);
    }
    out += " | " + pad_left("", kCellWidth) + "\n";

    out += "\nCells are mean +- population std of the per-frame keypoint error sums (px).\n";
    out += "Marginals are unweighted means of the cell means and cell stds.\n";
    out += format("%.0f", static_cast<double>(dropped)) +
           " frame(s) failed the pipeline and were dropped from the statistics.\n";
    return out;
}

} // namespace f2f
