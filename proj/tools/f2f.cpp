// f2f: stereo diver-pose keypoints -> body frame -> face-to-face servo
// setpoints, plus the synthetic harness and evaluation reporting.
//
// Exit codes: 0 success, 2 input/config error, 3 total pipeline failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "f2f/evaluation.hpp"
#include "f2f/stream_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitPipeline = 3;

struct StreamConfig {
    std::string calib_path;
    std::string left_path;
    std::string right_path;
    double p_cutoff = f2f::kDefaultPCutoff;
    double vert_tol_px = f2f::kDefaultVertTolPx;
    std::string out_path; // empty = stdout
};

void add_stream_options(CLI::App* cmd, StreamConfig& config) {
    cmd->add_option("--calib", config.calib_path, "calibration JSON file")->required();
    cmd->add_option("--left", config.left_path, "left keypoint stream (JSONL)")->required();
    cmd->add_option("--right", config.right_path, "right keypoint stream (JSONL)")->required();
    cmd->add_option("--p-cutoff", config.p_cutoff, "confidence cutoff (keeps p > cutoff)")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--vert-tol", config.vert_tol_px, "epipolar vertical tolerance (px)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--out", config.out_path, "output path (default: stdout)");
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw f2f::ParseError("cannot open output file " + path);
    return out;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw f2f::ParseError("cannot open " + path);
    return in;
}

std::string error_record(long frame, const f2f::Error& e) {
    nlohmann::ordered_json j;
    j["frame"] = frame;
    j["error"] = e.code();
    j["detail"] = e.what();
    return j.dump();
}

std::string unpaired_record(const f2f::PairedObservationReader::Item& item) {
    nlohmann::ordered_json j;
    j["frame"] = item.frame_id;
    j["side"] = item.left ? "left" : "right";
    j["error"] = "unpaired";
    return j.dump();
}

void report_stream_stats(const f2f::PairedObservationReader& reader) {
    const long unknown =
        reader.left_stats().unknown_keypoints + reader.right_stats().unknown_keypoints;
    if (unknown > 0)
        std::cerr << "warning: ignored " << unknown << " keypoint(s) with unknown ids\n";
}

enum class PipelineOutput { Points3D, Frame, Setpoint };

// Shared streaming driver for triangulate / frame / setpoint.
int run_stream_pipeline(const StreamConfig& config, PipelineOutput mode, double distance_m,
                        bool aggregate) {
    const f2f::StereoRig rig = f2f::load_calibration_file(config.calib_path);
    std::ifstream left_in = open_input(config.left_path);
    std::ifstream right_in = open_input(config.right_path);

    std::ofstream file_out;
    if (!config.out_path.empty()) file_out = open_output(config.out_path);
    std::ostream& out = config.out_path.empty() ? std::cout : file_out;

    f2f::PairedObservationReader reader(left_in, right_in);
    long ok_count = 0;
    long aggregate_count = 0;
    std::array<Eigen::Vector2d, f2f::kKeypointCount> aggregate_sum;
    aggregate_sum.fill(Eigen::Vector2d::Zero());
    // In aggregate mode the output is a single setpoint object, so per-frame
    // diagnostics move to stderr.
    std::ostream& record_out = aggregate ? std::cerr : out;

    while (auto item = reader.next()) {
        if (!item->left || !item->right) {
            record_out << unpaired_record(*item) << "\n";
            continue;
        }
        try {
            const f2f::PoseObservation2D left =
                f2f::filter_by_confidence(*item->left, config.p_cutoff);
            const f2f::PoseObservation2D right =
                f2f::filter_by_confidence(*item->right, config.p_cutoff);
            const f2f::TorsoPose3D pose =
                f2f::triangulate_pose(rig, left, right, config.vert_tol_px);
            switch (mode) {
            case PipelineOutput::Points3D:
                out << f2f::pose_to_json(pose, item->frame_id) << "\n";
                break;
            case PipelineOutput::Frame:
                out << f2f::body_frame_to_json(f2f::build_body_frame(pose), item->frame_id)
                    << "\n";
                break;
            case PipelineOutput::Setpoint: {
                const f2f::Setpoint sp = f2f::compute_setpoint(
                    pose, f2f::build_body_frame(pose), rig.intrinsics, distance_m);
                if (aggregate) {
                    for (f2f::KeypointId id : f2f::kAllKeypointIds)
                        aggregate_sum[static_cast<int>(id)] += sp[id];
                    ++aggregate_count;
                } else {
                    out << f2f::setpoint_to_json(sp, item->frame_id) << "\n";
                }
                break;
            }
            }
            ++ok_count;
        } catch (const f2f::Error& e) {
            record_out << error_record(item->frame_id, e) << "\n";
        }
    }

    if (aggregate && aggregate_count > 0) {
        f2f::Setpoint mean;
        mean.distance_m = distance_m;
        for (f2f::KeypointId id : f2f::kAllKeypointIds)
            mean.points[static_cast<int>(id)] =
                aggregate_sum[static_cast<int>(id)] / static_cast<double>(aggregate_count);
        out << f2f::setpoint_to_json(mean) << "\n";
    }

    report_stream_stats(reader);
    return ok_count > 0 ? kExitOk : kExitPipeline;
}

int run_synth(const std::string& scenario_path, const std::string& left_path,
              const std::string& right_path, const std::string& sidecar_path,
              const std::string& calib_out, const std::optional<std::uint64_t>& seed_override) {
    f2f::Scenario scenario = f2f::load_scenario_file(scenario_path);
    if (seed_override) scenario.seed = *seed_override;

    std::ofstream left_out = open_output(left_path);
    std::ofstream right_out = open_output(right_path);
    std::ofstream sidecar_out;
    if (!sidecar_path.empty()) sidecar_out = open_output(sidecar_path);
    if (!calib_out.empty())
        open_output(calib_out) << f2f::calibration_to_json(scenario.rig) << "\n";

    long frame_id = 0;
    for (const f2f::ScenarioCase& c : scenario.cases) {
        const f2f::SyntheticTorso truth = f2f::make_torso(scenario.shape, c.pose, c.position);
        for (int i = 0; i < c.frames; ++i, ++frame_id) {
            const f2f::NoiseSpec noise{scenario.sigma_px,
                                       scenario.seed + static_cast<std::uint64_t>(frame_id)};
            const f2f::StereoObservation obs =
                f2f::observe(scenario.rig, truth.pose, noise, frame_id, scenario.margin_px);
            left_out << f2f::observation_to_json(obs.left) << "\n";
            right_out << f2f::observation_to_json(obs.right) << "\n";
            if (sidecar_out.is_open())
                sidecar_out << f2f::sidecar_to_json({frame_id, c.pose_label, c.distance_m,
                                                     truth.pose, truth.frame})
                            << "\n";
        }
    }
    return kExitOk;
}

int run_evaluate(const StreamConfig& config, const std::string& baseline_path,
                 const std::string& sidecar_path, bool center_align, const std::string& format,
                 const std::string& per_frame_path, const std::string& pose_label) {
    const f2f::StereoRig rig = f2f::load_calibration_file(config.calib_path);
    const std::vector<f2f::Setpoint> baselines = f2f::load_setpoints_file(baseline_path);
    if (baselines.size() > 1 && sidecar_path.empty())
        throw f2f::ParseError("a multi-standoff baseline file needs --sidecar to group frames");

    auto baseline_for = [&](double distance_m) -> const f2f::Setpoint& {
        for (const f2f::Setpoint& sp : baselines)
            if (std::abs(sp.distance_m - distance_m) < 1e-9) return sp;
        throw f2f::ParseError("no baseline setpoint for distance " + std::to_string(distance_m));
    };

    // frame id -> (pose label, distance) when a ground-truth sidecar is given.
    std::map<long, std::pair<std::string, double>> labels;
    if (!sidecar_path.empty()) {
        std::ifstream sidecar_in = open_input(sidecar_path);
        std::string line;
        long line_no = 0;
        while (std::getline(sidecar_in, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            const f2f::SidecarRecord record = f2f::parse_sidecar_json(line, line_no);
            labels[record.frame] = {record.pose_label, record.distance_m};
        }
    }

    std::ifstream left_in = open_input(config.left_path);
    std::ifstream right_in = open_input(config.right_path);
    f2f::PairedObservationReader reader(left_in, right_in);

    const f2f::EvalConfig eval_config{config.p_cutoff, config.vert_tol_px, center_align};
    std::map<std::pair<std::string, double>, f2f::RowAccumulator> groups;

    std::ofstream per_frame_out;
    if (!per_frame_path.empty()) {
        per_frame_out = open_output(per_frame_path);
        per_frame_out << "frame,pose_label,distance_m,sum_px,b,n,rs,rh,lh,ls\n";
    }

    while (auto item = reader.next()) {
        if (!item->left || !item->right) continue; // unpaired frames cannot be scored
        std::pair<std::string, double> key{pose_label, baselines.front().distance_m};
        if (!labels.empty()) {
            const auto found = labels.find(item->frame_id);
            if (found == labels.end()) continue; // no ground-truth label for this frame
            key = found->second;
        }
        const f2f::Setpoint& baseline = baseline_for(key.second);
        const f2f::FrameScore score =
            f2f::score_frame(rig, {*item->left, *item->right}, baseline, eval_config);
        groups[key].add(score);
        if (per_frame_out.is_open() && score.ok) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%ld,%s,%.6f,%.6f", score.frame_id,
                          key.first.c_str(), key.second, score.sum_px);
            per_frame_out << buf;
            for (f2f::KeypointId id : f2f::kAllKeypointIds) {
                std::snprintf(buf, sizeof(buf), ",%.6f",
                              score.per_keypoint_px[static_cast<int>(id)]);
                per_frame_out << buf;
            }
            per_frame_out << "\n";
        }
    }
    report_stream_stats(reader);

    if (groups.empty()) throw f2f::ParseError("no scorable frames in the input streams");

    std::vector<f2f::EvaluationRow> rows;
    for (auto& [key, acc] : groups) {
        try {
            rows.push_back(acc.finalize(key.first, key.second));
        } catch (const f2f::AllFramesFailed&) {
            std::cerr << "warning: every frame failed for pose " << key.first << " at "
                      << key.second << " m\n";
        }
    }
    if (rows.empty()) {
        std::cerr << "error: AllFramesFailed: no frame survived the pipeline\n";
        return kExitPipeline;
    }

    const f2f::Report report = f2f::build_report(rows);
    const std::string rendered =
        format == "csv" ? f2f::render_report_csv(report) : f2f::render_report_text(report);
    if (config.out_path.empty()) {
        std::cout << rendered;
    } else {
        open_output(config.out_path) << rendered;
    }
    return kExitOk;
}

int run_perturb(const std::vector<double>& vector_in, double theta_bound, double phi_bound,
                int count, std::uint64_t seed, const std::string& out_path) {
    const Eigen::Vector3d axis(vector_in[0], vector_in[1], vector_in[2]);
    const std::vector<Eigen::Vector3d> vectors =
        f2f::perturb_alignment(axis, theta_bound, phi_bound, count, seed);

    std::ofstream file_out;
    if (!out_path.empty()) file_out = open_output(out_path);
    std::ostream& out = out_path.empty() ? std::cout : file_out;
    for (const Eigen::Vector3d& v : vectors) {
        const nlohmann::json j = {v.x(), v.y(), v.z()};
        out << j.dump() << "\n";
    }
    return kExitOk;
}

int run_kappa(const std::string& matrix_path, const std::string& out_path) {
    const f2f::RatingMatrix matrix = f2f::load_rating_matrix_file(matrix_path);

    std::ofstream file_out;
    if (!out_path.empty()) file_out = open_output(out_path);
    std::ostream& out = out_path.empty() ? std::cout : file_out;

    try {
        const double kappa = f2f::fleiss_kappa(matrix);
        nlohmann::ordered_json j;
        j["kappa"] = kappa;
        j["n_subjects"] = matrix.n_subjects();
        j["n_items"] = matrix.n_items();
        j["n_categories"] = matrix.n_categories();
        out << j.dump() << "\n";
        return kExitOk;
    } catch (const f2f::DegenerateAgreement& e) {
        nlohmann::ordered_json j;
        j["error"] = e.code();
        j["detail"] = e.what();
        out << j.dump() << "\n";
        return kExitPipeline;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stereo diver-pose pipeline: keypoints to face-to-face servo setpoints"};
    app.require_subcommand(1);

    StreamConfig tri_config;
    CLI::App* cmd_triangulate =
        app.add_subcommand("triangulate", "stereo keypoints -> 3D points");
    add_stream_options(cmd_triangulate, tri_config);

    StreamConfig frame_config;
    CLI::App* cmd_frame = app.add_subcommand("frame", "stereo keypoints -> body frame");
    add_stream_options(cmd_frame, frame_config);

    StreamConfig setpoint_config;
    double setpoint_distance = f2f::kDefaultDistanceM;
    bool setpoint_aggregate = false;
    CLI::App* cmd_setpoint =
        app.add_subcommand("setpoint", "stereo keypoints -> servo setpoint");
    add_stream_options(cmd_setpoint, setpoint_config);
    cmd_setpoint->add_option("--distance", setpoint_distance, "standoff distance (m)")
        ->check(CLI::PositiveNumber);
    cmd_setpoint->add_flag("--aggregate", setpoint_aggregate,
                           "emit the mean setpoint over all frames");

    StreamConfig eval_config;
    std::string eval_baseline;
    std::string eval_sidecar;
    std::string eval_format = "table";
    std::string eval_per_frame;
    std::string eval_pose_label = "sequence";
    bool eval_center_align = false;
    CLI::App* cmd_evaluate =
        app.add_subcommand("evaluate", "score a stream against a baseline");
    add_stream_options(cmd_evaluate, eval_config);
    cmd_evaluate->add_option("--baseline", eval_baseline, "baseline setpoint JSON (or JSONL)")
        ->required();
    cmd_evaluate->add_option("--sidecar", eval_sidecar,
                             "ground-truth sidecar for pose/distance grouping");
    cmd_evaluate->add_flag("--center-align", eval_center_align,
                           "align centroids before differencing");
    cmd_evaluate->add_option("--format", eval_format, "report format")
        ->check(CLI::IsMember({"csv", "table"}));
    cmd_evaluate->add_option("--per-frame", eval_per_frame, "per-frame error CSV path");
    cmd_evaluate->add_option("--pose-label", eval_pose_label,
                             "row label when no sidecar is given");

    std::string synth_scenario;
    std::string synth_left = "left.jsonl";
    std::string synth_right = "right.jsonl";
    std::string synth_sidecar;
    std::string synth_calib_out;
    std::uint64_t synth_seed = 0;
    CLI::App* cmd_synth = app.add_subcommand("synth", "emit a synthetic observation stream");
    cmd_synth->add_option("--scenario", synth_scenario, "scenario JSON file")->required();
    cmd_synth->add_option("--left", synth_left, "left stream output path");
    cmd_synth->add_option("--right", synth_right, "right stream output path");
    cmd_synth->add_option("--sidecar", synth_sidecar, "ground-truth sidecar output path");
    cmd_synth->add_option("--calib-out", synth_calib_out,
                          "write the scenario rig as a calibration file");
    CLI::Option* synth_seed_option =
        cmd_synth->add_option("--seed", synth_seed, "override the scenario noise seed");

    std::vector<double> perturb_vector;
    double perturb_theta = 0.0;
    double perturb_phi = 0.0;
    int perturb_preset = 0;
    int perturb_count = 1;
    std::uint64_t perturb_seed = 0;
    std::string perturb_out;
    CLI::App* cmd_perturb = app.add_subcommand("perturb", "perturb an alignment vector");
    cmd_perturb->add_option("--vector", perturb_vector, "alignment vector x y z")
        ->expected(3)
        ->required();
    cmd_perturb->add_option("--theta-bound", perturb_theta, "polar bound (deg)")
        ->check(CLI::NonNegativeNumber);
    cmd_perturb->add_option("--phi-bound", perturb_phi, "azimuth bound (deg)")
        ->check(CLI::NonNegativeNumber);
    cmd_perturb->add_option("--preset", perturb_preset, "set both bounds to 25, 15, or 5 deg")
        ->check(CLI::IsMember({5, 15, 25}));
    cmd_perturb->add_option("--count", perturb_count, "number of samples")
        ->check(CLI::PositiveNumber);
    cmd_perturb->add_option("--seed", perturb_seed, "RNG seed");
    cmd_perturb->add_option("--out", perturb_out, "output path (default: stdout)");

    std::string kappa_matrix;
    std::string kappa_out;
    CLI::App* cmd_kappa = app.add_subcommand("kappa", "Fleiss' kappa of a rating matrix");
    cmd_kappa->add_option("--matrix", kappa_matrix, "rating matrix JSON ({\"counts\":[[..],..]})")
        ->required();
    cmd_kappa->add_option("--out", kappa_out, "output path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (cmd_triangulate->parsed())
            return run_stream_pipeline(tri_config, PipelineOutput::Points3D, 0.0, false);
        if (cmd_frame->parsed())
            return run_stream_pipeline(frame_config, PipelineOutput::Frame, 0.0, false);
        if (cmd_setpoint->parsed())
            return run_stream_pipeline(setpoint_config, PipelineOutput::Setpoint,
                                       setpoint_distance, setpoint_aggregate);
        if (cmd_evaluate->parsed())
            return run_evaluate(eval_config, eval_baseline, eval_sidecar, eval_center_align,
                                eval_format, eval_per_frame, eval_pose_label);
        if (cmd_synth->parsed())
            return run_synth(synth_scenario, synth_left, synth_right, synth_sidecar,
                             synth_calib_out,
                             synth_seed_option->count() > 0
                                 ? std::optional<std::uint64_t>(synth_seed)
                                 : std::nullopt);
        if (cmd_perturb->parsed()) {
            if (perturb_preset > 0) {
                perturb_theta = perturb_preset;
                perturb_phi = perturb_preset;
            }
            return run_perturb(perturb_vector, perturb_theta, perturb_phi, perturb_count,
                               perturb_seed, perturb_out);
        }
        if (cmd_kappa->parsed()) return run_kappa(kappa_matrix, kappa_out);
    } catch (const f2f::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const f2f::Error& e) {
        std::cerr << "error: " << e.code() << ": " << e.what() << "\n";
        return kExitPipeline;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
