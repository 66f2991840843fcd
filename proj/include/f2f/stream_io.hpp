#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "f2f/camera.hpp"
#include "f2f/evaluation.hpp"
#include "f2f/keypoints.hpp"
#include "f2f/setpoint.hpp"
#include "f2f/synth.hpp"

namespace f2f {

class ParseError : public Error {
public:
    explicit ParseError(const std::string& message, long line = 0)
        : Error("ParseError", line > 0 ? "line " + std::to_string(line) + ": " + message
                                       : message),
          line_(line) {}

    long line() const noexcept { return line_; }

private:
    long line_;
};

struct StreamStats {
    long lines = 0;
    long observations = 0;
    long unknown_keypoints = 0; // extra detector ids, ignored
};

// One keypoint-stream record:
// {"frame":N,"side":"left","keypoints":[{"id":"ls","u":..,"v":..,"p":..},..]}
PoseObservation2D parse_observation_json(const std::string& line, long line_no,
                                         StreamStats* stats = nullptr);
std::string observation_to_json(const PoseObservation2D& obs);

// Calibration file:
// {"fx":..,"fy":..,"cx":..,"cy":..,"width":..,"height":..,"baseline_m":..}
StereoRig parse_calibration_json(const std::string& text);
StereoRig load_calibration_file(const std::filesystem::path& path);
std::string calibration_to_json(const StereoRig& rig);

// Setpoint JSON: {"distance_m":..,"points":{"b":[u,v],...}}. A baseline file
// holds either one object or one object per line (several standoffs).
Setpoint parse_setpoint_json(const std::string& text);
std::vector<Setpoint> load_setpoints_file(const std::filesystem::path& path);
std::string setpoint_to_json(const Setpoint& sp, std::optional<long> frame = std::nullopt);

// Body frame JSON with 9 significant digits:
// {"origin":[..],"x":[..],"y":[..],"z":[..]}
std::string body_frame_to_json(const BodyFrame& frame, std::optional<long> frame_id = std::nullopt);

// 3D pose JSON: {"frame":N,"points":{"b":[x,y,z],...}}
std::string pose_to_json(const TorsoPose3D& pose, std::optional<long> frame_id = std::nullopt);

// Synthetic scenario description:
// {
//   "rig": {calibration object},
//   "shape": {"shoulder_width_m":..,"hip_width_m":..,"torso_height_m":..,
//             "nose_superior_m":..,"nose_anterior_m":..},
//   "noise": {"sigma_px":..,"seed":..},
//   "margin_px": 0,
//   "cases": [{"pose":"upright_facing","position":[x,y,z],"frames":N,
//              "distance_m":..}, ...]
// }
// distance_m defaults to the position's z component. "pose" also accepts
// {"free_rotation": [9 row-major values]}.
struct ScenarioCase {
    DiverPose pose{Eigen::Matrix3d::Identity(), std::nullopt};
    std::string pose_label;
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    int frames = 1;
    double distance_m = 0.0;
};

struct Scenario {
    StereoRig rig;
    BodyShape shape;
    double sigma_px = 0.0;
    std::uint64_t seed = 0;
    double margin_px = 0.0;
    std::vector<ScenarioCase> cases;
};

Scenario parse_scenario_json(const std::string& text);
Scenario load_scenario_file(const std::filesystem::path& path);

// Ground-truth sidecar record emitted next to synthetic streams.
struct SidecarRecord {
    long frame;
    std::string pose_label;
    double distance_m;
    TorsoPose3D pose;
    BodyFrame body_frame;
};

std::string sidecar_to_json(const SidecarRecord& record);
SidecarRecord parse_sidecar_json(const std::string& line, long line_no);

// Rating matrix JSON: {"counts":[[..],..]}.
RatingMatrix load_rating_matrix_file(const std::filesystem::path& path);

// Merge-join over two frame-sorted observation streams. Memory use is one
// record per side regardless of stream length. Frames present on only one
// side come back with the other side empty.
class PairedObservationReader {
public:
    PairedObservationReader(std::istream& left, std::istream& right);

    struct Item {
        long frame_id = 0;
        std::optional<PoseObservation2D> left;
        std::optional<PoseObservation2D> right;
    };

    // std::nullopt at end of both streams. Throws ParseError on malformed
    // lines, side mismatches, or out-of-order frames.
    std::optional<Item> next();

    const StreamStats& left_stats() const noexcept { return left_stats_; }
    const StreamStats& right_stats() const noexcept { return right_stats_; }

private:
    std::optional<PoseObservation2D> advance(std::istream& stream, CameraSide side,
                                             StreamStats& stats, long& last_frame);

    std::istream& left_;
    std::istream& right_;
    StreamStats left_stats_;
    StreamStats right_stats_;
    long left_last_frame_ = -1;
    long right_last_frame_ = -1;
    std::optional<PoseObservation2D> left_pending_;
    std::optional<PoseObservation2D> right_pending_;
    bool primed_ = false;
};

} // namespace f2f
