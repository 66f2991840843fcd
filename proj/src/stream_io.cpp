#include "f2f/stream_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

#include <Eigen/Dense>
#include <json.hpp>

namespace f2f {

namespace {

using nlohmann::json;

json parse_json(const std::string& text, long line_no) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
    }
}

double get_number(const json& j, const char* field, long line_no = 0) {
    if (!j.contains(field)) throw ParseError(std::string("missing field '") + field + "'", line_no);
    if (!j.at(field).is_number())
        throw ParseError(std::string("field '") + field + "' must be a number", line_no);
    return j.at(field).get<double>();
}

long get_integer(const json& j, const char* field, long line_no = 0) {
    if (!j.contains(field)) throw ParseError(std::string("missing field '") + field + "'", line_no);
    if (!j.at(field).is_number_integer())
        throw ParseError(std::string("field '") + field + "' must be an integer", line_no);
    return j.at(field).get<long>();
}

Eigen::Vector3d get_vec3(const json& j, const char* field, long line_no = 0) {
    if (!j.contains(field)) throw ParseError(std::string("missing field '") + field + "'", line_no);
    const json& arr = j.at(field);
    if (!arr.is_array() || arr.size() != 3 || !arr[0].is_number() || !arr[1].is_number() ||
        !arr[2].is_number())
        throw ParseError(std::string("field '") + field + "' must be [x, y, z]", line_no);
    return {arr[0].get<double>(), arr[1].get<double>(), arr[2].get<double>()};
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// 9 significant digits, the precision of the frame interchange format.
std::string sig9(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

// The 9-digit wire format perturbs unit axes by up to ~5e-10, which can
// push pairwise dot products past the frame's 1e-9 orthonormality
// tolerance. Snap parsed axes to the nearest rotation before validating.
Eigen::Matrix3d nearest_rotation(const Eigen::Matrix3d& m) {
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d r = svd.matrixU() * svd.matrixV().transpose();
    if (r.determinant() < 0.0) {
        Eigen::Matrix3d flip = Eigen::Matrix3d::Identity();
        flip(2, 2) = -1.0;
        r = svd.matrixU() * flip * svd.matrixV().transpose();
    }
    return r;
}

std::string vec3_sig9(const Eigen::Vector3d& v) {
    return "[" + sig9(v.x()) + "," + sig9(v.y()) + "," + sig9(v.z()) + "]";
}

} // namespace

PoseObservation2D parse_observation_json(const std::string& line, long line_no,
                                         StreamStats* stats) {
    const json j = parse_json(line, line_no);
    const long frame = get_integer(j, "frame", line_no);

    if (!j.contains("side")) throw ParseError("missing field 'side'", line_no);
    if (!j.at("side").is_string())
        throw ParseError("field 'side' must be \"left\" or \"right\"", line_no);
    const auto side = side_from(j.at("side").get<std::string>());
    if (!side) throw ParseError("field 'side' must be \"left\" or \"right\"", line_no);

    if (!j.contains("keypoints") || !j.at("keypoints").is_array())
        throw ParseError("missing array field 'keypoints'", line_no);

    PoseObservation2D obs(frame, *side);
    for (const json& kp : j.at("keypoints")) {
        if (!kp.is_object() || !kp.contains("id") || !kp.at("id").is_string())
            throw ParseError("keypoint entries need a string 'id'", line_no);
        const std::string name = kp.at("id").get<std::string>();
        const auto id = keypoint_id_from(name);
        if (!id) {
            // Full-body detectors emit extra joints; count and move on.
            if (stats) ++stats->unknown_keypoints;
            continue;
        }
        const double u = get_number(kp, "u", line_no);
        const double v = get_number(kp, "v", line_no);
        const double p = get_number(kp, "p", line_no);
        if (obs.has(*id)) throw ParseError("duplicate keypoint '" + name + "'", line_no);
        try {
            obs.insert({*id, u, v, p});
        } catch (const std::invalid_argument& e) {
            throw ParseError(e.what(), line_no);
        }
    }
    if (stats) ++stats->observations;
    return obs;
}

std::string observation_to_json(const PoseObservation2D& obs) {
    json keypoints = json::array();
    for (KeypointId id : kAllKeypointIds) {
        if (!obs.has(id)) continue;
        const Keypoint2D& kp = obs.at(id);
        keypoints.push_back({{"id", short_name(id)}, {"u", kp.u}, {"v", kp.v}, {"p", kp.p}});
    }
    const json j = {{"frame", obs.frame_id()},
                    {"side", side_name(obs.side())},
                    {"keypoints", keypoints}};
    return j.dump();
}

StereoRig parse_calibration_json(const std::string& text) {
    const json j = parse_json(text, 0);
    const double fx = get_number(j, "fx");
    const double fy = get_number(j, "fy");
    const double cx = get_number(j, "cx");
    const double cy = get_number(j, "cy");
    const int width = static_cast<int>(get_integer(j, "width"));
    const int height = static_cast<int>(get_integer(j, "height"));
    const double baseline = get_number(j, "baseline_m");
    try {
        return StereoRig(CameraIntrinsics(fx, fy, cx, cy, width, height), baseline);
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("calibration: ") + e.what());
    }
}

StereoRig load_calibration_file(const std::filesystem::path& path) {
    return parse_calibration_json(read_file(path));
}

std::string calibration_to_json(const StereoRig& rig) {
    const CameraIntrinsics& k = rig.intrinsics;
    const json j = {{"fx", k.fx},     {"fy", k.fy},         {"cx", k.cx},
                    {"cy", k.cy},     {"width", k.width},   {"height", k.height},
                    {"baseline_m", rig.baseline_m}};
    return j.dump();
}

Setpoint parse_setpoint_json(const std::string& text) {
    const json j = parse_json(text, 0);
    Setpoint sp;
    sp.distance_m = get_number(j, "distance_m");
    if (!(sp.distance_m > 0.0)) throw ParseError("setpoint: distance_m must be > 0");
    if (!j.contains("points") || !j.at("points").is_object())
        throw ParseError("setpoint: missing object field 'points'");
    const json& points = j.at("points");
    for (KeypointId id : kAllKeypointIds) {
        const char* name = short_name(id);
        if (!points.contains(name))
            throw ParseError(std::string("setpoint: missing point '") + name + "'");
        const json& arr = points.at(name);
        if (!arr.is_array() || arr.size() != 2 || !arr[0].is_number() || !arr[1].is_number())
            throw ParseError(std::string("setpoint: point '") + name + "' must be [u, v]");
        sp.points[static_cast<int>(id)] = {arr[0].get<double>(), arr[1].get<double>()};
    }
    return sp;
}

std::vector<Setpoint> load_setpoints_file(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    std::vector<Setpoint> out;
    std::istringstream stream(text);
    std::string line;
    long line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(parse_setpoint_json(line));
        } catch (const ParseError& e) {
            throw ParseError(e.what(), line_no);
        }
    }
    if (out.empty()) {
        // Not line-delimited; try the whole file as one object.
        out.push_back(parse_setpoint_json(text));
    }
    return out;
}

std::string setpoint_to_json(const Setpoint& sp, std::optional<long> frame) {
    nlohmann::ordered_json points;
    for (KeypointId id : kAllKeypointIds) {
        const Eigen::Vector2d& p = sp[id];
        points[short_name(id)] = {p.x(), p.y()};
    }
    nlohmann::ordered_json j;
    if (frame) j["frame"] = *frame;
    j["distance_m"] = sp.distance_m;
    j["points"] = points;
    return j.dump();
}

std::string body_frame_to_json(const BodyFrame& frame, std::optional<long> frame_id) {
    std::string out = "{";
    if (frame_id) out += "\"frame\":" + std::to_string(*frame_id) + ",";
    out += "\"origin\":" + vec3_sig9(frame.origin) + ",\"x\":" + vec3_sig9(frame.x_axis) +
           ",\"y\":" + vec3_sig9(frame.y_axis) + ",\"z\":" + vec3_sig9(frame.z_axis) + "}";
    return out;
}

std::string pose_to_json(const TorsoPose3D& pose, std::optional<long> frame_id) {
    nlohmann::ordered_json points;
    for (KeypointId id : kAllKeypointIds) {
        const Eigen::Vector3d& p = pose[id];
        points[short_name(id)] = {p.x(), p.y(), p.z()};
    }
    nlohmann::ordered_json j;
    if (frame_id) j["frame"] = *frame_id;
    j["points"] = points;
    return j.dump();
}

Scenario parse_scenario_json(const std::string& text) {
    const json j = parse_json(text, 0);
    if (!j.contains("rig") || !j.at("rig").is_object())
        throw ParseError("scenario: missing object field 'rig'");
    const StereoRig rig = parse_calibration_json(j.at("rig").dump());

    BodyShape shape = BodyShape::defaults();
    if (j.contains("shape")) {
        const json& s = j.at("shape");
        try {
            shape = BodyShape(get_number(s, "shoulder_width_m"), get_number(s, "hip_width_m"),
                              get_number(s, "torso_height_m"), get_number(s, "nose_superior_m"),
                              get_number(s, "nose_anterior_m"));
        } catch (const std::invalid_argument& e) {
            throw ParseError(std::string("scenario: ") + e.what());
        }
    }

    Scenario scenario{rig, shape, 0.0, 0, 0.0, {}};
    if (j.contains("noise")) {
        const json& n = j.at("noise");
        scenario.sigma_px = get_number(n, "sigma_px");
        if (scenario.sigma_px < 0.0) throw ParseError("scenario: sigma_px must be >= 0");
        scenario.seed = static_cast<std::uint64_t>(get_integer(n, "seed"));
    }
    if (j.contains("margin_px")) scenario.margin_px = get_number(j, "margin_px");

    if (!j.contains("cases") || !j.at("cases").is_array() || j.at("cases").empty())
        throw ParseError("scenario: missing non-empty array field 'cases'");
    for (const json& c : j.at("cases")) {
        ScenarioCase item;
        if (c.contains("pose") && c.at("pose").is_string()) {
            const std::string token = c.at("pose").get<std::string>();
            const auto pose = pose_from_token(token);
            if (!pose) throw ParseError("scenario: unknown pose '" + token + "'");
            item.pose = DiverPose::canonical(*pose);
            item.pose_label = token;
        } else if (c.contains("free_rotation")) {
            const json& arr = c.at("free_rotation");
            if (!arr.is_array() || arr.size() != 9)
                throw ParseError("scenario: free_rotation must hold 9 row-major values");
            Eigen::Matrix3d rot;
            for (int i = 0; i < 9; ++i) {
                if (!arr[i].is_number())
                    throw ParseError("scenario: free_rotation entries must be numbers");
                rot(i / 3, i % 3) = arr[i].get<double>();
            }
            if ((rot.transpose() * rot - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() >
                    1e-6 ||
                std::abs(rot.determinant() - 1.0) > 1e-6)
                throw ParseError("scenario: free_rotation is not a proper rotation");
            item.pose = DiverPose::free(rot);
            item.pose_label = "free";
        } else {
            throw ParseError("scenario: each case needs 'pose' or 'free_rotation'");
        }
        item.position = get_vec3(c, "position");
        item.frames = static_cast<int>(get_integer(c, "frames"));
        if (item.frames < 1) throw ParseError("scenario: frames must be >= 1");
        item.distance_m =
            c.contains("distance_m") ? get_number(c, "distance_m") : item.position.z();
        if (!(item.distance_m > 0.0)) throw ParseError("scenario: distance_m must be > 0");
        scenario.cases.push_back(std::move(item));
    }
    return scenario;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
    return parse_scenario_json(read_file(path));
}

std::string sidecar_to_json(const SidecarRecord& record) {
    nlohmann::ordered_json points;
    for (KeypointId id : kAllKeypointIds) {
        const Eigen::Vector3d& p = record.pose[id];
        points[short_name(id)] = {p.x(), p.y(), p.z()};
    }
    nlohmann::ordered_json j;
    j["frame"] = record.frame;
    j["pose"] = record.pose_label;
    j["distance_m"] = record.distance_m;
    j["points"] = points;
    j["body_frame"] = json::parse(body_frame_to_json(record.body_frame));
    return j.dump();
}

SidecarRecord parse_sidecar_json(const std::string& line, long line_no) {
    const json j = parse_json(line, line_no);
    const long frame = get_integer(j, "frame", line_no);
    if (!j.contains("pose") || !j.at("pose").is_string())
        throw ParseError("sidecar: missing string field 'pose'", line_no);
    const std::string pose_label = j.at("pose").get<std::string>();
    const double distance_m = get_number(j, "distance_m", line_no);

    if (!j.contains("points") || !j.at("points").is_object())
        throw ParseError("sidecar: missing object field 'points'", line_no);
    std::array<Eigen::Vector3d, kKeypointCount> points;
    for (KeypointId id : kAllKeypointIds)
        points[static_cast<int>(id)] = get_vec3(j.at("points"), short_name(id), line_no);

    if (!j.contains("body_frame") || !j.at("body_frame").is_object())
        throw ParseError("sidecar: missing object field 'body_frame'", line_no);
    const json& bf = j.at("body_frame");
    Eigen::Matrix3d axes;
    axes.col(0) = get_vec3(bf, "x", line_no);
    axes.col(1) = get_vec3(bf, "y", line_no);
    axes.col(2) = get_vec3(bf, "z", line_no);
    if ((axes.transpose() * axes - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-6)
        throw ParseError("sidecar: body_frame axes are not orthonormal", line_no);
    axes = nearest_rotation(axes);
    return SidecarRecord{frame, pose_label, distance_m, TorsoPose3D::from_points(points),
                         BodyFrame::from_axes(get_vec3(bf, "origin", line_no), axes.col(0),
                                              axes.col(1), axes.col(2))};
}

RatingMatrix load_rating_matrix_file(const std::filesystem::path& path) {
    const json j = parse_json(read_file(path), 0);
    if (!j.contains("counts") || !j.at("counts").is_array())
        throw ParseError("rating matrix: missing array field 'counts'");
    std::vector<std::vector<int>> counts;
    for (const json& row : j.at("counts")) {
        if (!row.is_array()) throw ParseError("rating matrix: rows must be arrays");
        std::vector<int> r;
        for (const json& c : row) {
            if (!c.is_number_integer())
                throw ParseError("rating matrix: counts must be integers");
            r.push_back(c.get<int>());
        }
        counts.push_back(std::move(r));
    }
    try {
        return RatingMatrix::from_counts(std::move(counts));
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
}

PairedObservationReader::PairedObservationReader(std::istream& left, std::istream& right)
    : left_(left), right_(right) {}

std::optional<PoseObservation2D> PairedObservationReader::advance(std::istream& stream,
                                                                  CameraSide side,
                                                                  StreamStats& stats,
                                                                  long& last_frame) {
    std::string line;
    while (std::getline(stream, line)) {
        ++stats.lines;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        PoseObservation2D obs = parse_observation_json(line, stats.lines, &stats);
        if (obs.side() != side)
            throw ParseError(std::string("expected side \"") + side_name(side) + "\"",
                             stats.lines);
        if (obs.frame_id() <= last_frame)
            throw ParseError("stream is not sorted by frame id (frame " +
                                 std::to_string(obs.frame_id()) + " after " +
                                 std::to_string(last_frame) + ")",
                             stats.lines);
        last_frame = obs.frame_id();
        return obs;
    }
    return std::nullopt;
}

std::optional<PairedObservationReader::Item> PairedObservationReader::next() {
    if (!primed_) {
        left_pending_ = advance(left_, CameraSide::Left, left_stats_, left_last_frame_);
        right_pending_ = advance(right_, CameraSide::Right, right_stats_, right_last_frame_);
        primed_ = true;
    }
    if (!left_pending_ && !right_pending_) return std::nullopt;

    Item item;
    const long left_frame = left_pending_ ? left_pending_->frame_id() : -1;
    const long right_frame = right_pending_ ? right_pending_->frame_id() : -1;

    if (left_pending_ && (!right_pending_ || left_frame < right_frame)) {
        item.frame_id = left_frame;
        item.left = std::move(left_pending_);
        left_pending_ = advance(left_, CameraSide::Left, left_stats_, left_last_frame_);
    } else if (right_pending_ && (!left_pending_ || right_frame < left_frame)) {
        item.frame_id = right_frame;
        item.right = std::move(right_pending_);
        right_pending_ = advance(right_, CameraSide::Right, right_stats_, right_last_frame_);
    } else {
        item.frame_id = left_frame;
        item.left = std::move(left_pending_);
        item.right = std::move(right_pending_);
        left_pending_ = advance(left_, CameraSide::Left, left_stats_, left_last_frame_);
        right_pending_ = advance(right_, CameraSide::Right, right_stats_, right_last_frame_);
    }
    return item;
}

} // namespace f2f
