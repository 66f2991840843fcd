#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "f2f/errors.hpp"

namespace f2f {

// The six torso keypoints used for reorientation. Detectors may emit many
// more joints; everything downstream works on exactly these.
enum class KeypointId : int {
    NoseBridge = 0,
    NeckBase,
    RightShoulder,
    RightHip,
    LeftHip,
    LeftShoulder,
};

inline constexpr int kKeypointCount = 6;

inline constexpr std::array<KeypointId, kKeypointCount> kAllKeypointIds = {
    KeypointId::NoseBridge,   KeypointId::NeckBase, KeypointId::RightShoulder,
    KeypointId::RightHip,     KeypointId::LeftHip,  KeypointId::LeftShoulder,
};

// Wire names: "b", "n", "rs", "rh", "lh", "ls".
const char* short_name(KeypointId id);
const char* long_name(KeypointId id);
std::optional<KeypointId> keypoint_id_from(std::string_view short_name);

// Sorts ids lexicographically by wire name (b, lh, ls, n, rh, rs), the
// order used in error listings.
std::vector<KeypointId> sorted_by_name(std::vector<KeypointId> ids);
std::string join_names(const std::vector<KeypointId>& ids);

inline constexpr double kDefaultPCutoff = 0.05;

struct Keypoint2D {
    KeypointId id;
    double u = 0.0; // pixels; may fall slightly outside image bounds
    double v = 0.0;
    double p = 1.0; // detector confidence in [0,1]
};

enum class CameraSide { Left, Right };

const char* side_name(CameraSide side);
std::optional<CameraSide> side_from(std::string_view name);

class InsufficientKeypoints : public Error {
public:
    explicit InsufficientKeypoints(std::vector<KeypointId> missing)
        : Error("InsufficientKeypoints",
                "missing required keypoints: " + join_names(sorted_by_name(missing))),
          missing_(sorted_by_name(std::move(missing))) {}

    const std::vector<KeypointId>& missing() const noexcept { return missing_; }

private:
    std::vector<KeypointId> missing_;
};

class MissingKeypoint : public Error {
public:
    explicit MissingKeypoint(std::vector<KeypointId> missing)
        : Error("MissingKeypoint",
                "observed points lack keypoints: " + join_names(sorted_by_name(missing))),
          missing_(sorted_by_name(std::move(missing))) {}

    const std::vector<KeypointId>& missing() const noexcept { return missing_; }

private:
    std::vector<KeypointId> missing_;
};

class OutOfView : public Error {
public:
    explicit OutOfView(std::vector<KeypointId> outside)
        : Error("OutOfView",
                "keypoints project outside image bounds: " + join_names(sorted_by_name(outside))),
          outside_(sorted_by_name(std::move(outside))) {}

    const std::vector<KeypointId>& outside() const noexcept { return outside_; }

private:
    std::vector<KeypointId> outside_;
};

// Per-image labeled detections, at most one entry per keypoint id.
// Values are immutable once inserted; the container is cheap to copy.
class PoseObservation2D {
public:
    PoseObservation2D(long frame_id, CameraSide side)
        : frame_id_(frame_id), side_(side) {}

    long frame_id() const noexcept { return frame_id_; }
    CameraSide side() const noexcept { return side_; }

    // Throws std::invalid_argument on duplicate id, non-finite coordinates,
    // or confidence outside [0,1].
    void insert(const Keypoint2D& kp);

    bool has(KeypointId id) const noexcept;
    const Keypoint2D& at(KeypointId id) const; // std::out_of_range if absent
    int size() const noexcept;

    bool complete() const noexcept { return size() == kKeypointCount; }
    std::vector<KeypointId> missing_ids() const; // sorted by wire name

private:
    long frame_id_ = 0;
    CameraSide side_ = CameraSide::Left;
    std::array<std::optional<Keypoint2D>, kKeypointCount> slots_;
};

// A paired left/right detection for one frame.
struct StereoObservation {
    PoseObservation2D left;
    PoseObservation2D right;
};

// Keeps exactly the keypoints with p > p_cutoff (strict). frame id and side
// are preserved. p_cutoff must lie in [0,1].
PoseObservation2D filter_by_confidence(const PoseObservation2D& obs, double p_cutoff);

// Returns obs unchanged when all six ids are present, otherwise throws
// InsufficientKeypoints with the sorted missing ids.
const PoseObservation2D& require_complete(const PoseObservation2D& obs);

} // namespace f2f
