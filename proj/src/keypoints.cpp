#include "f2f/keypoints.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace f2f {

const char* short_name(KeypointId id) {
    switch (id) {
    case KeypointId::NoseBridge: return "b";
    case KeypointId::NeckBase: return "n";
    case KeypointId::RightShoulder: return "rs";
    case KeypointId::RightHip: return "rh";
    case KeypointId::LeftHip: return "lh";
    case KeypointId::LeftShoulder: return "ls";
    }
    return "?";
}

const char* long_name(KeypointId id) {
    switch (id) {
    case KeypointId::NoseBridge: return "nose_bridge";
    case KeypointId::NeckBase: return "neck_base";
    case KeypointId::RightShoulder: return "right_shoulder";
    case KeypointId::RightHip: return "right_hip";
    case KeypointId::LeftHip: return "left_hip";
    case KeypointId::LeftShoulder: return "left_shoulder";
    }
    return "?";
}

std::optional<KeypointId> keypoint_id_from(std::string_view name) {
    for (KeypointId id : kAllKeypointIds) {
        if (name == short_name(id)) return id;
    }
    return std::nullopt;
}

std::vector<KeypointId> sorted_by_name(std::vector<KeypointId> ids) {
    std::sort(ids.begin(), ids.end(), [](KeypointId a, KeypointId b) {
        return std::strcmp(short_name(a), short_name(b)) < 0;
    });
    return ids;
}

std::string join_names(const std::vector<KeypointId>& ids) {
    std::string out;
    for (KeypointId id : ids) {
        if (!out.empty()) out += ", ";
        out += short_name(id);
    }
    return out;
}

const char* side_name(CameraSide side) {
    return side == CameraSide::Left ? "left" : "right";
}

std::optional<CameraSide> side_from(std::string_view name) {
    if (name == "left") return CameraSide::Left;
    if (name == "right") return CameraSide::Right;
    return std::nullopt;
}

void PoseObservation2D::insert(const Keypoint2D& kp) {
    if (!std::isfinite(kp.u) || !std::isfinite(kp.v))
        throw std::invalid_argument(std::string("keypoint ") + short_name(kp.id) +
                                    ": coordinates must be finite");
    if (!(kp.p >= 0.0 && kp.p <= 1.0))
        throw std::invalid_argument(std::string("keypoint ") + short_name(kp.id) +
                                    ": confidence must lie in [0,1]");
    auto& slot = slots_[static_cast<int>(kp.id)];
    if (slot.has_value())
        throw std::invalid_argument(std::string("duplicate keypoint ") + short_name(kp.id));
    slot = kp;
}

bool PoseObservation2D::has(KeypointId id) const noexcept {
    return slots_[static_cast<int>(id)].has_value();
}

const Keypoint2D& PoseObservation2D::at(KeypointId id) const {
    const auto& slot = slots_[static_cast<int>(id)];
    if (!slot.has_value())
        throw std::out_of_range(std::string("keypoint ") + short_name(id) + " absent");
    return *slot;
}

int PoseObservation2D::size() const noexcept {
    int n = 0;
    for (const auto& slot : slots_)
        if (slot.has_value()) ++n;
    return n;
}

std::vector<KeypointId> PoseObservation2D::missing_ids() const {
    std::vector<KeypointId> missing;
    for (KeypointId id : kAllKeypointIds)
        if (!has(id)) missing.push_back(id);
    return sorted_by_name(std::move(missing));
}

PoseObservation2D filter_by_confidence(const PoseObservation2D& obs, double p_cutoff) {
    if (!(p_cutoff >= 0.0 && p_cutoff <= 1.0))
        throw std::invalid_argument("p_cutoff must lie in [0,1]");
    PoseObservation2D out(obs.frame_id(), obs.side());
    for (KeypointId id : kAllKeypointIds) {
        if (obs.has(id) && obs.at(id).p > p_cutoff) out.insert(obs.at(id));
    }
    return out;
}

const PoseObservation2D& require_complete(const PoseObservation2D& obs) {
    if (!obs.complete()) throw InsufficientKeypoints(obs.missing_ids());
    return obs;
}

} // namespace f2f
