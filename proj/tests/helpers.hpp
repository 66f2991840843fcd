#pragma once

// Shared fixtures for the test suites.

#include <array>

#include <Eigen/Dense>

#include "f2f/body_frame.hpp"
#include "f2f/camera.hpp"
#include "f2f/keypoints.hpp"

namespace f2f::testing {

inline CameraIntrinsics default_intrinsics() {
    return CameraIntrinsics(500.0, 500.0, 320.0, 240.0, 640, 480);
}

inline StereoRig default_rig() { return StereoRig(default_intrinsics(), 0.1); }

// Hand-built facing-camera diver used as an independent oracle: shoulders
// 0.45 m apart, hips 0.35 m, torso height 0.55 m, nose bridge 0.25 m above
// the neck and 0.10 m in front of the torso plane, torso center at (0,0,2).
inline TorsoPose3D facing_diver_pose() {
    std::array<Eigen::Vector3d, kKeypointCount> pts;
    pts[static_cast<int>(KeypointId::LeftShoulder)] = {0.225, -0.275, 2.0};
    pts[static_cast<int>(KeypointId::RightShoulder)] = {-0.225, -0.275, 2.0};
    pts[static_cast<int>(KeypointId::LeftHip)] = {0.175, 0.275, 2.0};
    pts[static_cast<int>(KeypointId::RightHip)] = {-0.175, 0.275, 2.0};
    pts[static_cast<int>(KeypointId::NeckBase)] = {0.0, -0.275, 2.0};
    pts[static_cast<int>(KeypointId::NoseBridge)] = {0.0, -0.525, 1.9};
    return TorsoPose3D::from_points(pts);
}

inline PoseObservation2D full_observation(long frame, CameraSide side, double p = 1.0) {
    PoseObservation2D obs(frame, side);
    double offset = 0.0;
    for (KeypointId id : kAllKeypointIds) {
        obs.insert({id, 100.0 + offset, 200.0 + offset, p});
        offset += 10.0;
    }
    return obs;
}

} // namespace f2f::testing
