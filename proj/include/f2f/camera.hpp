#pragma once

#include <Eigen/Core>

#include "f2f/body_frame.hpp"
#include "f2f/keypoints.hpp"

namespace f2f {

inline constexpr double kDefaultVertTolPx = 5.0;

// Pinhole model. Camera frame convention: z along the optical axis,
// x right-facing, y down-facing. Image coordinates u in [0, width],
// v in [0, height].
struct CameraIntrinsics {
    double fx;
    double fy;
    double cx;
    double cy;
    int width;
    int height;

    CameraIntrinsics(double fx, double fy, double cx, double cy, int width, int height);
};

// Rectified pair sharing intrinsics; the right camera is displaced by
// +baseline_m along camera x, so epipolar lines are horizontal and
// corresponding points satisfy v_left ~= v_right.
struct StereoRig {
    CameraIntrinsics intrinsics;
    double baseline_m;

    StereoRig(CameraIntrinsics intrinsics, double baseline_m);
};

// u = fx x/z + cx, v = fy y/z + cy. Throws NonPositiveDepth when z <= 0.
Eigen::Vector2d project(const CameraIntrinsics& intrinsics, const Eigen::Vector3d& point);

// Disparity triangulation of one correspondence, result in the left camera
// frame: z = fx b / (u_l - u_r), x = (u_l - cx) z / fx,
// y = (mean(v_l, v_r) - cy) z / fy. Throws NonPositiveDisparity when the
// disparity is <= 0 and EpipolarViolation when |v_l - v_r| > vert_tol_px.
Eigen::Vector3d triangulate_pair(const StereoRig& rig, const Eigen::Vector2d& left,
                                 const Eigen::Vector2d& right,
                                 double vert_tol_px = kDefaultVertTolPx);

// Triangulates all six keypoints of a filtered observation pair. Throws
// InsufficientKeypoints (sorted missing ids, both sides pooled) when a
// required id is absent, and rethrows per-point errors with the offending
// id named in the message.
TorsoPose3D triangulate_pose(const StereoRig& rig, const PoseObservation2D& left,
                             const PoseObservation2D& right,
                             double vert_tol_px = kDefaultVertTolPx);

} // namespace f2f
