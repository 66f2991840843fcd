#pragma once

#include <map>
#include <span>

#include <Eigen/Core>

#include "f2f/body_frame.hpp"
#include "f2f/camera.hpp"

namespace f2f {

inline constexpr double kDefaultDistanceM = 2.0;

struct RigidTransform {
    Eigen::Matrix3d rotation;
    Eigen::Vector3d translation;

    // Validates that rotation is proper orthonormal within 1e-9.
    static RigidTransform from_parts(const Eigen::Matrix3d& rotation,
                                     const Eigen::Vector3d& translation);

    Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return rotation * p + translation; }
};

// Six image-plane target points encoding the ideal face-to-face
// configuration at the commanded standoff.
struct Setpoint {
    std::array<Eigen::Vector2d, kKeypointCount> points;
    double distance_m = kDefaultDistanceM;

    const Eigen::Vector2d& operator[](KeypointId id) const {
        return points[static_cast<int>(id)];
    }
};

struct SetpointError {
    double sum_euclidean_px = 0.0;
    std::array<double, kKeypointCount> per_keypoint_px{};
};

// Proper rotation R minimizing sum_i |R source_i - target_i|^2 over
// index-matched vector sets (n >= 3), with the determinant-sign correction
// that excludes reflections. Throws RankDeficient when the correlation
// matrix has two (near-)zero singular values.
Eigen::Matrix3d kabsch_rotation(std::span<const Eigen::Vector3d> source,
                                std::span<const Eigen::Vector3d> target);

// The transform that anti-aligns the body frame with the camera frame:
// rotation = R_y(pi) * Kabsch(body axes -> camera basis), translation
// placing the body origin on the optical axis at depth distance_m. The
// transformed axes satisfy z*.z = -1, x*.x = -1, y*.y = +1.
RigidTransform anti_align_transform(const BodyFrame& frame, double distance_m);

// Projects the anti-aligned keypoints into the image: the scale-preserved
// setpoint. Throws NonPositiveDepth if the standoff is smaller than the
// torso's forward extent.
Setpoint compute_setpoint(const TorsoPose3D& pose, const BodyFrame& frame,
                          const CameraIntrinsics& intrinsics,
                          double distance_m = kDefaultDistanceM);

// Per-keypoint Euclidean distances and their sum. With center_align, both
// point sets are first shifted so their centroids coincide, which removes
// any pure translation between them. Throws MissingKeypoint when observed
// lacks one of the six ids.
SetpointError setpoint_error(const std::map<KeypointId, Eigen::Vector2d>& observed,
                             const Setpoint& baseline, bool center_align);

// Pixel distance between two setpoint keypoints (shoulder spread by default).
double keypoint_spread_px(const Setpoint& sp, KeypointId a = KeypointId::LeftShoulder,
                          KeypointId b = KeypointId::RightShoulder);

} // namespace f2f
