#pragma once

#include <array>

#include <Eigen/Core>

#include "f2f/keypoints.hpp"

namespace f2f {

// The six triangulated keypoints in left-camera coordinates (meters).
// All entries present, finite, and in front of the camera (z > 0).
class TorsoPose3D {
public:
    static TorsoPose3D from_points(const std::array<Eigen::Vector3d, kKeypointCount>& points);

    const Eigen::Vector3d& operator[](KeypointId id) const {
        return points_[static_cast<int>(id)];
    }
    const std::array<Eigen::Vector3d, kKeypointCount>& points() const { return points_; }

private:
    TorsoPose3D() = default;
    std::array<Eigen::Vector3d, kKeypointCount> points_;
};

// Right-handed orthonormal frame affixed to the diver: origin at the
// keypoint centroid, z pointing out of the chest, y toward the hips,
// x = y cross z. Axes are expressed in camera coordinates.
struct BodyFrame {
    Eigen::Vector3d origin;
    Eigen::Vector3d x_axis;
    Eigen::Vector3d y_axis;
    Eigen::Vector3d z_axis;

    // Validates unit norms, pairwise orthogonality, and det = +1, all
    // within 1e-9. Throws std::invalid_argument otherwise.
    static BodyFrame from_axes(const Eigen::Vector3d& origin, const Eigen::Vector3d& x,
                               const Eigen::Vector3d& y, const Eigen::Vector3d& z);

    // Axes as matrix columns [x y z].
    Eigen::Matrix3d axes() const;
};

// Component-wise mean over all six keypoints. The nose bridge and neck pull
// the result toward the upper torso and (for a forward nose offset) slightly
// off the torso plane.
Eigen::Vector3d center_of_keypoints(const TorsoPose3D& pose);

// Unit normal of the torso plane, averaged from the two shoulder/hip/neck
// cross products. For a diver facing the camera this points toward the
// camera (out of the chest). Throws DegenerateTorso when either cross
// product or their mean is numerically zero (collinear joints).
Eigen::Vector3d alignment_vector(const TorsoPose3D& pose);

// Affixes the full body frame: z from alignment_vector, y toward the hip
// midpoint re-orthogonalized against z, x = y cross z, origin at the
// keypoint centroid. Throws DegenerateTorso or DegenerateYAxis.
BodyFrame build_body_frame(const TorsoPose3D& pose);

// Angle (radians) of the relative rotation between two frames' axes.
double frame_angular_error(const BodyFrame& a, const BodyFrame& b);

// Applies p -> R p + t to every keypoint.
TorsoPose3D transform_pose(const TorsoPose3D& pose, const Eigen::Matrix3d& rotation,
                           const Eigen::Vector3d& translation);

} // namespace f2f
