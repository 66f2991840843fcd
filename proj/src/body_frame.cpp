#include "f2f/body_frame.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace f2f {

namespace {

// Cross products below a squared-meter scale of 1e-12 only occur for truly
// collinear joints; any physical torso is orders of magnitude above.
constexpr double kCrossNormTol = 1e-12;
constexpr double kYAxisTol = 1e-9;
constexpr double kFrameTol = 1e-9;

} // namespace

TorsoPose3D TorsoPose3D::from_points(const std::array<Eigen::Vector3d, kKeypointCount>& points) {
    TorsoPose3D pose;
    for (KeypointId id : kAllKeypointIds) {
        const Eigen::Vector3d& p = points[static_cast<int>(id)];
        if (!p.allFinite())
            throw std::invalid_argument(std::string("keypoint ") + short_name(id) +
                                        ": coordinates must be finite");
        if (!(p.z() > 0.0))
            throw std::invalid_argument(std::string("keypoint ") + short_name(id) +
                                        ": must lie in front of the camera (z > 0)");
    }
    pose.points_ = points;
    return pose;
}

BodyFrame BodyFrame::from_axes(const Eigen::Vector3d& origin, const Eigen::Vector3d& x,
                               const Eigen::Vector3d& y, const Eigen::Vector3d& z) {
    auto check = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("body frame: ") + what);
    };
    check(std::abs(x.norm() - 1.0) <= kFrameTol, "x axis is not unit length");
    check(std::abs(y.norm() - 1.0) <= kFrameTol, "y axis is not unit length");
    check(std::abs(z.norm() - 1.0) <= kFrameTol, "z axis is not unit length");
    check(std::abs(x.dot(y)) <= kFrameTol, "x and y are not orthogonal");
    check(std::abs(y.dot(z)) <= kFrameTol, "y and z are not orthogonal");
    check(std::abs(x.dot(z)) <= kFrameTol, "x and z are not orthogonal");
    Eigen::Matrix3d m;
    m.col(0) = x;
    m.col(1) = y;
    m.col(2) = z;
    check(std::abs(m.determinant() - 1.0) <= kFrameTol, "axes are not right-handed");
    return BodyFrame{origin, x, y, z};
}

Eigen::Matrix3d BodyFrame::axes() const {
    Eigen::Matrix3d m;
    m.col(0) = x_axis;
    m.col(1) = y_axis;
    m.col(2) = z_axis;
    return m;
}

Eigen::Vector3d center_of_keypoints(const TorsoPose3D& pose) {
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    for (const Eigen::Vector3d& p : pose.points()) sum += p;
    return sum / static_cast<double>(kKeypointCount);
}

Eigen::Vector3d alignment_vector(const TorsoPose3D& pose) {
    const Eigen::Vector3d& neck = pose[KeypointId::NeckBase];
    const Eigen::Vector3d& rs = pose[KeypointId::RightShoulder];
    const Eigen::Vector3d& rh = pose[KeypointId::RightHip];
    const Eigen::Vector3d& lh = pose[KeypointId::LeftHip];
    const Eigen::Vector3d& ls = pose[KeypointId::LeftShoulder];

    // Difference vectors spanning the torso plane.
    const Eigen::Vector3d left_side = ls - lh;
    const Eigen::Vector3d neck_left = neck - lh;
    const Eigen::Vector3d neck_right = neck - rh;
    const Eigen::Vector3d right_side = rs - rh;

    const Eigen::Vector3d left_cross = left_side.cross(neck_left);
    const Eigen::Vector3d right_cross = neck_right.cross(right_side);

    if (left_cross.norm() < kCrossNormTol)
        throw DegenerateTorso("left shoulder, left hip, and neck are collinear");
    if (right_cross.norm() < kCrossNormTol)
        throw DegenerateTorso("right shoulder, right hip, and neck are collinear");

    const Eigen::Vector3d mean = 0.5 * (right_cross + left_cross);
    const double norm = mean.norm();
    if (norm < kCrossNormTol)
        throw DegenerateTorso("torso-plane normals cancel; no consistent facing direction");
    return mean / norm;
}

BodyFrame build_body_frame(const TorsoPose3D& pose) {
    const Eigen::Vector3d z = alignment_vector(pose);
    const Eigen::Vector3d origin = center_of_keypoints(pose);
    const Eigen::Vector3d hip_midpoint =
        0.5 * (pose[KeypointId::LeftHip] + pose[KeypointId::RightHip]);

    const Eigen::Vector3d toward_hips = hip_midpoint - origin;
    if (toward_hips.norm() < kYAxisTol)
        throw DegenerateYAxis("hip midpoint coincides with the keypoint centroid");

    // The raw hip direction is not orthogonal to z whenever the centroid
    // sits off the torso plane (the nose bridge pulls it forward), so it is
    // projected back onto the plane perpendicular to z before normalizing.
    const Eigen::Vector3d raw_y = toward_hips.normalized();
    const Eigen::Vector3d y_in_plane = raw_y - raw_y.dot(z) * z;
    if (y_in_plane.norm() < kYAxisTol)
        throw DegenerateYAxis("hip direction is parallel to the torso normal");
    const Eigen::Vector3d y = y_in_plane.normalized();

    const Eigen::Vector3d x = y.cross(z);
    return BodyFrame::from_axes(origin, x, y, z);
}

double frame_angular_error(const BodyFrame& a, const BodyFrame& b) {
    const Eigen::Matrix3d rel = a.axes() * b.axes().transpose();
    // atan2 of the skew part against the trace keeps full precision near
    // zero, where acos((tr-1)/2) bottoms out around 1e-8.
    const Eigen::Vector3d skew(rel(2, 1) - rel(1, 2), rel(0, 2) - rel(2, 0),
                               rel(1, 0) - rel(0, 1));
    return std::atan2(0.5 * skew.norm(), 0.5 * (rel.trace() - 1.0));
}

TorsoPose3D transform_pose(const TorsoPose3D& pose, const Eigen::Matrix3d& rotation,
                           const Eigen::Vector3d& translation) {
    std::array<Eigen::Vector3d, kKeypointCount> out;
    for (KeypointId id : kAllKeypointIds)
        out[static_cast<int>(id)] = rotation * pose[id] + translation;
    return TorsoPose3D::from_points(out);
}

} // namespace f2f
