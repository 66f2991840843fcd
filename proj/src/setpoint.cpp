#include "f2f/setpoint.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace f2f {

namespace {

constexpr double kRotationTol = 1e-9;

} // namespace

RigidTransform RigidTransform::from_parts(const Eigen::Matrix3d& rotation,
                                          const Eigen::Vector3d& translation) {
    const Eigen::Matrix3d gram = rotation.transpose() * rotation;
    if ((gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > kRotationTol)
        throw std::invalid_argument("rigid transform: rotation is not orthonormal");
    if (std::abs(rotation.determinant() - 1.0) > kRotationTol)
        throw std::invalid_argument("rigid transform: rotation is not proper (det != +1)");
    return RigidTransform{rotation, translation};
}

Eigen::Matrix3d kabsch_rotation(std::span<const Eigen::Vector3d> source,
                                std::span<const Eigen::Vector3d> target) {
    if (source.size() != target.size())
        throw std::invalid_argument("kabsch: source and target sizes differ");
    if (source.size() < 3)
        throw std::invalid_argument("kabsch: need at least 3 correspondences");

    // Correlation matrix H = sum_i source_i target_i^T; the optimal proper
    // rotation maximizes tr(R H).
    Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
    for (std::size_t i = 0; i < source.size(); ++i) h += source[i] * target[i].transpose();

    Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::Vector3d sigma = svd.singularValues();
    if (sigma(1) <= 1e-12 * std::max(1.0, sigma(0)))
        throw RankDeficient("kabsch: correspondences span less than two directions");

    const Eigen::Matrix3d u = svd.matrixU();
    const Eigen::Matrix3d v = svd.matrixV();
    // Flip the weakest direction instead of allowing a reflection.
    const double d = (v * u.transpose()).determinant() < 0.0 ? -1.0 : 1.0;
    Eigen::Matrix3d correction = Eigen::Matrix3d::Identity();
    correction(2, 2) = d;
    return v * correction * u.transpose();
}

RigidTransform anti_align_transform(const BodyFrame& frame, double distance_m) {
    if (!(distance_m > 0.0)) throw std::invalid_argument("distance_m must be > 0");

    const std::array<Eigen::Vector3d, 3> body_axes = {frame.x_axis, frame.y_axis,
                                                      frame.z_axis};
    const std::array<Eigen::Vector3d, 3> camera_axes = {Eigen::Vector3d::UnitX(),
                                                        Eigen::Vector3d::UnitY(),
                                                        Eigen::Vector3d::UnitZ()};
    // Kabsch alone aligns the frames, which leaves the diver facing away
    // from the camera; the half-turn about camera y anti-aligns them.
    Eigen::Matrix3d r_y_pi;
    r_y_pi << -1, 0, 0, 0, 1, 0, 0, 0, -1;
    const Eigen::Matrix3d rotation = r_y_pi * kabsch_rotation(body_axes, camera_axes);

    const Eigen::Vector3d target_origin(0.0, 0.0, distance_m);
    const Eigen::Vector3d translation = target_origin - rotation * frame.origin;
    return RigidTransform::from_parts(rotation, translation);
}

Setpoint compute_setpoint(const TorsoPose3D& pose, const BodyFrame& frame,
                          const CameraIntrinsics& intrinsics, double distance_m) {
    const RigidTransform transform = anti_align_transform(frame, distance_m);
    Setpoint sp;
    sp.distance_m = distance_m;
    for (KeypointId id : kAllKeypointIds)
        sp.points[static_cast<int>(id)] = project(intrinsics, transform.apply(pose[id]));
    return sp;
}

SetpointError setpoint_error(const std::map<KeypointId, Eigen::Vector2d>& observed,
                             const Setpoint& baseline, bool center_align) {
    std::vector<KeypointId> missing;
    for (KeypointId id : kAllKeypointIds)
        if (observed.find(id) == observed.end()) missing.push_back(id);
    if (!missing.empty()) throw MissingKeypoint(std::move(missing));

    Eigen::Vector2d obs_centroid = Eigen::Vector2d::Zero();
    Eigen::Vector2d base_centroid = Eigen::Vector2d::Zero();
    if (center_align) {
        for (KeypointId id : kAllKeypointIds) {
            obs_centroid += observed.at(id);
            base_centroid += baseline[id];
        }
        obs_centroid /= kKeypointCount;
        base_centroid /= kKeypointCount;
    }

    SetpointError err;
    for (KeypointId id : kAllKeypointIds) {
        const Eigen::Vector2d diff =
            (observed.at(id) - obs_centroid) - (baseline[id] - base_centroid);
        const double dist = diff.norm();
        err.per_keypoint_px[static_cast<int>(id)] = dist;
        err.sum_euclidean_px += dist;
    }
    return err;
}

double keypoint_spread_px(const Setpoint& sp, KeypointId a, KeypointId b) {
    return (sp[a] - sp[b]).norm();
}

} // namespace f2f
