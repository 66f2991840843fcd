#include "f2f/camera.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace f2f {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

} // namespace

CameraIntrinsics::CameraIntrinsics(double fx, double fy, double cx, double cy, int width,
                                   int height)
    : fx(fx), fy(fy), cx(cx), cy(cy), width(width), height(height) {
    require(std::isfinite(fx) && fx > 0.0, "intrinsics: fx must be > 0");
    require(std::isfinite(fy) && fy > 0.0, "intrinsics: fy must be > 0");
    require(width > 0, "intrinsics: width must be > 0");
    require(height > 0, "intrinsics: height must be > 0");
    require(std::isfinite(cx) && cx > 0.0 && cx < width,
            "intrinsics: cx must lie strictly inside (0, width)");
    require(std::isfinite(cy) && cy > 0.0 && cy < height,
            "intrinsics: cy must lie strictly inside (0, height)");
}

StereoRig::StereoRig(CameraIntrinsics intrinsics, double baseline_m)
    : intrinsics(intrinsics), baseline_m(baseline_m) {
    require(std::isfinite(baseline_m) && baseline_m > 0.0, "rig: baseline_m must be > 0");
}

Eigen::Vector2d project(const CameraIntrinsics& intrinsics, const Eigen::Vector3d& point) {
    if (!(point.z() > 0.0)) throw NonPositiveDepth(point.z());
    return {intrinsics.fx * point.x() / point.z() + intrinsics.cx,
            intrinsics.fy * point.y() / point.z() + intrinsics.cy};
}

Eigen::Vector3d triangulate_pair(const StereoRig& rig, const Eigen::Vector2d& left,
                                 const Eigen::Vector2d& right, double vert_tol_px) {
    const double disparity = left.x() - right.x();
    if (!(disparity > 0.0)) throw NonPositiveDisparity(disparity);

    const double vert_residual = std::abs(left.y() - right.y());
    if (vert_residual > vert_tol_px) throw EpipolarViolation(vert_residual, vert_tol_px);

    const CameraIntrinsics& k = rig.intrinsics;
    const double z = k.fx * rig.baseline_m / disparity;
    const double x = (left.x() - k.cx) * z / k.fx;
    // Symmetric fusion of the two vertical measurements.
    const double v = 0.5 * (left.y() + right.y());
    const double y = (v - k.cy) * z / k.fy;
    return {x, y, z};
}

TorsoPose3D triangulate_pose(const StereoRig& rig, const PoseObservation2D& left,
                             const PoseObservation2D& right, double vert_tol_px) {
    std::vector<KeypointId> missing;
    for (KeypointId id : kAllKeypointIds) {
        if (!left.has(id) || !right.has(id)) missing.push_back(id);
    }
    if (!missing.empty()) throw InsufficientKeypoints(std::move(missing));

    std::array<Eigen::Vector3d, kKeypointCount> points;
    for (KeypointId id : kAllKeypointIds) {
        const Keypoint2D& l = left.at(id);
        const Keypoint2D& r = right.at(id);
        try {
            points[static_cast<int>(id)] =
                triangulate_pair(rig, {l.u, l.v}, {r.u, r.v}, vert_tol_px);
        } catch (const NonPositiveDisparity& e) {
            throw NonPositiveDisparity(l.u - r.u, std::string("keypoint ") + short_name(id));
        } catch (const EpipolarViolation& e) {
            throw EpipolarViolation(std::abs(l.v - r.v), vert_tol_px,
                                    std::string("keypoint ") + short_name(id));
        }
    }
    return TorsoPose3D::from_points(points);
}

} // namespace f2f
