#include "f2f/synth.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace f2f {

namespace {

constexpr double kPi = std::numbers::pi;

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

Eigen::Matrix3d rot_x(double angle) {
    return Eigen::Matrix3d(Eigen::AngleAxisd(angle, Eigen::Vector3d::UnitX()));
}

Eigen::Matrix3d rot_y(double angle) {
    return Eigen::Matrix3d(Eigen::AngleAxisd(angle, Eigen::Vector3d::UnitY()));
}

Eigen::Matrix3d rot_z(double angle) {
    return Eigen::Matrix3d(Eigen::AngleAxisd(angle, Eigen::Vector3d::UnitZ()));
}

} // namespace

BodyShape::BodyShape(double shoulder_width_m, double hip_width_m, double torso_height_m,
                     double nose_superior_m, double nose_anterior_m)
    : shoulder_width_m(shoulder_width_m), hip_width_m(hip_width_m),
      torso_height_m(torso_height_m), nose_superior_m(nose_superior_m),
      nose_anterior_m(nose_anterior_m) {
    require(shoulder_width_m > 0.0, "shape: shoulder_width_m must be > 0");
    require(hip_width_m > 0.0, "shape: hip_width_m must be > 0");
    require(torso_height_m > 0.0, "shape: torso_height_m must be > 0");
    require(nose_superior_m > 0.0, "shape: nose_superior_m must be > 0");
    require(nose_anterior_m >= 0.0, "shape: nose_anterior_m must be >= 0");
}

Eigen::Matrix3d canonical_rotation(CanonicalPose pose) {
    switch (pose) {
    case CanonicalPose::ProneSurface: return rot_x(-kPi / 2.0);
    case CanonicalPose::ProneBottom: return rot_x(kPi / 2.0);
    case CanonicalPose::UprightFacing: return Eigen::Matrix3d::Identity();
    case CanonicalPose::UprightAway: return rot_y(kPi);
    case CanonicalPose::InvertedFacing: return rot_z(kPi);
    case CanonicalPose::InvertedAway: return rot_x(kPi);
    }
    throw std::invalid_argument("unknown canonical pose");
}

const char* pose_token(CanonicalPose pose) {
    switch (pose) {
    case CanonicalPose::ProneSurface: return "prone_surface";
    case CanonicalPose::ProneBottom: return "prone_bottom";
    case CanonicalPose::UprightFacing: return "upright_facing";
    case CanonicalPose::UprightAway: return "upright_away";
    case CanonicalPose::InvertedFacing: return "inverted_facing";
    case CanonicalPose::InvertedAway: return "inverted_away";
    }
    return "?";
}

const char* pose_display(CanonicalPose pose) {
    switch (pose) {
    case CanonicalPose::ProneSurface: return "Prone (surface)";
    case CanonicalPose::ProneBottom: return "Prone (bottom)";
    case CanonicalPose::UprightFacing: return "Upright (facing)";
    case CanonicalPose::UprightAway: return "Upright (away)";
    case CanonicalPose::InvertedFacing: return "Inverted (facing)";
    case CanonicalPose::InvertedAway: return "Inverted (away)";
    }
    return "?";
}

std::optional<CanonicalPose> pose_from_token(std::string_view token) {
    for (CanonicalPose pose : kAllCanonicalPoses)
        if (token == pose_token(pose)) return pose;
    return std::nullopt;
}

double Rng::uniform01() {
    // 53 random bits -> [0, 1).
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

double Rng::gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    // Box-Muller on (0,1] x [0,1) uniforms.
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * kPi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
}

Eigen::Matrix3d random_rotation(Rng& rng) {
    // Shoemake's uniform quaternion sampling.
    const double u1 = rng.uniform01();
    const double u2 = rng.uniform01();
    const double u3 = rng.uniform01();
    const double a = std::sqrt(1.0 - u1);
    const double b = std::sqrt(u1);
    const Eigen::Quaterniond q(a * std::sin(2.0 * kPi * u2), a * std::cos(2.0 * kPi * u2),
                               b * std::sin(2.0 * kPi * u3), b * std::cos(2.0 * kPi * u3));
    return q.normalized().toRotationMatrix();
}

BodyShape random_shape(Rng& rng) {
    return BodyShape(rng.uniform(0.35, 0.55), rng.uniform(0.25, 0.45), rng.uniform(0.45, 0.65),
                     rng.uniform(0.18, 0.30), rng.uniform(0.05, 0.15));
}

SyntheticTorso make_torso(const BodyShape& shape, const DiverPose& pose,
                          const Eigen::Vector3d& position) {
    const double sw = shape.shoulder_width_m / 2.0;
    const double hw = shape.hip_width_m / 2.0;
    const double th = shape.torso_height_m / 2.0;

    // Body coordinates of the facing-camera reference orientation: x spans
    // the shoulders (diver's left at +x), y runs neck-to-hips, z is
    // posterior; the nose bridge sits above the neck and in front of the
    // torso plane (-z).
    std::array<Eigen::Vector3d, kKeypointCount> body;
    body[static_cast<int>(KeypointId::LeftShoulder)] = {sw, -th, 0.0};
    body[static_cast<int>(KeypointId::RightShoulder)] = {-sw, -th, 0.0};
    body[static_cast<int>(KeypointId::LeftHip)] = {hw, th, 0.0};
    body[static_cast<int>(KeypointId::RightHip)] = {-hw, th, 0.0};
    body[static_cast<int>(KeypointId::NeckBase)] = {0.0, -th, 0.0};
    body[static_cast<int>(KeypointId::NoseBridge)] = {0.0, -th - shape.nose_superior_m,
                                                      -shape.nose_anterior_m};

    std::array<Eigen::Vector3d, kKeypointCount> cam;
    std::vector<KeypointId> behind;
    for (KeypointId id : kAllKeypointIds) {
        cam[static_cast<int>(id)] = pose.rotation * body[static_cast<int>(id)] + position;
        if (!(cam[static_cast<int>(id)].z() > 0.0)) behind.push_back(id);
    }
    if (!behind.empty())
        throw BehindCamera("keypoints behind the camera: " + join_names(sorted_by_name(behind)));

    // Ground-truth frame, by the same construction the pipeline performs but
    // evaluated analytically on the reference orientation: the symmetric
    // torso gives exact axes x=(-1,0,0), y=(0,1,0), z=(0,0,-1) in body
    // coordinates.
    Eigen::Vector3d centroid_body = Eigen::Vector3d::Zero();
    for (const Eigen::Vector3d& p : body) centroid_body += p;
    centroid_body /= kKeypointCount;

    const BodyFrame frame = BodyFrame::from_axes(
        pose.rotation * centroid_body + position, pose.rotation * Eigen::Vector3d(-1, 0, 0),
        pose.rotation * Eigen::Vector3d(0, 1, 0), pose.rotation * Eigen::Vector3d(0, 0, -1));

    return SyntheticTorso{TorsoPose3D::from_points(cam), frame};
}

StereoObservation observe(const StereoRig& rig, const TorsoPose3D& pose,
                          const NoiseSpec& noise, long frame_id, double margin_px) {
    require(noise.sigma_px >= 0.0, "noise: sigma_px must be >= 0");

    const CameraIntrinsics& k = rig.intrinsics;
    const Eigen::Vector3d right_offset(rig.baseline_m, 0.0, 0.0);

    std::array<Eigen::Vector2d, kKeypointCount> left_px;
    std::array<Eigen::Vector2d, kKeypointCount> right_px;
    std::vector<KeypointId> outside;
    for (KeypointId id : kAllKeypointIds) {
        const Eigen::Vector2d l = project(k, pose[id]);
        const Eigen::Vector2d r = project(k, pose[id] - right_offset);
        left_px[static_cast<int>(id)] = l;
        right_px[static_cast<int>(id)] = r;
        auto in_view = [&](const Eigen::Vector2d& s) {
            return s.x() >= margin_px && s.x() <= k.width - margin_px && s.y() >= margin_px &&
                   s.y() <= k.height - margin_px;
        };
        if (!in_view(l) || !in_view(r)) outside.push_back(id);
    }
    if (!outside.empty()) throw OutOfView(sorted_by_name(outside));

    Rng rng(noise.seed);
    PoseObservation2D left(frame_id, CameraSide::Left);
    PoseObservation2D right(frame_id, CameraSide::Right);
    for (KeypointId id : kAllKeypointIds) {
        Eigen::Vector2d l = left_px[static_cast<int>(id)];
        Eigen::Vector2d r = right_px[static_cast<int>(id)];
        if (noise.sigma_px > 0.0) {
            l.x() += noise.sigma_px * rng.gaussian();
            l.y() += noise.sigma_px * rng.gaussian();
            r.x() += noise.sigma_px * rng.gaussian();
            r.y() += noise.sigma_px * rng.gaussian();
        }
        left.insert({id, l.x(), l.y(), 1.0});
        right.insert({id, r.x(), r.y(), 1.0});
    }
    return StereoObservation{left, right};
}

std::vector<Eigen::Vector3d> perturb_alignment(const Eigen::Vector3d& z_axis,
                                               double theta_bound_deg, double phi_bound_deg,
                                               int count, std::uint64_t seed) {
    require(theta_bound_deg >= 0.0 && phi_bound_deg >= 0.0, "perturb: bounds must be >= 0");
    require(count >= 1, "perturb: count must be >= 1");
    const double norm = z_axis.norm();
    require(norm > 0.0, "perturb: vector must be nonzero");
    const Eigen::Vector3d v = z_axis / norm;

    // Spherical coordinates with polar axis = camera y:
    //   x = sin(theta) sin(phi), y = cos(theta), z = sin(theta) cos(phi).
    const double theta = std::acos(std::clamp(v.y(), -1.0, 1.0));
    const double phi = std::atan2(v.x(), v.z());
    const double theta_bound = theta_bound_deg * kPi / 180.0;
    const double phi_bound = phi_bound_deg * kPi / 180.0;

    constexpr double kPoleEps = 1e-9;
    Rng rng(seed);
    std::vector<Eigen::Vector3d> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double theta_new = std::clamp(rng.uniform(theta - theta_bound, theta + theta_bound),
                                            kPoleEps, kPi - kPoleEps);
        const double phi_new = rng.uniform(phi - phi_bound, phi + phi_bound);
        const double s = std::sin(theta_new);
        Eigen::Vector3d w(s * std::sin(phi_new), std::cos(theta_new), s * std::cos(phi_new));
        out.push_back(w.normalized());
    }
    return out;
}

NoiseSweepPoint noise_sweep_point(const StereoRig& rig, double sigma_px, int trials,
                                  std::uint64_t seed) {
    require(trials >= 1, "noise sweep: trials must be >= 1");

    // Widen the epipolar gate with sigma: the residual of a true
    // correspondence is N(0, sigma*sqrt(2)), so 8*sigma keeps censoring
    // negligible across the sweep.
    const double vert_tol = std::max(kDefaultVertTolPx, 8.0 * sigma_px);

    NoiseSweepPoint point;
    point.sigma_px = sigma_px;
    double sum = 0.0;
    double sum_sq = 0.0;
    Rng pose_rng(seed);
    for (int trial = 0; trial < trials; ++trial) {
        const BodyShape shape = random_shape(pose_rng);
        const DiverPose pose = DiverPose::free(random_rotation(pose_rng));
        const Eigen::Vector3d position(pose_rng.uniform(-0.2, 0.2), pose_rng.uniform(-0.2, 0.2),
                                       pose_rng.uniform(1.5, 2.5));
        const SyntheticTorso truth = make_torso(shape, pose, position);
        try {
            const StereoObservation obs =
                observe(rig, truth.pose, {sigma_px, seed + static_cast<std::uint64_t>(trial)},
                        trial, -1e9);
            const TorsoPose3D recon = triangulate_pose(rig, obs.left, obs.right, vert_tol);
            const double err = frame_angular_error(build_body_frame(recon), truth.frame);
            sum += err;
            sum_sq += err * err;
            ++point.n_used;
        } catch (const Error&) {
            ++point.n_failed;
        }
    }
    if (point.n_used > 0) {
        point.mean_angular_error_rad = sum / point.n_used;
        const double var =
            std::max(0.0, sum_sq / point.n_used -
                              point.mean_angular_error_rad * point.mean_angular_error_rad);
        point.standard_error_rad = std::sqrt(var / point.n_used);
    }
    return point;
}

std::vector<NoiseSweepPoint> noise_sweep(const StereoRig& rig, std::span<const double> sigmas,
                                         int trials, std::uint64_t seed) {
    std::vector<NoiseSweepPoint> out;
    out.reserve(sigmas.size());
    for (double sigma : sigmas) out.push_back(noise_sweep_point(rig, sigma, trials, seed));
    return out;
}

} // namespace f2f
