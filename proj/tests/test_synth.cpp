#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "f2f/evaluation.hpp"
#include "f2f/synth.hpp"
#include "helpers.hpp"

using namespace f2f;
using f2f::testing::default_intrinsics;
using f2f::testing::default_rig;

namespace {

constexpr double kPi = std::numbers::pi;

double angle_between(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    return std::acos(std::clamp(a.normalized().dot(b.normalized()), -1.0, 1.0));
}

// Independent bound for the perturbation test: the largest angle between
// v(theta, phi) and any v(theta', phi') with theta' in [lo, hi] and
// |phi' - phi| <= phi_bound. cos(gamma) = cos t cos t' + sin t sin t' cos dphi
// is minimized at |dphi| = min(phi_bound, pi); over t' it is
// R cos(t' - psi), minimized at the interval ends or at psi + pi.
double max_box_deviation(double theta, double theta_bound, double phi_bound) {
    const double lo = std::max(0.0, theta - theta_bound);
    const double hi = std::min(kPi, theta + theta_bound);
    const double c = std::cos(std::min(phi_bound, kPi));

    const double amp = std::hypot(std::cos(theta), std::sin(theta) * c);
    const double psi = std::atan2(std::sin(theta) * c, std::cos(theta));

    auto g = [&](double t) {
        return std::cos(theta) * std::cos(t) + std::sin(theta) * c * std::sin(t);
    };
    double min_g = std::min(g(lo), g(hi));
    for (double turn : {-2.0 * kPi, 0.0, 2.0 * kPi}) {
        const double critical = psi + kPi + turn;
        if (critical >= lo && critical <= hi) min_g = std::min(min_g, -amp);
    }
    return std::acos(std::clamp(min_g, -1.0, 1.0));
}

} // namespace

TEST_SUITE("synth") {

TEST_CASE("degenerate shapes are rejected at construction") {
    CHECK_THROWS_AS(BodyShape(0.45, 0.35, 0.0, 0.25, 0.10), std::invalid_argument);
    CHECK_THROWS_AS(BodyShape(0.0, 0.35, 0.55, 0.25, 0.10), std::invalid_argument);
    CHECK_THROWS_AS(BodyShape(0.45, 0.35, 0.55, 0.25, -0.01), std::invalid_argument);
    CHECK_NOTHROW(BodyShape(0.45, 0.35, 0.55, 0.25, 0.0)); // planar diver is valid
}

TEST_CASE("facing diver: torso plane perpendicular to the optical axis") {
    const SyntheticTorso truth =
        make_torso(BodyShape::defaults(), DiverPose::canonical(CanonicalPose::UprightFacing),
                   {0.0, 0.0, 2.0});
    for (KeypointId id : {KeypointId::LeftShoulder, KeypointId::RightShoulder,
                          KeypointId::LeftHip, KeypointId::RightHip, KeypointId::NeckBase})
        CHECK(truth.pose[id].z() == doctest::Approx(2.0).epsilon(1e-15));
    CHECK((truth.frame.z_axis - Eigen::Vector3d(0, 0, -1)).norm() < 1e-12);
}

TEST_CASE("ground-truth frame matches the pipeline construction") {
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const SyntheticTorso truth =
            make_torso(random_shape(rng), DiverPose::free(random_rotation(rng)),
                       {rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(1.2, 3.5)});
        const BodyFrame built = build_body_frame(truth.pose);
        CHECK(frame_angular_error(built, truth.frame) < 1e-9);
        CHECK((built.origin - truth.frame.origin).norm() < 1e-12);
    }
}

TEST_CASE("prone-bottom mapping: face toward the bottom, head toward the camera") {
    const SyntheticTorso truth =
        make_torso(BodyShape::defaults(), DiverPose::canonical(CanonicalPose::ProneBottom),
                   {0.0, 0.0, 2.0});
    // Anterior points straight down (+y in camera coordinates).
    CHECK((truth.frame.z_axis - Eigen::Vector3d(0, 1, 0)).norm() < 1e-12);
    // Back toward the surface: the torso-to-hips direction runs away from
    // the camera, so the neck is nearer than the hips.
    CHECK(truth.pose[KeypointId::NeckBase].z() < truth.pose[KeypointId::LeftHip].z());
}

TEST_CASE("canonical poses are six distinct orientations") {
    for (CanonicalPose a : kAllCanonicalPoses) {
        for (CanonicalPose b : kAllCanonicalPoses) {
            if (a == b) continue;
            CHECK((canonical_rotation(a) - canonical_rotation(b)).norm() > 0.1);
        }
        CHECK(pose_from_token(pose_token(a)) == a);
    }
}

TEST_CASE("keypoints behind the camera are rejected") {
    CHECK_THROWS_AS(make_torso(BodyShape::defaults(),
                               DiverPose::canonical(CanonicalPose::UprightFacing),
                               {0.0, 0.0, 0.1}),
                    BehindCamera);
}

TEST_CASE("noiseless observation round-trips through triangulation") {
    const StereoRig rig = default_rig();
    const SyntheticTorso truth = make_torso(
        BodyShape::defaults(), DiverPose::canonical(CanonicalPose::UprightFacing), {0, 0, 2.0});
    const StereoObservation obs = observe(rig, truth.pose, {0.0, 1}, 0);
    const TorsoPose3D recon = triangulate_pose(rig, obs.left, obs.right);
    for (KeypointId id : kAllKeypointIds)
        CHECK((recon[id] - truth.pose[id]).norm() < 1e-9);
}

TEST_CASE("observations are deterministic for a fixed seed") {
    const StereoRig rig = default_rig();
    const SyntheticTorso truth = make_torso(
        BodyShape::defaults(), DiverPose::canonical(CanonicalPose::UprightFacing), {0, 0, 2.0});
    const StereoObservation a = observe(rig, truth.pose, {3.5, 42}, 0);
    const StereoObservation b = observe(rig, truth.pose, {3.5, 42}, 0);
    const StereoObservation c = observe(rig, truth.pose, {3.5, 43}, 0);
    bool any_differs = false;
    for (KeypointId id : kAllKeypointIds) {
        CHECK(a.left.at(id).u == b.left.at(id).u);
        CHECK(a.left.at(id).v == b.left.at(id).v);
        CHECK(a.right.at(id).u == b.right.at(id).u);
        CHECK(a.right.at(id).v == b.right.at(id).v);
        any_differs = any_differs || a.left.at(id).u != c.left.at(id).u;
    }
    CHECK(any_differs);
}

TEST_CASE("detector-scale noise at 2 m yields finite nonzero errors") {
    const StereoRig rig = default_rig();
    const SyntheticTorso truth = make_torso(
        BodyShape::defaults(), DiverPose::canonical(CanonicalPose::UprightFacing), {0, 0, 2.0});
    const Setpoint baseline = compute_setpoint(truth.pose, truth.frame, rig.intrinsics, 2.0);

    const double sigma = 12.75;
    const double vert_tol = 8.0 * sigma;
    int used = 0;
    double reconstruction_error = 0.0;
    double setpoint_error_sum = 0.0;
    for (int frame = 0; frame < 50; ++frame) {
        const StereoObservation obs =
            observe(rig, truth.pose, {sigma, 1000 + static_cast<std::uint64_t>(frame)}, frame,
                    -1e9);
        const FrameScore score =
            score_frame(rig, obs, baseline, {kDefaultPCutoff, vert_tol, false});
        if (!score.ok) continue;
        ++used;
        setpoint_error_sum += score.sum_px;
        const TorsoPose3D recon = triangulate_pose(rig, obs.left, obs.right, vert_tol);
        for (KeypointId id : kAllKeypointIds)
            reconstruction_error += (recon[id] - truth.pose[id]).norm();
    }
    REQUIRE(used > 0);
    CHECK(reconstruction_error / used > 1e-4);
    CHECK(std::isfinite(setpoint_error_sum));
    CHECK(setpoint_error_sum / used > 0.0);
}

TEST_CASE("off-frame diver is reported out of view") {
    const StereoRig rig = default_rig();
    const SyntheticTorso truth = make_torso(
        BodyShape::defaults(), DiverPose::canonical(CanonicalPose::UprightFacing),
        {2.5, 0.0, 2.0});
    try {
        observe(rig, truth.pose, {0.0, 0}, 0);
        FAIL("expected OutOfView");
    } catch (const OutOfView& e) {
        CHECK(!e.outside().empty());
    }
}

TEST_CASE("zero perturbation bounds reproduce the input vector") {
    const Eigen::Vector3d v = Eigen::Vector3d(0.3, -0.5, 0.81).normalized();
    for (const Eigen::Vector3d& w : perturb_alignment(v, 0.0, 0.0, 25, 9)) {
        CHECK((w - v).norm() < 1e-12);
    }
}

TEST_CASE("perturbed vectors stay unit length") {
    for (const Eigen::Vector3d& w :
         perturb_alignment({0.0, 0.0, -1.0}, 25.0, 25.0, 10000, 77))
        CHECK(std::abs(w.norm() - 1.0) < 1e-12);
}

TEST_CASE("perturbation deviations respect the spherical box bound") {
    const Eigen::Vector3d v(0.0, 0.0, -1.0);
    const double theta = std::acos(v.normalized().y());
    for (double bound_deg : {25.0, 15.0, 5.0}) {
        const double bound = bound_deg * kPi / 180.0;
        const double limit = max_box_deviation(theta, bound, bound);
        double worst = 0.0;
        for (const Eigen::Vector3d& w :
             perturb_alignment(v, bound_deg, bound_deg, 10000, 123))
            worst = std::max(worst, angle_between(v, w));
        CHECK(worst <= limit + 1e-12);
        // The box must also be reachable: samples approach the bound.
        CHECK(worst > 0.5 * limit);
    }
}

TEST_CASE("perturbation handles near-pole inputs") {
    const Eigen::Vector3d near_pole = Eigen::Vector3d(1e-6, 1.0, 1e-6).normalized();
    for (const Eigen::Vector3d& w : perturb_alignment(near_pole, 30.0, 180.0, 200, 5))
        CHECK(std::abs(w.norm() - 1.0) < 1e-12);
}

TEST_CASE("noiseless pipeline recovers ground truth over random divers") {
    const StereoRig rig = default_rig();
    Rng rng(71);
    for (int trial = 0; trial < 200; ++trial) {
        const SyntheticTorso truth =
            make_torso(random_shape(rng), DiverPose::free(random_rotation(rng)),
                       {rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), rng.uniform(1.0, 3.0)});
        const StereoObservation obs =
            observe(rig, truth.pose, {0.0, static_cast<std::uint64_t>(trial)}, trial, -1e9);
        const BodyFrame built = build_body_frame(triangulate_pose(rig, obs.left, obs.right));
        CHECK(frame_angular_error(built, truth.frame) < 1e-6);
        CHECK((built.origin - truth.frame.origin).norm() < 1e-6);
    }
}

TEST_CASE("frame error grows from zero to detector-scale noise") {
    const StereoRig rig = default_rig();
    const NoiseSweepPoint clean = noise_sweep_point(rig, 0.0, 120, 31);
    const NoiseSweepPoint noisy = noise_sweep_point(rig, 12.75, 120, 31);
    CHECK(clean.mean_angular_error_rad < 1e-9);
    CHECK(noisy.mean_angular_error_rad > clean.mean_angular_error_rad);
}

TEST_CASE("noise sweep is deterministic") {
    const StereoRig rig = default_rig();
    const NoiseSweepPoint a = noise_sweep_point(rig, 5.0, 60, 13);
    const NoiseSweepPoint b = noise_sweep_point(rig, 5.0, 60, 13);
    CHECK(a.mean_angular_error_rad == b.mean_angular_error_rad);
    CHECK(a.n_used == b.n_used);
}

} // TEST_SUITE
