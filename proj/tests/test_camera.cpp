#include <doctest.h>

#include <Eigen/Dense>

#include "f2f/camera.hpp"
#include "f2f/synth.hpp"
#include "helpers.hpp"

using namespace f2f;
using f2f::testing::default_intrinsics;
using f2f::testing::default_rig;

TEST_SUITE("camera") {

TEST_CASE("intrinsics invariants are enforced") {
    CHECK_NOTHROW(CameraIntrinsics(500, 500, 320, 240, 640, 480));
    CHECK_THROWS_AS(CameraIntrinsics(0, 500, 320, 240, 640, 480), std::invalid_argument);
    CHECK_THROWS_AS(CameraIntrinsics(500, -1, 320, 240, 640, 480), std::invalid_argument);
    CHECK_THROWS_AS(CameraIntrinsics(500, 500, 0, 240, 640, 480), std::invalid_argument);
    CHECK_THROWS_AS(CameraIntrinsics(500, 500, 640, 240, 640, 480), std::invalid_argument);
    CHECK_THROWS_AS(CameraIntrinsics(500, 500, 320, 500, 640, 480), std::invalid_argument);
    CHECK_THROWS_AS(StereoRig(default_intrinsics(), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(StereoRig(default_intrinsics(), -0.2), std::invalid_argument);
}

TEST_CASE("optical-axis point projects to the principal point") {
    const Eigen::Vector2d s = project(default_intrinsics(), {0.0, 0.0, 2.0});
    CHECK(s.x() == doctest::Approx(320.0).epsilon(1e-12));
    CHECK(s.y() == doctest::Approx(240.0).epsilon(1e-12));
}

TEST_CASE("pinhole formula, hand-evaluated point") {
    // u = 500 * 0.2 / 2 + 320 = 370, v = 500 * -0.1 / 2 + 240 = 215
    const Eigen::Vector2d s = project(default_intrinsics(), {0.2, -0.1, 2.0});
    CHECK(s.x() == doctest::Approx(370.0).epsilon(1e-12));
    CHECK(s.y() == doctest::Approx(215.0).epsilon(1e-12));
}

TEST_CASE("non-positive depth is rejected") {
    CHECK_THROWS_AS(project(default_intrinsics(), {0.1, 0.1, 0.0}), NonPositiveDepth);
    CHECK_THROWS_AS(project(default_intrinsics(), {0.1, 0.1, -1.0}), NonPositiveDepth);
}

TEST_CASE("triangulation of a hand-built correspondence") {
    // d = 25 px, z = 500 * 0.1 / 25 = 2, x = (345-320) * 2 / 500 = 0.1
    const Eigen::Vector3d p = triangulate_pair(default_rig(), {345.0, 240.0}, {320.0, 240.0});
    CHECK(p.z() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(p.x() == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(p.y() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("zero disparity is rejected") {
    CHECK_THROWS_AS(triangulate_pair(default_rig(), {320.0, 240.0}, {320.0, 240.0}),
                    NonPositiveDisparity);
    CHECK_THROWS_AS(triangulate_pair(default_rig(), {310.0, 240.0}, {320.0, 240.0}),
                    NonPositiveDisparity);
}

TEST_CASE("vertical residual beyond the tolerance is rejected") {
    CHECK_THROWS_AS(triangulate_pair(default_rig(), {345.0, 240.0}, {320.0, 246.0}, 5.0),
                    EpipolarViolation);
    // At the tolerance boundary the pair is still accepted.
    CHECK_NOTHROW(triangulate_pair(default_rig(), {345.0, 240.0}, {320.0, 245.0}, 5.0));
}

TEST_CASE("project then triangulate recovers the point") {
    const StereoRig rig = default_rig();
    Rng rng(7);
    for (int trial = 0; trial < 1000; ++trial) {
        const Eigen::Vector3d p(rng.uniform(-0.8, 0.8), rng.uniform(-0.6, 0.6),
                                rng.uniform(0.5, 5.0));
        const Eigen::Vector2d left = project(rig.intrinsics, p);
        const Eigen::Vector2d right =
            project(rig.intrinsics, p - Eigen::Vector3d(rig.baseline_m, 0, 0));
        const Eigen::Vector3d back = triangulate_pair(rig, left, right);
        CHECK((back - p).norm() < 1e-9);
    }
}

TEST_CASE("doubling the disparity exactly halves the depth") {
    const StereoRig rig = default_rig();
    const double z1 = triangulate_pair(rig, {330.0, 240.0}, {320.0, 240.0}).z();
    const double z2 = triangulate_pair(rig, {340.0, 240.0}, {320.0, 240.0}).z();
    CHECK(z2 == z1 / 2.0);
}

TEST_CASE("triangulation error grows with depth under fixed pixel noise") {
    const StereoRig rig = default_rig();
    const double sigma = 1.0;
    Rng rng(21);
    auto mean_error_at = [&](double depth) {
        double sum = 0.0;
        for (int trial = 0; trial < 1000; ++trial) {
            const Eigen::Vector3d p(0.05, -0.02, depth);
            Eigen::Vector2d left = project(rig.intrinsics, p);
            Eigen::Vector2d right =
                project(rig.intrinsics, p - Eigen::Vector3d(rig.baseline_m, 0, 0));
            left += sigma * Eigen::Vector2d(rng.gaussian(), rng.gaussian());
            right += sigma * Eigen::Vector2d(rng.gaussian(), rng.gaussian());
            try {
                sum += (triangulate_pair(rig, left, right, 1e9) - p).norm();
            } catch (const NonPositiveDisparity&) {
                sum += p.norm(); // point pushed to infinity; count full magnitude
            }
        }
        return sum / 1000.0;
    };
    CHECK(mean_error_at(3.0) > mean_error_at(1.0));
}

TEST_CASE("noiseless synthetic diver triangulates to 1e-9") {
    const StereoRig rig = default_rig();
    const SyntheticTorso truth =
        make_torso(BodyShape::defaults(), DiverPose::canonical(CanonicalPose::UprightFacing),
                   {0.1, -0.05, 2.2});
    PoseObservation2D left(0, CameraSide::Left);
    PoseObservation2D right(0, CameraSide::Right);
    for (KeypointId id : kAllKeypointIds) {
        const Eigen::Vector2d l = project(rig.intrinsics, truth.pose[id]);
        const Eigen::Vector2d r =
            project(rig.intrinsics, truth.pose[id] - Eigen::Vector3d(rig.baseline_m, 0, 0));
        left.insert({id, l.x(), l.y(), 1.0});
        right.insert({id, r.x(), r.y(), 1.0});
    }
    const TorsoPose3D recon = triangulate_pose(rig, left, right);
    for (KeypointId id : kAllKeypointIds)
        CHECK((recon[id] - truth.pose[id]).norm() < 1e-9);
}

TEST_CASE("keypoint dropped by the confidence filter fails triangulation by id") {
    const StereoRig rig = default_rig();
    PoseObservation2D left(0, CameraSide::Left);
    PoseObservation2D right(0, CameraSide::Right);
    for (KeypointId id : kAllKeypointIds) {
        const double p_left = id == KeypointId::LeftHip ? 0.01 : 0.9;
        left.insert({id, 300.0, 240.0, p_left});
        right.insert({id, 280.0, 240.0, 0.9});
    }
    const PoseObservation2D filtered = filter_by_confidence(left, 0.05);
    try {
        triangulate_pose(rig, filtered, right);
        FAIL("expected InsufficientKeypoints");
    } catch (const InsufficientKeypoints& e) {
        REQUIRE(e.missing().size() == 1);
        CHECK(e.missing()[0] == KeypointId::LeftHip);
    }
}

TEST_CASE("vertically shifted keypoint reports an epipolar violation with its id") {
    const StereoRig rig = default_rig();
    const SyntheticTorso truth =
        make_torso(BodyShape::defaults(), DiverPose::canonical(CanonicalPose::UprightFacing),
                   {0.0, 0.0, 2.0});
    PoseObservation2D left(0, CameraSide::Left);
    PoseObservation2D right(0, CameraSide::Right);
    const double vert_tol = 5.0;
    for (KeypointId id : kAllKeypointIds) {
        const Eigen::Vector2d l = project(rig.intrinsics, truth.pose[id]);
        Eigen::Vector2d r =
            project(rig.intrinsics, truth.pose[id] - Eigen::Vector3d(rig.baseline_m, 0, 0));
        if (id == KeypointId::NeckBase) r.y() += 2.0 * vert_tol;
        left.insert({id, l.x(), l.y(), 1.0});
        right.insert({id, r.x(), r.y(), 1.0});
    }
    try {
        triangulate_pose(rig, left, right, vert_tol);
        FAIL("expected EpipolarViolation");
    } catch (const EpipolarViolation& e) {
        CHECK(std::string(e.what()).find("keypoint n") != std::string::npos);
    }
}

} // TEST_SUITE
