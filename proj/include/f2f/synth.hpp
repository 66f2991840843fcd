#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "f2f/body_frame.hpp"
#include "f2f/camera.hpp"
#include "f2f/keypoints.hpp"

namespace f2f {

// Torso geometry parameters (meters). Plausible adult defaults; these are
// harness knobs, not anatomical claims. nose_anterior_m may be zero, which
// yields a fully planar six-point torso.
struct BodyShape {
    double shoulder_width_m;
    double hip_width_m;
    double torso_height_m;  // neck line to hip line
    double nose_superior_m; // nose bridge above the neck base
    double nose_anterior_m; // nose bridge in front of the torso plane

    BodyShape(double shoulder_width_m, double hip_width_m, double torso_height_m,
              double nose_superior_m, double nose_anterior_m);

    static BodyShape defaults() { return {0.45, 0.35, 0.55, 0.25, 0.10}; }
};

// The six orientations used in evaluation. Each maps to a fixed rotation of
// the facing-camera reference orientation (see canonical_rotation):
//
//   UprightFacing   identity          upright, chest toward the camera
//   UprightAway     R_y(pi)           upright, back toward the camera
//   ProneSurface    R_x(-pi/2)        horizontal, chest toward the surface,
//                                     head away from the camera
//   ProneBottom     R_x(+pi/2)        horizontal, back toward the surface,
//                                     face toward the bottom, head toward
//                                     the camera
//   InvertedFacing  R_z(pi)           head-down, chest toward the camera
//   InvertedAway    R_x(pi)           head-down, back toward the camera
//
// Rotations follow the right-hand rule about the camera axes (x right,
// y down, z along the optical axis).
enum class CanonicalPose {
    ProneSurface = 0,
    ProneBottom,
    UprightFacing,
    UprightAway,
    InvertedFacing,
    InvertedAway,
};

inline constexpr std::array<CanonicalPose, 6> kAllCanonicalPoses = {
    CanonicalPose::ProneSurface,   CanonicalPose::ProneBottom,
    CanonicalPose::UprightFacing,  CanonicalPose::UprightAway,
    CanonicalPose::InvertedFacing, CanonicalPose::InvertedAway,
};

// Row order of the evaluation report.
inline constexpr std::array<CanonicalPose, 6> kReportPoseOrder = {
    CanonicalPose::ProneSurface,   CanonicalPose::ProneBottom,
    CanonicalPose::UprightAway,    CanonicalPose::UprightFacing,
    CanonicalPose::InvertedFacing, CanonicalPose::InvertedAway,
};

Eigen::Matrix3d canonical_rotation(CanonicalPose pose);
const char* pose_token(CanonicalPose pose);   // "prone_surface", ...
const char* pose_display(CanonicalPose pose); // "Prone (surface)", ...
std::optional<CanonicalPose> pose_from_token(std::string_view token);

// A diver orientation: one of the canonical poses or a free rotation.
struct DiverPose {
    Eigen::Matrix3d rotation;
    std::optional<CanonicalPose> label;

    static DiverPose canonical(CanonicalPose pose) {
        return {canonical_rotation(pose), pose};
    }
    static DiverPose free(const Eigen::Matrix3d& rotation) { return {rotation, std::nullopt}; }
};

struct NoiseSpec {
    double sigma_px = 0.0; // per-axis Gaussian std-dev in pixels
    std::uint64_t seed = 0;
};

// Deterministic RNG: raw mt19937_64 bits mapped to doubles and a hand-rolled
// Box-Muller normal, so identical seeds reproduce identical streams across
// standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform01(); // [0, 1)
    double uniform(double lo, double hi);
    double gaussian();  // standard normal

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

Eigen::Matrix3d random_rotation(Rng& rng); // uniform over SO(3)
BodyShape random_shape(Rng& rng);

struct SyntheticTorso {
    TorsoPose3D pose;
    BodyFrame frame; // analytically known ground truth
};

// Builds the six keypoints in body coordinates (shoulders at
// +-shoulder_width/2 on the shoulder line, hips at +-hip_width/2 on the hip
// line, neck at the shoulder midpoint, nose bridge offset superiorly and
// anteriorly), then applies pose.rotation and the position offset of the
// torso center. Throws BehindCamera when any keypoint has z <= 0.
SyntheticTorso make_torso(const BodyShape& shape, const DiverPose& pose,
                          const Eigen::Vector3d& position);

// Projects every keypoint into both cameras, checks the noiseless
// projections stay inside the image shrunk by margin_px on each border
// (negative margins allow overshoot), then adds i.i.d. Gaussian pixel noise
// per axis. Confidences are 1.0. Throws OutOfView listing offenders.
StereoObservation observe(const StereoRig& rig, const TorsoPose3D& pose,
                          const NoiseSpec& noise, long frame_id = 0, double margin_px = 0.0);

// Perturbs a unit vector in spherical coordinates (polar axis = camera y):
// theta_new uniform in [theta - bound, theta + bound] clamped into (0, pi),
// phi_new uniform in [phi - bound, phi + bound]. Returns unit vectors.
std::vector<Eigen::Vector3d> perturb_alignment(const Eigen::Vector3d& z_axis,
                                               double theta_bound_deg, double phi_bound_deg,
                                               int count, std::uint64_t seed);

// Monte Carlo sweep of body-frame angular error versus pixel noise. Each
// trial draws a random shape and free pose, observes it with per-trial seed
// (seed + trial index), and runs triangulation plus frame construction. The
// epipolar gate is widened with sigma so the sweep measures error growth
// rather than attrition.
struct NoiseSweepPoint {
    double sigma_px = 0.0;
    double mean_angular_error_rad = 0.0;
    double standard_error_rad = 0.0;
    int n_used = 0;
    int n_failed = 0;
};

NoiseSweepPoint noise_sweep_point(const StereoRig& rig, double sigma_px, int trials,
                                  std::uint64_t seed);
std::vector<NoiseSweepPoint> noise_sweep(const StereoRig& rig, std::span<const double> sigmas,
                                         int trials, std::uint64_t seed);

} // namespace f2f
