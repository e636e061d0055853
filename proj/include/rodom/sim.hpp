#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rodom/config.hpp"
#include "rodom/core.hpp"
#include "rodom/ingest.hpp"
#include "rodom/odometry.hpp"

namespace rodom {

struct Landmark {
  Vec2 pos;                  // world frame, meters
  double reflectivity = 1.0; // >= 0
};

struct Scene {
  std::vector<Landmark> landmarks;
  double clutter_density = 0.0;        // spurious heatmap cells per frame
  double noise_sigma_intensity = 0.0;  // additive heatmap noise sigma
  double doppler_noise_sigma = 0.0;    // m/s
  double outlier_fraction = 0.0;       // [0, 1)
  std::uint64_t seed = 0;
};

struct MotionSegment {
  double duration = 0.0;  // seconds, > 0
  double vx = 0.0;        // body frame, m/s
  double vy = 0.0;
  double yaw_rate = 0.0;  // rad/s
};

/// Piecewise-constant body twist. Poses are the exact SE(2) integrals of
/// the segments.
struct MotionProfile {
  std::vector<MotionSegment> segments;

  double total_duration() const;
  Pose2 pose_at(double t) const;
  Vec2 body_velocity_at(double t) const;
  double yaw_rate_at(double t) const;
};

struct SimResult {
  Dataset dataset;
  Trajectory ground_truth;  // sampled at cascade timestamps
};

struct SimOptions {
  int n_azimuth = 128;       // cascade heatmap azimuth bins
  double splat_sigma = 0.7;  // bins; <= 0 deposits into the single nearest cell
};

/// Generates Doppler frames at the single-chip rate and heatmaps at the
/// cascade rate from a known trajectory and landmark map. Landmark Doppler
/// is the radial component of the relative motion (zero under pure
/// rotation about the sensor); heatmaps are built by splatting landmark
/// reflectivity into range/azimuth bins with a 3x3 Gaussian kernel.
/// Bit-reproducible for a fixed scene seed.
SimResult simulate(const Scene& scene, const MotionProfile& motion,
                   const SensorSpec& singlechip, const SensorSpec& cascade,
                   const SimOptions& opt = {});

/// Scene + motion read from the flat key/value format:
///   landmark = <x> <y> <reflectivity>     (repeated)
///   segment  = <duration> <vx> <vy> <yaw_rate_deg_s>   (repeated)
/// plus scalar Scene fields by name.
std::pair<Scene, MotionProfile> parse_scene_config(const KvFile& kv);

namespace fixtures {

struct Fixture {
  Scene scene;
  MotionProfile motion;
  SensorSpec singlechip;
  SensorSpec cascade;
  SimOptions options;
};

/// 4x5 m square path with 90 degree in-place turns. `noisy` adds heatmap,
/// Doppler, outlier, and clutter noise.
Fixture square_path(bool noisy, std::uint64_t seed = 0);

/// Rotation in place; Doppler observes nothing, the heatmap branch must
/// supply the yaw.
Fixture pure_rotation(std::uint64_t seed = 0);

/// Many small equal-reflectivity objects: unstable feature segments.
Fixture unstable_segments(std::uint64_t seed = 0);

/// Close-range features in a narrow corridor: rectification curvature
/// distortion regression scene.
Fixture narrow_corridor(std::uint64_t seed = 0);

/// Lookup by name: square, square-noisy, pure-rotation, unstable-segments,
/// narrow-corridor. Throws ConfigError on unknown names.
Fixture by_name(const std::string& name, std::uint64_t seed = 0);

std::vector<std::string> names();

}  // namespace fixtures

}  // namespace rodom
