#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rodom/core.hpp"
#include "rodom/ingest.hpp"

namespace rodom {

/// Doppler return projected to the xy plane: v_r at azimuth theta.
struct RadialObservation {
  double theta = 0.0;  // radians
  double v_r = 0.0;    // m/s
};

/// Planar body velocity estimated from one single-chip frame.
struct BodyVelocity {
  double vx = 0.0;
  double vy = 0.0;
  double t = 0.0;
  int n_inliers = 0;
  double residual_rms = 0.0;
};

struct RansacParams {
  int max_iterations = 100;
  double inlier_threshold = 0.1;  // m/s
  int min_inliers = 5;
  std::uint64_t seed = 0;
  // Targets with planar range below this are dropped (projection blows up
  // near the z-axis).
  double eps_planar = 0.05;  // m
};

/// Projects a 3D Doppler target into the plane:
///   v_r = (sqrt(x^2+y^2)/r) * v_d,  theta = atan2(y, x).
/// Throws DegenerateProjectionError for targets too close to the z-axis.
RadialObservation project_radial(const DopplerTarget& target,
                                 double eps_planar = 0.05);

/// Least squares fit of v_r(theta) = vx cos(theta) + vy sin(theta).
/// Returns the raw fitted field coefficients (no ego-motion sign flip).
/// Throws DegenerateGeometryError when all azimuths coincide.
Vec2 solve_velocity_lsq(std::span<const RadialObservation> obs);

/// RANSAC over 2-point minimal samples followed by a least-squares refit on
/// the largest consensus set. The returned value is the sensor ego-velocity,
/// i.e. the negation of the fitted static-world radial field.
/// Deterministic for a fixed seed: observations are sorted before sampling.
/// Throws EstimationFailedError when the best consensus is below min_inliers.
BodyVelocity estimate_velocity(const std::vector<DopplerTarget>& frame,
                               const RansacParams& params, double t);

/// Linear interpolation of two single-chip velocities to the midpoint of a
/// cascade frame interval:
///   v_c = (v_t - v_{t-1})/dt_s * ((t_ct + t_ct-1)/2 - t_st-1) + v_{t-1}.
Vec2 interpolate_velocity(const BodyVelocity& v_prev, const BodyVelocity& v_curr,
                          double t_c_prev, double t_c_curr);

}  // namespace rodom
