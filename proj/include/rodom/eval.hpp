#pragma once

#include <span>
#include <utility>
#include <vector>

#include "rodom/core.hpp"
#include "rodom/odometry.hpp"

namespace rodom {

struct AlignedPair {
  Pose2 est;
  Pose2 ref;
};

/// Matches every estimate pose to the reference interpolated at its
/// timestamp (linear in position, shortest-arc in yaw). Estimates farther
/// than `tol` from the reference time span are dropped; zero surviving
/// pairs raises NoOverlapError.
std::vector<AlignedPair> pair_by_time(const Trajectory& est,
                                      const Trajectory& ref, double tol);

/// sqrt(mean squared wrap(est.yaw - ref.yaw)), in degrees.
double yaw_rmse_deg(std::span<const AlignedPair> pairs);

/// Running sum of squared yaw errors, (t, deg^2) per pair.
std::vector<std::pair<double, double>> cumulative_sq_yaw_error(
    std::span<const AlignedPair> pairs);

struct RpeResult {
  double mean_m = 0.0;
  double rmse_m = 0.0;
  double sum_m = 0.0;
  std::vector<std::pair<double, double>> series;  // (t_j, per-step meters)
};

/// SE(2) relative pose error over consecutive pairs:
///   E = (P_ref,i^-1 P_ref,j)^-1 (P_est,i^-1 P_est,j)
/// scored by the translation norm of E.
RpeResult relative_pose_error(std::span<const AlignedPair> pairs);

struct UmeyamaResult {
  Pose2 transform;  // applied as p -> R p + t, yaw -> yaw + transform.yaw
  double scale = 1.0;
  Trajectory aligned;
};

/// Closed-form rigid alignment of the estimate onto the reference over
/// time-paired positions. Scale is only solved when with_scale is set.
UmeyamaResult umeyama_align_se2(const Trajectory& est, const Trajectory& ref,
                                double pairing_tol, bool with_scale = false);

struct MetricReport {
  double yaw_rmse_deg = 0.0;
  std::vector<std::pair<double, double>> cum_sq_yaw_err;  // (t, deg^2)
  double rpe_mean_m = 0.0;
  double rpe_rmse_m = 0.0;
  double rpe_sum_m = 0.0;
  std::vector<std::pair<double, double>> rpe_series;  // (t, m)
  int n_pairs = 0;
};

MetricReport compute_metrics(const Trajectory& est, const Trajectory& ref,
                             double pairing_tol);

}  // namespace rodom
