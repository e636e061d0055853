#include "rodom/eval.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "rodom/errors.hpp"

namespace rodom {
namespace {

Pose2 interp_pose(const Pose2& a, const Pose2& b, double t) {
  const double dt = b.t - a.t;
  const double f = dt > 0.0 ? (t - a.t) / dt : 0.0;
  Pose2 out;
  out.x = a.x + (b.x - a.x) * f;
  out.y = a.y + (b.y - a.y) * f;
  out.yaw = wrap_angle(a.yaw + wrap_angle(b.yaw - a.yaw) * f);  // shortest arc
  out.t = t;
  return out;
}

}  // namespace

std::vector<AlignedPair> pair_by_time(const Trajectory& est,
                                      const Trajectory& ref, double tol) {
  if (est.poses.empty() || ref.poses.empty())
    throw NoOverlapError("pair_by_time: empty trajectory");
  std::vector<AlignedPair> out;
  std::size_t dropped = 0;
  for (const auto& e : est.poses) {
    if (e.t < ref.poses.front().t - tol || e.t > ref.poses.back().t + tol) {
      ++dropped;
      continue;
    }
    // Bracketing reference samples; clamp outside the span (within tol).
    const auto it = std::lower_bound(
        ref.poses.begin(), ref.poses.end(), e.t,
        [](const Pose2& p, double t) { return p.t < t; });
    Pose2 r;
    if (it == ref.poses.begin()) {
      r = ref.poses.front();
      r.t = e.t;
    } else if (it == ref.poses.end()) {
      r = ref.poses.back();
      r.t = e.t;
    } else {
      r = interp_pose(*(it - 1), *it, e.t);
    }
    out.push_back({e, r});
  }
  if (out.empty())
    throw NoOverlapError("pair_by_time: no estimates within the reference span");
  (void)dropped;
  return out;
}

double yaw_rmse_deg(std::span<const AlignedPair> pairs) {
  if (pairs.empty()) throw InvalidParamsError("yaw_rmse: no pairs");
  double sq = 0.0;
  for (const auto& p : pairs) {
    const double e = wrap_angle(p.est.yaw - p.ref.yaw);
    sq += e * e;
  }
  return std::sqrt(sq / pairs.size()) * 180.0 / kPi;
}

std::vector<std::pair<double, double>> cumulative_sq_yaw_error(
    std::span<const AlignedPair> pairs) {
  std::vector<std::pair<double, double>> out;
  out.reserve(pairs.size());
  double acc = 0.0;
  for (const auto& p : pairs) {
    const double e = wrap_angle(p.est.yaw - p.ref.yaw) * 180.0 / kPi;
    acc += e * e;
    out.emplace_back(p.est.t, acc);
  }
  return out;
}

RpeResult relative_pose_error(std::span<const AlignedPair> pairs) {
  if (pairs.size() < 2)
    throw InvalidParamsError("relative_pose_error: need at least 2 pairs");
  RpeResult out;
  double sq = 0.0;
  for (std::size_t i = 0; i + 1 < pairs.size(); ++i) {
    const Pose2 d_ref =
        se2_compose(se2_inverse(pairs[i].ref), pairs[i + 1].ref);
    const Pose2 d_est =
        se2_compose(se2_inverse(pairs[i].est), pairs[i + 1].est);
    const Pose2 err = se2_compose(se2_inverse(d_ref), d_est);
    const double e = std::hypot(err.x, err.y);
    out.series.emplace_back(pairs[i + 1].est.t, e);
    out.sum_m += e;
    sq += e * e;
  }
  const double n = static_cast<double>(out.series.size());
  out.mean_m = out.sum_m / n;
  out.rmse_m = std::sqrt(sq / n);
  return out;
}

UmeyamaResult umeyama_align_se2(const Trajectory& est, const Trajectory& ref,
                                double pairing_tol, bool with_scale) {
  const auto pairs = pair_by_time(est, ref, pairing_tol);
  if (pairs.size() < 2)
    throw DegenerateAlignmentError("umeyama: need at least 2 paired positions");

  Eigen::Vector2d mean_e = Eigen::Vector2d::Zero();
  Eigen::Vector2d mean_r = Eigen::Vector2d::Zero();
  for (const auto& p : pairs) {
    mean_e += Eigen::Vector2d(p.est.x, p.est.y);
    mean_r += Eigen::Vector2d(p.ref.x, p.ref.y);
  }
  mean_e /= pairs.size();
  mean_r /= pairs.size();

  Eigen::Matrix2d H = Eigen::Matrix2d::Zero();
  double var_e = 0.0;
  for (const auto& p : pairs) {
    const Eigen::Vector2d de = Eigen::Vector2d(p.est.x, p.est.y) - mean_e;
    const Eigen::Vector2d dr = Eigen::Vector2d(p.ref.x, p.ref.y) - mean_r;
    H += dr * de.transpose();
    var_e += de.squaredNorm();
  }
  H /= pairs.size();
  var_e /= pairs.size();
  if (H.norm() < 1e-15 || var_e < 1e-30)
    throw DegenerateAlignmentError("umeyama: coincident positions");

  Eigen::JacobiSVD<Eigen::Matrix2d> svd(H, Eigen::ComputeFullU |
                                               Eigen::ComputeFullV);
  Eigen::Matrix2d S = Eigen::Matrix2d::Identity();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0)
    S(1, 1) = -1.0;
  const Eigen::Matrix2d R = svd.matrixU() * S * svd.matrixV().transpose();

  double scale = 1.0;
  if (with_scale)
    scale = (svd.singularValues().asDiagonal() * S).trace() / var_e;

  const Eigen::Vector2d t = mean_r - scale * R * mean_e;

  UmeyamaResult out;
  out.scale = scale;
  out.transform.x = t.x();
  out.transform.y = t.y();
  out.transform.yaw = std::atan2(R(1, 0), R(0, 0));

  out.aligned.poses.reserve(est.poses.size());
  for (const auto& p : est.poses) {
    const Eigen::Vector2d q = scale * (R * Eigen::Vector2d(p.x, p.y)) + t;
    Pose2 a;
    a.x = q.x();
    a.y = q.y();
    a.yaw = wrap_angle(p.yaw + out.transform.yaw);
    a.t = p.t;
    out.aligned.poses.push_back(a);
  }
  return out;
}

MetricReport compute_metrics(const Trajectory& est, const Trajectory& ref,
                             double pairing_tol) {
  const auto pairs = pair_by_time(est, ref, pairing_tol);
  MetricReport out;
  out.n_pairs = static_cast<int>(pairs.size());
  out.yaw_rmse_deg = yaw_rmse_deg(pairs);
  out.cum_sq_yaw_err = cumulative_sq_yaw_error(pairs);
  if (pairs.size() >= 2) {
    const RpeResult rpe = relative_pose_error(pairs);
    out.rpe_mean_m = rpe.mean_m;
    out.rpe_rmse_m = rpe.rmse_m;
    out.rpe_sum_m = rpe.sum_m;
    out.rpe_series = rpe.series;
  }
  return out;
}

}  // namespace rodom
