#include "rodom/registration.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "rodom/errors.hpp"

namespace rodom {
namespace {

bool in_roi(const PolarPoint& p, const IcpParams& ip) {
  return p.r <= ip.roi_max_range && std::abs(p.theta) <= ip.roi_max_azimuth;
}

Classification classify_impl(const std::vector<PolarPoint>& source,
                             const std::vector<PolarPoint>& target,
                             const SamplingParams& p, const IcpParams& roi,
                             const std::vector<char>* removed) {
  if (target.empty()) throw NoTargetsError("classify: empty target set");
  Classification out;
  out.labels.resize(source.size());
  for (std::size_t i = 0; i < source.size(); ++i) {
    auto& lab = out.labels[i];
    if (removed && (*removed)[i]) {
      lab.kind = PointLabel::Kind::Remove;
      continue;
    }
    double e_min = pair_error(source[i], target[0], p);
    int argmin = 0;
    for (std::size_t j = 1; j < target.size(); ++j) {
      const double e = pair_error(source[i], target[j], p);
      if (e < e_min) {  // strict: ties keep the lowest index
        e_min = e;
        argmin = static_cast<int>(j);
      }
    }
    lab.e_min = e_min;
    if (e_min > p.eps_max) {
      lab.kind = PointLabel::Kind::Remove;
    } else if (e_min < p.eps_min || !in_roi(source[i], roi)) {
      lab.kind = PointLabel::Kind::Neglect;
    } else {
      lab.kind = PointLabel::Kind::Match;
      lab.target_index = argmin;
    }
  }
  return out;
}

}  // namespace

FeatureSet rectify(const FeatureSet& prev, const Vec2& v_c, double dt_c) {
  if (dt_c <= 0.0) throw InvalidTimestampsError("rectify: dt_c must be > 0");
  FeatureSet out;
  out.method = prev.method;
  out.t = prev.t;
  out.points.reserve(prev.points.size());
  for (const auto& p : prev.points) {
    const Vec2 moved = polar_to_cart(p) - v_c * dt_c;
    if (moved.x == 0.0 && moved.y == 0.0) continue;  // undefined azimuth
    out.points.push_back(cart_to_polar(moved, p.intensity));
  }
  return out;
}

double pair_error(const PolarPoint& a, const PolarPoint& b,
                  const SamplingParams& p) {
  const double dr = a.r - b.r;
  const double dth = wrap_angle(a.theta - b.theta);
  return p.alpha * dr * dr + p.beta * dth * dth;
}

Classification classify(const FeatureSet& source, const FeatureSet& target,
                        const SamplingParams& p, const IcpParams& roi) {
  return classify_impl(source.points, target.points, p, roi, nullptr);
}

double weighted_rotation(const std::vector<WeightedPair>& pairs) {
  if (pairs.empty())
    throw InvalidParamsError("weighted_rotation: no pairs");
  double wsum = 0.0;
  for (const auto& p : pairs) {
    if (p.weight < 0.0)
      throw InvalidParamsError("weighted_rotation: negative weight");
    wsum += p.weight;
  }
  if (wsum <= 0.0)
    throw DegenerateWeightsError("weighted_rotation: zero weight sum");

  Eigen::Matrix2d H = Eigen::Matrix2d::Zero();
  for (const auto& p : pairs) {
    const double w = p.weight / wsum;
    H(0, 0) += w * p.source.x * p.target.x;
    H(0, 1) += w * p.source.x * p.target.y;
    H(1, 0) += w * p.source.y * p.target.x;
    H(1, 1) += w * p.source.y * p.target.y;
  }
  if (H.norm() < 1e-15)
    throw UndefinedRotationError("weighted_rotation: zero cross-covariance");

  Eigen::JacobiSVD<Eigen::Matrix2d> svd(H, Eigen::ComputeFullU |
                                               Eigen::ComputeFullV);
  const Eigen::Matrix2d U = svd.matrixU();
  const Eigen::Matrix2d V = svd.matrixV();
  Eigen::Matrix2d D = Eigen::Matrix2d::Identity();
  D(1, 1) = (V * U.transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  const Eigen::Matrix2d R = V * D * U.transpose();
  return std::atan2(R(1, 0), R(0, 0));
}

IcpResult one_way_wicp(const FeatureSet& source, const FeatureSet& target,
                       const SamplingParams& sp, const IcpParams& ip) {
  if (source.points.empty()) throw NoMatchesError("one_way_wicp: empty source");
  if (target.points.empty()) throw NoTargetsError("one_way_wicp: empty target");

  std::vector<PolarPoint> src = source.points;  // rotated in place
  std::vector<char> removed(src.size(), 0);

  IcpResult res;
  double total = 0.0;
  for (int it = 0; it < ip.max_iterations; ++it) {
    const Classification cls =
        classify_impl(src, target.points, sp, ip, &removed);

    std::vector<WeightedPair> pairs;
    for (std::size_t i = 0; i < src.size(); ++i) {
      const auto& lab = cls.labels[i];
      if (lab.kind == PointLabel::Kind::Remove) {
        removed[i] = 1;
      } else if (lab.kind == PointLabel::Kind::Match) {
        const auto& tgt = target.points[lab.target_index];
        pairs.push_back({polar_to_cart(src[i]), polar_to_cart(tgt),
                         std::min(src[i].intensity, tgt.intensity)});
      }
    }
    if (pairs.empty())
      throw NoMatchesError("one_way_wicp: all points removed or neglected");

    double dyaw;
    try {
      dyaw = weighted_rotation(pairs);
    } catch (const DegenerateWeightsError&) {
      throw NoMatchesError("one_way_wicp: matched pairs carry zero weight");
    }

    total = wrap_angle(total + dyaw);
    // Rotation about the sensor origin is an azimuth shift in polar form.
    for (std::size_t i = 0; i < src.size(); ++i)
      if (!removed[i]) src[i].theta = wrap_angle(src[i].theta + dyaw);

    res.iterations = it + 1;
    res.matched_pairs_final = static_cast<int>(pairs.size());
    res.per_iteration_yaw.push_back(total);
    if (std::abs(dyaw) < ip.rot_tolerance) {
      res.converged = true;
      break;
    }
  }
  res.yaw = total;
  return res;
}

IcpResult two_way_mwicp(const FeatureSet& prev_rect, const FeatureSet& curr,
                        const SamplingParams& sp, const IcpParams& ip) {
  IcpResult fwd, bwd;
  bool fwd_ok = true, bwd_ok = true;
  try {
    fwd = one_way_wicp(curr, prev_rect, sp, ip);
  } catch (const NoMatchesError&) {
    fwd_ok = false;
  }
  try {
    bwd = one_way_wicp(prev_rect, curr, sp, ip);
  } catch (const NoMatchesError&) {
    bwd_ok = false;
  }
  if (!fwd_ok && !bwd_ok)
    throw NoMatchesError("two_way_mwicp: both directions failed");

  IcpResult res;
  if (fwd_ok && bwd_ok) {
    // The two directions estimate opposite-sign rotations.
    res.yaw = wrap_angle(0.5 * (fwd.yaw - bwd.yaw));
    res.iterations = std::max(fwd.iterations, bwd.iterations);
    res.matched_pairs_final =
        std::min(fwd.matched_pairs_final, bwd.matched_pairs_final);
    res.converged = fwd.converged && bwd.converged;
    res.per_iteration_yaw = fwd.per_iteration_yaw;
  } else {
    const IcpResult& ok = fwd_ok ? fwd : bwd;
    res = ok;
    res.yaw = fwd_ok ? ok.yaw : wrap_angle(-ok.yaw);
    res.degraded = true;
  }
  return res;
}

}  // namespace rodom
