#include "rodom/velocity.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "rodom/errors.hpp"

namespace rodom {

RadialObservation project_radial(const DopplerTarget& target, double eps_planar) {
  const double planar = std::hypot(target.x, target.y);
  if (planar <= eps_planar)
    throw DegenerateProjectionError("target too close to the z-axis");
  const double r = std::sqrt(planar * planar + target.z * target.z);
  return {std::atan2(target.y, target.x), (planar / r) * target.doppler};
}

Vec2 solve_velocity_lsq(std::span<const RadialObservation> obs) {
  if (obs.size() < 2)
    throw DegenerateGeometryError("need at least 2 radial observations");
  // Normal equations of the 2-parameter sinusoid fit.
  double scc = 0, sss = 0, scs = 0, scv = 0, ssv = 0;
  for (const auto& o : obs) {
    const double c = std::cos(o.theta), s = std::sin(o.theta);
    scc += c * c;
    sss += s * s;
    scs += c * s;
    scv += c * o.v_r;
    ssv += s * o.v_r;
  }
  const double det = scc * sss - scs * scs;
  // det = sum_{i<j} sin^2(theta_i - theta_j); zero iff all azimuths coincide.
  const double scale = scc + sss;
  if (det <= 1e-12 * scale * scale)
    throw DegenerateGeometryError("all azimuths coincide; velocity unobservable");
  return {(sss * scv - scs * ssv) / det, (scc * ssv - scs * scv) / det};
}

BodyVelocity estimate_velocity(const std::vector<DopplerTarget>& frame,
                               const RansacParams& params, double t) {
  std::vector<RadialObservation> obs;
  obs.reserve(frame.size());
  for (const auto& tg : frame) {
    try {
      obs.push_back(project_radial(tg, params.eps_planar));
    } catch (const DegenerateProjectionError&) {
      // dropped
    }
  }
  if (obs.size() < static_cast<std::size_t>(std::max(params.min_inliers, 2)))
    throw EstimationFailedError("too few projectable targets");

  // Sorting makes seeded sampling independent of input order.
  std::sort(obs.begin(), obs.end(), [](const auto& a, const auto& b) {
    return a.theta != b.theta ? a.theta < b.theta : a.v_r < b.v_r;
  });

  std::mt19937_64 rng(params.seed);
  std::uniform_int_distribution<std::size_t> pick(0, obs.size() - 1);

  std::vector<std::size_t> best_inliers;
  double best_residual = 0.0;
  for (int it = 0; it < params.max_iterations; ++it) {
    const std::size_t i = pick(rng);
    const std::size_t j = pick(rng);
    if (i == j) continue;
    const auto& a = obs[i];
    const auto& b = obs[j];
    const double det = std::sin(b.theta - a.theta);
    if (std::abs(det) < 1e-9) continue;
    // Exact 2x2 solve of the minimal sample.
    const double vx = (a.v_r * std::sin(b.theta) - b.v_r * std::sin(a.theta)) / det;
    const double vy = (b.v_r * std::cos(a.theta) - a.v_r * std::cos(b.theta)) / det;

    std::vector<std::size_t> inliers;
    double sq = 0.0;
    for (std::size_t k = 0; k < obs.size(); ++k) {
      const double res =
          obs[k].v_r - vx * std::cos(obs[k].theta) - vy * std::sin(obs[k].theta);
      if (std::abs(res) < params.inlier_threshold) {
        inliers.push_back(k);
        sq += res * res;
      }
    }
    if (inliers.size() > best_inliers.size() ||
        (inliers.size() == best_inliers.size() && !inliers.empty() &&
         sq < best_residual)) {
      best_inliers = std::move(inliers);
      best_residual = sq;
    }
  }

  if (best_inliers.size() < static_cast<std::size_t>(params.min_inliers))
    throw EstimationFailedError("RANSAC consensus below min_inliers (" +
                                std::to_string(best_inliers.size()) + ")");

  std::vector<RadialObservation> consensus;
  consensus.reserve(best_inliers.size());
  for (auto k : best_inliers) consensus.push_back(obs[k]);
  const Vec2 field = solve_velocity_lsq(consensus);

  double sq = 0.0;
  for (const auto& o : consensus) {
    const double res = o.v_r - field.x * std::cos(o.theta) - field.y * std::sin(o.theta);
    sq += res * res;
  }

  BodyVelocity out;
  // Static world: the observed radial field is the negated ego velocity.
  out.vx = -field.x;
  out.vy = -field.y;
  out.t = t;
  out.n_inliers = static_cast<int>(consensus.size());
  out.residual_rms = std::sqrt(sq / consensus.size());
  return out;
}

Vec2 interpolate_velocity(const BodyVelocity& v_prev, const BodyVelocity& v_curr,
                          double t_c_prev, double t_c_curr) {
  const double dt_s = v_curr.t - v_prev.t;
  if (dt_s <= 0.0)
    throw InvalidTimestampsError("velocity samples not strictly ordered");
  const double mid = 0.5 * (t_c_curr + t_c_prev);
  const double f = (mid - v_prev.t) / dt_s;
  return {v_prev.vx + (v_curr.vx - v_prev.vx) * f,
          v_prev.vy + (v_curr.vy - v_prev.vy) * f};
}

}  // namespace rodom
