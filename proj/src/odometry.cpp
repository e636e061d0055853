#include "rodom/odometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rodom/errors.hpp"

namespace rodom {
namespace {

FeatureSet preprocess_frame(const Heatmap& h, const PipelineConfig& cfg) {
  const Heatmap flat = collapse_elevation(h);
  switch (cfg.preprocessor) {
    case PreprocessMethod::Cfar:
      return extract_cfar(flat, cfg.cfar);
    case PreprocessMethod::RayMax:
      return extract_raymax(flat);
    case PreprocessMethod::TopK:
    default:
      return extract_topk(flat, cfg.topk_k);
  }
}

// Per-frame velocities with the fallback policy applied on RANSAC failure.
struct VelocityTrack {
  std::vector<BodyVelocity> velocities;
  std::vector<char> fallback;
};

VelocityTrack estimate_velocities(const Dataset& ds, const PipelineConfig& cfg) {
  VelocityTrack out;
  BodyVelocity last{};
  bool have_last = false;
  for (const auto& frame : ds.singlechip_frames) {
    BodyVelocity v;
    bool failed = false;
    try {
      v = estimate_velocity(frame.targets, cfg.ransac, frame.t);
    } catch (const EstimationFailedError&) {
      failed = true;
    }
    if (failed) {
      v = BodyVelocity{};
      v.t = frame.t;
      if (cfg.fallback_policy == FallbackPolicy::HoldLast && have_last) {
        v.vx = last.vx;
        v.vy = last.vy;
      }
    } else {
      last = v;
      have_last = true;
    }
    out.velocities.push_back(v);
    out.fallback.push_back(failed ? 1 : 0);
  }
  return out;
}

// Single-chip pair bracketing the cascade-interval midpoint: the latest
// frame with t <= midpoint and its successor, clamped at the stream edges.
std::pair<std::size_t, std::size_t> bracket(const std::vector<BodyVelocity>& vs,
                                            double midpoint) {
  std::size_t lo = 0;
  for (std::size_t i = 0; i < vs.size(); ++i)
    if (vs[i].t <= midpoint) lo = i;
  if (lo + 1 >= vs.size()) lo = vs.size() - 2;
  return {lo, lo + 1};
}

}  // namespace

Pose2 integrate_pose(const Pose2& prev, const FrameEstimate& est) {
  if (est.dt <= 0.0) throw InvalidTimestampsError("integrate_pose: dt <= 0");
  const double heading = prev.yaw + 0.5 * est.dyaw;
  const Vec2 step = est.v.rotated(heading) * est.dt;
  Pose2 out;
  out.x = prev.x + step.x;
  out.y = prev.y + step.y;
  out.yaw = wrap_angle(prev.yaw + est.dyaw);
  out.t = est.t;
  return out;
}

PipelineResult run_pipeline(const Dataset& ds, const PipelineConfig& cfg) {
  if (ds.cascade_frames.size() < 2)
    throw InvalidParamsError("run_pipeline: need at least 2 cascade frames");
  if (ds.singlechip_frames.size() < 2)
    throw InvalidParamsError("run_pipeline: need at least 2 single-chip frames");

  const VelocityTrack track = estimate_velocities(ds, cfg);

  // Sampling disabled entirely for the plain weighted ICP baseline.
  SamplingParams sp = cfg.sampling;
  IcpParams ip = cfg.icp;
  if (cfg.icp_variant == IcpVariant::Plain) {
    sp.eps_min = 0.0;
    sp.eps_max = std::numeric_limits<double>::infinity();
    ip.roi_max_range = std::numeric_limits<double>::infinity();
    ip.roi_max_azimuth = std::numeric_limits<double>::infinity();
  }

  PipelineResult out;
  Pose2 pose;
  pose.t = ds.cascade_frames.front().t;
  out.trajectory.poses.push_back(pose);

  FeatureSet prev_features = preprocess_frame(ds.cascade_frames.front(), cfg);

  for (std::size_t i = 1; i < ds.cascade_frames.size(); ++i) {
    const Heatmap& curr_map = ds.cascade_frames[i];
    const double t_prev = ds.cascade_frames[i - 1].t;
    const double t_curr = curr_map.t;
    const double dt_c = t_curr - t_prev;

    FrameEstimate est;
    est.t = t_curr;
    est.dt = dt_c;

    const auto [lo, hi] = bracket(track.velocities, 0.5 * (t_prev + t_curr));
    est.velocity_fallback = track.fallback[lo] || track.fallback[hi];
    est.v = interpolate_velocity(track.velocities[lo], track.velocities[hi],
                                 t_prev, t_curr);

    FeatureSet curr_features = preprocess_frame(curr_map, cfg);
    const FeatureSet prev_rect = rectify(prev_features, est.v, dt_c);

    try {
      switch (cfg.icp_variant) {
        case IcpVariant::SamplingTwoWay: {
          const IcpResult r = two_way_mwicp(prev_rect, curr_features, sp, ip);
          est.dyaw = r.yaw;
          est.icp_degraded = r.degraded;
          break;
        }
        case IcpVariant::SamplingOneWay:
        case IcpVariant::Plain: {
          // Source prev, target curr estimates the inverse body rotation.
          const IcpResult r = one_way_wicp(prev_rect, curr_features, sp, ip);
          est.dyaw = wrap_angle(-r.yaw);
          break;
        }
      }
    } catch (const NoMatchesError&) {
      est.dyaw = 0.0;
      est.icp_failed = true;
    }

    pose = integrate_pose(pose, est);
    out.trajectory.poses.push_back(pose);
    out.estimates.push_back(est);
    prev_features = std::move(curr_features);
  }
  return out;
}

}  // namespace rodom
