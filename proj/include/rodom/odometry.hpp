#pragma once

#include <vector>

#include "rodom/core.hpp"
#include "rodom/ingest.hpp"
#include "rodom/preprocess.hpp"
#include "rodom/registration.hpp"
#include "rodom/velocity.hpp"

namespace rodom {

enum class FallbackPolicy { HoldLast, ZeroMotion };

/// Which ICP flavour the pipeline runs for the yaw increment.
///   Plain          one-way, no sampling (every source point matches its NN)
///   SamplingOneWay one-way with remove/neglect/match sampling
///   SamplingTwoWay mean of the bidirectional weighted ICP
enum class IcpVariant { Plain, SamplingOneWay, SamplingTwoWay };

struct PipelineConfig {
  PreprocessMethod preprocessor = PreprocessMethod::TopK;
  int topk_k = 200;
  CfarParams cfar;
  SamplingParams sampling;
  IcpParams icp;
  RansacParams ransac;
  FallbackPolicy fallback_policy = FallbackPolicy::HoldLast;
  IcpVariant icp_variant = IcpVariant::SamplingTwoWay;
};

struct FrameEstimate {
  double t = 0.0;      // cascade frame timestamp (end of the interval)
  Vec2 v;              // body velocity at the interval midpoint, m/s
  double dyaw = 0.0;   // radians over the interval
  double dt = 0.0;     // seconds
  bool velocity_fallback = false;
  bool icp_degraded = false;
  bool icp_failed = false;
};

struct Trajectory {
  std::vector<Pose2> poses;  // strictly increasing timestamps
};

struct PipelineResult {
  Trajectory trajectory;
  std::vector<FrameEstimate> estimates;
};

/// Midpoint pose integration: the position advances along the chord heading
/// prev.yaw + dyaw/2.
Pose2 integrate_pose(const Pose2& prev, const FrameEstimate& est);

/// Runs the full per-frame pipeline over every consecutive cascade pair:
/// bracket velocities, interpolate to the interval midpoint, preprocess,
/// rectify, register, integrate. The first cascade frame anchors the
/// identity pose.
PipelineResult run_pipeline(const Dataset& ds, const PipelineConfig& cfg);

}  // namespace rodom
