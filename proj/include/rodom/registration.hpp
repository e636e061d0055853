#pragma once

#include <vector>

#include "rodom/core.hpp"
#include "rodom/preprocess.hpp"

namespace rodom {

/// Parameters of the remove/neglect/match point sampling.
struct SamplingParams {
  double eps_min = 0.0;   // below: neglect; 0 disables the rule
  double eps_max = 1.0;   // above: remove for the rest of the run
  double alpha = 1.0;     // weight on squared range error [1/m^2]
  double beta = 10.0;     // weight on squared azimuth error [1/rad^2]
};

struct IcpParams {
  int max_iterations = 20;
  double rot_tolerance = 1e-4;  // radians, per-iteration yaw change
  // ROI used for the out-of-range neglect rule.
  double roi_max_range = 7.6;    // meters
  double roi_max_azimuth = 1.3319;  // radians (76.3 deg)
};

struct PointLabel {
  enum class Kind { Remove, Neglect, Match };
  Kind kind = Kind::Neglect;
  int target_index = -1;  // valid iff kind == Match
  double e_min = 0.0;
};

struct Classification {
  std::vector<PointLabel> labels;  // one per source point
};

struct IcpResult {
  double yaw = 0.0;  // radians; rotation taking source onto target
  int iterations = 0;
  int matched_pairs_final = 0;
  bool converged = false;
  bool degraded = false;  // two-way run where one direction failed
  std::vector<double> per_iteration_yaw;
};

struct WeightedPair {
  Vec2 source;
  Vec2 target;
  double weight = 0.0;  // >= 0
};

/// Translates the previous feature set by -v_c * dt_c (in Cartesian), so
/// only the rotation between frames remains. Points landing exactly on the
/// origin are dropped.
FeatureSet rectify(const FeatureSet& prev, const Vec2& v_c, double dt_c);

/// e = alpha (r_a - r_b)^2 + beta wrap(theta_a - theta_b)^2.
double pair_error(const PolarPoint& a, const PolarPoint& b,
                  const SamplingParams& p);

/// Labels each source point: remove if its closest target is farther than
/// eps_max; neglect if closer than eps_min or the source point is outside
/// the ROI; match (with the argmin target, ties to the lowest index)
/// otherwise. Throws NoTargetsError on an empty target set.
Classification classify(const FeatureSet& source, const FeatureSet& target,
                        const SamplingParams& p, const IcpParams& roi);

/// Intensity-weighted SO(2) Procrustes solve: with H = sum w_i x_i y_i^T,
/// H = U D V^T, the minimizer of sum w_i ||y_i - R x_i||^2 over proper
/// rotations is R = V diag(1, det(VU^T)) U^T; returns its angle. Weights
/// are normalized to sum 1 before the solve.
double weighted_rotation(const std::vector<WeightedPair>& pairs);

/// One-directional weighted ICP with remove/neglect/match sampling.
/// Removed points stay removed for the whole run; neglected points are
/// reconsidered each iteration. Only rotation is estimated.
IcpResult one_way_wicp(const FeatureSet& source, const FeatureSet& target,
                       const SamplingParams& sp, const IcpParams& ip);

/// Mean of the two-way weighted ICP: forward run registers curr onto
/// prev_rect, backward run the reverse; the combined yaw is
/// (yaw_fwd - yaw_bwd)/2. If exactly one direction fails its surviving yaw
/// is returned with the degraded flag set; if both fail, NoMatchesError.
IcpResult two_way_mwicp(const FeatureSet& prev_rect, const FeatureSet& curr,
                        const SamplingParams& sp, const IcpParams& ip);

}  // namespace rodom
