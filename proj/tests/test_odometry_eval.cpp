#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "rodom/core.hpp"
#include "rodom/errors.hpp"
#include "rodom/eval.hpp"
#include "rodom/odometry.hpp"
#include "rodom/sim.hpp"

using namespace rodom;

namespace {

Trajectory traj_from(const std::vector<Pose2>& poses) {
  Trajectory t;
  t.poses = poses;
  return t;
}

// Applies a fixed global transform g on the left of every pose.
Trajectory left_multiplied(const Trajectory& in, const Pose2& g) {
  Trajectory out;
  for (const auto& p : in.poses) {
    Pose2 q = se2_compose(g, p);
    q.t = p.t;
    out.poses.push_back(q);
  }
  return out;
}

}  // namespace

TEST_CASE("integrate_pose examples") {
  Pose2 origin{};
  FrameEstimate still;
  still.dt = 0.2;
  Pose2 p = integrate_pose(origin, still);
  CHECK(p.x == doctest::Approx(0.0));
  CHECK(p.y == doctest::Approx(0.0));
  CHECK(p.yaw == doctest::Approx(0.0));

  FrameEstimate fwd;
  fwd.v = {1.0, 0.0};
  fwd.dt = 0.2;
  p = integrate_pose(origin, fwd);
  CHECK(p.x == doctest::Approx(0.2));
  CHECK(p.y == doctest::Approx(0.0));

  // 90 degree turn while translating: the chord heading is 45 degrees
  FrameEstimate turn;
  turn.v = {1.0, 0.0};
  turn.dyaw = kPi / 2;
  turn.dt = 1.0;
  p = integrate_pose(origin, turn);
  CHECK(p.x == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-12));
  CHECK(p.y == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-12));
  CHECK(p.yaw == doctest::Approx(kPi / 2));
  CHECK(p.t == doctest::Approx(turn.t));
}

TEST_CASE("pair_by_time interpolates the reference") {
  // reference at 100 Hz, estimate at 5 Hz
  Trajectory ref, est;
  for (int i = 0; i <= 200; ++i) {
    double t = 0.01 * i;
    ref.poses.push_back({t, 2.0 * t, wrap_angle(0.3 * t), t});
  }
  for (int i = 0; i <= 9; ++i) {
    double t = 0.05 + 0.2 * i;
    est.poses.push_back({0.0, 0.0, 0.0, t});
  }
  auto pairs = pair_by_time(est, ref, 0.1);
  REQUIRE(pairs.size() == est.poses.size());
  for (const auto& pr : pairs) {
    CHECK(pr.ref.x == doctest::Approx(pr.ref.t).epsilon(1e-9));
    CHECK(pr.ref.y == doctest::Approx(2.0 * pr.ref.t).epsilon(1e-9));
    CHECK(pr.ref.yaw == doctest::Approx(0.3 * pr.ref.t).epsilon(1e-9));
    CHECK(pr.est.t == doctest::Approx(pr.ref.t));
  }
}

TEST_CASE("pair_by_time rejects disjoint spans") {
  Trajectory a = traj_from({{0, 0, 0, 0.0}, {0, 0, 0, 1.0}});
  Trajectory b = traj_from({{0, 0, 0, 10.0}, {0, 0, 0, 11.0}});
  CHECK_THROWS_AS(pair_by_time(a, b, 0.1), NoOverlapError);
}

TEST_CASE("yaw metrics on constant error") {
  std::vector<AlignedPair> pairs;
  double two_deg = 2.0 * kPi / 180.0;
  for (int i = 0; i < 10; ++i) {
    Pose2 ref{0, 0, 0.5, double(i)};
    Pose2 est{0, 0, wrap_angle(0.5 + two_deg), double(i)};
    pairs.push_back({est, ref});
  }
  CHECK(yaw_rmse_deg(pairs) == doctest::Approx(2.0).epsilon(1e-9));
  auto series = cumulative_sq_yaw_error(pairs);
  REQUIRE(series.size() == 10);
  CHECK(series.back().second == doctest::Approx(40.0).epsilon(1e-9));
  CHECK(series.front().second == doctest::Approx(4.0).epsilon(1e-9));

  // identical trajectories give zero
  for (auto& p : pairs) p.est = p.ref;
  CHECK(yaw_rmse_deg(pairs) == doctest::Approx(0.0));
}

TEST_CASE("relative pose error identities") {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  Trajectory ref;
  for (int i = 0; i < 20; ++i)
    ref.poses.push_back({u(rng), u(rng), ang(rng), double(i)});

  auto self_pairs = pair_by_time(ref, ref, 0.01);
  RpeResult r = relative_pose_error(self_pairs);
  CHECK(r.mean_m == doctest::Approx(0.0));
  CHECK(r.rmse_m == doctest::Approx(0.0));
  CHECK(r.sum_m == doctest::Approx(0.0));

  // a constant global offset leaves the relative error at zero
  Pose2 g{1.5, -2.0, 0.8, 0};
  Trajectory shifted = left_multiplied(ref, g);
  auto off_pairs = pair_by_time(shifted, ref, 0.01);
  r = relative_pose_error(off_pairs);
  CHECK(r.mean_m == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.series.size() == ref.poses.size() - 1);
}

TEST_CASE("relative pose error matches a homogeneous-matrix oracle") {
  std::mt19937_64 rng(73);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  Trajectory ref, est;
  for (int i = 0; i < 12; ++i) {
    ref.poses.push_back({u(rng), u(rng), ang(rng), double(i)});
    est.poses.push_back({u(rng), u(rng), ang(rng), double(i)});
  }
  auto pairs = pair_by_time(est, ref, 0.01);
  RpeResult r = relative_pose_error(pairs);
  REQUIRE(r.series.size() == pairs.size() - 1);

  double sum = 0.0, sq = 0.0;
  for (std::size_t i = 0; i + 1 < pairs.size(); ++i) {
    Pose2 dref = se2_compose(se2_inverse(pairs[i].ref), pairs[i + 1].ref);
    Pose2 dest = se2_compose(se2_inverse(pairs[i].est), pairs[i + 1].est);
    Pose2 e = se2_compose(se2_inverse(dref), dest);
    double step = std::hypot(e.x, e.y);
    CHECK(r.series[i].second == doctest::Approx(step).epsilon(1e-9));
    sum += step;
    sq += step * step;
  }
  CHECK(r.sum_m == doctest::Approx(sum).epsilon(1e-9));
  CHECK(r.mean_m == doctest::Approx(sum / r.series.size()).epsilon(1e-9));
  CHECK(r.rmse_m == doctest::Approx(std::sqrt(sq / r.series.size())).epsilon(1e-9));
}

TEST_CASE("umeyama alignment recovers a known rigid transform") {
  std::mt19937_64 rng(79);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  Trajectory ref;
  for (int i = 0; i < 30; ++i)
    ref.poses.push_back({u(rng), u(rng), 0.1 * i - 1.0, double(i)});

  // est = g^-1 applied to ref; alignment must recover g
  Pose2 g{1.0, 2.0, kPi / 6, 0};
  Trajectory est = left_multiplied(ref, se2_inverse(g));

  UmeyamaResult r = umeyama_align_se2(est, ref, 0.01);
  CHECK(r.scale == doctest::Approx(1.0));
  CHECK(r.transform.x == doctest::Approx(g.x).epsilon(1e-9));
  CHECK(r.transform.y == doctest::Approx(g.y).epsilon(1e-9));
  CHECK(wrap_angle(r.transform.yaw - g.yaw) ==
        doctest::Approx(0.0).epsilon(1e-9));
  REQUIRE(r.aligned.poses.size() == ref.poses.size());
  for (std::size_t i = 0; i < ref.poses.size(); ++i) {
    CHECK(r.aligned.poses[i].x == doctest::Approx(ref.poses[i].x).epsilon(1e-9));
    CHECK(r.aligned.poses[i].y == doctest::Approx(ref.poses[i].y).epsilon(1e-9));
  }

  // identity case
  UmeyamaResult id = umeyama_align_se2(ref, ref, 0.01);
  CHECK(std::abs(id.transform.x) < 1e-9);
  CHECK(std::abs(id.transform.y) < 1e-9);
  CHECK(std::abs(id.transform.yaw) < 1e-9);
}

TEST_CASE("umeyama alignment never increases the residual") {
  std::mt19937_64 rng(83);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::normal_distribution<double> n(0.0, 0.3);
  Trajectory ref, est;
  for (int i = 0; i < 40; ++i) {
    Pose2 p{u(rng), u(rng), 0.0, double(i)};
    ref.poses.push_back(p);
    est.poses.push_back({p.x + n(rng) + 1.0, p.y + n(rng) - 0.5, 0.0, p.t});
  }
  auto residual = [&](const Trajectory& tr) {
    double s = 0.0;
    for (std::size_t i = 0; i < tr.poses.size(); ++i) {
      double dx = tr.poses[i].x - ref.poses[i].x;
      double dy = tr.poses[i].y - ref.poses[i].y;
      s += dx * dx + dy * dy;
    }
    return s;
  };
  UmeyamaResult r = umeyama_align_se2(est, ref, 0.01);
  CHECK(residual(r.aligned) <= residual(est) + 1e-9);
}

TEST_CASE("umeyama rejects coincident positions") {
  Trajectory a = traj_from({{1, 1, 0, 0.0}, {1, 1, 0, 1.0}});
  CHECK_THROWS_AS(umeyama_align_se2(a, a, 0.01), DegenerateAlignmentError);
}

TEST_CASE("compute_metrics is consistent with its parts") {
  std::mt19937_64 rng(89);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  Trajectory ref, est;
  for (int i = 0; i < 15; ++i) {
    ref.poses.push_back({u(rng), u(rng), ang(rng), double(i)});
    est.poses.push_back({u(rng), u(rng), ang(rng), double(i)});
  }
  MetricReport m = compute_metrics(est, ref, 0.01);
  auto pairs = pair_by_time(est, ref, 0.01);
  RpeResult r = relative_pose_error(pairs);
  CHECK(m.n_pairs == int(pairs.size()));
  CHECK(m.yaw_rmse_deg == doctest::Approx(yaw_rmse_deg(pairs)));
  CHECK(m.rpe_mean_m == doctest::Approx(r.mean_m));
  CHECK(m.rpe_rmse_m == doctest::Approx(r.rmse_m));
  CHECK(m.rpe_sum_m == doctest::Approx(r.sum_m));
  CHECK(m.cum_sq_yaw_err.size() == pairs.size());
  CHECK(m.rpe_series.size() == pairs.size() - 1);
}

TEST_CASE("pipeline holds still on a stationary scene") {
  Scene sc;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  std::uniform_real_distribution<double> rad(2.0, 6.0);
  for (int i = 0; i < 120; ++i) {
    double a = ang(rng), r = rad(rng);
    sc.landmarks.push_back({{r * std::cos(a), r * std::sin(a)}, 8.0 + i % 5});
  }
  MotionProfile mp;
  mp.segments = {{2.0, 0.0, 0.0, 0.0}};
  SensorSpec schip{0.125, 8.0, 78.3 * kPi / 180.0, 10.0};
  SensorSpec cas{0.01, 7.6, 76.3 * kPi / 180.0, 5.0};
  SimOptions so;
  so.n_azimuth = 256;
  so.splat_sigma = 0.0;
  SimResult sr = simulate(sc, mp, schip, cas, so);

  PipelineConfig cfg;
  cfg.topk_k = 80;
  PipelineResult pr = run_pipeline(sr.dataset, cfg);
  REQUIRE(!pr.trajectory.poses.empty());
  CHECK(pr.trajectory.poses.front().t ==
        doctest::Approx(sr.dataset.cascade_frames.front().t));
  for (const auto& p : pr.trajectory.poses) {
    CHECK(std::abs(p.x) < 1e-6);
    CHECK(std::abs(p.y) < 1e-6);
    CHECK(std::abs(p.yaw) < 1e-4);
  }
  for (const auto& e : pr.estimates) {
    CHECK(std::abs(e.dyaw) < 1e-4);
    CHECK(e.dt > 0.0);
    CHECK(!e.icp_failed);
  }
}

TEST_CASE("pipeline tracks a straight constant-velocity run") {
  Scene sc;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> jit(-0.15, 0.15);
  for (double x = -3.0; x < 14.0; x += 0.5) {
    sc.landmarks.push_back({{x + jit(rng), 3.5 + jit(rng)}, 10.0});
    sc.landmarks.push_back({{x + jit(rng), -3.5 + jit(rng)}, 12.0});
  }
  MotionProfile mp;
  mp.segments = {{10.0, 1.0, 0.0, 0.0}};
  SensorSpec schip{0.125, 8.0, 78.3 * kPi / 180.0, 10.0};
  SensorSpec cas{0.01, 7.6, 76.3 * kPi / 180.0, 5.0};
  SimOptions so;
  so.n_azimuth = 256;
  so.splat_sigma = 0.0;
  SimResult sr = simulate(sc, mp, schip, cas, so);

  PipelineConfig cfg;
  cfg.topk_k = 60;
  PipelineResult pr = run_pipeline(sr.dataset, cfg);
  const Pose2& end = pr.trajectory.poses.back();
  const Pose2& gt = sr.ground_truth.poses.back();
  CHECK(std::hypot(end.x - gt.x, end.y - gt.y) < 0.02 * 10.0);
  CHECK(std::abs(wrap_angle(end.yaw - gt.yaw)) < 2.0 * kPi / 180.0);
  // timestamps mirror the cascade stream
  REQUIRE(pr.trajectory.poses.size() == sr.dataset.cascade_frames.size());
  for (std::size_t i = 0; i < pr.trajectory.poses.size(); ++i)
    CHECK(pr.trajectory.poses[i].t ==
          doctest::Approx(sr.dataset.cascade_frames[i].t));
}

TEST_CASE("pipeline is deterministic") {
  auto f = fixtures::narrow_corridor();
  SimResult sr = simulate(f.scene, f.motion, f.singlechip, f.cascade, f.options);
  PipelineConfig cfg;
  PipelineResult a = run_pipeline(sr.dataset, cfg);
  PipelineResult b = run_pipeline(sr.dataset, cfg);
  REQUIRE(a.trajectory.poses.size() == b.trajectory.poses.size());
  for (std::size_t i = 0; i < a.trajectory.poses.size(); ++i) {
    CHECK(a.trajectory.poses[i].x == b.trajectory.poses[i].x);
    CHECK(a.trajectory.poses[i].y == b.trajectory.poses[i].y);
    CHECK(a.trajectory.poses[i].yaw == b.trajectory.poses[i].yaw);
  }
}

TEST_CASE("pipeline rejects too-short datasets") {
  Dataset ds;
  ds.singlechip_spec = {0.125, 8.0, 1.3667, 10.0};
  ds.cascade_spec = {0.06, 7.6, 1.3319, 5.0};
  CHECK_THROWS_AS(run_pipeline(ds, PipelineConfig{}), InvalidParamsError);
}
