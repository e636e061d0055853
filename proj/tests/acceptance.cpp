// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. Criterion 8 needs the external dataset and is skipped (still
// passing) when it is not installed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "rodom/config.hpp"
#include "rodom/core.hpp"
#include "rodom/errors.hpp"
#include "rodom/eval.hpp"
#include "rodom/ingest.hpp"
#include "rodom/odometry.hpp"
#include "rodom/preprocess.hpp"
#include "rodom/registration.hpp"
#include "rodom/sim.hpp"
#include "rodom/velocity.hpp"

using namespace rodom;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", criterion, pass ? "PASS" : "FAIL",
              detail.c_str());
  if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

// Pipeline settings used with the simulator fixtures: tighter range gating
// (the fixtures use fine range bins, so range disagreement identifies bad
// matches) and a feature budget near the visible landmark count so Top-k
// does not pad with empty cells.
PipelineConfig fixture_config(int k = 90) {
  PipelineConfig cfg;
  cfg.topk_k = k;
  cfg.sampling.alpha = 25.0;
  return cfg;
}

double objective(const std::vector<WeightedPair>& pairs, double ang) {
  double s = 0.0;
  for (const auto& p : pairs) {
    const Vec2 d = p.target - p.source.rotated(ang);
    s += p.weight * d.dot(d);
  }
  return s;
}

// --- criterion 1: rotation solver vs brute-force grid search -------------

void criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  std::uniform_real_distribution<double> w(0.05, 3.0);

  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<WeightedPair> pairs;
    const int n = 3 + int(rng() % 10);
    for (int i = 0; i < n; ++i)
      pairs.push_back({{u(rng), u(rng)}, {u(rng), u(rng)}, w(rng)});

    const double got = weighted_rotation(pairs);

    double best = -kPi, best_val = objective(pairs, -kPi);
    for (double a = -kPi + 1e-4; a < kPi; a += 1e-4) {
      const double v = objective(pairs, a);
      if (v < best_val) {
        best_val = v;
        best = a;
      }
    }
    for (double a = best - 1e-4; a <= best + 1e-4; a += 1e-6) {
      const double v = objective(pairs, a);
      if (v < best_val) {
        best_val = v;
        best = a;
      }
    }
    worst = std::max(worst, std::abs(wrap_angle(got - best)));
  }
  const double dt = seconds_since(t0);
  report(1, worst < 1e-3 && dt < 10.0,
         fmt("rotation solver vs grid oracle: worst dev %.2e rad (< 1e-3), "
             "%.1f s (< 10)", worst, dt));
}

// --- criterion 2: velocity recovery under noise and outliers -------------

void criterion_2() {
  const auto t0 = std::chrono::steady_clock::now();
  int ok = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::mt19937_64 rng(1000 + trial);
    std::uniform_real_distribution<double> uv(-2.0, 2.0);
    std::uniform_real_distribution<double> th(-1.3, 1.3);
    std::uniform_real_distribution<double> rr(1.0, 7.0);
    std::normal_distribution<double> noise(0.0, 0.05);
    std::uniform_real_distribution<double> bias(1.0, 4.0);
    std::bernoulli_distribution sign(0.5);

    const double vx = uv(rng), vy = uv(rng);
    std::vector<DopplerTarget> frame;
    for (int i = 0; i < 50; ++i) {
      const double theta = th(rng), r = rr(rng);
      double d = -(vx * std::cos(theta) + vy * std::sin(theta)) + noise(rng);
      if (i % 5 == 0) d += (sign(rng) ? 1.0 : -1.0) * bias(rng);  // 20% movers
      frame.push_back({r * std::cos(theta), r * std::sin(theta), 0.0, d, 1.0});
    }
    RansacParams params;
    params.seed = trial;
    try {
      const BodyVelocity v = estimate_velocity(frame, params, 0.0);
      if (std::abs(v.vx - vx) <= 0.05 && std::abs(v.vy - vy) <= 0.05) ++ok;
    } catch (const EstimationFailedError&) {
    }
  }
  const double dt = seconds_since(t0);
  report(2, ok >= 990 && dt < 30.0,
         fmt("velocity within 0.05 m/s per axis in %d/1000 trials (>= 990), "
             "%.1f s (< 30)", ok, dt));
}

// --- criterion 3: closed-loop square path --------------------------------

void criterion_3() {
  const auto t0 = std::chrono::steady_clock::now();

  auto clean = fixtures::square_path(false);
  SimResult sr = simulate(clean.scene, clean.motion, clean.singlechip,
                          clean.cascade, clean.options);
  PipelineResult pr = run_pipeline(sr.dataset, fixture_config());
  const Pose2& end = pr.trajectory.poses.back();
  const Pose2& gt_end = sr.ground_truth.poses.back();
  const double final_yaw_deg =
      std::abs(wrap_angle(end.yaw - gt_end.yaw)) * 180.0 / kPi;
  const double endpoint_m = std::hypot(end.x - gt_end.x, end.y - gt_end.y);

  auto noisy = fixtures::square_path(true, 0);
  SimResult nr = simulate(noisy.scene, noisy.motion, noisy.singlechip,
                          noisy.cascade, noisy.options);
  PipelineResult np = run_pipeline(nr.dataset, fixture_config());
  double sq = 0.0;
  for (std::size_t i = 0; i < np.trajectory.poses.size(); ++i) {
    const double e = wrap_angle(np.trajectory.poses[i].yaw -
                                nr.ground_truth.poses[i].yaw);
    sq += e * e;
  }
  const double rmse_deg =
      std::sqrt(sq / np.trajectory.poses.size()) * 180.0 / kPi;

  const double dt = seconds_since(t0);
  const bool pass = final_yaw_deg <= 0.5 && endpoint_m <= 0.02 * 20.0 &&
                    rmse_deg <= 2.0 && dt < 60.0;
  report(3, pass,
         fmt("square path: clean final yaw %.3f deg (<= 0.5), endpoint "
             "%.3f m (<= 0.4), noisy yaw RMSE %.3f deg (<= 2), %.1f s (< 60)",
             final_yaw_deg, endpoint_m, rmse_deg, dt));
}

// --- criterion 4: metric identities --------------------------------------

void criterion_4() {
  std::mt19937_64 rng(401);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  Trajectory ref;
  for (int i = 0; i < 25; ++i)
    ref.poses.push_back({u(rng), u(rng), ang(rng), double(i)});

  const auto self_pairs = pair_by_time(ref, ref, 0.01);
  const double self_rpe = relative_pose_error(self_pairs).mean_m;

  const Pose2 g{1.3, -0.7, 0.9, 0};
  Trajectory moved;
  for (const auto& p : ref.poses) {
    Pose2 q = se2_compose(g, p);
    q.t = p.t;
    moved.poses.push_back(q);
  }
  const auto moved_pairs = pair_by_time(moved, ref, 0.01);
  const double moved_rpe = relative_pose_error(moved_pairs).mean_m;

  Trajectory est;
  for (const auto& p : ref.poses) {
    Pose2 q = se2_compose(se2_inverse(g), p);
    q.t = p.t;
    est.poses.push_back(q);
  }
  const UmeyamaResult um = umeyama_align_se2(est, ref, 0.01);
  const double um_err = std::max({std::abs(um.transform.x - g.x),
                                  std::abs(um.transform.y - g.y),
                                  std::abs(wrap_angle(um.transform.yaw - g.yaw))});

  const bool pass = self_rpe < 1e-12 && moved_rpe < 1e-12 && um_err < 1e-9;
  report(4, pass,
         fmt("metric identities: RPE(self) %.1e, RPE(global offset) %.1e "
             "(both ~ 0), umeyama recovery dev %.1e (< 1e-9)",
             self_rpe, moved_rpe, um_err));
}

// --- criterion 5: preprocessor oracle equivalence ------------------------

void criterion_5() {
  std::mt19937_64 rng(501);
  std::uniform_real_distribution<float> u(0.0f, 10.0f);
  CfarParams cp;
  cp.train_cells = 4;
  cp.guard_cells = 2;
  cp.threshold_factor = 2.0;

  int bad = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Heatmap h;
    h.n_range = 20 + rng() % 30;
    h.n_azimuth = 6 + rng() % 20;
    h.n_elevation = 1;
    h.range_res = 0.06;
    for (std::uint32_t a = 0; a < h.n_azimuth; ++a)
      h.azimuth_angles.push_back(-1.3 + 2.6 * (a + 0.5) / h.n_azimuth);
    h.intensity.resize(std::size_t(h.n_range) * h.n_azimuth);
    for (float& v : h.intensity) v = u(rng);

    auto cell = [&](const PolarPoint& p) {
      const int rb = int(std::lround(p.r / h.range_res - 0.5));
      int ab = -1;
      for (std::uint32_t a = 0; a < h.n_azimuth; ++a)
        if (std::abs(h.azimuth_angles[a] - p.theta) < 1e-12) ab = int(a);
      return std::pair<int, int>{rb, ab};
    };

    // Top-k vs full sort
    const int k = 1 + int(rng() % 40);
    struct Cell { float v; int r, a; };
    std::vector<Cell> cells;
    for (std::uint32_t r = 0; r < h.n_range; ++r)
      for (std::uint32_t a = 0; a < h.n_azimuth; ++a)
        cells.push_back({h.at(r, a), int(r), int(a)});
    std::sort(cells.begin(), cells.end(), [](const Cell& x, const Cell& y) {
      if (x.v != y.v) return x.v > y.v;
      if (x.r != y.r) return x.r < y.r;
      return x.a < y.a;
    });
    const FeatureSet tk = extract_topk(h, k);
    if (tk.points.size() != std::min<std::size_t>(k, cells.size())) ++bad;
    for (std::size_t i = 0; i < tk.points.size(); ++i)
      if (cell(tk.points[i]) != std::pair<int, int>{cells[i].r, cells[i].a}) {
        ++bad;
        break;
      }

    // Ray-max vs per-column scan
    const FeatureSet rm = extract_raymax(h);
    if (rm.points.size() != h.n_azimuth) ++bad;
    for (std::uint32_t a = 0; a < h.n_azimuth; ++a) {
      int best = 0;
      for (std::uint32_t r = 1; r < h.n_range; ++r)
        if (h.at(r, a) > h.at(best, a)) best = int(r);
      if (cell(rm.points[a]) != std::pair<int, int>{best, int(a)}) {
        ++bad;
        break;
      }
    }

    // CFAR vs direct threshold re-computation
    std::set<std::pair<int, int>> got;
    for (const auto& p : extract_cfar(h, cp).points) got.insert(cell(p));
    std::set<std::pair<int, int>> want;
    for (std::uint32_t a = 0; a < h.n_azimuth; ++a)
      for (int r = 0; r < int(h.n_range); ++r) {
        double sum = 0.0;
        int n = 0;
        for (int d = cp.guard_cells + 1; d <= cp.guard_cells + cp.train_cells;
             ++d)
          for (const int rr : {r - d, r + d})
            if (rr >= 0 && rr < int(h.n_range)) {
              sum += h.at(rr, a);
              ++n;
            }
        if (h.at(r, a) > cp.threshold_factor * (sum / n))
          want.insert({r, int(a)});
      }
    if (got != want) ++bad;
  }
  report(5, bad == 0,
         fmt("preprocessor oracle equivalence on 100 random heatmaps: "
             "%d mismatches (= 0)", bad));
}

// --- criterion 6: pure-rotation observability split ----------------------

void criterion_6() {
  auto f = fixtures::pure_rotation();
  SimResult sr = simulate(f.scene, f.motion, f.singlechip, f.cascade, f.options);
  PipelineResult pr = run_pipeline(sr.dataset, fixture_config());
  double vmax = 0.0, dyaw_err_deg = 0.0;
  for (std::size_t i = 0; i < pr.estimates.size(); ++i) {
    const auto& e = pr.estimates[i];
    vmax = std::max(vmax, std::hypot(e.v.x, e.v.y));
    const double gt_dyaw = wrap_angle(sr.ground_truth.poses[i + 1].yaw -
                                      sr.ground_truth.poses[i].yaw);
    dyaw_err_deg = std::max(
        dyaw_err_deg, std::abs(wrap_angle(e.dyaw - gt_dyaw)) * 180.0 / kPi);
  }
  report(6, vmax <= 0.02 && dyaw_err_deg <= 0.2,
         fmt("pure rotation: max |v| %.4f m/s (<= 0.02), max per-frame yaw "
             "dev %.3f deg (<= 0.2)", vmax, dyaw_err_deg));
}

// --- criterion 7: method ordering on the noisy fixture -------------------

void criterion_7() {
  const IcpVariant variants[3] = {IcpVariant::SamplingTwoWay,
                                  IcpVariant::SamplingOneWay, IcpVariant::Plain};
  double mean_rpe[3] = {0.0, 0.0, 0.0};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto f = fixtures::square_path(true, seed);
    SimResult sr =
        simulate(f.scene, f.motion, f.singlechip, f.cascade, f.options);
    for (int vi = 0; vi < 3; ++vi) {
      // The ordering comparison runs all variants at the stock feature
      // budget so the plain baseline is not starved.
      PipelineConfig cfg = fixture_config(200);
      cfg.icp_variant = variants[vi];
      const PipelineResult pr = run_pipeline(sr.dataset, cfg);
      const auto pairs = pair_by_time(pr.trajectory, sr.ground_truth, 0.05);
      mean_rpe[vi] += relative_pose_error(pairs).mean_m / 10.0;
    }
  }
  const bool pass =
      mean_rpe[0] <= mean_rpe[1] && mean_rpe[1] <= mean_rpe[2];
  report(7, pass,
         fmt("10-seed mean RPE ordering: mwICP %.6f <= wICP %.6f <= plain "
             "%.6f", mean_rpe[0], mean_rpe[1], mean_rpe[2]));
}

// --- criterion 8: external dataset (optional) ----------------------------

void criterion_8() {
  const char* root = std::getenv("RODOM_COLORADAR_DIR");
  if (!root || !fs::is_directory(root)) {
    std::printf(
        "criterion 8: SKIP  external dataset not installed (set "
        "RODOM_COLORADAR_DIR to a directory with ec_hallway0/ and aspen5/ "
        "plus adapter.cfg to enable)\n");
    return;
  }
  struct Target {
    const char* name;
    double yaw_rmse_deg;  // reference values to stay within 2x of
    double rpe_m;
  };
  const Target targets[] = {{"ec_hallway0", 2.06, 0.0086},
                            {"aspen5", 1.35, 0.0066}};
  bool pass = true;
  std::string detail = "external dataset:";
  for (const Target& tg : targets) {
    const fs::path dir = fs::path(root) / tg.name;
    const fs::path cfg_path = fs::path(root) / "adapter.cfg";
    if (!fs::is_directory(dir) || !fs::exists(cfg_path)) {
      detail += fmt(" %s missing;", tg.name);
      pass = false;
      continue;
    }
    try {
      const KvFile kv = KvFile::parse_file(cfg_path);
      ColoradarAdapterConfig acfg;
      acfg.n_range = std::uint32_t(kv.get_int("n_range", 0));
      acfg.n_azimuth = std::uint32_t(kv.get_int("n_azimuth", 0));
      acfg.n_elevation = std::uint32_t(kv.get_int("n_elevation", 1));
      acfg.range_res = kv.get_double("range_res", 0.0);
      acfg.max_azimuth = kv.get_double("max_azimuth_deg", 0.0) * kPi / 180.0;
      acfg.big_endian = kv.get_int("big_endian", 0) != 0;
      acfg.element_order = kv.get_string("element_order", "rae");
      acfg.log_input = kv.get_int("log_input", 0) != 0;
      const Dataset ds = load_coloradar_adapter(dir, acfg);
      Trajectory ref;
      ref.poses = ds.ground_truth;

      PipelineConfig cfg;  // stock parameters, Top-k 200, two-way
      cfg.icp.roi_max_range = ds.cascade_spec.max_range;
      cfg.icp.roi_max_azimuth = ds.cascade_spec.max_azimuth;
      const PipelineResult pr = run_pipeline(ds, cfg);
      const MetricReport m = compute_metrics(
          pr.trajectory, ref, 0.5 / ds.cascade_spec.framerate);
      const bool ok = m.yaw_rmse_deg <= 2.0 * tg.yaw_rmse_deg &&
                      m.rpe_mean_m <= 2.0 * tg.rpe_m;
      detail += fmt(" %s yaw %.2f deg (<= %.2f) rpe %.4f m (<= %.4f);",
                    tg.name, m.yaw_rmse_deg, 2.0 * tg.yaw_rmse_deg,
                    m.rpe_mean_m, 2.0 * tg.rpe_m);
      pass = pass && ok;
    } catch (const Error& e) {
      detail += fmt(" %s error: %s;", tg.name, e.what());
      pass = false;
    }
  }
  report(8, pass, detail);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
