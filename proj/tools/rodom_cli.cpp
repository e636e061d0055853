// Command-line front end: run odometry, evaluate trajectories, generate
// synthetic datasets, and sweep preprocessor / ICP variants.

#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "rodom/config.hpp"
#include "rodom/errors.hpp"
#include "rodom/eval.hpp"
#include "rodom/ingest.hpp"
#include "rodom/odometry.hpp"
#include "rodom/sim.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rodom;

namespace {

constexpr const char* kVersion = "rodom 0.1.0";

PreprocessMethod parse_preprocessor(const std::string& s) {
  if (s == "cfar") return PreprocessMethod::Cfar;
  if (s == "topk") return PreprocessMethod::TopK;
  if (s == "raymax") return PreprocessMethod::RayMax;
  throw ConfigError("unknown preprocessor: " + s);
}

IcpVariant parse_icp_variant(const std::string& s) {
  if (s == "plain") return IcpVariant::Plain;
  if (s == "one-way") return IcpVariant::SamplingOneWay;
  if (s == "two-way") return IcpVariant::SamplingTwoWay;
  throw ConfigError("unknown icp variant: " + s);
}

std::string preprocessor_name(PreprocessMethod m) {
  switch (m) {
    case PreprocessMethod::Cfar: return "cfar";
    case PreprocessMethod::RayMax: return "raymax";
    default: return "topk";
  }
}

std::string variant_name(IcpVariant v) {
  switch (v) {
    case IcpVariant::Plain: return "plain";
    case IcpVariant::SamplingOneWay: return "one-way";
    default: return "two-way";
  }
}

PipelineConfig config_from_kv(const KvFile& kv) {
  PipelineConfig c;
  c.preprocessor = parse_preprocessor(kv.get_string("preprocessor", "topk"));
  c.topk_k = static_cast<int>(kv.get_int("topk.k", c.topk_k));
  c.cfar.train_cells = static_cast<int>(kv.get_int("cfar.train_cells", c.cfar.train_cells));
  c.cfar.guard_cells = static_cast<int>(kv.get_int("cfar.guard_cells", c.cfar.guard_cells));
  c.cfar.threshold_factor = kv.get_double("cfar.threshold_factor", c.cfar.threshold_factor);
  c.sampling.eps_min = kv.get_double("sampling.eps_min", c.sampling.eps_min);
  c.sampling.eps_max = kv.get_double("sampling.eps_max", c.sampling.eps_max);
  c.sampling.alpha = kv.get_double("sampling.alpha", c.sampling.alpha);
  c.sampling.beta = kv.get_double("sampling.beta", c.sampling.beta);
  c.icp.max_iterations = static_cast<int>(kv.get_int("icp.max_iterations", c.icp.max_iterations));
  c.icp.rot_tolerance = kv.get_double("icp.rot_tolerance", c.icp.rot_tolerance);
  c.ransac.max_iterations = static_cast<int>(kv.get_int("ransac.max_iterations", c.ransac.max_iterations));
  c.ransac.inlier_threshold = kv.get_double("ransac.inlier_threshold", c.ransac.inlier_threshold);
  c.ransac.min_inliers = static_cast<int>(kv.get_int("ransac.min_inliers", c.ransac.min_inliers));
  c.ransac.seed = static_cast<std::uint64_t>(kv.get_int("ransac.seed", 0));
  c.ransac.eps_planar = kv.get_double("ransac.eps_planar", c.ransac.eps_planar);
  const std::string fb = kv.get_string("fallback", "hold_last");
  if (fb == "hold_last") c.fallback_policy = FallbackPolicy::HoldLast;
  else if (fb == "zero") c.fallback_policy = FallbackPolicy::ZeroMotion;
  else throw ConfigError("unknown fallback policy: " + fb);
  c.icp_variant = parse_icp_variant(kv.get_string("icp_variant", "two-way"));
  return c;
}

KvFile kv_snapshot(const PipelineConfig& c) {
  KvFile kv;
  kv.set("preprocessor", preprocessor_name(c.preprocessor));
  kv.set("topk.k", std::to_string(c.topk_k));
  kv.set("cfar.train_cells", std::to_string(c.cfar.train_cells));
  kv.set("cfar.guard_cells", std::to_string(c.cfar.guard_cells));
  kv.set("cfar.threshold_factor", std::to_string(c.cfar.threshold_factor));
  kv.set("sampling.eps_min", std::to_string(c.sampling.eps_min));
  kv.set("sampling.eps_max", std::to_string(c.sampling.eps_max));
  kv.set("sampling.alpha", std::to_string(c.sampling.alpha));
  kv.set("sampling.beta", std::to_string(c.sampling.beta));
  kv.set("icp.max_iterations", std::to_string(c.icp.max_iterations));
  kv.set("icp.rot_tolerance", std::to_string(c.icp.rot_tolerance));
  kv.set("icp.roi_max_range", std::to_string(c.icp.roi_max_range));
  kv.set("icp.roi_max_azimuth", std::to_string(c.icp.roi_max_azimuth));
  kv.set("ransac.max_iterations", std::to_string(c.ransac.max_iterations));
  kv.set("ransac.inlier_threshold", std::to_string(c.ransac.inlier_threshold));
  kv.set("ransac.min_inliers", std::to_string(c.ransac.min_inliers));
  kv.set("ransac.seed", std::to_string(c.ransac.seed));
  kv.set("fallback", c.fallback_policy == FallbackPolicy::HoldLast ? "hold_last" : "zero");
  kv.set("icp_variant", variant_name(c.icp_variant));
  return kv;
}

void write_trajectory(const Trajectory& traj, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out.precision(17);
  out << "# t x y yaw\n";
  for (const auto& p : traj.poses)
    out << p.t << " " << p.x << " " << p.y << " " << p.yaw << "\n";
}

Trajectory read_trajectory(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trajectory: " + path.string());
  Trajectory traj;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    Pose2 p;
    if (!(ls >> p.t >> p.x >> p.y >> p.yaw))
      throw FormatError("trajectory line: expected `t x y yaw`: " + line);
    traj.poses.push_back(p);
  }
  if (traj.poses.empty())
    throw FormatError("trajectory file has no poses: " + path.string());
  return traj;
}

void write_series_csv(const std::vector<std::pair<double, double>>& series,
                      const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out.precision(17);
  out << "t,value\n";
  for (const auto& [t, v] : series) out << t << "," << v << "\n";
}

void write_manifest(const fs::path& out_dir, const KvFile& config,
                    const std::string& dataset_path, double duration_ms,
                    const std::vector<std::string>& outputs) {
  json j;
  j["version"] = kVersion;
  j["dataset"] = dataset_path;
  j["duration_ms"] = duration_ms;
  j["outputs"] = outputs;
  json cfg = json::object();
  for (const auto& [k, v] : config.entries()) cfg[k] = v;
  j["config"] = cfg;
  std::ofstream out(out_dir / "manifest.json");
  out << j.dump(2) << "\n";
}

ColoradarAdapterConfig adapter_from_kv(const KvFile& kv) {
  ColoradarAdapterConfig a;
  a.n_range = static_cast<std::uint32_t>(kv.get_int("n_range", 0));
  a.n_azimuth = static_cast<std::uint32_t>(kv.get_int("n_azimuth", 0));
  a.n_elevation = static_cast<std::uint32_t>(kv.get_int("n_elevation", 1));
  a.range_res = kv.get_double("range_res", 0.0);
  a.max_azimuth = kv.get_double("max_azimuth_deg", 0.0) * kPi / 180.0;
  a.big_endian = kv.get_int("big_endian", 0) != 0;
  a.element_order = kv.get_string("element_order", "rae");
  a.log_input = kv.get_int("log_input", 0) != 0;
  auto spec = [&](const std::string& prefix) {
    SensorSpec s;
    s.range_res = kv.get_double(prefix + ".range_res", 0.0);
    s.max_range = kv.get_double(prefix + ".max_range", 0.0);
    s.max_azimuth = kv.get_double(prefix + ".max_azimuth_deg", 0.0) * kPi / 180.0;
    s.framerate = kv.get_double(prefix + ".framerate", 0.0);
    return s;
  };
  a.singlechip_spec = spec("singlechip");
  a.cascade_spec = spec("cascade");
  return a;
}

int cmd_run(const std::string& dataset_path, const std::string& config_path,
            const std::string& out_dir, const std::string& preprocessor,
            int k, const std::string& icp, long seed,
            const std::string& adapter, const std::string& adapter_config) {
  const auto t0 = std::chrono::steady_clock::now();

  KvFile kv;
  if (!config_path.empty()) kv = KvFile::parse_file(config_path);
  PipelineConfig cfg = config_from_kv(kv);
  if (!preprocessor.empty()) cfg.preprocessor = parse_preprocessor(preprocessor);
  if (k > 0) cfg.topk_k = k;
  if (!icp.empty()) cfg.icp_variant = parse_icp_variant(icp);
  if (seed >= 0) cfg.ransac.seed = static_cast<std::uint64_t>(seed);

  Dataset ds;
  if (adapter.empty()) {
    ds = load_dataset(dataset_path);
  } else if (adapter == "coloradar") {
    if (adapter_config.empty())
      throw ConfigError("--adapter coloradar requires --adapter-config");
    ds = load_coloradar_adapter(dataset_path,
                                adapter_from_kv(KvFile::parse_file(adapter_config)));
  } else {
    throw ConfigError("unknown adapter: " + adapter);
  }

  // ROI follows the cascade sensor unless the config overrode it.
  cfg.icp.roi_max_range = kv.get_double("icp.roi_max_range", ds.cascade_spec.max_range);
  cfg.icp.roi_max_azimuth = kv.get_double("icp.roi_max_azimuth", ds.cascade_spec.max_azimuth);

  const PipelineResult result = run_pipeline(ds, cfg);

  fs::create_directories(out_dir);
  write_trajectory(result.trajectory, fs::path(out_dir) / "trajectory.txt");

  json frames = json::array();
  for (const auto& e : result.estimates) {
    frames.push_back({{"t", e.t},
                      {"vx", e.v.x},
                      {"vy", e.v.y},
                      {"dyaw", e.dyaw},
                      {"dt", e.dt},
                      {"velocity_fallback", e.velocity_fallback},
                      {"icp_degraded", e.icp_degraded},
                      {"icp_failed", e.icp_failed}});
  }
  {
    std::ofstream out(fs::path(out_dir) / "estimates.json");
    out << frames.dump(2) << "\n";
  }

  const double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0).count();
  write_manifest(out_dir, kv_snapshot(cfg), dataset_path, ms,
                 {"trajectory.txt", "estimates.json", "manifest.json"});
  std::cout << "wrote " << out_dir << "/trajectory.txt ("
            << result.trajectory.poses.size() << " poses)\n";
  return 0;
}

int cmd_eval(const std::string& est_path, const std::string& ref_path,
             const std::string& out_dir, double tol) {
  const Trajectory est = read_trajectory(est_path);
  const Trajectory ref = read_trajectory(ref_path);
  const MetricReport report = compute_metrics(est, ref, tol);
  const UmeyamaResult aligned = umeyama_align_se2(est, ref, tol);

  fs::create_directories(out_dir);
  json j;
  j["yaw_rmse_deg"] = report.yaw_rmse_deg;
  j["rpe_mean_m"] = report.rpe_mean_m;
  j["rpe_rmse_m"] = report.rpe_rmse_m;
  j["rpe_sum_m"] = report.rpe_sum_m;
  j["n_pairs"] = report.n_pairs;
  j["umeyama"] = {{"x", aligned.transform.x},
                  {"y", aligned.transform.y},
                  {"yaw", aligned.transform.yaw}};
  {
    std::ofstream out(fs::path(out_dir) / "metrics.json");
    out << j.dump(2) << "\n";
  }
  write_series_csv(report.cum_sq_yaw_err, fs::path(out_dir) / "cum_yaw_error.csv");
  write_series_csv(report.rpe_series, fs::path(out_dir) / "rpe_series.csv");
  write_trajectory(aligned.aligned, fs::path(out_dir) / "aligned.txt");
  std::cout << "yaw_rmse_deg " << report.yaw_rmse_deg << "\n"
            << "rpe_mean_m " << report.rpe_mean_m << "\n";
  return 0;
}

int cmd_sim(const std::string& scene_path, const std::string& fixture,
            long seed, const std::string& out_dir) {
  SimResult result;
  if (!fixture.empty()) {
    const auto f = fixtures::by_name(fixture, seed >= 0 ? seed : 0);
    result = simulate(f.scene, f.motion, f.singlechip, f.cascade, f.options);
  } else if (!scene_path.empty()) {
    const KvFile kv = KvFile::parse_file(scene_path);
    auto [scene, motion] = parse_scene_config(kv);
    if (seed >= 0) scene.seed = static_cast<std::uint64_t>(seed);
    const SensorSpec singlechip{0.125, 8.0, 78.3 * kPi / 180.0, 10.0};
    const SensorSpec cascade{0.06, 7.6, 76.3 * kPi / 180.0, 5.0};
    SimOptions opt;
    opt.n_azimuth = kv.get_int("n_azimuth", opt.n_azimuth);
    opt.splat_sigma = kv.get_double("splat_sigma", opt.splat_sigma);
    result = simulate(scene, motion, singlechip, cascade, opt);
  } else {
    throw ConfigError("sim: need --scene or --fixture");
  }
  result.dataset.ground_truth = result.ground_truth.poses;
  write_dataset(result.dataset, out_dir);
  write_trajectory(result.ground_truth, fs::path(out_dir) / "groundtruth_traj.txt");
  std::cout << "wrote dataset with " << result.dataset.cascade_frames.size()
            << " cascade frames to " << out_dir << "\n";
  return 0;
}

int cmd_sweep(const std::string& dataset_path, const std::string& config_path,
              const std::string& out_dir) {
  KvFile kv;
  if (!config_path.empty()) kv = KvFile::parse_file(config_path);
  const PipelineConfig base = config_from_kv(kv);
  const Dataset ds = load_dataset(dataset_path);
  if (ds.ground_truth.empty())
    throw ConfigError("sweep: dataset has no ground truth");
  Trajectory ref;
  ref.poses = ds.ground_truth;

  fs::create_directories(out_dir);
  std::ofstream csv(fs::path(out_dir) / "sweep.csv");
  csv << "preprocessor,icp_variant,yaw_rmse_deg,rpe_mean_m\n";
  csv.precision(12);
  const double tol = 0.5 / ds.cascade_spec.framerate;
  for (auto pm : {PreprocessMethod::Cfar, PreprocessMethod::TopK,
                  PreprocessMethod::RayMax}) {
    for (auto iv : {IcpVariant::Plain, IcpVariant::SamplingOneWay,
                    IcpVariant::SamplingTwoWay}) {
      PipelineConfig cfg = base;
      cfg.preprocessor = pm;
      cfg.icp_variant = iv;
      cfg.icp.roi_max_range = kv.get_double("icp.roi_max_range", ds.cascade_spec.max_range);
      cfg.icp.roi_max_azimuth = kv.get_double("icp.roi_max_azimuth", ds.cascade_spec.max_azimuth);
      const PipelineResult result = run_pipeline(ds, cfg);
      const MetricReport report = compute_metrics(result.trajectory, ref, tol);
      csv << preprocessor_name(pm) << "," << variant_name(iv) << ","
          << report.yaw_rmse_deg << "," << report.rpe_mean_m << "\n";
    }
  }
  std::cout << "wrote " << out_dir << "/sweep.csv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"radar-only 2D ego-motion estimation"};
  app.require_subcommand(1);

  std::string dataset, config, out, preprocessor, icp, adapter, adapter_config;
  std::string est, ref, scene, fixture;
  int k = -1;
  long seed = -1;
  double tol = 0.1;

  auto* run = app.add_subcommand("run", "run the odometry pipeline");
  run->add_option("--dataset", dataset, "dataset directory")->required();
  run->add_option("--config", config, "pipeline config file");
  run->add_option("--out", out, "output directory")->required();
  run->add_option("--preprocessor", preprocessor, "cfar|topk|raymax");
  run->add_option("--k", k, "Top-k feature count");
  run->add_option("--icp", icp, "plain|one-way|two-way");
  run->add_option("--seed", seed, "RANSAC seed");
  run->add_option("--adapter", adapter, "raw-format adapter (coloradar)");
  run->add_option("--adapter-config", adapter_config, "adapter layout config");

  auto* ev = app.add_subcommand("eval", "evaluate a trajectory against a reference");
  ev->add_option("--est", est, "estimated trajectory (t x y yaw)")->required();
  ev->add_option("--ref", ref, "reference trajectory (t x y yaw)")->required();
  ev->add_option("--out", out, "output directory")->required();
  ev->add_option("--tol", tol, "time pairing tolerance [s]");

  auto* sim = app.add_subcommand("sim", "generate a synthetic dataset");
  sim->add_option("--scene", scene, "scene config file");
  sim->add_option("--fixture", fixture, "canned fixture name");
  sim->add_option("--seed", seed, "scene seed override");
  sim->add_option("--out", out, "output directory")->required();

  auto* sweep = app.add_subcommand("sweep", "compare preprocessors and ICP variants");
  sweep->add_option("--dataset", dataset, "dataset directory")->required();
  sweep->add_option("--config", config, "pipeline config file");
  sweep->add_option("--out", out, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return cmd_run(dataset, config, out, preprocessor, k, icp, seed, adapter,
                     adapter_config);
    if (ev->parsed()) return cmd_eval(est, ref, out, tol);
    if (sim->parsed()) return cmd_sim(scene, fixture, seed, out);
    if (sweep->parsed()) return cmd_sweep(dataset, config, out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
