#include "rodom/sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "rodom/errors.hpp"

namespace rodom {

double MotionProfile::total_duration() const {
  double t = 0.0;
  for (const auto& s : segments) t += s.duration;
  return t;
}

namespace {

// Exact SE(2) integral of a constant body twist over tau seconds.
Pose2 advance(const Pose2& p, const MotionSegment& s, double tau) {
  const double w = s.yaw_rate;
  double dx, dy;
  if (std::abs(w) < 1e-12) {
    dx = s.vx * tau;
    dy = s.vy * tau;
  } else {
    const double sw = std::sin(w * tau), cw = std::cos(w * tau);
    dx = (sw * s.vx - (1.0 - cw) * s.vy) / w;
    dy = ((1.0 - cw) * s.vx + sw * s.vy) / w;
  }
  Pose2 out;
  out.x = p.x + std::cos(p.yaw) * dx - std::sin(p.yaw) * dy;
  out.y = p.y + std::sin(p.yaw) * dx + std::cos(p.yaw) * dy;
  out.yaw = wrap_angle(p.yaw + w * tau);
  out.t = p.t + tau;
  return out;
}

const MotionSegment& segment_at(const std::vector<MotionSegment>& segs,
                                double t) {
  double acc = 0.0;
  for (const auto& s : segs) {
    acc += s.duration;
    if (t < acc) return s;
  }
  return segs.back();
}

}  // namespace

Pose2 MotionProfile::pose_at(double t) const {
  if (segments.empty()) throw InvalidParamsError("empty motion profile");
  Pose2 p;
  double remaining = std::clamp(t, 0.0, total_duration());
  for (const auto& s : segments) {
    if (s.duration <= 0.0)
      throw InvalidParamsError("motion segment with non-positive duration");
    const double tau = std::min(remaining, s.duration);
    p = advance(p, s, tau);
    remaining -= tau;
    if (remaining <= 0.0) break;
  }
  p.t = t;
  return p;
}

Vec2 MotionProfile::body_velocity_at(double t) const {
  if (segments.empty()) throw InvalidParamsError("empty motion profile");
  const auto& s = segment_at(segments, std::clamp(t, 0.0, total_duration()));
  return {s.vx, s.vy};
}

double MotionProfile::yaw_rate_at(double t) const {
  if (segments.empty()) throw InvalidParamsError("empty motion profile");
  return segment_at(segments, std::clamp(t, 0.0, total_duration())).yaw_rate;
}

SimResult simulate(const Scene& scene, const MotionProfile& motion,
                   const SensorSpec& singlechip, const SensorSpec& cascade,
                   const SimOptions& opt) {
  if (scene.outlier_fraction < 0.0 || scene.outlier_fraction >= 1.0)
    throw InvalidParamsError("outlier_fraction must be in [0, 1)");
  const double T = motion.total_duration();
  std::mt19937_64 rng(scene.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  double max_refl = 0.0;
  for (const auto& lm : scene.landmarks)
    max_refl = std::max(max_refl, lm.reflectivity);

  SimResult out;
  out.dataset.singlechip_spec = singlechip;
  out.dataset.cascade_spec = cascade;

  // Single-chip Doppler frames.
  const int n_s = static_cast<int>(std::floor(T * singlechip.framerate)) + 1;
  for (int k = 0; k < n_s; ++k) {
    const double t = k / singlechip.framerate;
    const Pose2 pose = motion.pose_at(t);
    const Vec2 v = motion.body_velocity_at(t);
    DopplerFrame frame;
    frame.t = t;
    for (const auto& lm : scene.landmarks) {
      const Vec2 rel = (lm.pos - pose.position()).rotated(-pose.yaw);
      const double r = rel.norm();
      if (r < 0.05 || r > singlechip.max_range) continue;
      if (std::abs(std::atan2(rel.y, rel.x)) > singlechip.max_azimuth) continue;
      DopplerTarget tg;
      tg.x = rel.x;
      tg.y = rel.y;
      tg.z = 0.0;
      // Radial closing speed; the yaw-rate term is tangential and drops out.
      tg.doppler = -(v.x * rel.x + v.y * rel.y) / r +
                   scene.doppler_noise_sigma * gauss(rng);
      tg.intensity = lm.reflectivity;
      frame.targets.push_back(tg);
    }
    // Moving-object outliers: a fraction of the returns get a Doppler bias.
    const std::size_t n_out = static_cast<std::size_t>(
        std::lround(scene.outlier_fraction * frame.targets.size()));
    if (n_out > 0) {
      std::vector<std::size_t> idx(frame.targets.size());
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
      std::shuffle(idx.begin(), idx.end(), rng);
      for (std::size_t i = 0; i < n_out; ++i) {
        const double mag = 1.0 + 3.0 * unit(rng);
        frame.targets[idx[i]].doppler += unit(rng) < 0.5 ? -mag : mag;
      }
    }
    out.dataset.singlechip_frames.push_back(std::move(frame));
  }

  // Cascade heatmaps + ground truth at the cascade rate.
  const std::uint32_t n_range =
      static_cast<std::uint32_t>(std::ceil(cascade.max_range / cascade.range_res));
  const std::uint32_t n_az = static_cast<std::uint32_t>(opt.n_azimuth);
  const int n_c = static_cast<int>(std::floor(T * cascade.framerate)) + 1;
  for (int k = 0; k < n_c; ++k) {
    const double t = k / cascade.framerate;
    const Pose2 pose = motion.pose_at(t);
    out.ground_truth.poses.push_back(pose);

    Heatmap h;
    h.t = t;
    h.n_range = n_range;
    h.n_azimuth = n_az;
    h.n_elevation = 1;
    h.range_res = cascade.range_res;
    h.azimuth_angles.resize(n_az);
    for (std::uint32_t a = 0; a < n_az; ++a)
      h.azimuth_angles[a] =
          -cascade.max_azimuth + 2.0 * cascade.max_azimuth * (a + 0.5) / n_az;
    h.intensity.assign(static_cast<std::size_t>(n_range) * n_az, 0.0f);

    const double az_bin = 2.0 * cascade.max_azimuth / n_az;
    auto splat = [&](double r, double theta, double refl) {
      // Continuous bin coordinates under the bin-center convention.
      const double rb = r / cascade.range_res - 0.5;
      const double ab = (theta + cascade.max_azimuth) / az_bin - 0.5;
      const long rc = std::lround(rb);
      const long ac = std::lround(ab);
      if (opt.splat_sigma <= 0.0) {
        if (rc >= 0 && rc < static_cast<long>(n_range) && ac >= 0 &&
            ac < static_cast<long>(n_az))
          h.at(static_cast<std::uint32_t>(rc), static_cast<std::uint32_t>(ac)) +=
              static_cast<float>(refl);
        return;
      }
      for (long dr = -1; dr <= 1; ++dr)
        for (long da = -1; da <= 1; ++da) {
          const long ri = rc + dr, ai = ac + da;
          if (ri < 0 || ri >= static_cast<long>(n_range) || ai < 0 ||
              ai >= static_cast<long>(n_az))
            continue;
          const double ddr = ri - rb, dda = ai - ab;
          const double w = std::exp(-(ddr * ddr + dda * dda) /
                                    (2.0 * opt.splat_sigma * opt.splat_sigma));
          h.at(static_cast<std::uint32_t>(ri), static_cast<std::uint32_t>(ai)) +=
              static_cast<float>(refl * w);
        }
    };

    for (const auto& lm : scene.landmarks) {
      const Vec2 rel = (lm.pos - pose.position()).rotated(-pose.yaw);
      const double r = rel.norm();
      if (r < cascade.range_res || r > cascade.max_range) continue;
      const double theta = std::atan2(rel.y, rel.x);
      if (std::abs(theta) > cascade.max_azimuth) continue;
      splat(r, theta, lm.reflectivity);
    }

    // Low-reflectivity clutter uniform over the ROI.
    const int n_clutter = static_cast<int>(std::lround(scene.clutter_density));
    for (int c = 0; c < n_clutter; ++c) {
      const double r = cascade.range_res + unit(rng) * (cascade.max_range -
                                                        2.0 * cascade.range_res);
      const double theta = (2.0 * unit(rng) - 1.0) * cascade.max_azimuth * 0.98;
      splat(r, theta, 0.15 * std::max(max_refl, 1.0) * unit(rng));
    }

    if (scene.noise_sigma_intensity > 0.0) {
      for (auto& v : h.intensity)
        v = std::max(0.0f, v + static_cast<float>(scene.noise_sigma_intensity *
                                                  gauss(rng)));
    }
    out.dataset.cascade_frames.push_back(std::move(h));
  }
  return out;
}

std::pair<Scene, MotionProfile> parse_scene_config(const KvFile& kv) {
  Scene scene;
  scene.clutter_density = kv.get_double("clutter_density", 0.0);
  scene.noise_sigma_intensity = kv.get_double("noise_sigma_intensity", 0.0);
  scene.doppler_noise_sigma = kv.get_double("doppler_noise_sigma", 0.0);
  scene.outlier_fraction = kv.get_double("outlier_fraction", 0.0);
  scene.seed = static_cast<std::uint64_t>(kv.get_int("seed", 0));

  for (const auto& s : kv.get_all("landmark")) {
    std::istringstream ls(s);
    Landmark lm;
    if (!(ls >> lm.pos.x >> lm.pos.y >> lm.reflectivity))
      throw ConfigError("landmark line: expected `x y reflectivity`: " + s);
    scene.landmarks.push_back(lm);
  }

  MotionProfile motion;
  for (const auto& s : kv.get_all("segment")) {
    std::istringstream ls(s);
    MotionSegment seg;
    double yaw_rate_deg;
    if (!(ls >> seg.duration >> seg.vx >> seg.vy >> yaw_rate_deg))
      throw ConfigError("segment line: expected `duration vx vy yaw_rate_deg_s`: " + s);
    seg.yaw_rate = yaw_rate_deg * kPi / 180.0;
    motion.segments.push_back(seg);
  }
  if (scene.landmarks.empty()) throw ConfigError("scene has no landmarks");
  if (motion.segments.empty()) throw ConfigError("scene has no motion segments");
  return {scene, motion};
}

namespace fixtures {
namespace {

SensorSpec singlechip_spec() { return {0.125, 8.0, 78.3 * kPi / 180.0, 10.0}; }
SensorSpec cascade_spec() { return {0.06, 7.6, 76.3 * kPi / 180.0, 5.0}; }

// Point landmarks along concentric rectangle rings around [x0,x1] x [y0,y1],
// varied reflectivity. Positions are jittered: a regular grid aliases with
// per-frame rotations that match the angular landmark spacing. Rings are
// 0.5 m apart so range separates them under the match metric.
std::vector<Landmark> room_walls(double x0, double y0, double x1, double y1,
                                 double spacing, int rings = 1) {
  std::vector<Landmark> out;
  const double refl[] = {10.0, 12.5, 14.0, 11.0, 13.0, 10.5, 12.0};
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> jitter(-0.3 * spacing, 0.3 * spacing);
  std::size_t i = 0;
  auto add = [&](double x, double y, bool horiz) {
    if (horiz) x += jitter(rng); else y += jitter(rng);
    out.push_back({{x, y}, refl[i++ % std::size(refl)]});
  };
  for (int ring = 0; ring < rings; ++ring) {
    const double a0 = x0 - 0.5 * ring, b0 = y0 - 0.5 * ring;
    const double a1 = x1 + 0.5 * ring, b1 = y1 + 0.5 * ring;
    for (double x = a0; x < a1; x += spacing) add(x, b0, true);
    for (double y = b0; y < b1; y += spacing) add(a1, y, false);
    for (double x = a1; x > a0; x -= spacing) add(x, b1, true);
    for (double y = b1; y > b0; y -= spacing) add(a0, y, false);
  }
  return out;
}

}  // namespace

Fixture square_path(bool noisy, std::uint64_t seed) {
  Fixture f;
  f.singlechip = singlechip_spec();
  f.cascade = cascade_spec();
  // Finer range binning than the stock cascade: with point features the
  // registration accuracy is limited by bin quantization, not the method.
  f.cascade.range_res = 0.01;
  f.options.n_azimuth = 256;
  f.options.splat_sigma = 0.0;  // point features; no kernel tails
  f.scene.landmarks = room_walls(-2.0, -2.0, 7.0, 7.0, 0.8, 5);
  f.scene.seed = seed;
  if (noisy) {
    f.scene.doppler_noise_sigma = 0.05;
    f.scene.noise_sigma_intensity = 0.7;  // 5% of the strongest reflector
    f.scene.outlier_fraction = 0.2;
    f.scene.clutter_density = 4.0;
  }
  // Four 5 m sides at 1 m/s with in-place 90 degree turns (30 deg/s).
  const MotionSegment side{5.0, 1.0, 0.0, 0.0};
  const MotionSegment turn{3.0, 0.0, 0.0, kPi / 6.0};
  f.motion.segments = {side, turn, side, turn, side, turn, side, turn};
  return f;
}

Fixture pure_rotation(std::uint64_t seed) {
  Fixture f;
  f.singlechip = singlechip_spec();
  f.cascade = cascade_spec();
  f.cascade.range_res = 0.01;
  f.options.n_azimuth = 256;
  f.options.splat_sigma = 0.0;
  f.scene.landmarks = room_walls(-5.0, -5.0, 5.0, 5.0, 0.8, 5);
  f.scene.seed = seed;
  f.motion.segments = {{3.0, 0.0, 0.0, 30.0 * kPi / 180.0}};
  return f;
}

Fixture unstable_segments(std::uint64_t seed) {
  Fixture f;
  f.singlechip = singlechip_spec();
  f.cascade = cascade_spec();
  // Many small equal-reflectivity objects, no dominant obstacle.
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> ux(-3.0, 10.0), uy(-5.0, 5.0);
  for (int i = 0; i < 70; ++i) f.scene.landmarks.push_back({{ux(rng), uy(rng)}, 5.0});
  f.scene.seed = seed;
  f.scene.clutter_density = 10.0;
  f.scene.noise_sigma_intensity = 0.3;
  f.motion.segments = {{4.0, 0.8, 0.0, 10.0 * kPi / 180.0},
                       {4.0, 0.8, 0.0, -10.0 * kPi / 180.0}};
  return f;
}

Fixture narrow_corridor(std::uint64_t seed) {
  Fixture f;
  f.singlechip = singlechip_spec();
  f.cascade = cascade_spec();
  const double refl[] = {8.0, 11.0, 9.0, 13.0};
  std::size_t i = 0;
  for (double x = -1.0; x <= 14.0; x += 0.5) {
    f.scene.landmarks.push_back({{x, 1.0}, refl[i++ % 4]});
    f.scene.landmarks.push_back({{x, -1.0}, refl[i++ % 4]});
  }
  f.scene.seed = seed;
  f.motion.segments = {{8.0, 1.0, 0.0, 0.0}};
  return f;
}

Fixture by_name(const std::string& name, std::uint64_t seed) {
  if (name == "square") return square_path(false, seed);
  if (name == "square-noisy") return square_path(true, seed);
  if (name == "pure-rotation") return pure_rotation(seed);
  if (name == "unstable-segments") return unstable_segments(seed);
  if (name == "narrow-corridor") return narrow_corridor(seed);
  throw ConfigError("unknown fixture: " + name);
}

std::vector<std::string> names() {
  return {"square", "square-noisy", "pure-rotation", "unstable-segments",
          "narrow-corridor"};
}

}  // namespace fixtures
}  // namespace rodom
