#include "rodom/ingest.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rodom/config.hpp"
#include "rodom/errors.hpp"

namespace rodom {
namespace {

static_assert(std::endian::native == std::endian::little,
              "on-disk format is little-endian; big-endian hosts unsupported");

template <typename T>
void write_le(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_le(std::istream& in, const std::string& ctx) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw FormatError("truncated file while reading " + ctx);
  return v;
}

float byteswap_f32(float v) {
  std::uint32_t u;
  std::memcpy(&u, &v, 4);
  u = ((u & 0xff000000u) >> 24) | ((u & 0x00ff0000u) >> 8) |
      ((u & 0x0000ff00u) << 8) | ((u & 0x000000ffu) << 24);
  std::memcpy(&v, &u, 4);
  return v;
}

void check_heatmap_invariants(const Heatmap& h, const std::string& ctx) {
  if (h.n_range == 0 || h.n_azimuth == 0 || h.n_elevation == 0)
    throw FormatError(ctx + ": zero-sized heatmap dimension");
  const std::size_t cells = static_cast<std::size_t>(h.n_range) * h.n_azimuth *
                            h.n_elevation;
  if (h.intensity.size() != cells)
    throw FormatError(ctx + ": intensity payload size " +
                      std::to_string(h.intensity.size()) +
                      " does not match dims product " + std::to_string(cells));
  if (h.azimuth_angles.size() != h.n_azimuth)
    throw FormatError(ctx + ": azimuth table size mismatch");
  for (std::size_t i = 1; i < h.azimuth_angles.size(); ++i)
    if (!(h.azimuth_angles[i] > h.azimuth_angles[i - 1]))
      throw FormatError(ctx + ": azimuth angles not strictly increasing");
  for (float v : h.intensity)
    if (!(std::isfinite(v) && v >= 0.0f))
      throw FormatError(ctx + ": non-finite or negative intensity value");
}

double quat_to_yaw(double qx, double qy, double qz, double qw) {
  return std::atan2(2.0 * (qw * qz + qx * qy),
                    1.0 - 2.0 * (qy * qy + qz * qz));
}

SensorSpec read_spec(const KvFile& kv, const std::string& prefix) {
  SensorSpec s;
  s.range_res = kv.get_double(prefix + ".range_res", 0.0);
  s.max_range = kv.get_double(prefix + ".max_range", 0.0);
  s.max_azimuth = kv.get_double(prefix + ".max_azimuth", 0.0);
  s.framerate = kv.get_double(prefix + ".framerate", 0.0);
  if (s.range_res <= 0 || s.max_range <= 0 || s.max_azimuth <= 0 ||
      s.framerate <= 0)
    throw FormatError("sensors.toml: missing or non-positive " + prefix +
                      " spec fields");
  return s;
}

struct IndexEntry {
  std::string stream;
  double t;
  std::string path;
};

std::vector<IndexEntry> read_index(const std::filesystem::path& root) {
  const auto index_path = root / "index.txt";
  std::ifstream in(index_path);
  if (!in) throw IoError("missing index file: " + index_path.string());
  std::vector<IndexEntry> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    IndexEntry e;
    if (!(ls >> e.stream >> e.t >> e.path))
      throw FormatError("index.txt line " + std::to_string(lineno) +
                        ": expected `<stream> <timestamp> <path>`");
    out.push_back(e);
  }
  return out;
}

void check_monotone(const std::vector<double>& ts, const std::string& stream) {
  for (std::size_t i = 1; i < ts.size(); ++i)
    if (!(ts[i] > ts[i - 1]))
      throw FormatError(stream + " stream: non-monotone timestamps at index " +
                        std::to_string(i));
}

std::vector<Pose2> read_ground_truth(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open ground truth: " + path.string());
  std::vector<Pose2> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double t, x, y, z, qx, qy, qz, qw;
    if (!(ls >> t >> x >> y >> z >> qx >> qy >> qz >> qw))
      throw FormatError("groundtruth line " + std::to_string(lineno) +
                        ": expected `t x y z qx qy qz qw`");
    Pose2 p;
    p.t = t;
    p.x = x;
    p.y = y;
    p.yaw = quat_to_yaw(qx, qy, qz, qw);
    out.push_back(p);
  }
  std::vector<double> ts;
  for (const auto& p : out) ts.push_back(p.t);
  check_monotone(ts, "groundtruth");
  return out;
}

}  // namespace

void write_heatmap_file(const Heatmap& h, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write heatmap file: " + path.string());
  write_le<std::uint32_t>(out, h.n_range);
  write_le<std::uint32_t>(out, h.n_azimuth);
  write_le<std::uint32_t>(out, h.n_elevation);
  write_le<std::uint32_t>(out, 0);  // reserved
  for (double a : h.azimuth_angles) write_le<float>(out, static_cast<float>(a));
  out.write(reinterpret_cast<const char*>(h.intensity.data()),
            static_cast<std::streamsize>(h.intensity.size() * sizeof(float)));
  if (!out) throw IoError("short write on heatmap file: " + path.string());
}

Heatmap read_heatmap_file(const std::filesystem::path& path, double t) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("missing heatmap file: " + path.string());
  Heatmap h;
  h.t = t;
  h.n_range = read_le<std::uint32_t>(in, "heatmap header");
  h.n_azimuth = read_le<std::uint32_t>(in, "heatmap header");
  h.n_elevation = read_le<std::uint32_t>(in, "heatmap header");
  const auto reserved = read_le<std::uint32_t>(in, "heatmap header");
  if (reserved != 0)
    throw FormatError(path.string() + ": nonzero reserved header field");
  h.azimuth_angles.resize(h.n_azimuth);
  for (auto& a : h.azimuth_angles)
    a = read_le<float>(in, "azimuth table of " + path.string());
  const std::size_t cells = static_cast<std::size_t>(h.n_range) * h.n_azimuth *
                            h.n_elevation;
  h.intensity.resize(cells);
  in.read(reinterpret_cast<char*>(h.intensity.data()),
          static_cast<std::streamsize>(cells * sizeof(float)));
  if (!in)
    throw FormatError(path.string() +
                      ": payload shorter than header-declared dims");
  // Trailing bytes mean the header dims disagree with the payload.
  char extra;
  if (in.read(&extra, 1))
    throw FormatError(path.string() +
                      ": payload longer than header-declared dims");
  check_heatmap_invariants(h, path.string());
  return h;
}

void write_doppler_file(const DopplerFrame& f, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write doppler file: " + path.string());
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(f.targets.size()));
  for (const auto& d : f.targets) {
    write_le<float>(out, static_cast<float>(d.x));
    write_le<float>(out, static_cast<float>(d.y));
    write_le<float>(out, static_cast<float>(d.z));
    write_le<float>(out, static_cast<float>(d.doppler));
    write_le<float>(out, static_cast<float>(d.intensity));
  }
  if (!out) throw IoError("short write on doppler file: " + path.string());
}

DopplerFrame read_doppler_file(const std::filesystem::path& path, double t) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("missing doppler file: " + path.string());
  DopplerFrame f;
  f.t = t;
  const auto count = read_le<std::uint32_t>(in, "doppler header");
  f.targets.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    DopplerTarget d;
    d.x = read_le<float>(in, "doppler payload");
    d.y = read_le<float>(in, "doppler payload");
    d.z = read_le<float>(in, "doppler payload");
    d.doppler = read_le<float>(in, "doppler payload");
    d.intensity = read_le<float>(in, "doppler payload");
    if (!std::isfinite(d.x) || !std::isfinite(d.y) || !std::isfinite(d.z) ||
        !std::isfinite(d.doppler) || !std::isfinite(d.intensity) ||
        d.intensity < 0.0)
      throw FormatError(path.string() + ": invalid target values at index " +
                        std::to_string(i));
    f.targets.push_back(d);
  }
  char extra;
  if (in.read(&extra, 1))
    throw FormatError(path.string() + ": trailing bytes after declared count");
  return f;
}

Dataset load_dataset(const std::filesystem::path& root) {
  if (!std::filesystem::is_directory(root))
    throw IoError("dataset root is not a directory: " + root.string());
  Dataset ds;
  const KvFile sensors = KvFile::parse_file(root / "sensors.toml");
  ds.singlechip_spec = read_spec(sensors, "singlechip");
  ds.cascade_spec = read_spec(sensors, "cascade");

  for (const auto& e : read_index(root)) {
    if (e.stream == "singlechip") {
      ds.singlechip_frames.push_back(read_doppler_file(root / e.path, e.t));
    } else if (e.stream == "cascade") {
      Heatmap h = read_heatmap_file(root / e.path, e.t);
      h.range_res = ds.cascade_spec.range_res;  // not stored per frame
      ds.cascade_frames.push_back(std::move(h));
    } else {
      throw FormatError("index.txt: unknown stream '" + e.stream + "'");
    }
  }

  std::vector<double> ts;
  for (const auto& f : ds.singlechip_frames) ts.push_back(f.t);
  check_monotone(ts, "singlechip");
  ts.clear();
  for (const auto& h : ds.cascade_frames) ts.push_back(h.t);
  check_monotone(ts, "cascade");

  const auto gt_path = root / "groundtruth.txt";
  if (std::filesystem::exists(gt_path))
    ds.ground_truth = read_ground_truth(gt_path);

  // The cascade ~ half single-chip rate relationship is not assumed, only
  // checked against the declared specs.
  const double ratio = ds.singlechip_spec.framerate / ds.cascade_spec.framerate;
  if (std::abs(ratio - 2.0) > 0.5)
    std::cerr << "warning: single-chip/cascade framerate ratio " << ratio
              << " deviates from the nominal 2:1\n";
  return ds;
}

void write_dataset(const Dataset& ds, const std::filesystem::path& root) {
  std::filesystem::create_directories(root / "frames");

  std::ofstream sensors(root / "sensors.toml");
  if (!sensors) throw IoError("cannot write sensors.toml under " + root.string());
  auto dump_spec = [&](const std::string& prefix, const SensorSpec& s) {
    sensors.precision(17);
    sensors << prefix << ".range_res = " << s.range_res << "\n"
            << prefix << ".max_range = " << s.max_range << "\n"
            << prefix << ".max_azimuth = " << s.max_azimuth << "\n"
            << prefix << ".framerate = " << s.framerate << "\n";
  };
  dump_spec("singlechip", ds.singlechip_spec);
  dump_spec("cascade", ds.cascade_spec);

  std::ofstream index(root / "index.txt");
  if (!index) throw IoError("cannot write index.txt under " + root.string());
  index.precision(17);
  char name[64];
  for (std::size_t i = 0; i < ds.singlechip_frames.size(); ++i) {
    std::snprintf(name, sizeof(name), "frames/singlechip_%06zu.bin", i);
    write_doppler_file(ds.singlechip_frames[i], root / name);
    index << "singlechip " << ds.singlechip_frames[i].t << " " << name << "\n";
  }
  for (std::size_t i = 0; i < ds.cascade_frames.size(); ++i) {
    std::snprintf(name, sizeof(name), "frames/cascade_%06zu.bin", i);
    write_heatmap_file(ds.cascade_frames[i], root / name);
    index << "cascade " << ds.cascade_frames[i].t << " " << name << "\n";
  }

  if (!ds.ground_truth.empty()) {
    std::ofstream gt(root / "groundtruth.txt");
    if (!gt) throw IoError("cannot write groundtruth.txt under " + root.string());
    gt.precision(17);
    for (const auto& p : ds.ground_truth)
      gt << p.t << " " << p.x << " " << p.y << " 0 0 0 "
         << std::sin(p.yaw / 2.0) << " " << std::cos(p.yaw / 2.0) << "\n";
  }
}

Dataset load_coloradar_adapter(const std::filesystem::path& root,
                               const ColoradarAdapterConfig& cfg) {
  if (cfg.n_range == 0 || cfg.n_azimuth == 0 || cfg.n_elevation == 0 ||
      cfg.range_res <= 0.0)
    throw ConfigError("adapter config incomplete: dims and range_res required");
  if (cfg.azimuth_angles.empty() && cfg.max_azimuth <= 0.0)
    throw ConfigError(
        "adapter config incomplete: azimuth_angles or max_azimuth required");
  if (!cfg.azimuth_angles.empty() &&
      cfg.azimuth_angles.size() != cfg.n_azimuth)
    throw ConfigError("adapter config: azimuth table size != n_azimuth");
  if (cfg.element_order != "rae" && cfg.element_order != "ear" &&
      cfg.element_order != "aer")
    throw ConfigError("adapter config: unsupported element order '" +
                      cfg.element_order + "'");

  std::vector<double> angles = cfg.azimuth_angles;
  if (angles.empty()) {
    angles.resize(cfg.n_azimuth);
    for (std::uint32_t a = 0; a < cfg.n_azimuth; ++a)
      angles[a] = -cfg.max_azimuth +
                  (2.0 * cfg.max_azimuth) * (a + 0.5) / cfg.n_azimuth;
  }

  Dataset ds;
  ds.singlechip_spec = cfg.singlechip_spec;
  ds.cascade_spec = cfg.cascade_spec;

  const std::size_t cells = static_cast<std::size_t>(cfg.n_range) *
                            cfg.n_azimuth * cfg.n_elevation;

  for (const auto& e : read_index(root)) {
    const auto path = root / e.path;
    if (e.stream == "cascade") {
      std::ifstream in(path, std::ios::binary);
      if (!in) throw IoError("missing raw heatmap: " + path.string());
      std::vector<float> raw(cells);
      in.read(reinterpret_cast<char*>(raw.data()),
              static_cast<std::streamsize>(cells * sizeof(float)));
      if (!in)
        throw FormatError(path.string() + ": raw payload shorter than " +
                          std::to_string(cells) + " f32 cells");
      if (cfg.big_endian)
        for (auto& v : raw) v = byteswap_f32(v);

      Heatmap h;
      h.t = e.t;
      h.n_range = cfg.n_range;
      h.n_azimuth = cfg.n_azimuth;
      h.n_elevation = cfg.n_elevation;
      h.range_res = cfg.range_res;
      h.azimuth_angles = angles;
      h.intensity.resize(cells);
      for (std::uint32_t r = 0; r < cfg.n_range; ++r)
        for (std::uint32_t a = 0; a < cfg.n_azimuth; ++a)
          for (std::uint32_t el = 0; el < cfg.n_elevation; ++el) {
            std::size_t src;
            if (cfg.element_order == "rae")
              src = (static_cast<std::size_t>(r) * cfg.n_azimuth + a) *
                        cfg.n_elevation + el;
            else if (cfg.element_order == "ear")
              src = (static_cast<std::size_t>(el) * cfg.n_azimuth + a) *
                        cfg.n_range + r;
            else  // aer
              src = (static_cast<std::size_t>(a) * cfg.n_elevation + el) *
                        cfg.n_range + r;
            float v = raw[src];
            if (cfg.log_input) v = std::pow(10.0f, v / 10.0f);
            h.intensity[h.cell_index(r, a, el)] = v;
          }
      check_heatmap_invariants(h, path.string());
      ds.cascade_frames.push_back(std::move(h));
    } else if (e.stream == "singlechip") {
      // Raw point clouds: bare f32 records `x y z intensity doppler`,
      // count implied by file size.
      std::ifstream in(path, std::ios::binary | std::ios::ate);
      if (!in) throw IoError("missing raw point cloud: " + path.string());
      const auto bytes = static_cast<std::size_t>(in.tellg());
      if (bytes % (5 * sizeof(float)) != 0)
        throw FormatError(path.string() +
                          ": size is not a multiple of 5 f32 fields");
      in.seekg(0);
      DopplerFrame f;
      f.t = e.t;
      const std::size_t n = bytes / (5 * sizeof(float));
      for (std::size_t i = 0; i < n; ++i) {
        float v[5];
        in.read(reinterpret_cast<char*>(v), sizeof(v));
        if (cfg.big_endian)
          for (auto& x : v) x = byteswap_f32(x);
        DopplerTarget d{v[0], v[1], v[2], v[4], v[3]};
        if (!std::isfinite(d.intensity) || d.intensity < 0.0)
          throw FormatError(path.string() +
                            ": negative or non-finite intensity (check "
                            "endianness/order in adapter config)");
        f.targets.push_back(d);
      }
      ds.singlechip_frames.push_back(std::move(f));
    } else {
      throw FormatError("index.txt: unknown stream '" + e.stream + "'");
    }
  }

  std::vector<double> ts;
  for (const auto& f : ds.singlechip_frames) ts.push_back(f.t);
  check_monotone(ts, "singlechip");
  ts.clear();
  for (const auto& h : ds.cascade_frames) ts.push_back(h.t);
  check_monotone(ts, "cascade");

  const auto gt_path = root / "groundtruth.txt";
  if (std::filesystem::exists(gt_path))
    ds.ground_truth = read_ground_truth(gt_path);
  return ds;
}

}  // namespace rodom
