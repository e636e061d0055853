#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rodom/core.hpp"

namespace rodom {

/// One single-chip radar detection in the sensor frame.
struct DopplerTarget {
  double x = 0.0;          // meters
  double y = 0.0;          // meters
  double z = 0.0;          // meters
  double doppler = 0.0;    // m/s, signed, positive = receding
  double intensity = 0.0;  // dimensionless, >= 0
};

struct DopplerFrame {
  double t = 0.0;
  std::vector<DopplerTarget> targets;
};

/// Dense range x azimuth (x elevation) intensity grid.
/// Storage is range-major, then azimuth, then elevation.
struct Heatmap {
  std::uint32_t n_range = 0;
  std::uint32_t n_azimuth = 0;
  std::uint32_t n_elevation = 1;
  double range_res = 0.0;                // meters per range bin
  std::vector<double> azimuth_angles;    // radians, strictly increasing
  std::vector<float> intensity;          // n_range * n_azimuth * n_elevation
  double t = 0.0;

  std::size_t cell_index(std::uint32_t r, std::uint32_t a, std::uint32_t e) const {
    return (static_cast<std::size_t>(r) * n_azimuth + a) * n_elevation + e;
  }
  float at(std::uint32_t r, std::uint32_t a, std::uint32_t e = 0) const {
    return intensity[cell_index(r, a, e)];
  }
  float& at(std::uint32_t r, std::uint32_t a, std::uint32_t e = 0) {
    return intensity[cell_index(r, a, e)];
  }
};

struct SensorSpec {
  double range_res = 0.0;    // meters
  double max_range = 0.0;    // meters
  double max_azimuth = 0.0;  // radians, half FOV
  double framerate = 0.0;    // Hz
};

struct Dataset {
  std::vector<DopplerFrame> singlechip_frames;  // time-ordered
  std::vector<Heatmap> cascade_frames;          // time-ordered
  std::vector<Pose2> ground_truth;              // optional, time-ordered
  SensorSpec singlechip_spec;
  SensorSpec cascade_spec;
};

/// Loads a dataset from the on-disk container:
///   index.txt        one line per frame: `<stream> <timestamp> <relative_path>`
///                    with stream in {singlechip, cascade}
///   sensors.toml     key/value SensorSpec fields, keys prefixed
///                    `singlechip.` / `cascade.`
///   groundtruth.txt  optional, lines `t x y z qx qy qz qw`; SE(3) poses are
///                    projected to SE(2) on load
/// Throws IoError / FormatError on missing files, header-payload mismatch,
/// or non-monotone timestamps.
Dataset load_dataset(const std::filesystem::path& root);

/// Inverse of load_dataset. Creates `root` if needed.
void write_dataset(const Dataset& ds, const std::filesystem::path& root);

/// Layout description for raw ColoRadar-style binaries. The dev kit defines
/// the element order and dims; they are supplied here rather than guessed.
struct ColoradarAdapterConfig {
  std::uint32_t n_range = 0;
  std::uint32_t n_azimuth = 0;
  std::uint32_t n_elevation = 1;
  double range_res = 0.0;
  std::vector<double> azimuth_angles;  // size n_azimuth; empty = uniform over FOV
  double max_azimuth = 0.0;            // used when azimuth_angles is empty
  bool big_endian = false;
  // Raw heatmap element order: "rae" = range-major, azimuth, elevation.
  std::string element_order = "rae";
  // Whether source intensities are log-scaled (dB); converted to linear on load.
  bool log_input = false;
  SensorSpec singlechip_spec;
  SensorSpec cascade_spec;
};

/// Loads ColoRadar-layout raw binaries listed in `index.txt` under root
/// (same index format as load_dataset; heatmap payloads are bare f32 grids
/// described by the adapter config).
Dataset load_coloradar_adapter(const std::filesystem::path& root,
                               const ColoradarAdapterConfig& cfg);

void write_heatmap_file(const Heatmap& h, const std::filesystem::path& path);
Heatmap read_heatmap_file(const std::filesystem::path& path, double t);
void write_doppler_file(const DopplerFrame& f, const std::filesystem::path& path);
DopplerFrame read_doppler_file(const std::filesystem::path& path, double t);

}  // namespace rodom
