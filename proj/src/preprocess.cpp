#include "rodom/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "rodom/errors.hpp"

namespace rodom {
namespace {

void require_2d(const Heatmap& h, const char* op) {
  if (h.n_elevation != 1)
    throw InvalidParamsError(std::string(op) +
                             ": expects a collapsed (n_elevation=1) heatmap");
}

PolarPoint cell_point(const Heatmap& h, std::uint32_t r, std::uint32_t a) {
  return {(r + 0.5) * h.range_res, h.azimuth_angles[a],
          static_cast<double>(h.at(r, a))};
}

}  // namespace

Heatmap collapse_elevation(const Heatmap& h) {
  if (h.n_elevation == 1) return h;
  Heatmap out;
  out.n_range = h.n_range;
  out.n_azimuth = h.n_azimuth;
  out.n_elevation = 1;
  out.range_res = h.range_res;
  out.azimuth_angles = h.azimuth_angles;
  out.t = h.t;
  out.intensity.resize(static_cast<std::size_t>(h.n_range) * h.n_azimuth);
  for (std::uint32_t r = 0; r < h.n_range; ++r)
    for (std::uint32_t a = 0; a < h.n_azimuth; ++a) {
      float m = h.at(r, a, 0);
      for (std::uint32_t e = 1; e < h.n_elevation; ++e)
        m = std::max(m, h.at(r, a, e));
      out.at(r, a) = m;
    }
  return out;
}

FeatureSet extract_topk(const Heatmap& h, int k) {
  require_2d(h, "extract_topk");
  if (k < 1) throw InvalidParamsError("extract_topk: k must be >= 1");

  struct Cell {
    float v;
    std::uint32_t r, a;
  };
  std::vector<Cell> cells;
  cells.reserve(static_cast<std::size_t>(h.n_range) * h.n_azimuth);
  for (std::uint32_t r = 0; r < h.n_range; ++r)
    for (std::uint32_t a = 0; a < h.n_azimuth; ++a)
      cells.push_back({h.at(r, a), r, a});

  const auto before = [](const Cell& x, const Cell& y) {
    if (x.v != y.v) return x.v > y.v;
    if (x.r != y.r) return x.r < y.r;
    return x.a < y.a;
  };
  const std::size_t n = std::min<std::size_t>(k, cells.size());
  std::partial_sort(cells.begin(), cells.begin() + n, cells.end(), before);

  FeatureSet out;
  out.method = PreprocessMethod::TopK;
  out.t = h.t;
  out.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    out.points.push_back(cell_point(h, cells[i].r, cells[i].a));
  return out;
}

FeatureSet extract_raymax(const Heatmap& h) {
  require_2d(h, "extract_raymax");
  FeatureSet out;
  out.method = PreprocessMethod::RayMax;
  out.t = h.t;
  out.points.reserve(h.n_azimuth);
  for (std::uint32_t a = 0; a < h.n_azimuth; ++a) {
    std::uint32_t best = 0;
    for (std::uint32_t r = 1; r < h.n_range; ++r)
      if (h.at(r, a) > h.at(best, a)) best = r;  // ties keep the lower bin
    out.points.push_back(cell_point(h, best, a));
  }
  return out;
}

FeatureSet extract_cfar(const Heatmap& h, const CfarParams& p) {
  require_2d(h, "extract_cfar");
  if (p.train_cells < 1 || p.guard_cells < 0 || p.threshold_factor <= 0.0)
    throw InvalidParamsError("extract_cfar: bad CFAR parameters");
  const int window = p.train_cells + p.guard_cells;
  if (static_cast<int>(h.n_range) <= 2 * window)
    throw InvalidParamsError("extract_cfar: window larger than range axis");

  FeatureSet out;
  out.method = PreprocessMethod::Cfar;
  out.t = h.t;
  const int n_range = static_cast<int>(h.n_range);
  for (std::uint32_t a = 0; a < h.n_azimuth; ++a) {
    for (int r = 0; r < n_range; ++r) {
      double sum = 0.0;
      int count = 0;
      for (int d = p.guard_cells + 1; d <= window; ++d) {
        if (r - d >= 0) {
          sum += h.at(r - d, a);
          ++count;
        }
        if (r + d < n_range) {
          sum += h.at(r + d, a);
          ++count;
        }
      }
      const double noise = sum / count;  // count >= train_cells by precondition
      if (h.at(r, a) > p.threshold_factor * noise)
        out.points.push_back(cell_point(h, r, a));
    }
  }
  return out;
}

}  // namespace rodom
