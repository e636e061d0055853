#pragma once

#include <vector>

#include "rodom/core.hpp"
#include "rodom/ingest.hpp"

namespace rodom {

enum class PreprocessMethod { Cfar, TopK, RayMax };

struct FeatureSet {
  std::vector<PolarPoint> points;
  PreprocessMethod method = PreprocessMethod::TopK;
  double t = 0.0;
};

/// 1D cell-averaging CFAR along the range axis, per azimuth column.
struct CfarParams {
  int train_cells = 8;           // per side
  int guard_cells = 4;           // per side
  double threshold_factor = 3.0;
};

/// Collapses the elevation axis by per-cell max, yielding a 2D map.
Heatmap collapse_elevation(const Heatmap& h);

/// The k brightest cells as polar features. Ties break toward lower range
/// bin, then lower azimuth bin. Requires a collapsed (2D) heatmap.
FeatureSet extract_topk(const Heatmap& h, int k);

/// One feature per azimuth ray: the brightest range bin of the column.
/// Zero columns still emit their bin-0 point (weight vanishes after
/// normalization downstream).
FeatureSet extract_raymax(const Heatmap& h);

/// CA-CFAR detections: a cell fires when its intensity exceeds
/// threshold_factor times the mean of the training cells (guard cells
/// excluded, window truncated at the range-axis edges).
FeatureSet extract_cfar(const Heatmap& h, const CfarParams& p);

}  // namespace rodom
