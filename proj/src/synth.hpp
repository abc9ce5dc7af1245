#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "image.hpp"
#include "series.hpp"

namespace coverimpact {

// Fixture image recipe: a known fraction of pixels carries colors drawn from
// a forest HSV box, the rest from a background box disjoint in at least one
// channel, so segmentation ground truth is exact by construction.
struct SynthImageSpec {
  int width = 0;
  int height = 0;
  double target_fraction = 0.0;
  HsvRange forest_range;
  HsvRange background_range;
  std::uint64_t seed = 0;
};

// Returns the image plus the realized fraction, round(target*w*h)/(w*h).
// Deterministic given the seed.
std::pair<RasterImage, double> gen_image(const SynthImageSpec& spec,
                                         std::int64_t epoch = 0);

// Piecewise-linear drift with optional slope change and Gaussian noise,
// clamped into [0,1]. change_at is the 1-based index of the last point on
// the pre-change line.
struct SynthSeriesSpec {
  int n = 0;
  double level0 = 0.0;
  double pre_slope = 0.0;
  double post_slope = 0.0;
  std::optional<int> change_at;
  double noise_sd = 0.0;
  std::uint64_t seed = 0;
  std::int64_t start_epoch = 0;
};

CoverageSeries gen_series(const SynthSeriesSpec& spec);

// Noiseless value at 1-based index i under the spec's drift construction.
double series_drift_value(const SynthSeriesSpec& spec, int i);

}  // namespace coverimpact
