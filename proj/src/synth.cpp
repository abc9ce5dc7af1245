#include "synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "errors.hpp"
#include "rng.hpp"

namespace coverimpact {

namespace {

bool ranges_disjoint_in_some_channel(const HsvRange& a, const HsvRange& b) {
  for (int c = 0; c < 3; ++c) {
    if (a.upper[c] < b.lower[c] || b.upper[c] < a.lower[c]) return true;
  }
  return false;
}

HsvTriple sample_in_range(Rng& rng, const HsvRange& range) {
  HsvTriple out;
  for (int c = 0; c < 3; ++c) {
    const std::uint64_t span = static_cast<std::uint64_t>(range.upper[c] - range.lower[c]) + 1;
    out[c] = static_cast<std::uint8_t>(range.lower[c] + rng.below(span));
  }
  return out;
}

// Sample a color whose byte-quantized RGB round-trip still classifies the
// way the ground truth requires; quantization drift near box edges would
// otherwise break exact-fraction recovery.
RgbTriple sample_color(Rng& rng, const HsvRange& from, const HsvRange& forest, bool want_forest) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const HsvTriple hsv = sample_in_range(rng, from);
    const RgbTriple rgb = hsv_to_rgb_pixel(hsv);
    const bool classified_forest = forest.contains(rgb_to_hsv_pixel(rgb));
    if (classified_forest == want_forest) return rgb;
  }
  fail(ErrorCode::Param, "color range " + format_hsv_range(from) +
                             " cannot realize stable " +
                             (want_forest ? std::string("forest") : std::string("background")) +
                             " colors");
}

}  // namespace

std::pair<RasterImage, double> gen_image(const SynthImageSpec& spec, std::int64_t epoch) {
  if (spec.width < 1 || spec.height < 1) {
    fail(ErrorCode::Param, "synth image dimensions must be at least 1x1");
  }
  if (!(spec.target_fraction >= 0.0 && spec.target_fraction <= 1.0)) {
    fail(ErrorCode::Param, "target fraction must lie in [0,1]");
  }
  validate(spec.forest_range);
  validate(spec.background_range);
  if (!ranges_disjoint_in_some_channel(spec.forest_range, spec.background_range)) {
    fail(ErrorCode::Param, "forest and background color ranges overlap in every channel");
  }

  const std::size_t total = static_cast<std::size_t>(spec.width) * spec.height;
  const std::size_t k = static_cast<std::size_t>(
      std::lround(spec.target_fraction * static_cast<double>(total)));

  Rng rng(spec.seed);
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order);

  std::vector<bool> is_forest(total, false);
  for (std::size_t i = 0; i < k; ++i) is_forest[order[i]] = true;

  RasterImage img;
  img.width = spec.width;
  img.height = spec.height;
  img.epoch = epoch;
  img.pixels.resize(total * 3);
  for (std::size_t p = 0; p < total; ++p) {
    const RgbTriple rgb =
        is_forest[p] ? sample_color(rng, spec.forest_range, spec.forest_range, true)
                     : sample_color(rng, spec.background_range, spec.forest_range, false);
    img.pixels[3 * p] = rgb[0];
    img.pixels[3 * p + 1] = rgb[1];
    img.pixels[3 * p + 2] = rgb[2];
  }
  return {std::move(img), static_cast<double>(k) / static_cast<double>(total)};
}

double series_drift_value(const SynthSeriesSpec& spec, int i) {
  const int tau = spec.change_at.value_or(spec.n);
  const int pre_steps = std::min(i, tau) - 1;
  const int post_steps = std::max(0, i - tau);
  return spec.level0 + spec.pre_slope * pre_steps + spec.post_slope * post_steps;
}

CoverageSeries gen_series(const SynthSeriesSpec& spec) {
  if (spec.n < 1) fail(ErrorCode::Param, "series length must be at least 1");
  if (spec.noise_sd < 0.0) fail(ErrorCode::Param, "noise sd must be nonnegative");
  if (spec.change_at && (*spec.change_at < 1 || *spec.change_at > spec.n - 1)) {
    fail(ErrorCode::Param, "change index must lie in [1, n-1]");
  }

  Rng rng(spec.seed);
  CoverageSeries series;
  series.epochs.reserve(spec.n);
  series.values.reserve(spec.n);
  for (int i = 1; i <= spec.n; ++i) {
    double y = series_drift_value(spec, i);
    if (spec.noise_sd > 0.0) y += rng.normal(0.0, spec.noise_sd);
    series.epochs.push_back(spec.start_epoch + i - 1);
    series.values.push_back(std::clamp(y, 0.0, 1.0));
  }
  return series;
}

}  // namespace coverimpact
