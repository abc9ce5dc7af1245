#include "image.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace coverimpact {

void validate(const HsvRange& range) {
  for (int c = 0; c < 3; ++c) {
    if (range.lower[c] > range.upper[c]) {
      fail(ErrorCode::Param, "hsv range lower bound exceeds upper bound in channel " +
                                 std::to_string(c));
    }
  }
}

void validate(const RasterImage& img) {
  if (img.width < 1 || img.height < 1) {
    fail(ErrorCode::Param, "image dimensions must be at least 1x1");
  }
  if (img.pixels.size() != img.pixel_count() * 3) {
    fail(ErrorCode::Param, "image buffer size does not match dimensions");
  }
}

void validate(const BinaryMask& mask) {
  if (mask.width < 1 || mask.height < 1) {
    fail(ErrorCode::Param, "mask dimensions must be at least 1x1");
  }
  if (mask.bits.size() != mask.pixel_count()) {
    fail(ErrorCode::Param, "mask buffer size does not match dimensions");
  }
  for (const std::uint8_t b : mask.bits) {
    if (b != 0 && b != 255) fail(ErrorCode::Param, "mask values must be 0 or 255");
  }
}

HsvTriple rgb_to_hsv_pixel(const RgbTriple& rgb) {
  const double r = rgb[0];
  const double g = rgb[1];
  const double b = rgb[2];
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double delta = mx - mn;

  double hue_deg = 0.0;
  if (delta > 0.0) {
    if (mx == r) {
      hue_deg = 60.0 * ((g - b) / delta);
      if (hue_deg < 0.0) hue_deg += 360.0;
    } else if (mx == g) {
      hue_deg = 60.0 * ((b - r) / delta + 2.0);
    } else {
      hue_deg = 60.0 * ((r - g) / delta + 4.0);
    }
  }
  const double sat = mx > 0.0 ? delta / mx : 0.0;

  HsvTriple out;
  out[0] = static_cast<std::uint8_t>(std::lround(hue_deg / 360.0 * 255.0));
  out[1] = static_cast<std::uint8_t>(std::lround(sat * 255.0));
  out[2] = static_cast<std::uint8_t>(std::lround(mx));
  return out;
}

RgbTriple hsv_to_rgb_pixel(const HsvTriple& hsv) {
  const double hue_deg = std::fmod(hsv[0] / 255.0 * 360.0, 360.0);
  const double s = hsv[1] / 255.0;
  const double v = hsv[2] / 255.0;

  const double c = v * s;
  const double hp = hue_deg / 60.0;
  const double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
  const double m = v - c;

  double r = 0.0, g = 0.0, b = 0.0;
  switch (static_cast<int>(hp)) {
    case 0: r = c; g = x; break;
    case 1: r = x; g = c; break;
    case 2: g = c; b = x; break;
    case 3: g = x; b = c; break;
    case 4: r = x; b = c; break;
    default: r = c; b = x; break;
  }

  auto quantize = [m](double u) {
    return static_cast<std::uint8_t>(std::lround((u + m) * 255.0));
  };
  return {quantize(r), quantize(g), quantize(b)};
}

HsvPixelGrid rgb_to_hsv(const RasterImage& img) {
  validate(img);
  HsvPixelGrid grid;
  grid.width = img.width;
  grid.height = img.height;
  grid.pixels.resize(img.pixels.size());
  for (std::size_t p = 0; p < img.pixel_count(); ++p) {
    const RgbTriple rgb{img.pixels[3 * p], img.pixels[3 * p + 1], img.pixels[3 * p + 2]};
    const HsvTriple hsv = rgb_to_hsv_pixel(rgb);
    grid.pixels[3 * p] = hsv[0];
    grid.pixels[3 * p + 1] = hsv[1];
    grid.pixels[3 * p + 2] = hsv[2];
  }
  return grid;
}

RasterImage gaussian_blur(const RasterImage& img, double sigma) {
  if (!(sigma > 0.0)) fail(ErrorCode::Param, "blur sigma must be positive");
  validate(img);

  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += kernel[i + radius];
  }
  for (double& w : kernel) w /= sum;

  const int w = img.width;
  const int h = img.height;
  const auto clampi = [](int v, int hi) { return std::clamp(v, 0, hi); };

  // Separable passes in floating point; quantize once at the end.
  std::vector<double> horiz(img.pixels.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) {
          const int xi = clampi(x + i, w - 1);
          acc += kernel[i + radius] * img.pixels[3 * (static_cast<std::size_t>(y) * w + xi) + c];
        }
        horiz[3 * (static_cast<std::size_t>(y) * w + x) + c] = acc;
      }
    }
  }

  RasterImage out;
  out.width = w;
  out.height = h;
  out.epoch = img.epoch;
  out.pixels.resize(img.pixels.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) {
          const int yi = clampi(y + i, h - 1);
          acc += kernel[i + radius] * horiz[3 * (static_cast<std::size_t>(yi) * w + x) + c];
        }
        const long q = std::lround(acc);
        out.pixels[3 * (static_cast<std::size_t>(y) * w + x) + c] =
            static_cast<std::uint8_t>(std::clamp(q, 0L, 255L));
      }
    }
  }
  return out;
}

BinaryMask apply_hsv_mask(const HsvPixelGrid& grid, const HsvRange& range) {
  validate(range);
  BinaryMask mask;
  mask.width = grid.width;
  mask.height = grid.height;
  mask.bits.resize(grid.width * static_cast<std::size_t>(grid.height));
  for (std::size_t p = 0; p < mask.bits.size(); ++p) {
    const HsvTriple hsv{grid.pixels[3 * p], grid.pixels[3 * p + 1], grid.pixels[3 * p + 2]};
    mask.bits[p] = range.contains(hsv) ? 255 : 0;
  }
  return mask;
}

double coverage_fraction(const BinaryMask& mask) {
  validate(mask);
  std::size_t covered = 0;
  for (const std::uint8_t b : mask.bits) {
    if (b == 255) ++covered;
  }
  return static_cast<double>(covered) / static_cast<double>(mask.pixel_count());
}

std::vector<CalibrationEntry> calibration_grid(const RasterImage& img,
                                               const std::vector<HsvRange>& candidates) {
  if (candidates.empty()) {
    fail(ErrorCode::Param, "calibration requires at least one candidate range");
  }
  const HsvPixelGrid grid = rgb_to_hsv(img);
  std::vector<CalibrationEntry> out;
  out.reserve(candidates.size());
  for (const HsvRange& range : candidates) {
    CalibrationEntry entry;
    entry.range = range;
    entry.mask = apply_hsv_mask(grid, range);
    entry.fraction = coverage_fraction(entry.mask);
    out.push_back(std::move(entry));
  }
  return out;
}

std::string format_hsv_range(const HsvRange& range) {
  auto triple = [](const HsvTriple& t) {
    return std::to_string(t[0]) + "," + std::to_string(t[1]) + "," + std::to_string(t[2]);
  };
  return triple(range.lower) + ":" + triple(range.upper);
}

}  // namespace coverimpact
