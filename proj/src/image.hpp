#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace coverimpact {

using HsvTriple = std::array<std::uint8_t, 3>;
using RgbTriple = std::array<std::uint8_t, 3>;

// Inclusive box in byte-scaled HSV space. H uses the full 0-255 scale
// (degrees rescaled by 255/360), not the 0-179 half-degree convention.
struct HsvRange {
  HsvTriple lower{0, 0, 0};
  HsvTriple upper{255, 255, 255};

  bool contains(const HsvTriple& p) const {
    for (int c = 0; c < 3; ++c) {
      if (p[c] < lower[c] || p[c] > upper[c]) return false;
    }
    return true;
  }
};

void validate(const HsvRange& range);

// 8-bit interleaved RGB grid labelled with the epoch it was observed at.
struct RasterImage {
  int width = 0;
  int height = 0;
  std::int64_t epoch = 0;
  std::vector<std::uint8_t> pixels;  // row-major, 3 bytes per pixel

  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  RgbTriple at(int x, int y) const {
    const std::size_t i = 3 * (static_cast<std::size_t>(y) * width + x);
    return {pixels[i], pixels[i + 1], pixels[i + 2]};
  }
  void set(int x, int y, const RgbTriple& p) {
    const std::size_t i = 3 * (static_cast<std::size_t>(y) * width + x);
    pixels[i] = p[0];
    pixels[i + 1] = p[1];
    pixels[i + 2] = p[2];
  }
};

void validate(const RasterImage& img);

// Same layout as RasterImage, channels reinterpreted as (h,s,v).
struct HsvPixelGrid {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  HsvTriple at(int x, int y) const {
    const std::size_t i = 3 * (static_cast<std::size_t>(y) * width + x);
    return {pixels[i], pixels[i + 1], pixels[i + 2]};
  }
};

// Per-pixel classification grid; 255 = covered (forest), 0 = background.
struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
};

void validate(const BinaryMask& mask);

// Hexcone conversion. H is computed in degrees then rescaled to a byte
// (round(H/360*255)); S and V are scaled to [0,255]; achromatic pixels
// get H = 0.
HsvTriple rgb_to_hsv_pixel(const RgbTriple& rgb);
RgbTriple hsv_to_rgb_pixel(const HsvTriple& hsv);

HsvPixelGrid rgb_to_hsv(const RasterImage& img);

// Per-channel 2-D Gaussian convolution, kernel radius ceil(3*sigma),
// clamp-to-edge borders, quantized back to bytes once at the end.
RasterImage gaussian_blur(const RasterImage& img, double sigma);

// mask[p] = 255 iff every channel of grid[p] lies inside range (inclusive).
BinaryMask apply_hsv_mask(const HsvPixelGrid& grid, const HsvRange& range);

// covered pixels / total pixels.
double coverage_fraction(const BinaryMask& mask);

struct CalibrationEntry {
  HsvRange range;
  BinaryMask mask;
  double fraction = 0.0;
};

// Batch preview of candidate threshold ranges against one image, in input
// order; the caller persists the masks and table for a human to pick from.
std::vector<CalibrationEntry> calibration_grid(const RasterImage& img,
                                               const std::vector<HsvRange>& candidates);

std::string format_hsv_range(const HsvRange& range);

}  // namespace coverimpact
