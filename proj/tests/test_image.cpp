#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "errors.hpp"
#include "image.hpp"
#include "rng.hpp"

using namespace coverimpact;

namespace {

RasterImage solid_image(int w, int h, RgbTriple color) {
  RasterImage img;
  img.width = w;
  img.height = h;
  img.pixels.resize(static_cast<std::size_t>(w) * h * 3);
  for (std::size_t p = 0; p < img.pixel_count(); ++p) img.set(p % w, p / w, color);
  return img;
}

RasterImage random_image(int w, int h, Rng& rng) {
  RasterImage img;
  img.width = w;
  img.height = h;
  img.pixels.resize(static_cast<std::size_t>(w) * h * 3);
  for (auto& b : img.pixels) b = static_cast<std::uint8_t>(rng.below(256));
  return img;
}

}  // namespace

TEST_CASE("rgb_to_hsv reference colors") {
  CHECK(rgb_to_hsv_pixel({255, 0, 0}) == HsvTriple{0, 255, 255});
  CHECK(rgb_to_hsv_pixel({128, 128, 128}) == HsvTriple{0, 0, 128});
  // green: H=120 deg, 120/360*255 = 85 exactly
  CHECK(rgb_to_hsv_pixel({0, 255, 0}) == HsvTriple{85, 255, 255});
  // blue: H=240 deg -> 170
  CHECK(rgb_to_hsv_pixel({0, 0, 255}) == HsvTriple{170, 255, 255});
  CHECK(rgb_to_hsv_pixel({0, 0, 0}) == HsvTriple{0, 0, 0});
  CHECK(rgb_to_hsv_pixel({255, 255, 255}) == HsvTriple{0, 0, 255});
}

TEST_CASE("hsv round trip stays within quantization tolerance") {
  Rng rng(42);
  for (int i = 0; i < 10000; ++i) {
    const RgbTriple rgb{static_cast<std::uint8_t>(rng.below(256)),
                        static_cast<std::uint8_t>(rng.below(256)),
                        static_cast<std::uint8_t>(rng.below(256))};
    const RgbTriple back = hsv_to_rgb_pixel(rgb_to_hsv_pixel(rgb));
    for (int c = 0; c < 3; ++c) {
      CHECK(std::abs(int(back[c]) - int(rgb[c])) <= 2);
    }
  }
}

TEST_CASE("apply_hsv_mask full range covers everything") {
  Rng rng(1);
  const RasterImage img = random_image(8, 6, rng);
  const BinaryMask mask = apply_hsv_mask(rgb_to_hsv(img), HsvRange{});
  CHECK(coverage_fraction(mask) == 1.0);
}

TEST_CASE("point range hits exactly the matching pixel, bounds inclusive") {
  RasterImage img = solid_image(4, 4, {10, 20, 30});
  img.set(2, 1, {0, 255, 0});
  const HsvPixelGrid grid = rgb_to_hsv(img);
  const HsvTriple target = grid.at(2, 1);

  HsvRange range;
  range.lower = target;
  range.upper = target;
  const BinaryMask mask = apply_hsv_mask(grid, range);
  CHECK(mask.bits[1 * 4 + 2] == 255);
  std::size_t covered = 0;
  for (const auto b : mask.bits) covered += b == 255;
  CHECK(covered == 1);
}

TEST_CASE("mask equals an independently coded per-pixel comparison") {
  Rng rng(77);
  const RasterImage img = random_image(16, 16, rng);
  const HsvPixelGrid grid = rgb_to_hsv(img);
  const HsvRange range{{55, 75, 30}, {205, 255, 255}};
  const BinaryMask mask = apply_hsv_mask(grid, range);

  for (int y = 0; y < 16; ++y) {
    for (int x = 0; x < 16; ++x) {
      const HsvTriple p = grid.at(x, y);
      const bool inside = p[0] >= 55 && p[0] <= 205 && p[1] >= 75 && p[1] <= 255 &&
                          p[2] >= 30 && p[2] <= 255;
      CHECK(mask.bits[static_cast<std::size_t>(y) * 16 + x] == (inside ? 255 : 0));
    }
  }
}

TEST_CASE("mask output is binary and widening never loses coverage") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const RasterImage img = random_image(12, 12, rng);
    const HsvPixelGrid grid = rgb_to_hsv(img);

    HsvRange range;
    for (int c = 0; c < 3; ++c) {
      const std::uint8_t a = static_cast<std::uint8_t>(rng.below(256));
      const std::uint8_t b = static_cast<std::uint8_t>(rng.below(256));
      range.lower[c] = std::min(a, b);
      range.upper[c] = std::max(a, b);
    }
    const BinaryMask mask = apply_hsv_mask(grid, range);
    for (const auto b : mask.bits) CHECK((b == 0 || b == 255));
    const double base = coverage_fraction(mask);

    HsvRange wide = range;
    for (int c = 0; c < 3; ++c) {
      wide.lower[c] = static_cast<std::uint8_t>(wide.lower[c] / 2);
      wide.upper[c] =
          static_cast<std::uint8_t>(wide.upper[c] + (255 - wide.upper[c]) / 2);
    }
    CHECK(coverage_fraction(apply_hsv_mask(grid, wide)) >= base);
  }
}

TEST_CASE("degenerate range matching nothing yields zero coverage") {
  const RasterImage img = solid_image(6, 6, {200, 10, 10});
  HsvRange range;
  range.lower = {7, 7, 7};
  range.upper = {7, 7, 7};
  CHECK(coverage_fraction(apply_hsv_mask(rgb_to_hsv(img), range)) == 0.0);
}

TEST_CASE("inverted range bounds are rejected") {
  HsvRange bad;
  bad.lower = {10, 0, 0};
  bad.upper = {5, 255, 255};
  CHECK_THROWS_AS(validate(bad), Error);
}

TEST_CASE("coverage_fraction counts exactly") {
  BinaryMask mask;
  mask.width = 10;
  mask.height = 10;
  mask.bits.assign(100, 0);
  for (int i = 0; i < 50; ++i) mask.bits[i] = 255;
  CHECK(coverage_fraction(mask) == 0.5);

  mask.bits.assign(100, 255);
  CHECK(coverage_fraction(mask) == 1.0);
  mask.bits.assign(100, 0);
  CHECK(coverage_fraction(mask) == 0.0);
}

TEST_CASE("gaussian blur keeps constant images exact") {
  for (const double sigma : {0.4, 1.0, 2.5}) {
    const RasterImage img = solid_image(9, 7, {13, 200, 77});
    const RasterImage blurred = gaussian_blur(img, sigma);
    CHECK(blurred.pixels == img.pixels);
  }
}

TEST_CASE("blur of a single bright pixel matches the kernel weight") {
  RasterImage img = solid_image(15, 15, {0, 0, 0});
  img.set(7, 7, {255, 255, 255});
  const RasterImage blurred = gaussian_blur(img, 1.0);

  // independent 1-D kernel evaluation; 2-D center weight is its square
  const int radius = 3;
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) sum += std::exp(-0.5 * i * i);
  const double center_1d = 1.0 / sum;
  const auto expected = static_cast<std::uint8_t>(std::lround(255.0 * center_1d * center_1d));
  CHECK(blurred.at(7, 7)[0] == expected);
  CHECK(blurred.at(7, 7)[1] == expected);
}

TEST_CASE("blur of a 1x1 image is the identity") {
  const RasterImage img = solid_image(1, 1, {42, 43, 44});
  const RasterImage blurred = gaussian_blur(img, 2.0);
  CHECK(blurred.pixels == img.pixels);
}

TEST_CASE("blur rejects nonpositive sigma and stays in range") {
  const RasterImage img = solid_image(3, 3, {1, 2, 3});
  CHECK_THROWS_AS(gaussian_blur(img, 0.0), Error);
  CHECK_THROWS_AS(gaussian_blur(img, -1.0), Error);

  Rng rng(9);
  const RasterImage noisy = random_image(10, 10, rng);
  const RasterImage blurred = gaussian_blur(noisy, 1.7);
  CHECK(blurred.pixels.size() == noisy.pixels.size());
}

TEST_CASE("calibration grid preserves candidate order") {
  Rng rng(3);
  const RasterImage img = random_image(8, 8, rng);

  HsvRange whole;
  HsvRange nothing;
  nothing.lower = {1, 1, 1};
  nothing.upper = {1, 1, 1};

  const auto entries = calibration_grid(img, {whole, nothing});
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].fraction == 1.0);
  CHECK(entries[1].fraction <= entries[0].fraction);

  CHECK_THROWS_AS(calibration_grid(img, {}), Error);
}
