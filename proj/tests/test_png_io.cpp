#include <doctest.h>
#include <png.h>

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "errors.hpp"
#include "png_io.hpp"

using namespace coverimpact;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / ("coverimpact-png-" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

// Test-only writer for layouts the library itself never emits.
void write_raw_png(const std::string& path, int width, int height, int bit_depth,
                   int color_type, int channels, const std::vector<std::uint8_t>& data) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  REQUIRE(f != nullptr);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  REQUIRE(setjmp(png_jmpbuf(png)) == 0);
  png_init_io(png, f);
  png_set_IHDR(png, info, width, height, bit_depth, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t rowbytes = static_cast<std::size_t>(width) * channels * (bit_depth / 8);
  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y) {
    rows[y] = const_cast<png_bytep>(data.data() + y * rowbytes);
  }
  png_write_image(png, rows.data());
  png_write_end(png, info);
  png_destroy_write_struct(&png, &info);
  std::fclose(f);
}

}  // namespace

TEST_CASE("rgb png round trip is the identity") {
  RasterImage img;
  img.width = 2;
  img.height = 2;
  img.epoch = 1999;
  img.pixels = {255, 0, 0, 0, 255, 0, 0, 0, 255, 10, 20, 30};

  const std::string path = (temp_dir() / "roundtrip.png").string();
  write_png(img, path);
  const RasterImage back = decode_png_file(path, 1999);
  CHECK(back.width == 2);
  CHECK(back.height == 2);
  CHECK(back.epoch == 1999);
  CHECK(back.pixels == img.pixels);
}

TEST_CASE("1x1 black pixel decodes to itself") {
  RasterImage img;
  img.width = 1;
  img.height = 1;
  img.pixels = {0, 0, 0};
  const std::string path = (temp_dir() / "single.png").string();
  write_png(img, path);
  const RasterImage back = decode_png_file(path, 0);
  CHECK(back.pixels == std::vector<std::uint8_t>{0, 0, 0});
}

TEST_CASE("grayscale mask decodes with replicated channels") {
  BinaryMask mask;
  mask.width = 3;
  mask.height = 1;
  mask.bits = {0, 255, 0};
  const std::string path = (temp_dir() / "mask.png").string();
  write_png(mask, path);

  const RasterImage back = decode_png_file(path, 0);
  CHECK(back.pixels == std::vector<std::uint8_t>{0, 0, 0, 255, 255, 255, 0, 0, 0});
}

TEST_CASE("alpha channel is dropped") {
  const std::vector<std::uint8_t> rgba = {10, 20, 30, 128, 40, 50, 60, 7};
  const std::string path = (temp_dir() / "rgba.png").string();
  write_raw_png(path, 2, 1, 8, PNG_COLOR_TYPE_RGB_ALPHA, 4, rgba);

  const RasterImage back = decode_png_file(path, 0);
  CHECK(back.pixels == std::vector<std::uint8_t>{10, 20, 30, 40, 50, 60});
}

TEST_CASE("16-bit input is rejected, not truncated") {
  const std::vector<std::uint8_t> deep(2 * 2 * 3 * 2, 0x7f);
  const std::string path = (temp_dir() / "deep.png").string();
  write_raw_png(path, 2, 2, 16, PNG_COLOR_TYPE_RGB, 3, deep);

  CHECK_THROWS_WITH_AS(decode_png_file(path, 0),
                       doctest::Contains("unsupported bit depth"), Error);
}

TEST_CASE("truncated stream raises a decode error naming the origin") {
  RasterImage img;
  img.width = 4;
  img.height = 4;
  img.pixels.assign(48, 99);
  const std::string path = (temp_dir() / "whole.png").string();
  write_png(img, path);

  std::ifstream in(path, std::ios::binary);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  bytes.resize(bytes.size() / 2);

  try {
    decode_png(bytes, 0, "cut.png");
    FAIL("expected a decode error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Decode);
    CHECK(std::string(e.what()).find("cut.png") != std::string::npos);
  }
}

TEST_CASE("non-png bytes are rejected") {
  const std::vector<std::uint8_t> junk = {'h', 'e', 'l', 'l', 'o'};
  CHECK_THROWS_AS(decode_png(junk, 0, "junk"), Error);
}

TEST_CASE("missing file raises io error naming the path") {
  try {
    decode_png_file("/nonexistent/nope.png", 0);
    FAIL("expected an io error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Io);
    CHECK(std::string(e.what()).find("nope.png") != std::string::npos);
  }
}

TEST_CASE("calibration grid writes one mask per candidate plus a table") {
  RasterImage img;
  img.width = 4;
  img.height = 4;
  img.pixels.assign(48, 0);

  HsvRange whole;
  HsvRange none;
  none.lower = {9, 9, 9};
  none.upper = {9, 9, 9};

  const fs::path dir = temp_dir() / "calib";
  const std::string table = write_calibration_grid(img, {whole, none}, dir.string(), "img");
  CHECK(fs::exists(dir / "img.mask.0.png"));
  CHECK(fs::exists(dir / "img.mask.1.png"));
  CHECK(table.find("1.000000") != std::string::npos);
  CHECK(table.find("0.000000") != std::string::npos);
}
