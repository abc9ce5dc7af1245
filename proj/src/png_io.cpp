#include "png_io.hpp"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <vector>

#include "errors.hpp"

namespace coverimpact {

namespace {

struct ByteCursor {
  const std::uint8_t* data;
  std::size_t size;
  std::size_t pos;
};

void read_callback(png_structp png, png_bytep out, png_size_t count) {
  auto* cur = static_cast<ByteCursor*>(png_get_io_ptr(png));
  if (cur->pos + count > cur->size) {
    png_error(png, "unexpected end of stream");
  }
  std::memcpy(out, cur->data + cur->pos, count);
  cur->pos += count;
}

void error_callback(png_structp png, png_const_charp msg) {
  auto* sink = static_cast<std::string*>(png_get_error_ptr(png));
  if (sink) *sink = msg;
  longjmp(png_jmpbuf(png), 1);
}

void warning_callback(png_structp, png_const_charp) {}

}  // namespace

RasterImage decode_png(std::span<const std::uint8_t> bytes, std::int64_t epoch,
                       const std::string& origin) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    fail(ErrorCode::Decode, origin + ": not a PNG file");
  }

  auto errmsg = std::make_unique<std::string>();
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, errmsg.get(),
                                           error_callback, warning_callback);
  if (!png) fail(ErrorCode::Internal, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    fail(ErrorCode::Internal, "png_create_info_struct failed");
  }

  ByteCursor cursor{bytes.data(), bytes.size(), 0};
  RasterImage img;
  std::vector<png_bytep> rows;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorCode::Decode,
         origin + ": " + (errmsg->empty() ? "corrupt PNG stream" : *errmsg));
  }

  png_set_read_fn(png, &cursor, read_callback);
  png_read_info(png, info);

  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  const int color_type = png_get_color_type(png, info);

  if (bit_depth == 16) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorCode::Decode,
         origin + ": unsupported bit depth 16; only 8-bit channels are accepted");
  }

  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
    png_set_gray_to_rgb(png);
  }
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  if (png_get_channels(png, info) != 3 || png_get_bit_depth(png, info) != 8) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorCode::Decode, origin + ": unsupported pixel layout");
  }

  img.width = static_cast<int>(width);
  img.height = static_cast<int>(height);
  img.epoch = epoch;
  img.pixels.resize(static_cast<std::size_t>(width) * height * 3);
  rows.resize(height);
  const std::size_t rowbytes = static_cast<std::size_t>(width) * 3;
  for (png_uint_32 y = 0; y < height; ++y) {
    rows[y] = img.pixels.data() + y * rowbytes;
  }

  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

RasterImage decode_png_file(const std::string& path, std::int64_t epoch) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open image file: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (!in.good() && !in.eof()) fail(ErrorCode::Io, "read failed: " + path);
  return decode_png(bytes, epoch, path);
}

namespace {

void write_png_impl(int width, int height, int color_type, int channels,
                    const std::uint8_t* data, const std::string& path) {
  std::FILE* file = std::fopen(path.c_str(), "wb");
  if (!file) fail(ErrorCode::Io, "cannot open for writing: " + path);

  auto errmsg = std::make_unique<std::string>();
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, errmsg.get(),
                                            error_callback, warning_callback);
  if (!png) {
    std::fclose(file);
    fail(ErrorCode::Internal, "png_create_write_struct failed");
  }
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    std::fclose(file);
    fail(ErrorCode::Internal, "png_create_info_struct failed");
  }

  std::vector<png_bytep> rows(height);
  const std::size_t rowbytes = static_cast<std::size_t>(width) * channels;
  for (int y = 0; y < height; ++y) {
    rows[y] = const_cast<png_bytep>(data + y * rowbytes);
  }

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(file);
    fail(ErrorCode::Io,
         path + ": " + (errmsg->empty() ? "PNG write failed" : *errmsg));
  }

  png_init_io(png, file);
  png_set_IHDR(png, info, width, height, 8, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, info);
  png_destroy_write_struct(&png, &info);
  if (std::fclose(file) != 0) fail(ErrorCode::Io, "close failed: " + path);
}

}  // namespace

void write_png(const RasterImage& img, const std::string& path) {
  validate(img);
  write_png_impl(img.width, img.height, PNG_COLOR_TYPE_RGB, 3, img.pixels.data(), path);
}

void write_png(const BinaryMask& mask, const std::string& path) {
  validate(mask);
  write_png_impl(mask.width, mask.height, PNG_COLOR_TYPE_GRAY, 1, mask.bits.data(), path);
}

std::string write_calibration_grid(const RasterImage& img,
                                   const std::vector<HsvRange>& candidates,
                                   const std::string& out_dir, const std::string& stem) {
  const auto entries = calibration_grid(img, candidates);
  std::filesystem::create_directories(out_dir);

  std::string table = "# index\trange\tfraction\n";
  char line[128];
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string name = stem + ".mask." + std::to_string(i) + ".png";
    write_png(entries[i].mask, (std::filesystem::path(out_dir) / name).string());
    std::snprintf(line, sizeof(line), "%zu\t%s\t%.6f\n", i,
                  format_hsv_range(entries[i].range).c_str(), entries[i].fraction);
    table += line;
  }
  return table;
}

}  // namespace coverimpact
