#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "image.hpp"

namespace coverimpact {

// Decodes a PNG byte stream into 8-bit RGB. Palette and grayscale inputs are
// expanded to RGB, alpha is dropped, 16-bit channels are rejected rather than
// truncated. `origin` names the source in diagnostics.
RasterImage decode_png(std::span<const std::uint8_t> bytes, std::int64_t epoch,
                       const std::string& origin);

RasterImage decode_png_file(const std::string& path, std::int64_t epoch);

void write_png(const RasterImage& img, const std::string& path);
void write_png(const BinaryMask& mask, const std::string& path);

// Runs calibration_grid and persists it: one <stem>.mask.<index>.png per
// candidate under out_dir, plus the returned summary table
// (index, range, fraction per row).
std::string write_calibration_grid(const RasterImage& img,
                                   const std::vector<HsvRange>& candidates,
                                   const std::string& out_dir, const std::string& stem);

}  // namespace coverimpact
