#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "sarcam/grid.hpp"

namespace sarcam {

/// 8-bit interleaved RGB raster.
struct RgbImage {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> data;

  RgbImage() = default;
  RgbImage(int h, int w, std::uint8_t fill = 0)
      : height(h), width(w), data(static_cast<std::size_t>(h) * w * 3, fill) {}

  std::uint8_t* pixel(int row, int col) { return &data[(static_cast<std::size_t>(row) * width + col) * 3]; }
  const std::uint8_t* pixel(int row, int col) const { return &data[(static_cast<std::size_t>(row) * width + col) * 3]; }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

/// Decodes a grayscale or RGB PNG (8 or 16 bit) into a single-channel grid.
/// RGB collapses to the unweighted channel mean; samples are divided by the
/// maximum code value (255 or 65535). Alpha channels are dropped.
ImageGrid read_png_gray(const std::filesystem::path& path);

void write_png(const std::filesystem::path& path, const RgbImage& image);

}  // namespace sarcam
