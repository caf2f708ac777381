#include "sarcam/render.hpp"

#include <algorithm>
#include <cmath>

#include "sarcam/error.hpp"

namespace sarcam {
namespace {

struct ControlPoint {
  double at;
  double rgb[3];
};

constexpr ControlPoint kJet[] = {
    {0.0, {0, 0, 128}},       {0.125, {0, 0, 255}}, {0.375, {0, 255, 255}},
    {0.625, {255, 255, 0}}, {0.875, {255, 0, 0}}, {1.0, {128, 0, 0}},
};

std::uint8_t round_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

}  // namespace

std::array<std::uint8_t, 3> jet(double value) {
  const double v = std::clamp(value, 0.0, 1.0);
  std::size_t seg = 0;
  while (seg + 2 < std::size(kJet) && v > kJet[seg + 1].at) ++seg;
  const ControlPoint& lo = kJet[seg];
  const ControlPoint& hi = kJet[seg + 1];
  const double t = (v - lo.at) / (hi.at - lo.at);
  std::array<std::uint8_t, 3> out{};
  for (int ch = 0; ch < 3; ++ch) out[ch] = round_byte(lo.rgb[ch] + (hi.rgb[ch] - lo.rgb[ch]) * t);
  return out;
}

RgbImage colorize(const Grid& map, const RenderSpec& spec) {
  (void)spec.colormap;  // jet is the only map
  RgbImage out(map.height(), map.width());
  for (int r = 0; r < map.height(); ++r) {
    for (int c = 0; c < map.width(); ++c) {
      const auto rgb = jet(map(r, c));
      std::copy(rgb.begin(), rgb.end(), out.pixel(r, c));
    }
  }
  return out;
}

RgbImage gray_to_rgb(const Grid& image) {
  RgbImage out(image.height(), image.width());
  for (int r = 0; r < image.height(); ++r) {
    for (int c = 0; c < image.width(); ++c) {
      const std::uint8_t v = round_byte(255.0 * std::clamp(static_cast<double>(image(r, c)), 0.0, 1.0));
      std::fill_n(out.pixel(r, c), 3, v);
    }
  }
  return out;
}

RgbImage overlay(const Grid& image, const RgbImage& heat, double alpha) {
  if (image.height() != heat.height || image.width() != heat.width) {
    throw Error(ErrorKind::ShapeMismatch, "overlay image " + image.shape_string() + " vs heatmap (" +
                                              std::to_string(heat.height) + "," + std::to_string(heat.width) + ")");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorKind::InvalidArgument, "alpha must lie in [0, 1]");
  RgbImage out(heat.height, heat.width);
  for (int r = 0; r < heat.height; ++r) {
    for (int c = 0; c < heat.width; ++c) {
      const double gray = 255.0 * std::clamp(static_cast<double>(image(r, c)), 0.0, 1.0);
      const std::uint8_t* h = heat.pixel(r, c);
      std::uint8_t* o = out.pixel(r, c);
      for (int ch = 0; ch < 3; ++ch) o[ch] = round_byte(alpha * h[ch] + (1.0 - alpha) * gray);
    }
  }
  return out;
}

RgbImage draw_bbox(RgbImage image, const BBox& box, int thickness) {
  if (!box.valid_within(image.height, image.width)) {
    throw Error(ErrorKind::OutOfBounds, "box (" + std::to_string(box.row_min) + "," + std::to_string(box.col_min) + "," +
                                            std::to_string(box.row_max) + "," + std::to_string(box.col_max) +
                                            ") outside image");
  }
  if (thickness < 1) throw Error(ErrorKind::InvalidArgument, "bbox thickness must be >= 1");
  for (int r = box.row_min; r <= box.row_max; ++r) {
    for (int c = box.col_min; c <= box.col_max; ++c) {
      const bool edge = r - box.row_min < thickness || box.row_max - r < thickness || c - box.col_min < thickness ||
                        box.col_max - c < thickness;
      if (edge) std::copy(kBoxColor.begin(), kBoxColor.end(), image.pixel(r, c));
    }
  }
  return image;
}

RgbImage panel(std::span<const RgbImage> images, std::span<const std::string> labels, int columns) {
  if (images.empty()) throw Error(ErrorKind::InvalidArgument, "panel needs at least one image");
  if (columns < 1) throw Error(ErrorKind::InvalidArgument, "panel columns must be >= 1");
  if (!labels.empty() && labels.size() != images.size()) {
    throw Error(ErrorKind::ShapeMismatch, "panel has " + std::to_string(images.size()) + " images but " +
                                              std::to_string(labels.size()) + " labels");
  }
  const int tile_h = images.front().height;
  const int tile_w = images.front().width;
  for (const auto& img : images) {
    if (img.height != tile_h || img.width != tile_w) {
      throw Error(ErrorKind::ShapeMismatch, "panel images must share one size");
    }
  }
  const int count = static_cast<int>(images.size());
  const int cols = std::min(columns, count);
  const int rows = (count + cols - 1) / cols;
  RgbImage out(rows * tile_h + (rows + 1) * kPanelGutter, cols * tile_w + (cols + 1) * kPanelGutter, 255);
  for (int i = 0; i < count; ++i) {
    const int top = kPanelGutter + (i / cols) * (tile_h + kPanelGutter);
    const int left = kPanelGutter + (i % cols) * (tile_w + kPanelGutter);
    const RgbImage& tile = images[static_cast<std::size_t>(i)];
    for (int r = 0; r < tile_h; ++r) {
      std::copy_n(tile.pixel(r, 0), static_cast<std::size_t>(tile_w) * 3, out.pixel(top + r, left));
    }
  }
  return out;
}

}  // namespace sarcam
