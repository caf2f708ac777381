#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>

#include "sarcam/grid.hpp"
#include "sarcam/localizer.hpp"
#include "sarcam/png_io.hpp"

namespace sarcam {

enum class Colormap { Jet };

struct RenderSpec {
  Colormap colormap = Colormap::Jet;
  double alpha = 0.5;
  bool draw_bbox = true;
  int columns = 1;
};

inline constexpr int kPanelGutter = 4;
inline constexpr std::array<std::uint8_t, 3> kBoxColor = {0, 255, 0};

/// Piecewise-linear jet through (0,0,128) (0,0,255) (0,255,255)
/// (255,255,0) (255,0,0) (128,0,0) at 0, .125, .375, .625, .875, 1.
/// Values outside [0, 1] are clamped.
std::array<std::uint8_t, 3> jet(double value);

RgbImage colorize(const Grid& map, const RenderSpec& spec = {});

/// Replicates round(255 * v) into all three channels, v clamped to [0, 1].
RgbImage gray_to_rgb(const Grid& image);

/// round(alpha * heat + (1 - alpha) * 255 * image), per channel.
RgbImage overlay(const Grid& image, const RgbImage& heat, double alpha);

/// Green rectangle of the given thickness drawn inward from the box edge.
RgbImage draw_bbox(RgbImage image, const BBox& box, int thickness = 1);

/// Row-major montage with 4-px white gutters around and between tiles.
/// Labels are accepted for API stability but not drawn; no font is built in.
RgbImage panel(std::span<const RgbImage> images, std::span<const std::string> labels, int columns);

}  // namespace sarcam
