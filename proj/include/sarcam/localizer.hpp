#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sarcam/grid.hpp"

namespace sarcam {

inline constexpr double kDefaultThreshold = 0.45;
inline constexpr double kDefaultSweepFractions[] = {0.30, 0.45, 0.60};

/// Inclusive pixel box.
struct BBox {
  int row_min = 0;
  int col_min = 0;
  int row_max = 0;
  int col_max = 0;

  long area() const { return static_cast<long>(row_max - row_min + 1) * (col_max - col_min + 1); }
  bool contains(const BBox& other) const {
    return row_min <= other.row_min && col_min <= other.col_min && row_max >= other.row_max && col_max >= other.col_max;
  }
  bool valid_within(int height, int width) const {
    return 0 <= row_min && row_min <= row_max && row_max < height && 0 <= col_min && col_min <= col_max &&
           col_max < width;
  }

  friend bool operator==(const BBox&, const BBox&) = default;
};

struct BinaryMask {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> bits;

  BinaryMask() = default;
  BinaryMask(int h, int w) : height(h), width(w), bits(static_cast<std::size_t>(h) * w, 0) {}

  bool operator()(int row, int col) const { return bits[static_cast<std::size_t>(row) * width + col] != 0; }
  std::size_t count() const;
  bool empty() const { return count() == 0; }
  /// True when every set pixel of this mask is also set in `other`.
  bool subset_of(const BinaryMask& other) const;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;
};

/// An 8-connected set of mask pixels, stored as flat raster indices in
/// increasing order.
struct Component {
  std::vector<int> pixels;
  BBox box;

  long area() const { return static_cast<long>(pixels.size()); }
};

struct LocalizationReport {
  double threshold_fraction = kDefaultThreshold;
  BinaryMask mask;
  int component_count = 0;
  long largest_component_area = 0;
  std::optional<BBox> bbox;
  std::optional<double> iou;
};

struct SweepResult {
  std::vector<LocalizationReport> reports;
  /// Index of the report with the highest IoU; set only with ground truth.
  std::optional<std::size_t> best;
};

/// mask = map >= fraction * max(map). An all-zero map gives an empty mask.
/// Throws BadFraction unless 0 < fraction <= 1.
BinaryMask binarize(const Grid& map, double fraction);

/// 8-connected components, ordered by their first pixel in raster order.
std::vector<Component> connected_components(const BinaryMask& mask);

/// Binarizes and boxes the largest component. Ties on area go to the
/// component whose (row_min, col_min) is lexicographically smallest.
LocalizationReport localize(const Grid& map, double fraction, const std::optional<BBox>& ground_truth = std::nullopt);

/// Intersection over union with inclusive pixel semantics.
double iou(const BBox& a, const BBox& b);

/// One report per fraction, in input order. With ground truth, `best` is
/// the IoU argmax; ties go to the lower fraction.
SweepResult sweep(const Grid& map, std::span<const double> fractions,
                  const std::optional<BBox>& ground_truth = std::nullopt);

}  // namespace sarcam
