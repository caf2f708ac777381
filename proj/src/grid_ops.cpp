#include "sarcam/grid_ops.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "sarcam/error.hpp"

namespace sarcam {
namespace {

struct Tap {
  int lo;
  int hi;
  double frac;
};

std::vector<Tap> make_taps(int src, int dst) {
  std::vector<Tap> taps(static_cast<std::size_t>(dst));
  const double scale = static_cast<double>(src) / dst;
  for (int i = 0; i < dst; ++i) {
    const double x = std::clamp((i + 0.5) * scale - 0.5, 0.0, static_cast<double>(src - 1));
    const int lo = static_cast<int>(std::floor(x));
    const int hi = std::min(lo + 1, src - 1);
    taps[static_cast<std::size_t>(i)] = {lo, hi, x - lo};
  }
  return taps;
}

}  // namespace

Grid resize_bilinear(const Grid& grid, int dst_side) {
  if (!grid.is_square() || grid.empty()) {
    throw Error(ErrorKind::ShapeMismatch, "resize_bilinear needs a non-empty square grid, got " + grid.shape_string());
  }
  if (dst_side < 1) {
    throw Error(ErrorKind::InvalidArgument, "resize_bilinear target side must be >= 1");
  }
  const int src = grid.height();
  if (dst_side == src) return grid;

  const auto taps = make_taps(src, dst_side);
  Grid out = Grid::square(dst_side);
  for (int r = 0; r < dst_side; ++r) {
    const Tap& ty = taps[static_cast<std::size_t>(r)];
    for (int c = 0; c < dst_side; ++c) {
      const Tap& tx = taps[static_cast<std::size_t>(c)];
      const double top = std::lerp(static_cast<double>(grid(ty.lo, tx.lo)), static_cast<double>(grid(ty.lo, tx.hi)), tx.frac);
      const double bot = std::lerp(static_cast<double>(grid(ty.hi, tx.lo)), static_cast<double>(grid(ty.hi, tx.hi)), tx.frac);
      out(r, c) = static_cast<float>(std::lerp(top, bot, ty.frac));
    }
  }
  return out;
}

Grid normalize_minmax(const Grid& grid) {
  Grid out(grid.height(), grid.width());
  if (grid.empty()) return out;
  const auto [lo_it, hi_it] = std::minmax_element(grid.values().begin(), grid.values().end());
  const double lo = *lo_it;
  const double range = static_cast<double>(*hi_it) - lo;
  if (!(range > 0.0)) return out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out[i] = static_cast<float>((grid[i] - lo) / range);
  }
  return out;
}

Grid hadamard(const Grid& a, const Grid& b) {
  if (a.height() != b.height() || a.width() != b.width()) {
    throw Error(ErrorKind::ShapeMismatch, "hadamard operands " + a.shape_string() + " vs " + b.shape_string());
  }
  Grid out(a.height(), a.width());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

Grid relu_grid(const Grid& grid) {
  Grid out(grid.height(), grid.width());
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = grid[i] > 0.0f ? grid[i] : 0.0f;
  return out;
}

}  // namespace sarcam
