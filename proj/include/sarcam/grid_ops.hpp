#pragma once

#include "sarcam/grid.hpp"

namespace sarcam {

/// Bilinear resampling of a square grid to dst_side x dst_side.
///
/// Output pixel i samples the source at (i + 0.5) * src / dst - 0.5,
/// clamped to [0, src - 1]. The same kernel serves both downsampling and
/// upsampling; there is no anti-aliasing prefilter. Resizing to the
/// source side returns the input unchanged, and constant inputs stay
/// exactly constant.
Grid resize_bilinear(const Grid& grid, int dst_side);

/// Min-max normalization to [0, 1]. A constant grid maps to all zeros.
Grid normalize_minmax(const Grid& grid);

Grid hadamard(const Grid& a, const Grid& b);

Grid relu_grid(const Grid& grid);

}  // namespace sarcam
