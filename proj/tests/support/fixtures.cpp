#include "fixtures.hpp"

#include <fstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "sarcam/error.hpp"

namespace sarcam::testing {
namespace {

struct CellRect {
  int r0, c0, r1, c1;  // inclusive grid cells
};

BBox pixel_box(const CellRect& cells, int n, int g) {
  const int cell = n / g;
  return {cells.r0 * cell, cells.c0 * cell, (cells.r1 + 1) * cell - 1, (cells.c1 + 1) * cell - 1};
}

void paint_image(ImageGrid& image, const BBox& box, SplitMix64& rng) {
  for (int r = box.row_min; r <= box.row_max; ++r) {
    for (int c = box.col_min; c <= box.col_max; ++c) image(r, c) = static_cast<float>(rng.uniform(0.8, 1.0));
  }
}

bool in_dilated(const CellRect& cells, int r, int c) {
  return r >= cells.r0 - 1 && r <= cells.r1 + 1 && c >= cells.c0 - 1 && c <= cells.c1 + 1;
}

Fixture make_boxes(std::uint64_t seed, int n, int g, int k, const std::vector<CellRect>& rects, bool zero_grads) {
  SplitMix64 rng(seed);
  Fixture fx;
  FeatureBundle& b = fx.bundle;
  b.model_name = "synthetic";
  b.layer_name = "fixture";
  b.class_id = 0;

  b.image = ImageGrid::square(n);
  for (auto& v : b.image.values()) v = static_cast<float>(rng.uniform(0.02, 0.10));
  for (const auto& rect : rects) paint_image(b.image, pixel_box(rect, n, g), rng);

  b.features = FeatureStack(k, g);
  b.grads = GradientStack(k, g);
  for (int ch = 0; ch < k; ++ch) {
    const double scale = rng.uniform(0.5, 1.5);
    for (int r = 0; r < g; ++r) {
      for (int c = 0; c < g; ++c) {
        bool on = false;
        for (const auto& rect : rects) on = on || in_dilated(rect, r, c);
        const double noise = rng.uniform(0.0, 0.05);
        b.features.at(ch, r, c) = static_cast<float>(on ? scale + noise : noise);
        const double grad = on ? rng.uniform(0.5, 1.0) : rng.uniform(-0.3, 0.3);
        b.grads.at(ch, r, c) = zero_grads ? 0.0f : static_cast<float>(grad);
      }
    }
  }
  fx.ground_truth = pixel_box(rects.front(), n, g);
  return fx;
}

}  // namespace

FixturePattern parse_pattern(std::string_view name) {
  if (name == "blob") return FixturePattern::Blob;
  if (name == "two_blobs") return FixturePattern::TwoBlobs;
  if (name == "zero_grads") return FixturePattern::ZeroGrads;
  if (name == "random") return FixturePattern::Random;
  throw Error(ErrorKind::InvalidArgument, "unknown fixture pattern '" + std::string(name) + "'");
}

Fixture make_fixture(std::uint64_t seed, int n, int g, int k, FixturePattern pattern) {
  if (g < 1 || k < 1 || n < g) throw Error(ErrorKind::InvalidArgument, "fixture needs N >= G >= 1 and K >= 1");

  if (pattern == FixturePattern::Random) {
    SplitMix64 rng(seed);
    Fixture fx;
    FeatureBundle& b = fx.bundle;
    b.model_name = "synthetic";
    b.layer_name = "fixture";
    b.class_id = static_cast<int>(seed % 4);
    b.image = ImageGrid::square(n);
    for (auto& v : b.image.values()) v = static_cast<float>(rng.uniform());
    b.features = FeatureStack(k, g);
    for (auto& v : b.features.values()) v = static_cast<float>(rng.uniform());
    b.grads = GradientStack(k, g);
    for (auto& v : b.grads.values()) v = static_cast<float>(rng.uniform(-1.0, 1.0));
    return fx;
  }

  if (n % g != 0) throw Error(ErrorKind::InvalidArgument, "box fixtures need N to be a multiple of G");
  if (pattern == FixturePattern::TwoBlobs) {
    if (g < 8) throw Error(ErrorKind::InvalidArgument, "two_blobs fixture needs G >= 8");
    // Large blob in the upper left, small blob in the lower right, one
    // empty cell row/column between their image footprints.
    const CellRect large{g / 8, g / 8, g / 8 + g / 4 + g / 8, g / 8 + g / 2 - 1};
    const CellRect small{large.r1 + 2, large.c1 + 2, large.r1 + 2 + g / 8, large.c1 + 2 + g / 8};
    return make_boxes(seed, n, g, k, {large, small}, false);
  }
  if (g < 4) throw Error(ErrorKind::InvalidArgument, "blob fixture needs G >= 4");
  const CellRect blob{g / 4, g / 4 + 1, g / 4 + g / 2 - 1, g / 4 + g / 2 - 1};
  return make_boxes(seed, n, g, k, {blob}, pattern == FixturePattern::ZeroGrads);
}

void write_fixture(const Fixture& fixture, const std::filesystem::path& dir) {
  save_bundle(fixture.bundle, dir);
  if (fixture.ground_truth) {
    const BBox& b = *fixture.ground_truth;
    nlohmann::json gt = {{"row_min", b.row_min}, {"col_min", b.col_min}, {"row_max", b.row_max}, {"col_max", b.col_max}};
    std::ofstream(dir / "gt.json") << gt.dump(2) << "\n";
  }
}

}  // namespace sarcam::testing
