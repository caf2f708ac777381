#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>

#include "sarcam/bundle.hpp"
#include "sarcam/localizer.hpp"

namespace sarcam::testing {

/// SplitMix64 (Steele, Lea & Flood 2014). Output, including the double
/// conversion below, does not depend on the standard library.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int below(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }

 private:
  std::uint64_t state_;
};

enum class FixturePattern { Blob, TwoBlobs, ZeroGrads, Random };

FixturePattern parse_pattern(std::string_view name);

struct Fixture {
  FeatureBundle bundle;
  /// Known target box in image pixels (Blob, TwoBlobs, ZeroGrads).
  std::optional<BBox> ground_truth;
};

/// Deterministic synthetic bundle.
///   Blob:      one bright rectangle on a dim speckled background, with
///              features and positive gradients concentrated on the grid
///              cells under it (dilated by one cell).
///   TwoBlobs:  a large and a small rectangle; ground truth is the large one.
///   ZeroGrads: Blob with all gradients zero.
///   Random:    image and features uniform in [0, 1), gradients in [-1, 1).
/// N must be a multiple of G for the box patterns. Throws InvalidArgument on
/// unusable shapes.
Fixture make_fixture(std::uint64_t seed, int n, int g, int k, FixturePattern pattern);

/// Writes the bundle plus gt.json (when ground truth exists).
void write_fixture(const Fixture& fixture, const std::filesystem::path& dir);

}  // namespace sarcam::testing
