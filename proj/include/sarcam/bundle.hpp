#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sarcam/grid.hpp"

namespace sarcam {

/// One explanation request: the input image, the feature stack of the
/// selected layer and the class-specific gradients of that stack.
struct FeatureBundle {
  ImageGrid image;
  FeatureStack features;
  GradientStack grads;
  int class_id = 0;
  std::string layer_name;
  std::string model_name;
  std::optional<std::string> class_name;
  std::optional<std::vector<double>> logits;

  int image_side() const { return image.height(); }
  int grid_side() const { return features.side(); }
  int channels() const { return features.channels(); }
};

inline constexpr int kBundleSchemaVersion = 1;

/// Checks every bundle invariant; throws sarcam::Error naming the first
/// violation.
void validate_bundle(const FeatureBundle& bundle);

/// Loads a bundle directory (manifest.json plus image and tensor files).
FeatureBundle load_bundle(const std::filesystem::path& dir);

/// Writes manifest.json, image.npy, features.npy and grads.npy into `dir`,
/// creating it if needed. Tensor payloads round-trip bit-exactly.
void save_bundle(const FeatureBundle& bundle, const std::filesystem::path& dir);

/// Loads a PNG (see read_png_gray) or a 2-D float32 NPY file.
ImageGrid load_image(const std::filesystem::path& path);

bool is_bundle_dir(const std::filesystem::path& dir);

}  // namespace sarcam
