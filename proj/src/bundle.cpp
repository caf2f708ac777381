#include "sarcam/bundle.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "sarcam/error.hpp"
#include "sarcam/npy.hpp"
#include "sarcam/png_io.hpp"

namespace sarcam {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void check_finite(std::span<const float> values, const std::string& key) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw Error(ErrorKind::NonFiniteValue, key + ": non-finite value at flat index " + std::to_string(i));
    }
  }
}

template <typename T>
T required(const json& manifest, const std::string& key) {
  if (!manifest.contains(key)) throw Error(ErrorKind::InvalidManifest, "manifest.json: missing key '" + key + "'");
  try {
    return manifest.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::InvalidManifest, "manifest.json: key '" + key + "' has the wrong type");
  }
}

int required_int(const json& manifest, const std::string& key) {
  if (manifest.contains(key) && !manifest.at(key).is_number_integer()) {
    throw Error(ErrorKind::InvalidManifest, "manifest.json: key '" + key + "' must be an integer");
  }
  return required<int>(manifest, key);
}

Stack stack_from(npy::Array array, const std::string& key) {
  if (array.shape.size() != 3 || array.shape[1] != array.shape[2]) {
    throw Error(ErrorKind::ShapeMismatch, key + ": expected shape (K,G,G), got " + array.shape_string());
  }
  return Stack(array.shape[0], array.shape[1], std::move(array.data));
}

ImageGrid grid_from(npy::Array array, const std::string& key) {
  if (array.shape.size() != 2) {
    throw Error(ErrorKind::ShapeMismatch, key + ": expected a 2-D array, got " + array.shape_string());
  }
  return ImageGrid(array.shape[0], array.shape[1], std::move(array.data));
}

ImageGrid load_image_keyed(const fs::path& path, const std::string& key) {
  if (!fs::exists(path)) throw Error(ErrorKind::MissingFile, key + ": " + path.string() + " does not exist");
  if (path.extension() == ".png") {
    try {
      return read_png_gray(path);
    } catch (const Error& e) {
      throw Error(e.kind(), key + ": " + e.message());
    }
  }
  if (path.extension() == ".npy") return grid_from(npy::read(path, key), key);
  throw Error(ErrorKind::UnsupportedFormat, key + ": unrecognised image extension '" + path.extension().string() + "'");
}

}  // namespace

bool is_bundle_dir(const fs::path& dir) { return fs::is_regular_file(dir / "manifest.json"); }

void validate_bundle(const FeatureBundle& b) {
  if (!b.features.same_shape(b.grads)) {
    throw Error(ErrorKind::ShapeMismatch,
                "features shape " + b.features.shape_string() + " vs grads shape " + b.grads.shape_string());
  }
  if (b.features.channels() < 1 || b.features.side() < 1) {
    throw Error(ErrorKind::ShapeMismatch, "features: empty stack " + b.features.shape_string());
  }
  if (!b.image.is_square() || b.image.empty()) {
    throw Error(ErrorKind::ShapeMismatch, "image: expected square N x N, got " + b.image.shape_string());
  }
  if (b.image.height() < b.features.side()) {
    throw Error(ErrorKind::ShapeMismatch, "image side " + std::to_string(b.image.height()) +
                                              " is smaller than grid side " + std::to_string(b.features.side()));
  }
  if (b.class_id < 0) throw Error(ErrorKind::InvalidManifest, "class_id must be >= 0");
  check_finite(b.image.values(), "image");
  check_finite(b.features.values(), "features");
  check_finite(b.grads.values(), "grads");
  for (std::size_t i = 0; i < b.image.size(); ++i) {
    if (b.image[i] < 0.0f) {
      throw Error(ErrorKind::InvalidValue, "image: negative intensity at flat index " + std::to_string(i));
    }
  }
  if (b.logits) {
    for (double v : *b.logits) {
      if (!std::isfinite(v)) throw Error(ErrorKind::NonFiniteValue, "logits: non-finite entry");
    }
  }
}

ImageGrid load_image(const fs::path& path) { return load_image_keyed(path, path.filename().string()); }

FeatureBundle load_bundle(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorKind::MissingFile, "bundle directory " + dir.string() + " does not exist");
  const fs::path manifest_path = dir / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) throw Error(ErrorKind::MissingFile, "manifest.json: not found in " + dir.string());

  json manifest;
  try {
    manifest = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::InvalidManifest, std::string("manifest.json: ") + e.what());
  }
  if (!manifest.is_object()) throw Error(ErrorKind::InvalidManifest, "manifest.json: top level must be an object");
  const int schema = required_int(manifest, "schema_version");
  if (schema != kBundleSchemaVersion) {
    throw Error(ErrorKind::InvalidManifest, "manifest.json: unsupported schema_version " + std::to_string(schema));
  }

  FeatureBundle b;
  b.model_name = required<std::string>(manifest, "model");
  b.layer_name = required<std::string>(manifest, "layer");
  b.class_id = required_int(manifest, "class_id");
  if (manifest.contains("class_name") && !manifest["class_name"].is_null()) {
    b.class_name = required<std::string>(manifest, "class_name");
  }
  if (manifest.contains("logits") && !manifest["logits"].is_null()) {
    b.logits = required<std::vector<double>>(manifest, "logits");
  }
  const auto image_file = required<std::string>(manifest, "image_file");
  const auto features_file = required<std::string>(manifest, "features_file");
  const auto grads_file = required<std::string>(manifest, "grads_file");
  const int image_size = required_int(manifest, "image_size");
  const int grid_size = required_int(manifest, "grid_size");
  const int channels = required_int(manifest, "channels");

  for (const auto& [key, file] : {std::pair{"image_file", image_file}, {"features_file", features_file},
                                  {"grads_file", grads_file}}) {
    if (!fs::is_regular_file(dir / file)) {
      throw Error(ErrorKind::MissingFile, std::string(key) + ": " + (dir / file).string() + " does not exist");
    }
  }

  b.image = load_image_keyed(dir / image_file, "image_file");
  b.features = stack_from(npy::read(dir / features_file, "features_file"), "features_file");
  b.grads = stack_from(npy::read(dir / grads_file, "grads_file"), "grads_file");

  if (!b.features.same_shape(b.grads)) {
    throw Error(ErrorKind::ShapeMismatch,
                "features_file shape " + b.features.shape_string() + " vs grads_file shape " + b.grads.shape_string());
  }
  if (b.features.channels() != channels || b.features.side() != grid_size) {
    throw Error(ErrorKind::ShapeMismatch, "features_file shape " + b.features.shape_string() +
                                              " vs manifest channels=" + std::to_string(channels) +
                                              " grid_size=" + std::to_string(grid_size));
  }
  if (b.image.height() != image_size || b.image.width() != image_size) {
    throw Error(ErrorKind::ShapeMismatch, "image_file shape " + b.image.shape_string() +
                                              " vs manifest image_size=" + std::to_string(image_size));
  }
  validate_bundle(b);
  return b;
}

void save_bundle(const FeatureBundle& b, const fs::path& dir) {
  validate_bundle(b);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorKind::IoFailure, "cannot create bundle directory " + dir.string());
  }

  json manifest = {
      {"schema_version", kBundleSchemaVersion},
      {"model", b.model_name},
      {"layer", b.layer_name},
      {"class_id", b.class_id},
      {"image_file", "image.npy"},
      {"features_file", "features.npy"},
      {"grads_file", "grads.npy"},
      {"image_size", b.image_side()},
      {"grid_size", b.grid_side()},
      {"channels", b.channels()},
  };
  if (b.class_name) manifest["class_name"] = *b.class_name;
  if (b.logits) manifest["logits"] = *b.logits;

  npy::write(dir / "image.npy", {b.image.height(), b.image.width()}, b.image.data());
  npy::write(dir / "features.npy", {b.channels(), b.grid_side(), b.grid_side()}, b.features.data());
  npy::write(dir / "grads.npy", {b.channels(), b.grid_side(), b.grid_side()}, b.grads.data());

  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot write " + (dir / "manifest.json").string());
  out << manifest.dump(2) << "\n";
  if (!out) throw Error(ErrorKind::IoFailure, "write failed for manifest.json");
}

}  // namespace sarcam
