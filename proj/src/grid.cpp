#include "sarcam/grid.hpp"

#include <algorithm>
#include <utility>

#include "sarcam/error.hpp"

namespace sarcam {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingFile: return "MissingFile";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::InvalidValue: return "InvalidValue";
    case ErrorKind::UnsupportedDType: return "UnsupportedDType";
    case ErrorKind::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorKind::InvalidManifest: return "InvalidManifest";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::BadIntermediateSize: return "BadIntermediateSize";
    case ErrorKind::BadFraction: return "BadFraction";
    case ErrorKind::OutOfBounds: return "OutOfBounds";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Grid::Grid(int height, int width, float fill) : height_(height), width_(width) {
  if (height < 0 || width < 0) {
    throw Error(ErrorKind::InvalidArgument, "negative grid dimension");
  }
  data_.assign(static_cast<std::size_t>(height) * width, fill);
}

Grid::Grid(int height, int width, std::vector<float> values)
    : height_(height), width_(width), data_(std::move(values)) {
  if (height < 0 || width < 0 || data_.size() != static_cast<std::size_t>(height) * width) {
    throw Error(ErrorKind::ShapeMismatch, "grid data length " + std::to_string(data_.size()) +
                                              " does not match " + shape_string());
  }
}

std::string Grid::shape_string() const {
  return "(" + std::to_string(height_) + "," + std::to_string(width_) + ")";
}

Stack::Stack(int channels, int side, float fill) : channels_(channels), side_(side) {
  if (channels < 0 || side < 0) {
    throw Error(ErrorKind::InvalidArgument, "negative stack dimension");
  }
  data_.assign(static_cast<std::size_t>(channels) * plane_size(), fill);
}

Stack::Stack(int channels, int side, std::vector<float> values)
    : channels_(channels), side_(side), data_(std::move(values)) {
  if (channels < 0 || side < 0 || data_.size() != static_cast<std::size_t>(channels) * plane_size()) {
    throw Error(ErrorKind::ShapeMismatch, "stack data length " + std::to_string(data_.size()) +
                                              " does not match " + shape_string());
  }
}

std::span<float> Stack::channel(int k) {
  return std::span<float>(data_).subspan(k * plane_size(), plane_size());
}

std::span<const float> Stack::channel(int k) const {
  return std::span<const float>(data_).subspan(k * plane_size(), plane_size());
}

Grid Stack::channel_grid(int k) const {
  auto plane = channel(k);
  return Grid(side_, side_, std::vector<float>(plane.begin(), plane.end()));
}

void Stack::set_channel(int k, const Grid& grid) {
  if (grid.height() != side_ || grid.width() != side_) {
    throw Error(ErrorKind::ShapeMismatch,
                "channel grid " + grid.shape_string() + " does not fit stack " + shape_string());
  }
  std::copy(grid.values().begin(), grid.values().end(), channel(k).begin());
}

std::string Stack::shape_string() const {
  return "(" + std::to_string(channels_) + "," + std::to_string(side_) + "," + std::to_string(side_) + ")";
}

}  // namespace sarcam
