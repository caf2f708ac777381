#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace sarcam {

/// Row-major 2-D grid of 32-bit reals. Used for input images, every
/// intermediate map and the final saliency map.
class Grid {
 public:
  Grid() = default;
  Grid(int height, int width, float fill = 0.0f);
  Grid(int height, int width, std::vector<float> values);

  static Grid square(int side, float fill = 0.0f) { return Grid(side, side, fill); }

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  bool is_square() const noexcept { return height_ == width_; }
  bool empty() const noexcept { return data_.empty(); }
  std::size_t size() const noexcept { return data_.size(); }

  float& operator()(int row, int col) { return data_[static_cast<std::size_t>(row) * width_ + col]; }
  float operator()(int row, int col) const { return data_[static_cast<std::size_t>(row) * width_ + col]; }
  float& operator[](std::size_t i) { return data_[i]; }
  float operator[](std::size_t i) const { return data_[i]; }

  std::span<float> values() noexcept { return data_; }
  std::span<const float> values() const noexcept { return data_; }
  const std::vector<float>& data() const noexcept { return data_; }

  std::string shape_string() const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<float> data_;
};

using ImageGrid = Grid;
using SaliencyMap = Grid;

/// K square grids of side G stored contiguously, channel-major. Holds
/// feature maps, gradients and every per-channel intermediate of the
/// CAM pipeline.
class Stack {
 public:
  Stack() = default;
  Stack(int channels, int side, float fill = 0.0f);
  Stack(int channels, int side, std::vector<float> values);

  int channels() const noexcept { return channels_; }
  int side() const noexcept { return side_; }
  std::size_t plane_size() const noexcept { return static_cast<std::size_t>(side_) * side_; }

  std::span<float> channel(int k);
  std::span<const float> channel(int k) const;
  Grid channel_grid(int k) const;
  void set_channel(int k, const Grid& grid);

  float& at(int k, int row, int col) { return data_[k * plane_size() + static_cast<std::size_t>(row) * side_ + col]; }
  float at(int k, int row, int col) const { return data_[k * plane_size() + static_cast<std::size_t>(row) * side_ + col]; }

  std::span<float> values() noexcept { return data_; }
  std::span<const float> values() const noexcept { return data_; }
  const std::vector<float>& data() const noexcept { return data_; }

  bool same_shape(const Stack& other) const noexcept {
    return channels_ == other.channels_ && side_ == other.side_;
  }
  std::string shape_string() const;

  friend bool operator==(const Stack&, const Stack&) = default;

 private:
  int channels_ = 0;
  int side_ = 0;
  std::vector<float> data_;
};

using FeatureStack = Stack;
using GradientStack = Stack;

}  // namespace sarcam
