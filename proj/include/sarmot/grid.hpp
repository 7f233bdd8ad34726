#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sarmot/core.hpp"

namespace sarmot {

/// Dense real grid of `channels` planes, each rows x cols, stored
/// channel-major then row-major (matches the on-disk tensor layout).
class ChannelGrid {
 public:
  ChannelGrid() = default;
  ChannelGrid(int rows, int cols, int channels, double fill = 0.0);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int channels() const { return channels_; }
  std::size_t plane_size() const { return static_cast<std::size_t>(rows_) * cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(int c, int r, int col) { return data_[index(c, r, col)]; }
  double operator()(int c, int r, int col) const { return data_[index(c, r, col)]; }

  std::span<double> plane(int c) { return {data_.data() + c * plane_size(), plane_size()}; }
  std::span<const double> plane(int c) const {
    return {data_.data() + c * plane_size(), plane_size()};
  }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  bool same_shape(const ChannelGrid& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && channels_ == o.channels_;
  }
  bool all_finite() const;

 private:
  std::size_t index(int c, int r, int col) const {
    return (static_cast<std::size_t>(c) * rows_ + r) * cols_ + col;
  }

  int rows_ = 0;
  int cols_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

/// H x W x C spatial feature map; (c, y, x) indexing.
class FeatureMap : public ChannelGrid {
 public:
  FeatureMap() = default;
  FeatureMap(int height, int width, int channels, double fill = 0.0)
      : ChannelGrid(height, width, channels, fill) {}

  int height() const { return rows(); }
  int width() const { return cols(); }
};

/// Normalized line response: every channel plane sums to one.
class LineIntensityMap : public FeatureMap {
 public:
  LineIntensityMap() = default;
  explicit LineIntensityMap(FeatureMap m) : FeatureMap(std::move(m)) {}
};

/// Stacks single-channel frames along the channel axis.
FeatureMap stack_channels(std::span<const FeatureMap> frames);

}  // namespace sarmot
