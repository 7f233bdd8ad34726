#include "sarmot/grid.hpp"

#include <algorithm>
#include <cmath>

namespace sarmot {

ChannelGrid::ChannelGrid(int rows, int cols, int channels, double fill)
    : rows_(rows), cols_(cols), channels_(channels) {
  if (rows < 1 || cols < 1 || channels < 1) throw DataError("grid dimensions must be >= 1");
  data_.assign(static_cast<std::size_t>(rows) * cols * channels, fill);
}

bool ChannelGrid::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

FeatureMap stack_channels(std::span<const FeatureMap> frames) {
  if (frames.empty()) throw DataError("cannot stack an empty frame list");
  int channels = 0;
  for (const auto& f : frames) {
    if (f.height() != frames[0].height() || f.width() != frames[0].width()) {
      throw DataError("stacked frames must share spatial size");
    }
    channels += f.channels();
  }
  FeatureMap out(frames[0].height(), frames[0].width(), channels);
  int c = 0;
  for (const auto& f : frames) {
    for (int k = 0; k < f.channels(); ++k, ++c) {
      auto src = f.plane(k);
      std::copy(src.begin(), src.end(), out.plane(c).begin());
    }
  }
  return out;
}

}  // namespace sarmot
