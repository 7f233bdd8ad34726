#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "sarmot/grid.hpp"

namespace sarmot {

/// Discretization shared by the forward transform and back-projection.
///
/// Pixel (x, y) is placed at its center relative to the map center:
///   xc = x + 0.5 - W/2,  yc = y + 0.5 - H/2
/// and maps at angle bin t (theta = t * pi / angle_bins) to
///   rho_bin = floor((xc cos theta + yc sin theta + diag/2) / rho_res)
/// clamped to [0, rho_bins).
class RadonGeometry {
 public:
  RadonGeometry(int height, int width, int angle_bins, int rho_bins);

  /// 180 angle bins and ceil(diag) rho bins.
  static RadonGeometry with_defaults(int height, int width);

  int height() const { return height_; }
  int width() const { return width_; }
  int angle_bins() const { return angle_bins_; }
  int rho_bins() const { return rho_bins_; }
  double diagonal() const { return diag_; }
  double angle_res() const { return angle_res_; }
  double rho_res() const { return rho_res_; }

  int rho_bin(int x, int y, int angle) const {
    const double xc = x + 0.5 - 0.5 * width_;
    const double yc = y + 0.5 - 0.5 * height_;
    const double rho = xc * cos_[angle] + yc * sin_[angle];
    int bin = static_cast<int>(std::floor((rho + 0.5 * diag_) / rho_res_));
    if (bin < 0) bin = 0;
    if (bin >= rho_bins_) bin = rho_bins_ - 1;
    return bin;
  }

 private:
  int height_;
  int width_;
  int angle_bins_;
  int rho_bins_;
  double diag_;
  double angle_res_;
  double rho_res_;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

/// Theta x P x C accumulator; (c, angle, rho) indexing.
class RadonMap : public ChannelGrid {
 public:
  RadonMap(const RadonGeometry& g, int channels)
      : ChannelGrid(g.angle_bins(), g.rho_bins(), channels), geometry_(g) {}

  const RadonGeometry& geometry() const { return geometry_; }

 private:
  RadonGeometry geometry_;
};

/// 1x1 channel mixing producing the [W_X, W_A] gates from [X, A_soft].
/// weights is row-major (2C x 2C): gate k = sigmoid(sum_j w[k][j] * in[j]).
struct FusionParams {
  int channels = 0;
  std::vector<double> weights;

  static FusionParams zeros(int channels);
  double weight(int out, int in) const {
    return weights[static_cast<std::size_t>(out) * 2 * channels + in];
  }
  void validate() const;
};

RadonMap radon_forward(const FeatureMap& x, const RadonGeometry& g);

/// Per-channel default threshold: mean + one standard deviation of the plane.
std::vector<double> default_threshold(const RadonMap& y);

/// Thresholded back-projection. tau has one entry per channel.
FeatureMap radon_backproject(const RadonMap& y, std::span<const double> tau);
FeatureMap radon_backproject(const RadonMap& y, double tau);

LineIntensityMap soft_normalize(const FeatureMap& a);

FeatureMap gated_fuse(const FeatureMap& x, const LineIntensityMap& a_soft, const FusionParams& p);

struct LffmOptions {
  int angle_bins = 0;  // 0 -> 180
  int rho_bins = 0;    // 0 -> ceil(diagonal)
  std::optional<double> tau;  // unset -> default_threshold
};

struct LffmResult {
  FeatureMap fused;
  LineIntensityMap line_intensity;
};

/// Forward transform, thresholded back-projection, softmax, gated fusion.
LffmResult lffm(const FeatureMap& x, const LffmOptions& opt, const FusionParams& p);

}  // namespace sarmot
