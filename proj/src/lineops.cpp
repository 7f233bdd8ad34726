#include "sarmot/lineops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sarmot {

RadonGeometry::RadonGeometry(int height, int width, int angle_bins, int rho_bins)
    : height_(height), width_(width), angle_bins_(angle_bins), rho_bins_(rho_bins) {
  if (height < 1 || width < 1) throw DataError("radon geometry needs a non-empty map");
  if (angle_bins < 1 || rho_bins < 1) throw DataError("radon bin counts must be >= 1");
  diag_ = std::hypot(static_cast<double>(height), static_cast<double>(width));
  angle_res_ = std::numbers::pi / angle_bins;
  rho_res_ = diag_ / rho_bins;
  cos_.resize(static_cast<std::size_t>(angle_bins));
  sin_.resize(static_cast<std::size_t>(angle_bins));
  for (int t = 0; t < angle_bins; ++t) {
    cos_[t] = std::cos(t * angle_res_);
    sin_[t] = std::sin(t * angle_res_);
  }
}

RadonGeometry RadonGeometry::with_defaults(int height, int width) {
  const double diag = std::hypot(static_cast<double>(height), static_cast<double>(width));
  return RadonGeometry(height, width, 180, static_cast<int>(std::ceil(diag)));
}

FusionParams FusionParams::zeros(int channels) {
  FusionParams p;
  p.channels = channels;
  p.weights.assign(static_cast<std::size_t>(4) * channels * channels, 0.0);
  return p;
}

void FusionParams::validate() const {
  if (channels < 1) throw DataError("fusion params need at least one channel");
  if (weights.size() != static_cast<std::size_t>(4) * channels * channels) {
    throw DataError("fusion weights must be (2C x 2C)");
  }
  for (double w : weights) {
    if (!std::isfinite(w)) throw DataError("fusion weights must be finite");
  }
}

RadonMap radon_forward(const FeatureMap& x, const RadonGeometry& g) {
  if (x.height() != g.height() || x.width() != g.width()) {
    throw DataError("feature map does not match radon geometry");
  }
  if (!x.all_finite()) throw DataError("radon_forward: non-finite input");
  RadonMap y(g, x.channels());
  const int channels = x.channels();
  const int angles = g.angle_bins();
  const int h = x.height();
  const int w = x.width();
  // Each (channel, angle) row is owned by one iteration.
#pragma omp parallel for collapse(2) schedule(static)
  for (int c = 0; c < channels; ++c) {
    for (int t = 0; t < angles; ++t) {
      for (int py = 0; py < h; ++py) {
        for (int px = 0; px < w; ++px) {
          y(c, t, g.rho_bin(px, py, t)) += x(c, py, px);
        }
      }
    }
  }
  return y;
}

std::vector<double> default_threshold(const RadonMap& y) {
  std::vector<double> tau(static_cast<std::size_t>(y.channels()));
  for (int c = 0; c < y.channels(); ++c) {
    auto p = y.plane(c);
    const double n = static_cast<double>(p.size());
    double mean = 0.0;
    for (double v : p) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : p) var += (v - mean) * (v - mean);
    tau[c] = mean + std::sqrt(var / n);
  }
  return tau;
}

FeatureMap radon_backproject(const RadonMap& y, std::span<const double> tau) {
  if (tau.size() != static_cast<std::size_t>(y.channels())) {
    throw DataError("radon_backproject: one threshold per channel required");
  }
  const RadonGeometry& g = y.geometry();
  FeatureMap a(g.height(), g.width(), y.channels());
  const int channels = y.channels();
  const int angles = g.angle_bins();
  const int h = g.height();
  const int w = g.width();
  // Gather form of the adjoint: pixel (x, y) lies on exactly one line per angle.
#pragma omp parallel for collapse(2) schedule(static)
  for (int c = 0; c < channels; ++c) {
    for (int py = 0; py < h; ++py) {
      for (int px = 0; px < w; ++px) {
        double acc = 0.0;
        for (int t = 0; t < angles; ++t) {
          const double v = y(c, t, g.rho_bin(px, py, t));
          if (v >= tau[c]) acc += v;
        }
        a(c, py, px) = acc;
      }
    }
  }
  return a;
}

FeatureMap radon_backproject(const RadonMap& y, double tau) {
  std::vector<double> t(static_cast<std::size_t>(y.channels()), tau);
  return radon_backproject(y, t);
}

LineIntensityMap soft_normalize(const FeatureMap& a) {
  FeatureMap out(a.height(), a.width(), a.channels());
  for (int c = 0; c < a.channels(); ++c) {
    auto src = a.plane(c);
    auto dst = out.plane(c);
    const double peak = *std::max_element(src.begin(), src.end());
    const auto n = static_cast<std::ptrdiff_t>(src.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) dst[i] = std::exp(src[i] - peak);
    // Serial sum keeps the result independent of the thread count.
    double total = 0.0;
    for (double v : dst) total += v;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) dst[i] /= total;
  }
  return LineIntensityMap(std::move(out));
}

namespace {
double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }
}  // namespace

FeatureMap gated_fuse(const FeatureMap& x, const LineIntensityMap& a_soft, const FusionParams& p) {
  if (!x.same_shape(a_soft)) throw DataError("gated_fuse: X and A_soft shapes differ");
  p.validate();
  if (p.channels != x.channels()) throw DataError("gated_fuse: params channel count mismatch");
  const int channels = x.channels();
  const auto pixels = static_cast<std::ptrdiff_t>(x.plane_size());
  FeatureMap z(x.height(), x.width(), channels);
  auto xv = x.values();
  auto av = a_soft.values();
  auto zv = z.values();
  const auto plane = static_cast<std::ptrdiff_t>(x.plane_size());
#pragma omp parallel
  {
    std::vector<double> in(static_cast<std::size_t>(2 * channels));
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < pixels; ++i) {
      for (int c = 0; c < channels; ++c) {
        in[c] = xv[c * plane + i];
        in[channels + c] = av[c * plane + i];
      }
      for (int c = 0; c < channels; ++c) {
        double zx = 0.0;
        double za = 0.0;
        for (int j = 0; j < 2 * channels; ++j) {
          zx += p.weight(c, j) * in[j];
          za += p.weight(channels + c, j) * in[j];
        }
        zv[c * plane + i] = (sigmoid(zx) + 1.0) * in[c] + sigmoid(za) * in[channels + c];
      }
    }
  }
  return z;
}

LffmResult lffm(const FeatureMap& x, const LffmOptions& opt, const FusionParams& p) {
  const double diag = std::hypot(static_cast<double>(x.height()), static_cast<double>(x.width()));
  const RadonGeometry g(x.height(), x.width(), opt.angle_bins > 0 ? opt.angle_bins : 180,
                        opt.rho_bins > 0 ? opt.rho_bins : static_cast<int>(std::ceil(diag)));
  const RadonMap y = radon_forward(x, g);
  const std::vector<double> tau =
      opt.tau ? std::vector<double>(static_cast<std::size_t>(y.channels()), *opt.tau)
              : default_threshold(y);
  LineIntensityMap a_soft = soft_normalize(radon_backproject(y, tau));
  FeatureMap z = gated_fuse(x, a_soft, p);
  return {std::move(z), std::move(a_soft)};
}

}  // namespace sarmot
