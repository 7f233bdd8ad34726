#include "sarmot/reference.hpp"

#include <algorithm>
#include <cmath>

namespace sarmot::reference {

RadonMap radon_forward(const FeatureMap& x, const RadonGeometry& g) {
  if (x.height() != g.height() || x.width() != g.width()) {
    throw DataError("feature map does not match radon geometry");
  }
  if (!x.all_finite()) throw DataError("radon_forward: non-finite input");
  RadonMap y(g, x.channels());
  for (int c = 0; c < x.channels(); ++c) {
    for (int py = 0; py < x.height(); ++py) {
      for (int px = 0; px < x.width(); ++px) {
        for (int t = 0; t < g.angle_bins(); ++t) y(c, t, g.rho_bin(px, py, t)) += x(c, py, px);
      }
    }
  }
  return y;
}

FeatureMap radon_backproject(const RadonMap& y, std::span<const double> tau) {
  if (tau.size() != static_cast<std::size_t>(y.channels())) {
    throw DataError("radon_backproject: one threshold per channel required");
  }
  const RadonGeometry& g = y.geometry();
  FeatureMap a(g.height(), g.width(), y.channels());
  for (int c = 0; c < y.channels(); ++c) {
    for (int t = 0; t < g.angle_bins(); ++t) {
      for (int r = 0; r < g.rho_bins(); ++r) {
        const double v = y(c, t, r);
        if (!(v >= tau[c])) continue;
        for (int py = 0; py < g.height(); ++py) {
          for (int px = 0; px < g.width(); ++px) {
            if (g.rho_bin(px, py, t) == r) a(c, py, px) += v;
          }
        }
      }
    }
  }
  return a;
}

LineIntensityMap soft_normalize(const FeatureMap& a) {
  FeatureMap out(a.height(), a.width(), a.channels());
  for (int c = 0; c < a.channels(); ++c) {
    auto src = a.plane(c);
    auto dst = out.plane(c);
    const double peak = *std::max_element(src.begin(), src.end());
    double total = 0.0;
    for (std::size_t i = 0; i < src.size(); ++i) {
      dst[i] = std::exp(src[i] - peak);
      total += dst[i];
    }
    for (double& v : dst) v /= total;
  }
  return LineIntensityMap(std::move(out));
}

FeatureMap gated_fuse(const FeatureMap& x, const LineIntensityMap& a_soft, const FusionParams& p) {
  if (!x.same_shape(a_soft)) throw DataError("gated_fuse: X and A_soft shapes differ");
  p.validate();
  if (p.channels != x.channels()) throw DataError("gated_fuse: params channel count mismatch");
  const int channels = x.channels();
  FeatureMap z(x.height(), x.width(), channels);
  for (int py = 0; py < x.height(); ++py) {
    for (int px = 0; px < x.width(); ++px) {
      for (int c = 0; c < channels; ++c) {
        double zx = 0.0;
        double za = 0.0;
        for (int j = 0; j < channels; ++j) {
          zx += p.weight(c, j) * x(j, py, px);
          za += p.weight(channels + c, j) * x(j, py, px);
        }
        for (int j = 0; j < channels; ++j) {
          zx += p.weight(c, channels + j) * a_soft(j, py, px);
          za += p.weight(channels + c, channels + j) * a_soft(j, py, px);
        }
        const double wx = 1.0 / (1.0 + std::exp(-zx));
        const double wa = 1.0 / (1.0 + std::exp(-za));
        z(c, py, px) = (wx + 1.0) * x(c, py, px) + wa * a_soft(c, py, px);
      }
    }
  }
  return z;
}

}  // namespace sarmot::reference
