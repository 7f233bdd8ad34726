#include "sarmot/lfa.hpp"

#include <algorithm>
#include <cmath>

namespace sarmot {

double doppler_shift(double wavelength_m, double radial_rate, double scatterer_rate) {
  if (!(wavelength_m > 0.0)) throw DataError("doppler_shift: wavelength must be positive");
  return 2.0 / wavelength_m * (radial_rate - scatterer_rate);
}

double velocity_target(Point2 center, Point2 previous_center, const Affine2x3& cmc,
                       double frame_gap) {
  if (!(frame_gap > 0.0)) throw DataError("velocity_target: frame gap must be positive");
  const Point2 warped = cmc.apply(previous_center);
  return std::hypot(center.x - warped.x, center.y - warped.y) / frame_gap;
}

std::vector<double> normalize_velocities(std::span<const double> v, VelocityNormalization mode) {
  std::vector<double> out(v.size(), 0.0);
  if (mode == VelocityNormalization::WholeSequence) {
    double peak = 0.0;
    for (double x : v) peak = std::max(peak, x);
    if (peak > 0.0) {
      for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / peak;
    }
    return out;
  }
  double running = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    running = std::max(running, v[i]);
    out[i] = running > 0.0 ? v[i] / running : 0.0;
  }
  return out;
}

Mlp Mlp::pass_through(int in_dim, int out_dim) {
  Mlp m = zero(in_dim, out_dim);
  for (int i = 0; i < std::min(in_dim, out_dim); ++i) {
    m.w1[static_cast<std::size_t>(i) * in_dim + i] = 1.0;
  }
  for (int i = 0; i < out_dim; ++i) m.w2[static_cast<std::size_t>(i) * out_dim + i] = 1.0;
  return m;
}

Mlp Mlp::zero(int in_dim, int out_dim) {
  Mlp m;
  m.in_dim = in_dim;
  m.hidden_dim = out_dim;
  m.out_dim = out_dim;
  m.w1.assign(static_cast<std::size_t>(out_dim) * in_dim, 0.0);
  m.b1.assign(static_cast<std::size_t>(out_dim), 0.0);
  m.w2.assign(static_cast<std::size_t>(out_dim) * out_dim, 0.0);
  m.b2.assign(static_cast<std::size_t>(out_dim), 0.0);
  return m;
}

void Mlp::validate() const {
  if (in_dim < 1 || hidden_dim < 1 || out_dim < 1) throw DataError("mlp dimensions must be >= 1");
  const auto sz = [](int a, int b) { return static_cast<std::size_t>(a) * b; };
  if (w1.size() != sz(hidden_dim, in_dim) || b1.size() != sz(hidden_dim, 1) ||
      w2.size() != sz(out_dim, hidden_dim) || b2.size() != sz(out_dim, 1)) {
    throw DataError("mlp weight shapes do not match its dimensions");
  }
}

std::vector<double> Mlp::operator()(std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(in_dim)) throw DataError("mlp input size mismatch");
  std::vector<double> hidden(b1);
  for (int i = 0; i < hidden_dim; ++i) {
    for (int j = 0; j < in_dim; ++j) hidden[i] += w1[static_cast<std::size_t>(i) * in_dim + j] * x[j];
    hidden[i] = std::max(0.0, hidden[i]);
  }
  std::vector<double> out(b2);
  for (int i = 0; i < out_dim; ++i) {
    for (int j = 0; j < hidden_dim; ++j) {
      out[i] += w2[static_cast<std::size_t>(i) * hidden_dim + j] * hidden[j];
    }
  }
  return out;
}

RadiusRange radius_range(const BBox& b, const LfaConfig& cfg) {
  if (!(cfg.lambda_max > 0.0)) throw DataError("lambda_max must be positive");
  const double cx = b.cx();
  const double cy = b.cy();
  const double w = cfg.image_width;
  const double h = cfg.image_height;
  if (cx < 0.0 || cx > w || cy < 0.0 || cy > h) {
    throw DataError("proposal center lies outside the image");
  }
  return {std::max(b.w, b.h), cfg.lambda_max * std::max({cx, w - cx, cy, h - cy})};
}

double adaptive_radius(const BBox& b, double v_hat, const LfaConfig& cfg) {
  const RadiusRange r = radius_range(b, cfg);
  if (r.max < r.min) return r.min;
  if (v_hat >= 1.0) return r.max;
  return std::min(r.max, r.min + v_hat * (r.max - r.min));
}

std::vector<double> neighborhood_pool(const LineIntensityMap& a_soft, Point2 center,
                                      double radius) {
  if (!(radius >= 0.0)) throw DataError("neighborhood radius must be non-negative");
  const int px = static_cast<int>(std::floor(center.x));
  const int py = static_cast<int>(std::floor(center.y));
  if (center.x < 0.0 || center.y < 0.0 || px >= a_soft.width() || py >= a_soft.height()) {
    throw DataError("neighborhood center outside the map");
  }
  const int reach = static_cast<int>(std::floor(radius));
  const int x0 = std::max(0, px - reach);
  const int x1 = std::min(a_soft.width() - 1, px + reach);
  const int y0 = std::max(0, py - reach);
  const int y1 = std::min(a_soft.height() - 1, py + reach);
  const double r2 = radius * radius;

  std::vector<double> sum(static_cast<std::size_t>(a_soft.channels()), 0.0);
  std::size_t count = 0;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double dx = x - px;
      const double dy = y - py;
      if (dx * dx + dy * dy > r2) continue;
      ++count;
    }
  }
  for (int c = 0; c < a_soft.channels(); ++c) {
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double dx = x - px;
        const double dy = y - py;
        if (dx * dx + dy * dy <= r2) sum[c] += a_soft(c, y, x);
      }
    }
    sum[c] /= static_cast<double>(count);
  }
  return sum;
}

Proposal enhance_proposal(const Proposal& p, const LineIntensityMap& a_soft, const LfaConfig& cfg) {
  cfg.mlp.validate();
  if (cfg.mlp.in_dim != a_soft.channels() ||
      cfg.mlp.out_dim != static_cast<int>(p.feature.size())) {
    throw DataError("mlp shape does not match map channels / proposal feature size");
  }
  if (!(p.v_hat >= 0.0 && p.v_hat <= 1.0)) throw DataError("proposal v_hat outside [0,1]");
  const double radius = adaptive_radius(p.bbox, p.v_hat, cfg);
  const std::vector<double> pooled = neighborhood_pool(a_soft, {p.bbox.cx(), p.bbox.cy()}, radius);
  const std::vector<double> delta = cfg.mlp(pooled);
  Proposal out = p;
  for (std::size_t i = 0; i < out.feature.size(); ++i) out.feature[i] += delta[i];
  return out;
}

std::vector<Proposal> enhance_proposals(std::span<const Proposal> ps, const LineIntensityMap& a_soft,
                                        const LfaConfig& cfg) {
  std::vector<Proposal> out(ps.begin(), ps.end());
  const auto n = static_cast<std::ptrdiff_t>(ps.size());
  // Exceptions must not escape an OpenMP region, so every input is checked
  // serially before the parallel loop.
  cfg.mlp.validate();
  for (const auto& p : ps) {
    if (cfg.mlp.out_dim != static_cast<int>(p.feature.size()) || cfg.mlp.in_dim != a_soft.channels()) {
      throw DataError("mlp shape does not match map channels / proposal feature size");
    }
    if (!(p.v_hat >= 0.0 && p.v_hat <= 1.0)) throw DataError("proposal v_hat outside [0,1]");
    const Point2 c{p.bbox.cx(), p.bbox.cy()};
    (void)radius_range(p.bbox, cfg);
    if (c.x >= a_soft.width() || c.y >= a_soft.height()) {
      throw DataError("neighborhood center outside the map");
    }
  }
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = enhance_proposal(ps[i], a_soft, cfg);
  return out;
}

}  // namespace sarmot
