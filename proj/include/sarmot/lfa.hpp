#pragma once

#include <span>
#include <vector>

#include "sarmot/core.hpp"
#include "sarmot/grid.hpp"
#include "sarmot/motion.hpp"

namespace sarmot {

/// Doppler shift (Hz) of a scatterer: (2 / wavelength) * (radial - relative rate).
double doppler_shift(double wavelength_m, double radial_rate, double scatterer_rate);

/// Center displacement magnitude between frames after compensating the
/// previous center, per frame of gap (pixels / frame).
double velocity_target(Point2 center, Point2 previous_center, const Affine2x3& cmc,
                       double frame_gap);

enum class VelocityNormalization {
  WholeSequence,  // divide by the maximum over the whole list
  RunningMax,     // divide by the maximum seen so far (causal)
};

/// Maps speeds into [0, 1]. An all-zero prefix/list maps to zeros.
std::vector<double> normalize_velocities(
    std::span<const double> v, VelocityNormalization mode = VelocityNormalization::WholeSequence);

/// Two affine layers with a ReLU in between: out = W2 relu(W1 x + b1) + b2.
struct Mlp {
  int in_dim = 0;
  int hidden_dim = 0;
  int out_dim = 0;
  std::vector<double> w1, b1;  // hidden x in, hidden
  std::vector<double> w2, b2;  // out x hidden, out

  /// hidden = out; identity on the first min(in, out) inputs, identity output layer.
  static Mlp pass_through(int in_dim, int out_dim);
  static Mlp zero(int in_dim, int out_dim);

  std::vector<double> operator()(std::span<const double> x) const;
  void validate() const;
};

struct LfaConfig {
  double lambda_max = 0.4;
  int image_width = 0;
  int image_height = 0;
  Mlp mlp;
};

struct Proposal {
  BBox bbox;
  std::vector<double> feature;
  double v_hat = 0.0;
};

struct RadiusRange {
  double min = 0.0;
  double max = 0.0;
};

/// R_min = max(w, h); R_max = lambda_max * max(cx, W - cx, cy, H - cy).
RadiusRange radius_range(const BBox& b, const LfaConfig& cfg);

/// Linear interpolation between R_min and R_max by v_hat, never below R_min.
double adaptive_radius(const BBox& b, double v_hat, const LfaConfig& cfg);

/// Mean channel vector over grid cells within distance R of the cell holding
/// `center` (the cell itself always counts).
std::vector<double> neighborhood_pool(const LineIntensityMap& a_soft, Point2 center, double radius);

Proposal enhance_proposal(const Proposal& p, const LineIntensityMap& a_soft, const LfaConfig& cfg);

/// Parallel over proposals; output order matches input.
std::vector<Proposal> enhance_proposals(std::span<const Proposal> ps, const LineIntensityMap& a_soft,
                                        const LfaConfig& cfg);

}  // namespace sarmot
