#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

#include "sarmot/core.hpp"

namespace sarmot {

/// Global 2x3 affine map (x, y) -> R (x, y) + t, used for camera motion
/// compensation between consecutive frames.
struct Affine2x3 {
  double r11 = 1.0, r12 = 0.0, tx = 0.0;
  double r21 = 0.0, r22 = 1.0, ty = 0.0;

  static Affine2x3 identity() { return {}; }
  static Affine2x3 translation(double dx, double dy) { return {1.0, 0.0, dx, 0.0, 1.0, dy}; }

  Point2 apply(Point2 p) const { return {r11 * p.x + r12 * p.y + tx, r21 * p.x + r22 * p.y + ty}; }
  Point2 apply_linear(Point2 v) const { return {r11 * v.x + r12 * v.y, r21 * v.x + r22 * v.y}; }
  bool is_finite() const;

  friend bool operator==(const Affine2x3&, const Affine2x3&) = default;
};

using StateVector = Eigen::Matrix<double, 8, 1>;
using StateCovariance = Eigen::Matrix<double, 8, 8>;

/// Constant-velocity state (cx, cy, a, h, vcx, vcy, va, vh).
struct KalmanState {
  StateVector mean = StateVector::Zero();
  StateCovariance covariance = StateCovariance::Identity();

  CxCyAH position() const { return {mean[0], mean[1], mean[2], mean[3]}; }
};

/// Noise weights relative to box height (SORT/ByteTrack convention).
struct KalmanNoise {
  double std_weight_position = 1.0 / 20.0;
  double std_weight_velocity = 1.0 / 160.0;
};

class KalmanFilter {
 public:
  explicit KalmanFilter(KalmanNoise noise = {}) : noise_(noise) {}

  KalmanState initiate(const CxCyAH& z) const;
  KalmanState predict(const KalmanState& s) const;
  /// Throws DataError if the innovation covariance is not positive definite.
  KalmanState update(const KalmanState& s, const CxCyAH& z) const;

 private:
  KalmanNoise noise_;
};

/// Moves centers by the full affine map, center velocities and the matching
/// covariance blocks by its linear part. Aspect and height are untouched.
std::vector<KalmanState> apply_cmc(std::span<const KalmanState> states, const Affine2x3& m);
KalmanState apply_cmc(const KalmanState& s, const Affine2x3& m);

}  // namespace sarmot
