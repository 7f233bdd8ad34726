#include "sarmot/motion.hpp"

#include <Eigen/Cholesky>
#include <cmath>

namespace sarmot {

bool Affine2x3::is_finite() const {
  for (double v : {r11, r12, tx, r21, r22, ty}) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

namespace {

using MeasurementMatrix = Eigen::Matrix<double, 4, 8>;

StateCovariance transition() {
  StateCovariance f = StateCovariance::Identity();
  for (int i = 0; i < 4; ++i) f(i, 4 + i) = 1.0;
  return f;
}

MeasurementMatrix projection() {
  MeasurementMatrix h = MeasurementMatrix::Zero();
  for (int i = 0; i < 4; ++i) h(i, i) = 1.0;
  return h;
}

}  // namespace

KalmanState KalmanFilter::initiate(const CxCyAH& z) const {
  if (!(z.h > 0.0)) throw DataError("kalman initiate: height must be positive");
  KalmanState s;
  s.mean << z.cx, z.cy, z.a, z.h, 0.0, 0.0, 0.0, 0.0;
  const double wp = noise_.std_weight_position * z.h;
  const double wv = noise_.std_weight_velocity * z.h;
  StateVector std;
  std << 2.0 * wp, 2.0 * wp, 1e-2, 2.0 * wp, 10.0 * wv, 10.0 * wv, 1e-5, 10.0 * wv;
  s.covariance = std.array().square().matrix().asDiagonal();
  return s;
}

KalmanState KalmanFilter::predict(const KalmanState& s) const {
  static const StateCovariance f = transition();
  const double h = s.mean[3];
  const double wp = noise_.std_weight_position * h;
  const double wv = noise_.std_weight_velocity * h;
  StateVector std;
  std << wp, wp, 1e-2, wp, wv, wv, 1e-5, wv;
  KalmanState out;
  out.mean = f * s.mean;
  out.covariance = f * s.covariance * f.transpose();
  out.covariance.diagonal() += std.array().square().matrix();
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose());
  return out;
}

KalmanState KalmanFilter::update(const KalmanState& s, const CxCyAH& z) const {
  static const MeasurementMatrix hm = projection();
  const double h = s.mean[3];
  const double wp = noise_.std_weight_position * h;
  Eigen::Vector4d rstd(wp, wp, 1e-1, wp);

  const Eigen::Vector4d projected = hm * s.mean;
  Eigen::Matrix4d innovation_cov = hm * s.covariance * hm.transpose();
  innovation_cov.diagonal() += rstd.array().square().matrix();

  const Eigen::LLT<Eigen::Matrix4d> llt(innovation_cov);
  if (llt.info() != Eigen::Success) {
    throw DataError("kalman update: innovation covariance is not positive definite");
  }
  // K = P H^T S^-1, solved without forming the inverse.
  const Eigen::Matrix<double, 8, 4> gain =
      llt.solve(hm * s.covariance.transpose()).transpose();
  const Eigen::Vector4d innovation(z.cx - projected[0], z.cy - projected[1],
                                   z.a - projected[2], z.h - projected[3]);
  KalmanState out;
  out.mean = s.mean + gain * innovation;
  out.covariance = s.covariance - gain * innovation_cov * gain.transpose();
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose());
  return out;
}

KalmanState apply_cmc(const KalmanState& s, const Affine2x3& m) {
  KalmanState out = s;
  const Point2 c = m.apply({s.mean[0], s.mean[1]});
  const Point2 v = m.apply_linear({s.mean[4], s.mean[5]});
  out.mean[0] = c.x;
  out.mean[1] = c.y;
  out.mean[4] = v.x;
  out.mean[5] = v.y;

  StateCovariance r = StateCovariance::Identity();
  r(0, 0) = m.r11;
  r(0, 1) = m.r12;
  r(1, 0) = m.r21;
  r(1, 1) = m.r22;
  r(4, 4) = m.r11;
  r(4, 5) = m.r12;
  r(5, 4) = m.r21;
  r(5, 5) = m.r22;
  out.covariance = r * s.covariance * r.transpose();
  return out;
}

std::vector<KalmanState> apply_cmc(std::span<const KalmanState> states, const Affine2x3& m) {
  std::vector<KalmanState> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(apply_cmc(s, m));
  return out;
}

}  // namespace sarmot
