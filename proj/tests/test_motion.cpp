#include <gtest/gtest.h>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "sarmot/motion.hpp"
#include "sarmot/rng.hpp"

using namespace sarmot;

namespace {

double asym(const StateCovariance& p) { return (p - p.transpose()).cwiseAbs().maxCoeff(); }

bool positive_definite(const StateCovariance& p) {
  Eigen::LLT<StateCovariance> llt(p);
  return llt.info() == Eigen::Success;
}

}  // namespace

TEST(KalmanInit, Examples) {
  const KalmanFilter kf;
  const KalmanState s = kf.initiate({10, 10, 1, 4});
  EXPECT_EQ(s.position(), (CxCyAH{10, 10, 1, 4}));
  for (int k = 4; k < 8; ++k) EXPECT_EQ(s.mean[k], 0.0);
  EXPECT_EQ(asym(s.covariance), 0.0);
  EXPECT_TRUE(positive_definite(s.covariance));
  const KalmanState t = kf.initiate({10, 10, 1, 4});
  EXPECT_EQ(s.mean, t.mean);
  EXPECT_EQ(s.covariance, t.covariance);
  EXPECT_THROW(kf.initiate({1, 1, 1, 0}), DataError);
  EXPECT_THROW(kf.initiate({1, 1, 1, -2}), DataError);
}

TEST(KalmanPredict, Examples) {
  const KalmanFilter kf;
  const KalmanState s = kf.initiate({3, 7, 0.5, 20});
  const KalmanState p = kf.predict(s);
  EXPECT_EQ(p.position(), s.position());
  EXPECT_GT(p.covariance.trace(), s.covariance.trace());

  KalmanState m = kf.initiate({0, 0, 1, 4});
  m.mean[4] = 1;
  m.mean[5] = 2;
  const KalmanState q = kf.predict(m);
  EXPECT_EQ(q.position(), (CxCyAH{1, 2, 1, 4}));
}

TEST(KalmanUpdate, Examples) {
  const KalmanFilter kf;
  const KalmanState s = kf.predict(kf.initiate({50, 60, 0.7, 30}));
  const KalmanState u = kf.update(s, s.position());
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(u.mean[k], s.mean[k], 1e-12);
  for (int k = 0; k < 4; ++k) EXPECT_LE(u.covariance(k, k), s.covariance(k, k));
}

TEST(KalmanUpdate, ConvergesToConstantMeasurement) {
  const KalmanFilter kf;
  KalmanState s = kf.initiate({10, 10, 1, 10});
  const CxCyAH z{40, -20, 1.5, 14};
  double err20 = 0.0;
  for (int k = 1; k <= 100; ++k) {
    s = kf.update(kf.predict(s), z);
    if (k == 20) err20 = std::max(std::abs(s.mean[0] - z.cx), std::abs(s.mean[1] - z.cy));
  }
  EXPECT_LT(err20, 0.5);
  EXPECT_NEAR(s.mean[0], z.cx, 1e-3);
  EXPECT_NEAR(s.mean[1], z.cy, 1e-3);
  EXPECT_NEAR(s.mean[2], z.a, 1e-3);
  EXPECT_NEAR(s.mean[3], z.h, 1e-3);
}

TEST(KalmanUpdate, PosteriorContractsOnMeasuredSubspace) {
  Rng rng(7);
  const KalmanFilter kf;
  for (int k = 0; k < 50; ++k) {
    KalmanState s = kf.initiate({rng.uniform(0, 100), rng.uniform(0, 100), rng.uniform(0.3, 3), rng.uniform(5, 50)});
    for (int j = 0; j < 5; ++j) s = kf.predict(s);
    const KalmanState u =
        kf.update(s, {rng.uniform(0, 100), rng.uniform(0, 100), rng.uniform(0.3, 3), rng.uniform(5, 50)});
    const Eigen::Matrix4d diff = s.covariance.topLeftCorner<4, 4>() - u.covariance.topLeftCorner<4, 4>();
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(0.5 * (diff + diff.transpose()));
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-9);
  }
}

TEST(KalmanUpdate, SingularInnovationThrows) {
  const KalmanFilter kf;
  KalmanState s = kf.initiate({0, 0, 1, 10});
  s.covariance.setZero();
  s.mean[3] = 0.0;
  EXPECT_THROW(kf.update(s, {0, 0, 1, 10}), DataError);
}

TEST(KalmanProperty, SymmetryOverLongSequences) {
  Rng rng(3);
  const KalmanFilter kf;
  KalmanState s = kf.initiate({20, 20, 1, 20});
  for (int k = 0; k < 100; ++k) {
    s = kf.predict(s);
    if (rng.uniform() < 0.7) {
      s = kf.update(s, {20 + rng.normal() * 3, 20 + rng.normal() * 3, 1 + 0.05 * rng.normal(), 20 + rng.normal()});
    }
    ASSERT_LT(asym(s.covariance), 1e-9);
    for (int d = 0; d < 8; ++d) ASSERT_GT(s.covariance(d, d), 0.0);
  }
}

TEST(KalmanProperty, TracksConstantVelocityTruth) {
  const KalmanFilter kf;
  const double vx = 2.5, vy = -1.25;
  KalmanState s = kf.initiate({100, 100, 0.8, 25});
  for (int t = 1; t <= 30; ++t) {
    s = kf.update(kf.predict(s), {100 + vx * t, 100 + vy * t, 0.8, 25});
  }
  EXPECT_NEAR(s.mean[0], 100 + vx * 30, 1e-2);
  EXPECT_NEAR(s.mean[1], 100 + vy * 30, 1e-2);
  const KalmanState p = kf.predict(s);
  EXPECT_NEAR(p.mean[0], 100 + vx * 31, 2e-2);
}

TEST(Cmc, IdentityLeavesStateUnchanged) {
  const KalmanFilter kf;
  KalmanState s = kf.predict(kf.initiate({5, 6, 1.1, 12}));
  s.mean[4] = 0.3;
  const KalmanState c = apply_cmc(s, Affine2x3::identity());
  EXPECT_EQ(c.mean, s.mean);
  EXPECT_EQ(c.covariance, s.covariance);
}

TEST(Cmc, TranslationMovesCentersOnly) {
  const KalmanFilter kf;
  std::vector<KalmanState> ss{kf.initiate({1, 2, 1, 4}), kf.initiate({-3, 8, 2, 9})};
  ss[1].mean[4] = 1.5;
  const auto out = apply_cmc(ss, Affine2x3::translation(5, 0));
  ASSERT_EQ(out.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(out[i].mean[0], ss[i].mean[0] + 5);
    EXPECT_EQ(out[i].mean[1], ss[i].mean[1]);
    for (int k = 2; k < 8; ++k) EXPECT_EQ(out[i].mean[k], ss[i].mean[k]);
    EXPECT_EQ(out[i].covariance, ss[i].covariance);
  }
}

TEST(Cmc, RotationOfCenterAndCovariance) {
  const double c = std::cos(std::numbers::pi / 2), s = std::sin(std::numbers::pi / 2);
  const Affine2x3 rot{c, -s, 0, s, c, 0};
  const KalmanFilter kf;
  KalmanState st = kf.initiate({1, 0, 1, 4});
  st.mean[4] = 2.0;
  st.covariance(0, 0) = 9.0;
  st.covariance(1, 1) = 1.0;
  const KalmanState r = apply_cmc(st, rot);
  EXPECT_NEAR(r.mean[0], 0.0, 1e-12);
  EXPECT_NEAR(r.mean[1], 1.0, 1e-12);
  EXPECT_NEAR(r.mean[4], 0.0, 1e-12);
  EXPECT_NEAR(r.mean[5], 2.0, 1e-12);
  EXPECT_EQ(r.mean[2], 1.0);
  EXPECT_EQ(r.mean[3], 4.0);
  EXPECT_NEAR(r.covariance(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(r.covariance(1, 1), 9.0, 1e-12);
  EXPECT_LT(asym(r.covariance), 1e-12);
}

TEST(Cmc, AffineApply) {
  const Affine2x3 m{2, 0, 1, 0, 3, -1};
  const Point2 p = m.apply({1, 1});
  EXPECT_EQ(p.x, 3.0);
  EXPECT_EQ(p.y, 2.0);
  EXPECT_TRUE(m.is_finite());
  EXPECT_FALSE((Affine2x3{NAN, 0, 0, 0, 1, 0}).is_finite());
}
