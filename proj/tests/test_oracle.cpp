#include <gtest/gtest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <unsupported/Eigen/KroneckerProduct>
#include <cmath>

#include "bounds/bounds.hpp"
#include "fixtures.hpp"
#include "oracle/oracle.hpp"

using namespace gainscope;

TEST(Lyapunov, ScalarClosedForm) {
  for (double a : {0.1, 1.0, 7.5}) {
    Eigen::MatrixXd A(1, 1), Q(1, 1);
    A << -a;
    Q << 1.0;
    auto r = oracle::lyapunov_solve(A, Q);
    EXPECT_NEAR(r.P(0, 0), 1.0 / (2.0 * a), 1e-12);
  }
}

TEST(Lyapunov, MatchesKroneckerSolve) {
  Eigen::MatrixXd A(3, 3), Q(3, 3);
  A << -2, 1, 0, 0, -1, 0.5, 0.3, 0, -3;
  Q << 2, 0.5, 0, 0.5, 1, 0.1, 0, 0.1, 3;
  auto r = oracle::lyapunov_solve(A, Q);
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(3, 3);
  Eigen::MatrixXd K = Eigen::kroneckerProduct(I, A.transpose()).eval() + Eigen::kroneckerProduct(A.transpose(), I).eval();
  Eigen::VectorXd q = Eigen::Map<Eigen::VectorXd>(Q.data(), 9);
  Eigen::VectorXd p = K.fullPivLu().solve(-q);
  EXPECT_TRUE(r.P.isApprox(Eigen::Map<Eigen::MatrixXd>(p.data(), 3, 3), 1e-10));
  EXPECT_LT(r.residual, 1e-10);
}

TEST(Hinf, FirstOrderLag) {
  Eigen::MatrixXd a(1, 1), b(1, 1), c(1, 1), d(1, 1);
  a << -1;
  b << 1;
  c << 1;
  d << 0;
  EXPECT_NEAR(oracle::hinf_norm_bisection(a, b, c, d).norm, 1.0, 1e-8);
}

TEST(Hinf, ResonantPeakClosedForm) {
  // 1/(s^2 + 2 z s + 1): peak 1/(2 z sqrt(1 - z^2)) at w = sqrt(1 - 2 z^2)
  const double z = 0.1;
  Eigen::MatrixXd a(2, 2), b(2, 1), c(1, 2), d(1, 1);
  a << 0, 1, -1, -2 * z;
  b << 0, 1;
  c << 1, 0;
  d << 0;
  auto r = oracle::hinf_norm_bisection(a, b, c, d);
  EXPECT_NEAR(r.norm, 1.0 / (2 * z * std::sqrt(1 - z * z)), 1e-7);
  EXPECT_NEAR(r.peak_frequency, std::sqrt(1 - 2 * z * z), 1e-3);
  EXPECT_NEAR(oracle::hinf_norm_sweep(a, b, c, d, 20000).norm, r.norm, 1e-3);
}

TEST(Hinf, FeedthroughOnly) {
  Eigen::MatrixXd a(1, 1), b(1, 1), c(1, 1), d(1, 1);
  a << -1;
  b << 0;
  c << 0;
  d << -2.5;
  EXPECT_NEAR(oracle::hinf_norm_bisection(a, b, c, d).norm, 2.5, 1e-8);
}

// Mismatch transfer at theta = (1, 0): -1/(s+2) + 2/(s+3) = (s+1)/((s+2)(s+3)).
TEST(Oracle, InducedGainClosedForm) {
  auto s = fixtures::numerical();
  const double x = std::sqrt(24.0) - 1.0;  // maximiser of (w^2+1)/((w^2+4)(w^2+9)) in w^2
  const double expect = (x + 1) / ((x + 4) * (x + 9));
  EXPECT_NEAR(oracle::l2_induced_gain_exact(s, std::vector<double>{1.0, 0.0}), expect, 1e-8);
  EXPECT_NEAR(expect, 0.0480, 1e-4);
  EXPECT_NEAR(oracle::l2_induced_gain_exact(s, s.theta_star), 0.0, 1e-14);
}

TEST(Oracle, H2AgainstQuadrature) {
  auto s = fixtures::numerical();
  boost::math::quadrature::exp_sinh<double> integrator;
  auto h = [](double t) {
    const double v = -std::exp(-2 * t) + 2 * std::exp(-3 * t);
    return v * v;
  };
  const double quad = integrator.integrate(h, 0.0, std::numeric_limits<double>::infinity());
  EXPECT_NEAR(quad, 7.0 / 60.0, 1e-10);
  EXPECT_NEAR(oracle::h2_norm_exact(s, std::vector<double>{1.0, 0.0}), 7.0 / 60.0, 1e-10);
}

TEST(Oracle, StateToOutputAnalytic) {
  auto s = sys::load_system(bounds::analytic_system_text(1.0, 1.0, 0.1, 4.0));
  for (double t1 : fixtures::linspace(-0.9, 3.0, 9)) {
    for (double t2 : fixtures::linspace(-0.9, 3.0, 9)) {
      const double want = fixtures::analytic_s2o(t1, t2);
      const double got = oracle::state_to_output_gain_exact(s, std::vector<double>{t1, t2});
      EXPECT_NEAR(got, want, 1e-9 * (1 + want));
    }
  }
}

TEST(Oracle, GramianTraceIsH2) {
  auto s = sys::load_system(fixtures::kMassSpring);
  std::vector<double> th{2.5, 0.7};
  auto g = oracle::mismatch_gramian(s, th);
  auto r = oracle::mismatch_realization(s, th);
  const double tr = (r.B.transpose() * g.Wo * r.B).trace();
  EXPECT_NEAR(tr, oracle::h2_norm_exact(s, th), 1e-10);
}

TEST(Oracle, NonHurwitzPointIsRejected) {
  auto s = fixtures::numerical();
  EXPECT_THROW(oracle::l2_induced_gain_exact(s, std::vector<double>{2.0, 1.5}), oracle::OracleError);
  EXPECT_THROW(oracle::h2_norm_exact(s, std::vector<double>{2.0, 1.5}), oracle::OracleError);
}
