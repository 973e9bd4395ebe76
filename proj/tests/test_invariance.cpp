#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "invariance/invariance.hpp"
#include "oracle/oracle.hpp"

using namespace gainscope;

// Invariant points of the scalar plant: (2-t1)(t2-1)(s+3) = -2(s+3-t1-t2) for all s
// forces t1 + t2 = 0 and t1 (1 - t1) = 0, i.e. the nominal point and (1, -1).
TEST(Invariance, FullyInvariantPoint) {
  auto s = fixtures::numerical();
  std::vector<double> th{1.0, -1.0};
  EXPECT_TRUE(inv::output_invariant_test(s, th, 0));
  EXPECT_TRUE(inv::ss_invariant_test(s, th, 0));
  EXPECT_NEAR(oracle::l2_induced_gain_exact(s, th), 0.0, 1e-12);
  auto rep = inv::invariance_report(s, th, 0);
  EXPECT_TRUE(rep.is_fully_invariant);
  // the nominal-row variant keeps C(theta*) = 2 where C(theta) = 1, so it does not vanish here
  EXPECT_TRUE(rep.variant_disagrees);
}

// DC gain (2-t1)(t2-1)/(3-t1-t2) = -2/3 at t1 = -1 gives t2 = 1/7.
TEST(Invariance, SteadyStateOnly) {
  auto s = fixtures::numerical();
  std::vector<double> th{-1.0, 1.0 / 7.0};
  EXPECT_NEAR(inv::dc_gain_mismatch(s, th, 0).norm(), 0.0, 1e-12);
  EXPECT_TRUE(inv::ss_invariant_test(s, th, 0));
  EXPECT_FALSE(inv::output_invariant_test(s, th, 0));
  EXPECT_GT(oracle::l2_induced_gain_exact(s, th), 1e-4);
}

TEST(Invariance, GenericPointIsNotInvariant) {
  auto s = fixtures::numerical();
  std::vector<double> th{0.5, 0.5};
  EXPECT_FALSE(inv::ss_invariant_all(s, th));
  EXPECT_FALSE(inv::output_invariant_all(s, th));
  auto rep = inv::invariance_report(s, th, 0);
  EXPECT_GT(rep.ss_mismatch, 0.1);
  EXPECT_GT(rep.numerator_norm, 0.1);
}

TEST(Invariance, LeverrierFaddeevAdjugateIdentity) {
  Eigen::MatrixXd a(3, 3);
  a << -1, 2, 0, 0.5, -3, 1, 0, 1, -2;
  auto f = inv::leverrier_faddeev(a);
  ASSERT_EQ(f.charpoly.size(), 4u);
  EXPECT_DOUBLE_EQ(f.charpoly[3], 1.0);
  EXPECT_NEAR(f.charpoly[2], -a.trace(), 1e-12);
  EXPECT_NEAR(f.charpoly[0], -a.determinant(), 1e-12);
  for (double sv : {0.3, 2.0, -5.0}) {
    Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(3, 3);
    double p = 0, pw = 1;
    for (int k = 0; k < 4; ++k, pw *= sv) {
      p += f.charpoly[k] * pw;
      if (k < 3) adj += f.adjugate[k] * pw;
    }
    Eigen::MatrixXd si = sv * Eigen::MatrixXd::Identity(3, 3) - a;
    EXPECT_TRUE((adj * si).isApprox(p * Eigen::MatrixXd::Identity(3, 3), 1e-10));
  }
}

TEST(Invariance, NumeratorVanishesExactlyOnInvariantSet) {
  auto s = fixtures::numerical();
  auto num = inv::mismatch_transfer_numerator(s, std::vector<double>{1.0, -1.0}, 0);
  for (const auto& p : num) EXPECT_TRUE(p.is_zero() || p.degree() < 0 || poly::approx_equal(p, poly::Polynomial(), 1e-12));
  auto num2 = inv::mismatch_transfer_numerator(s, std::vector<double>{1.0, 0.0}, 0);
  ASSERT_EQ(num2.size(), 1u);
  EXPECT_FALSE(poly::approx_equal(num2[0], poly::Polynomial(), 1e-6));
}
