#include <gtest/gtest.h>

#include "bounds/bounds.hpp"
#include "fixtures.hpp"
#include "polycore/parser.hpp"
#include "sysmodel/system.hpp"

using namespace gainscope;

TEST(System, LoadsDimensionsAndDomain) {
  auto s = fixtures::numerical();
  EXPECT_EQ(s.n, 1);
  EXPECT_EQ(s.m, 1);
  EXPECT_EQ(s.p, 1);
  EXPECT_EQ(s.ntheta, 2);
  EXPECT_EQ(s.theta_names, (std::vector<std::string>{"t1", "t2"}));
  EXPECT_TRUE(s.in_domain(std::vector<double>{1.5, -1.0}));
  EXPECT_FALSE(s.in_domain(std::vector<double>{1.6, 0.0}));
  auto box = sys::domain_box(s);
  ASSERT_TRUE(box.has_value());
  EXPECT_DOUBLE_EQ((*box)[0].lo, -1.5);
  EXPECT_DOUBLE_EQ((*box)[1].hi, 1.0);
}

TEST(System, EvaluatesMatrices) {
  auto s = fixtures::numerical();
  std::vector<double> th{1.0, 0.5};
  auto ss = sys::eval_at(s, th);
  EXPECT_DOUBLE_EQ(ss.A(0, 0), -1.5);
  EXPECT_DOUBLE_EQ(ss.B(0, 0), -0.5);
  EXPECT_DOUBLE_EQ(ss.C(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(ss.D(0, 0), 0.0);
}

TEST(System, CascadeIsBlockTriangular) {
  auto s = sys::load_system(fixtures::kMassSpring);
  auto cas = sys::build_cascade(s);
  std::vector<double> th{0.5, -0.2};
  auto c = sys::eval_at(cas, th);
  auto nom = sys::eval_at(s, s.theta_star);
  auto unc = sys::eval_at(s, th);
  ASSERT_EQ(c.A.rows(), 4);
  EXPECT_TRUE(c.A.topLeftCorner(2, 2).isApprox(nom.A));
  EXPECT_TRUE(c.A.topRightCorner(2, 2).isZero());
  EXPECT_TRUE(c.A.bottomRightCorner(2, 2).isApprox(unc.A));
  // the e-dynamics difference block vanishes at the nominal point
  auto c0 = sys::eval_at(cas, s.theta_star);
  EXPECT_TRUE(c0.A.bottomLeftCorner(2, 2).isZero(1e-14));
  EXPECT_TRUE(c0.B.bottomRows(2).isZero(1e-14));
}

TEST(System, SerializationRoundTripKeepsHash) {
  auto s = fixtures::numerical();
  auto again = sys::load_system(sys::serialize(s.spec));
  EXPECT_EQ(s.hash, again.hash);
  auto other = sys::load_system(fixtures::kMassSpring);
  EXPECT_NE(s.hash, other.hash);
}

TEST(System, NormalizationMapsNominalToOrigin) {
  auto s = sys::load_system(bounds::analytic_system_text(2.0, 0.5, 0.1, 4.0));
  EXPECT_EQ(s.theta_star, (std::vector<double>{0.0, 0.0}));
  // theta = theta* (1 + t)
  auto orig = s.to_original(std::vector<double>{0.5, 1.0});
  EXPECT_DOUBLE_EQ(orig[0], 3.0);
  EXPECT_DOUBLE_EQ(orig[1], 1.0);
  auto ss = sys::eval_at(s, std::vector<double>{0.5, 1.0});
  EXPECT_NEAR(ss.A(0, 0), -3.0 / 2.0, 1e-14);
  auto box = sys::domain_box(s);
  ASSERT_TRUE(box.has_value());
  EXPECT_NEAR((*box)[0].lo, 0.1 / 2.0 - 1.0, 1e-12);
  EXPECT_NEAR((*box)[1].hi, 4.0 / 0.5 - 1.0, 1e-12);
}

TEST(System, RejectsMalformedInput) {
  const std::string good = fixtures::kNumerical;
  auto replace = [&](const std::string& from, const std::string& to) {
    std::string t = good;
    t.replace(t.find(from), from.size(), to);
    return t;
  };
  EXPECT_THROW(sys::load_system(replace("theta_star = 0, 0", "theta_star = 0")), sys::SystemError);
  EXPECT_THROW(sys::load_system(replace("theta_star = 0, 0", "theta_star = 3, 0")), sys::SystemError);
  EXPECT_THROW(sys::load_system(replace("[B]\n-1 + t2", "[B]\n-1 + t2, 1")), std::runtime_error);
  EXPECT_THROW(sys::load_system(replace("2 - t1", "2 - t9")), poly::ParseError);
  EXPECT_THROW(sys::load_system(replace("-3 + t1 + t2", "1/t1")), std::runtime_error);
}

TEST(System, HurwitzSampleCheck) {
  auto s = fixtures::numerical();
  auto ok = sys::hurwitz_sample_check(s, {{0.0, 0.0}, {1.5, 1.0}});
  EXPECT_TRUE(ok.all_stable);
  EXPECT_NEAR(ok.worst, -0.5, 1e-12);
  auto bad = sys::hurwitz_sample_check(s, {{2.0, 1.5}});
  EXPECT_FALSE(bad.all_stable);
  EXPECT_DOUBLE_EQ(sys::spectral_abscissa(Eigen::Matrix2d{{0, 1}, {-2, -1}}), -0.5);
}

TEST(System, BoxGridCoversCorners) {
  std::vector<sys::Interval> box{{-1, 1}, {0, 2}};
  auto g = sys::box_grid(box, {3, 2});
  ASSERT_EQ(g.size(), 6u);
  EXPECT_EQ(g.front(), (std::vector<double>{-1, 0}));
  EXPECT_EQ(g.back(), (std::vector<double>{1, 2}));
}
