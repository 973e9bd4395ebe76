#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "bounds/bounds.hpp"
#include "fixtures.hpp"
#include "oracle/oracle.hpp"
#include "report/report.hpp"

using namespace gainscope;

namespace {

std::vector<double> field(const std::vector<double>& xs, const std::vector<double>& ys, double (*f)(double, double)) {
  std::vector<double> v;
  for (double x : xs) {
    for (double y : ys) v.push_back(f(x, y));
  }
  return v;
}

}  // namespace

TEST(MarchingSquares, CircleIsOneClosedLoop) {
  auto xs = fixtures::linspace(-2, 2, 41), ys = fixtures::linspace(-2, 2, 41);
  auto v = field(xs, ys, [](double x, double y) { return x * x + y * y; });
  auto lines = report::marching_squares(xs, ys, v, 1.0);
  ASSERT_EQ(lines.size(), 1u);
  EXPECT_TRUE(lines[0].closed);
  EXPECT_GT(lines[0].points.size(), 20u);
  for (const auto& p : lines[0].points) EXPECT_NEAR(std::hypot(p[0], p[1]), 1.0, 0.01);
}

TEST(MarchingSquares, PlaneGivesOneOpenLine) {
  auto xs = fixtures::linspace(0, 1, 11), ys = fixtures::linspace(0, 1, 7);
  auto v = field(xs, ys, [](double x, double) { return x; });
  auto lines = report::marching_squares(xs, ys, v, 0.55);
  ASSERT_EQ(lines.size(), 1u);
  EXPECT_FALSE(lines[0].closed);
  EXPECT_EQ(lines[0].points.size(), 7u);
  for (const auto& p : lines[0].points) EXPECT_NEAR(p[0], 0.55, 1e-12);
}

TEST(MarchingSquares, TwoSeparateBlobs) {
  auto xs = fixtures::linspace(-3, 3, 61), ys = fixtures::linspace(-1, 1, 21);
  auto v = field(xs, ys, [](double x, double y) {
    return std::min((x - 1.5) * (x - 1.5) + y * y, (x + 1.5) * (x + 1.5) + y * y);
  });
  auto lines = report::marching_squares(xs, ys, v, 0.25);
  EXPECT_EQ(lines.size(), 2u);
}

TEST(MarchingSquares, LevelBelowMinimumIsEmpty) {
  auto xs = fixtures::linspace(-1, 1, 5), ys = fixtures::linspace(-1, 1, 5);
  auto v = field(xs, ys, [](double x, double y) { return 1 + x * x + y * y; });
  EXPECT_TRUE(report::marching_squares(xs, ys, v, 0.5).empty());
  EXPECT_EQ(report::levelset_csv({}), "polyline,closed,vertex,t1,t2\n");
}

TEST(Sweep, TwoByTwoGridHasFourRows) {
  auto s = fixtures::numerical();
  auto grid = report::domain_grid(s, {2, 2});
  ASSERT_EQ(grid.size(), 4u);
  auto fn = [](std::span<const double>) { return 1.0; };
  auto rows = report::sweep(s, fn, bounds::BoundKind::l2, grid);
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.status, "ok");
    EXPECT_NEAR(r.margin, 1.0 - oracle::l2_induced_gain_exact(s, r.theta), 1e-14);
  }
  auto csv = report::sweep_csv(s, rows);
  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "t1,t2,bound,oracle,margin,status");
  int n = 0;
  while (std::getline(is, line)) ++n;
  EXPECT_EQ(n, 4);
}

TEST(Sweep, UnstablePointsAreMarked) {
  std::string text = fixtures::kNumerical;
  text.replace(text.find("-3 + t1 + t2"), 12, "-1 + t1 + t2");
  auto s = sys::load_system(text);
  auto rows = report::sweep(s, [](std::span<const double>) { return 0.0; }, bounds::BoundKind::l2,
                            {{0.0, 0.0}, {1.0, 1.0}});
  EXPECT_EQ(rows[0].status, "ok");
  EXPECT_EQ(rows[1].status, "unstable");
}

TEST(Sweep, ThreadCountDoesNotChangeOutput) {
  auto s = fixtures::numerical();
  auto grid = report::domain_grid(s, {9, 7});
  auto fn = [](std::span<const double> t) { return 0.5 + t[0] * t[0]; };
  auto a = report::sweep_csv(s, report::sweep(s, fn, bounds::BoundKind::l2, grid, false, 1));
  auto b = report::sweep_csv(s, report::sweep(s, fn, bounds::BoundKind::l2, grid, false, 4));
  EXPECT_EQ(a, b);
}

TEST(Parallel, PropagatesExceptions) {
  EXPECT_THROW(report::parallel_for(100, 4,
                                    [](std::size_t i) {
                                      if (i == 37) throw std::runtime_error("boom");
                                    }),
               std::runtime_error);
  std::vector<int> hit(50, 0);
  report::parallel_for(hit.size(), 3, [&](std::size_t i) { hit[i] = 1; });
  EXPECT_EQ(std::count(hit.begin(), hit.end(), 1), 50);
}

TEST(Parallel, EnvironmentCapsThreads) {
  setenv("GAINSCOPE_THREADS", "1", 1);
  EXPECT_EQ(report::thread_count(), 1);
  unsetenv("GAINSCOPE_THREADS");
  EXPECT_GE(report::thread_count(), 1);
}

TEST(Levelset, RequiresTwoParameters) {
  auto s = sys::load_system(fixtures::kMassSpring);
  auto fn = [](std::span<const double> t) { return t[0]; };
  EXPECT_EQ(report::levelset(s, fn, {5, 5}, 2.0).size(), 1u);
  std::string one = R"(
[dims]
n, m, p, ntheta = 1, 1, 1, 1
[A]
-1 - t1
[B]
1
[C]
1
[D]
0
[nominal]
theta_star = 0
[domain]
g1 = -(t1 + 0.5)*(t1 - 0.5)
)";
  EXPECT_THROW(report::levelset(sys::load_system(one), fn, {5}, 0.0), report::ReportError);
}

TEST(Certify, AcceptsOwnCertificateAndRejectsTampering) {
  auto s = fixtures::numerical();
  auto b = bounds::l2_gain_bound(s, {});
  ASSERT_TRUE(b.valid());
  auto ok = report::certify(b.certificate, s, 3, 30);
  EXPECT_TRUE(ok.ok()) << ok.reason;
  EXPECT_EQ(ok.samples, 30);
  EXPECT_GE(ok.worst_margin, -1e-6);

  auto other = report::certify(b.certificate, sys::load_system(fixtures::kMassSpring));
  EXPECT_FALSE(other.hash_matches);
  EXPECT_EQ(other.reason, "system hash mismatch");

  auto tampered = b.certificate;
  tampered.constraints.back().gram.Q(0, 0) += 1e-3;
  EXPECT_FALSE(report::certify(tampered, s).valid);
}

TEST(Invariance, CsvHasOneRowPerPointAndInput) {
  auto s = fixtures::numerical();
  auto csv = report::invariance_csv(s, {{0.0, 0.0}, {1.0, -1.0}, {0.5, 0.5}});
  std::istringstream is(csv);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(is, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0].rfind("t1,t2,input,", 0), 0u);
  EXPECT_NE(lines[2].find(",0,0,1,1,1,ok"), std::string::npos) << lines[2];
}

TEST(Format, SeventeenDigits) {
  EXPECT_EQ(report::fmt17(0.1), "0.10000000000000001");
  EXPECT_EQ(report::fmt17(std::nan("")), "nan");
}
