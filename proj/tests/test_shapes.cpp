// Surface shape checks on the CSV products (the figures are not compared pixel-wise).
#include <gtest/gtest.h>

#include <sstream>

#include "bounds/bounds.hpp"
#include "fixtures.hpp"
#include "oracle/oracle.hpp"
#include "report/report.hpp"

using namespace gainscope;

namespace {

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int col(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
  }
  double num(std::size_t r, const std::string& name) const { return std::stod(rows[r][col(name)]); }
};

Csv parse(const std::string& text) {
  Csv c;
  std::istringstream is(text);
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (first) {
      c.header = cells;
      first = false;
    } else {
      c.rows.push_back(cells);
    }
  }
  return c;
}

sys::UncertainSystem analytic() { return sys::load_system(bounds::analytic_system_text(1.0, 1.0, 0.1, 4.0)); }

bounds::GainBound analytic_upper(const sys::UncertainSystem& s) {
  bounds::BoundOptions opt;
  opt.deg = {4, 4, 4, 4, 0, 0};
  return bounds::state_to_output_upper(s, opt);
}

}  // namespace

// Zero valley along t2 = 2 t1 in every constant-t1 slice of the sweep.
TEST(Shapes, ValleyAlongInvariantLine) {
  auto s = analytic();
  auto b = analytic_upper(s);
  ASSERT_TRUE(b.valid());
  const int n = 40;
  auto grid = sys::box_grid(*sys::domain_box(s), {n, n});
  auto rows = report::sweep(s, [&](std::span<const double> t) { return b.eval(t); }, bounds::BoundKind::s2o_upper,
                            grid);
  auto csv = parse(report::sweep_csv(s, rows));
  ASSERT_EQ(csv.rows.size(), static_cast<std::size_t>(n * n));
  int slices = 0;
  for (int i = 0; i < n; ++i) {
    const double t1 = csv.num(i * n, "t1");
    if (2 * t1 < -0.9 || 2 * t1 > 3.0) continue;
    ++slices;
    int argmin = 0;
    double lo = 1e300, hi = 0;
    for (int j = 0; j < n; ++j) {
      const double o = csv.num(i * n + j, "oracle");
      if (o < lo) {
        lo = o;
        argmin = j;
      }
      hi = std::max(hi, o);
      EXPECT_GE(csv.num(i * n + j, "margin"), -1e-6);
    }
    EXPECT_NEAR(csv.num(i * n + argmin, "t2"), 2 * t1, 3.9 / (n - 1)) << "slice t1 = " << t1;
    EXPECT_LT(lo, 0.01 * hi);
  }
  EXPECT_GT(slices, 15);
}

// {bound <= 1} hugs the line and sits inside {exact gain <= 1}.
TEST(Shapes, LevelSetNeighboursTheLine) {
  auto s = analytic();
  auto b = analytic_upper(s);
  ASSERT_TRUE(b.valid());
  auto fn = [&](std::span<const double> t) { return b.eval(t); };
  auto lines = report::levelset(s, fn, {60, 60}, 1.0);
  ASSERT_FALSE(lines.empty());
  std::size_t vertices = 0;
  for (const auto& pl : lines) {
    for (const auto& p : pl.points) {
      ++vertices;
      EXPECT_LE(fixtures::analytic_s2o(p[0], p[1]), 1.0 + 1e-3);
    }
  }
  EXPECT_GT(vertices, 20u);
  for (double t1 : fixtures::linspace(-0.4, 1.5, 20)) EXPECT_LT(b.eval(std::vector<double>{t1, 2 * t1}), 1.0);
  EXPECT_GT(b.eval(std::vector<double>{3.0, -0.9}), 1.0);
}

// Constant plane over affine plane over rational surface at the nominal point.
TEST(Shapes, GuaranteedCostOrdering) {
  auto s = fixtures::numerical();
  bounds::BoundOptions constant;
  auto c = bounds::l2_gain_bound(s, constant);

  bounds::BoundOptions affine;
  affine.deg.gn = 1;
  affine.pin_nominal = false;  // a pinned affine gamma_n cannot stay above a nonzero gain
  auto a = bounds::l2_gain_bound(s, affine);

  bounds::BoundOptions rational;
  rational.deg.gn = 2;
  rational.deg.gd = 1;
  auto r = bounds::l2_gain_bound(s, rational);

  ASSERT_TRUE(c.valid() && a.valid() && r.valid());
  const auto& star = s.theta_star;
  EXPECT_GE(c.eval(star), a.eval(star) - 1e-7);
  EXPECT_GE(a.eval(star), r.eval(star) - 1e-7);
  EXPECT_GT(c.eval(star), r.eval(star) + 0.1);

  affine.pin_nominal = true;
  auto pinned = bounds::l2_gain_bound(s, affine);
  EXPECT_EQ(pinned.status, sdp::SdpStatus::infeasible);
  EXPECT_NE(pinned.solver_message.find("pinning"), std::string::npos);

  for (double t1 : fixtures::linspace(-1.5, 1.5, 7)) {
    for (double t2 : fixtures::linspace(-1, 1, 5)) {
      std::vector<double> th{t1, t2};
      const double o = oracle::l2_induced_gain_exact(s, th);
      EXPECT_GE(a.eval(th), o - 1e-6);
      EXPECT_GE(r.eval(th), o - 1e-6);
    }
  }
}
