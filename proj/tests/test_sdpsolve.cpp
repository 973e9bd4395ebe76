#include <gtest/gtest.h>

#include <sstream>

#include "sdpsolve/sdp.hpp"

using namespace gainscope::sdp;

namespace {

// min X s.t. X = 2 over a 1x1 block
SdpProblem trivial() {
  SdpProblem p;
  p.block_dims = {1};
  p.rows.push_back({{{0, 0, 0, 1.0}}, {}, 2.0});
  p.c_entries = {{0, 0, 0, 1.0}};
  return p;
}

// min <[[2,1],[1,2]], X1> + 0.5 X2  s.t.  tr X1 + X2 = 2,  X2 = 0.5.
// The 2x2 block costs lambda_min = 1 per unit trace, so the optimum is 1.5 + 0.25.
SdpProblem two_block() {
  SdpProblem p;
  p.block_dims = {2, 1};
  p.rows.push_back({{{0, 0, 0, 1.0}, {0, 1, 1, 1.0}, {1, 0, 0, 1.0}}, {}, 2.0});
  p.rows.push_back({{{1, 0, 0, 1.0}}, {}, 0.5});
  p.c_entries = {{0, 0, 0, 2.0}, {0, 0, 1, 1.0}, {0, 1, 1, 2.0}, {1, 0, 0, 0.5}};
  return p;
}

}  // namespace

TEST(Sdp, Trivial) {
  auto sol = solve(trivial());
  ASSERT_EQ(sol.status, SdpStatus::optimal);
  EXPECT_NEAR(sol.primal_obj, 2.0, 1e-7);
  EXPECT_NEAR(sol.X[0](0, 0), 2.0, 1e-7);
}

TEST(Sdp, TwoBlockKnownOptimum) {
  auto sol = solve(two_block());
  ASSERT_EQ(sol.status, SdpStatus::optimal);
  EXPECT_NEAR(sol.primal_obj, 1.75, 1e-6);
  EXPECT_NEAR(sol.dual_obj, 1.75, 1e-6);
  // optimal X1 is 1.5 v v^T with v the lambda_min eigenvector (1, -1)/sqrt 2
  EXPECT_NEAR(sol.X[0](0, 1), -0.75, 1e-5);
  EXPECT_LT(row_residuals(two_block(), sol.X, sol.free).lpNorm<Eigen::Infinity>(), 1e-7);
}

TEST(Sdp, FreeVariables) {
  // min f s.t. f - X = -1, X >= 0  ->  f = -1
  SdpProblem p;
  p.block_dims = {1};
  p.num_free = 1;
  p.rows.push_back({{{0, 0, 0, -1.0}}, {{0, 1.0}}, -1.0});
  p.c_free = {1.0};
  auto sol = solve(p);
  ASSERT_EQ(sol.status, SdpStatus::optimal);
  EXPECT_NEAR(sol.free(0), -1.0, 1e-6);
}

TEST(Sdp, DetectsInfeasibility) {
  SdpProblem p = trivial();
  p.rows[0].rhs = -1.0;
  auto sol = solve(p);
  EXPECT_EQ(sol.status, SdpStatus::infeasible);
}

TEST(Presolve, DropsDuplicateAndZeroRows) {
  SdpProblem p = two_block();
  p.rows.push_back(p.rows[0]);
  p.rows.back().entries[0].value *= 1.0;
  SdpRow scaled = p.rows[1];
  scaled.entries[0].value = 3.0;
  scaled.rhs = 1.5;
  p.rows.push_back(scaled);
  p.rows.push_back({{}, {}, 0.0});
  auto pre = presolve(p);
  EXPECT_EQ(pre.report.rows_in, 5);
  EXPECT_EQ(pre.report.dropped_zero, 1);
  EXPECT_EQ(pre.report.dropped_dependent, 2);
  EXPECT_FALSE(pre.report.infeasible);
  EXPECT_EQ(pre.problem.rows.size(), 2u);
  auto sol = solve(p);
  ASSERT_EQ(sol.status, SdpStatus::optimal);
  EXPECT_NEAR(sol.primal_obj, 1.75, 1e-6);
  EXPECT_EQ(sol.y.size(), 5);
}

TEST(Presolve, ContradictoryRows) {
  SdpProblem zero = trivial();
  zero.rows.push_back({{}, {}, 1.0});
  EXPECT_TRUE(presolve(zero).report.infeasible);
  EXPECT_EQ(solve(zero).status, SdpStatus::infeasible);

  SdpProblem clash = trivial();
  clash.rows.push_back(clash.rows[0]);
  clash.rows.back().rhs = 3.0;
  EXPECT_TRUE(presolve(clash).report.infeasible);
}

TEST(Sdpa, RoundTrip) {
  auto p = two_block();
  std::ostringstream a;
  write_sdpa(a, p);
  std::istringstream in(a.str());
  auto q = read_sdpa(in);
  std::ostringstream b;
  write_sdpa(b, q);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_NEAR(solve(q).primal_obj, 1.75, 1e-6);
}

TEST(Sdpa, RejectsGarbage) {
  std::istringstream in("1\n1\n2\n1\n0 5 1 1 1.0\n");
  EXPECT_THROW(read_sdpa(in), SdpError);
}

TEST(Sdp, ValidateCatchesBadIndices) {
  SdpProblem p = trivial();
  p.rows[0].entries[0].i = 3;
  EXPECT_THROW(p.validate(), SdpError);
}
