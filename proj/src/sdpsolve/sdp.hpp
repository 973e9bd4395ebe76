#pragma once

#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace gainscope::sdp {

class SdpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Entry (i, j) of a symmetric block matrix, i <= j. An off-diagonal entry
// stands for both (i, j) and (j, i), so it contributes 2 * value * X_ij to an
// inner product, as in the SDPA convention.
struct MatEntry {
  int block = 0;
  int i = 0;
  int j = 0;
  double value = 0.0;
};

struct SdpRow {
  std::vector<MatEntry> entries;
  std::vector<std::pair<int, double>> free;
  double rhs = 0.0;
};

// minimize <C, X> + c_free' x + offset
// s.t.     <A_k, X> + a_k' x = b_k,  X = diag(X_1..X_B) psd, x free.
struct SdpProblem {
  std::vector<int> block_dims;
  int num_free = 0;
  std::vector<SdpRow> rows;
  std::vector<MatEntry> c_entries;
  std::vector<double> c_free;
  double c_offset = 0.0;

  void validate() const;
  std::size_t total_dim() const;
};

enum class SdpStatus { optimal, infeasible, unbounded, numerical_limit };
const char* to_string(SdpStatus s);

struct SolverSettings {
  double tol = 1e-8;
  int max_iter = 200;
  double step_factor = 0.98;
  double rank_tol = 1e-10;
  bool presolve = true;
  bool verbose = false;
};

struct PresolveReport {
  int rows_in = 0;
  int dropped_zero = 0;
  int dropped_dependent = 0;
  bool infeasible = false;
  std::string reason;
};

struct SdpSolution {
  SdpStatus status = SdpStatus::numerical_limit;
  std::vector<Eigen::MatrixXd> X;
  std::vector<Eigen::MatrixXd> Z;
  Eigen::VectorXd free;
  Eigen::VectorXd y;
  double primal_obj = 0.0;
  double dual_obj = 0.0;
  int iterations = 0;
  double primal_res = 0.0;
  double dual_res = 0.0;
  double gap = 0.0;
  std::string message;
  PresolveReport presolve;
};

struct Presolved {
  SdpProblem problem;
  std::vector<int> kept;       // original row index of each kept row
  std::vector<double> scale;   // kept row k was multiplied by scale[k]
  PresolveReport report;
};

// Drops zero and linearly dependent rows (rank-revealing sparse QR on A'),
// checks fixed 1x1 blocks, scales rows to unit infinity norm.
Presolved presolve(const SdpProblem& p, double rank_tol = 1e-10);

// Backend seam: anything that can solve a standard-form problem.
class SdpBackend {
 public:
  virtual ~SdpBackend() = default;
  virtual std::string name() const = 0;
  virtual SdpSolution solve(const SdpProblem& p, const SolverSettings& s) const = 0;
};

// Homogeneous self-dual embedding, HKM direction, Mehrotra predictor-corrector.
class InteriorPointBackend : public SdpBackend {
 public:
  std::string name() const override { return "hsd-hkm"; }
  SdpSolution solve(const SdpProblem& p, const SolverSettings& s) const override;
};

// Presolve, hand to the backend (interior point by default), map back.
SdpSolution solve(const SdpProblem& p, const SolverSettings& s = {}, const SdpBackend* backend = nullptr);

// Quantities evaluated on the original problem.
double primal_objective(const SdpProblem& p, const std::vector<Eigen::MatrixXd>& X, const Eigen::VectorXd& xf);
Eigen::VectorXd row_residuals(const SdpProblem& p, const std::vector<Eigen::MatrixXd>& X, const Eigen::VectorXd& xf);

// Sparse SDPA text format. The problem maps to the SDPA dual form with
// F0 = -C, F_k = A_k, c = b; free variables are split x = x+ - x- into a
// trailing LP block.
void write_sdpa(std::ostream& os, const SdpProblem& p);
SdpProblem read_sdpa(std::istream& is);

}  // namespace gainscope::sdp
