#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "polycore/parser.hpp"
#include "polycore/rational.hpp"

namespace gainscope::sys {

using poly::ParamMatrix;
using poly::Polynomial;

class SystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The system exactly as written in the input file, before any
// reparameterisation; kept so that serialisation round-trips.
struct SystemSpec {
  int n = 0, m = 0, p = 0, ntheta = 0;
  ParamMatrix A, B, C, D;
  std::vector<double> theta_star;
  std::vector<Polynomial> domain;
  bool normalize = false;
};

struct UncertainSystem {
  SystemSpec spec;
  int n = 0, m = 0, p = 0, ntheta = 0;
  std::vector<std::string> theta_names;  // t1..tk
  // Effective matrices; in normalised coordinates when spec.normalize is set.
  ParamMatrix A, B, C, D;
  std::vector<double> theta_star;
  std::vector<Polynomial> domain;  // Theta = { t : g_j(t) >= 0 }
  std::uint64_t hash = 0;          // FNV-1a of the canonical serialisation

  // Original-coordinate parameter for an effective-coordinate point.
  std::vector<double> to_original(std::span<const double> theta) const;
  bool in_domain(std::span<const double> theta, double tol = 0.0) const;
};

struct CascadeSystem {
  int n = 0, m = 0, p = 0;
  ParamMatrix Abar;  // 2n x 2n: [A(t*) 0; dA(t) A(t)]
  ParamMatrix Bbar;  // 2n x m:  [B(t*); dB(t)]
  ParamMatrix Cbar;  // 2p x 2n: [C(t*) 0; dC(t) C(t)]
  ParamMatrix Dbar;  // 2p x m:  [D(t*); dD(t)]
  const UncertainSystem* parent = nullptr;

  // Rows of the mismatch output dy = [dC C] xbar + dD u.
  ParamMatrix Chat() const;
  ParamMatrix Dhat() const;
};

struct NumericStateSpace {
  Eigen::MatrixXd A, B, C, D;
};

UncertainSystem load_system(std::string_view text);
UncertainSystem load_system_file(const std::string& path);
std::string serialize(const SystemSpec& spec);

CascadeSystem build_cascade(const UncertainSystem& sys);

Eigen::MatrixXd eval_matrix(const ParamMatrix& m, std::span<const double> theta);
NumericStateSpace eval_at(const UncertainSystem& sys, std::span<const double> theta);
NumericStateSpace eval_at(const CascadeSystem& cas, std::span<const double> theta);

double spectral_abscissa(const Eigen::MatrixXd& a);

struct HurwitzPoint {
  std::vector<double> theta;
  double max_real_part = 0.0;
  bool stable = false;
};

// Sampled check only: it does not certify stability between grid points.
struct HurwitzReport {
  std::vector<HurwitzPoint> points;
  double worst = -1e300;
  bool all_stable = true;
};

HurwitzReport hurwitz_sample_check(const UncertainSystem& sys, const std::vector<std::vector<double>>& grid,
                                   double eps = 1e-9);

struct Interval {
  double lo = 0.0, hi = 0.0;
};

// Recognises domains written as one concave quadratic per parameter, e.g.
// -(t1+1.5)*(t1-1.5) >= 0, and returns the corresponding box.
std::optional<std::vector<Interval>> domain_box(const UncertainSystem& sys);

// Tensor grid over the domain box, each axis shrunk by `shrink` (fraction of
// the width) at both ends; points are in lexicographic index order.
std::vector<std::vector<double>> box_grid(const std::vector<Interval>& box, const std::vector<int>& resolution,
                                          double shrink = 0.0);

std::uint64_t fnv1a64(std::string_view data);

}  // namespace gainscope::sys
