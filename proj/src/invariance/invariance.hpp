#pragma once

#include <span>
#include <vector>

#include "polycore/polynomial.hpp"
#include "sysmodel/system.hpp"

namespace gainscope::inv {

// Mismatch of steady-state outputs for a unit constant input on channel i:
// [C(t*)(-A(t*))^-1 B_i(t*) + D_i(t*)] - [C(t)(-A(t))^-1 B_i(t) + D_i(t)].
Eigen::VectorXd dc_gain_mismatch(const sys::UncertainSystem& sys, std::span<const double> theta, int input);

bool ss_invariant_test(const sys::UncertainSystem& sys, std::span<const double> theta, int input,
                       double tol = 1e-9);
// Intersection over all input channels.
bool ss_invariant_all(const sys::UncertainSystem& sys, std::span<const double> theta, double tol = 1e-9);

// Characteristic polynomial coefficients and adjugate of (sI - A) via the
// Leverrier-Faddeev recursion: det(sI-A) = sum_k c[k] s^k (c[n] = 1) and
// adj(sI-A) = sum_k M[k] s^k.
struct Faddeev {
  std::vector<double> charpoly;
  std::vector<Eigen::MatrixXd> adjugate;
};
Faddeev leverrier_faddeev(const Eigen::MatrixXd& a);

// Numerators (one per mismatch-output row) of the dy/u_i transfer, as
// polynomials in `s`. Coefficients below 1e-10 times the leading scale are zeroed.
std::vector<poly::Polynomial> mismatch_transfer_numerator(const sys::UncertainSystem& sys,
                                                          std::span<const double> theta, int input);

// Variant that uses the mismatch rows of Cbar evaluated at the nominal
// parameter, i.e. [0 C(t*)], in the numerator.
std::vector<poly::Polynomial> mismatch_transfer_numerator_nominal_rows(const sys::UncertainSystem& sys,
                                                                       std::span<const double> theta, int input);

bool output_invariant_test(const sys::UncertainSystem& sys, std::span<const double> theta, int input,
                           double tol = 1e-9);
bool output_invariant_all(const sys::UncertainSystem& sys, std::span<const double> theta, double tol = 1e-9);

struct InvarianceReport {
  std::vector<double> theta;
  int input_index = 0;
  double ss_mismatch = 0.0;                // ||dy_ss||
  std::vector<double> tf_numerator_coeffs;  // all rows, ascending powers of s, concatenated
  double numerator_norm = 0.0;
  bool is_ss_invariant = false;
  bool is_fully_invariant = false;
  bool variant_disagrees = false;  // nominal-row numerator differs in zero pattern
  double tol = 1e-9;
};

InvarianceReport invariance_report(const sys::UncertainSystem& sys, std::span<const double> theta, int input,
                                   double tol = 1e-9);

}  // namespace gainscope::inv
