#pragma once

#include <Eigen/Dense>
#include <span>
#include <stdexcept>

#include "sysmodel/system.hpp"

namespace gainscope::oracle {

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LyapunovResult {
  Eigen::MatrixXd P;
  double residual = 0.0;  // ||A'P + PA + Q||_F
  bool ill_conditioned = false;
};

// Solves A'P + PA + Q = 0 by Kronecker vectorisation. Throws if A is not Hurwitz.
LyapunovResult lyapunov_solve(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q);

struct GramianResult {
  Eigen::MatrixXd Wo;  // mismatch-output observability Gramian of the cascade
  double residual = 0.0;
};

// Cascade instantiated at theta with its mismatch channel dy = Chat xbar + Dhat u.
struct MismatchRealization {
  Eigen::MatrixXd A, B, C, D;
};

MismatchRealization mismatch_realization(const sys::UncertainSystem& sys, std::span<const double> theta);

GramianResult mismatch_gramian(const sys::UncertainSystem& sys, std::span<const double> theta);

// sup over x0 (with e0 = 0, u = 0) of ||dy||_2^2 / ||x0||^2.
double state_to_output_gain_exact(const sys::UncertainSystem& sys, std::span<const double> theta);

struct HinfResult {
  double norm = 0.0;        // H-infinity norm (not squared)
  double peak_frequency = 0.0;
  int iterations = 0;
};

// Largest singular value of C (jwI - A)^{-1} B + D.
double sigma_max_at(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::MatrixXd& c,
                    const Eigen::MatrixXd& d, double omega);

// Hamiltonian-matrix bisection, relative tolerance `rel_tol`.
HinfResult hinf_norm_bisection(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::MatrixXd& c,
                               const Eigen::MatrixXd& d, double rel_tol = 1e-8, int max_iter = 200);

// Log-spaced frequency sweep refined by golden-section search around the peak.
HinfResult hinf_norm_sweep(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::MatrixXd& c,
                           const Eigen::MatrixXd& d, int points = 2000);

// Squared H-infinity norm of u -> dy; zero initial state.
double l2_induced_gain_exact(const sys::UncertainSystem& sys, std::span<const double> theta);

// Squared H2 norm of u -> dy. Throws when the mismatch feedthrough is nonzero.
double h2_norm_exact(const sys::UncertainSystem& sys, std::span<const double> theta);

}  // namespace gainscope::oracle
