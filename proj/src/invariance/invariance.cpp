#include "invariance/invariance.hpp"

#include <cmath>

#include "oracle/oracle.hpp"

namespace gainscope::inv {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

void check_input(const sys::UncertainSystem& sys, int input) {
  if (input < 0 || input >= sys.m) throw sys::SystemError("input index out of range");
}

VectorXd dc_gain(const sys::NumericStateSpace& ss, int input) {
  return ss.C * (-ss.A).partialPivLu().solve(ss.B.col(input)) + ss.D.col(input);
}

std::vector<poly::Polynomial> numerator_from(const MatrixXd& a, const MatrixXd& c, const VectorXd& b,
                                             const VectorXd& d) {
  const auto f = leverrier_faddeev(a);
  const auto n = a.rows();
  double lead = 0.0;
  for (double v : f.charpoly) lead = std::max(lead, std::fabs(v));
  lead *= 1.0 + c.norm() * b.norm() + d.norm();
  std::vector<poly::Polynomial> out;
  for (Eigen::Index r = 0; r < c.rows(); ++r) {
    poly::Polynomial num(std::vector<std::string>{"s"});
    for (Eigen::Index k = 0; k <= n; ++k) {
      double v = d(r) * f.charpoly[k];
      if (k < n) v += c.row(r).dot(f.adjugate[k] * b);
      if (std::fabs(v) <= 1e-10 * lead) continue;
      num.add_term({static_cast<int>(k)}, v);
    }
    out.push_back(std::move(num));
  }
  return out;
}

}  // namespace

VectorXd dc_gain_mismatch(const sys::UncertainSystem& sys, std::span<const double> theta, int input) {
  check_input(sys, input);
  const auto nom = sys::eval_at(sys, sys.theta_star);
  const auto unc = sys::eval_at(sys, theta);
  if (sys::spectral_abscissa(nom.A) >= 0 || sys::spectral_abscissa(unc.A) >= 0) {
    throw oracle::OracleError("system matrix is not Hurwitz at the requested parameter");
  }
  return dc_gain(nom, input) - dc_gain(unc, input);
}

bool ss_invariant_test(const sys::UncertainSystem& sys, std::span<const double> theta, int input, double tol) {
  return dc_gain_mismatch(sys, theta, input).norm() <= tol;
}

bool ss_invariant_all(const sys::UncertainSystem& sys, std::span<const double> theta, double tol) {
  for (int i = 0; i < sys.m; ++i) {
    if (!ss_invariant_test(sys, theta, i, tol)) return false;
  }
  return true;
}

Faddeev leverrier_faddeev(const MatrixXd& a) {
  const auto n = a.rows();
  Faddeev f;
  f.charpoly.assign(n + 1, 0.0);
  f.adjugate.assign(n, MatrixXd::Zero(n, n));
  f.charpoly[n] = 1.0;
  // M_1 = I; c_{n-k} = -tr(A M_k)/k; M_{k+1} = A M_k + c_{n-k} I.
  MatrixXd mk = MatrixXd::Identity(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    f.adjugate[n - k] = mk;
    const MatrixXd am = a * mk;
    const double ck = -am.trace() / static_cast<double>(k);
    f.charpoly[n - k] = ck;
    mk = am + ck * MatrixXd::Identity(n, n);
  }
  return f;
}

std::vector<poly::Polynomial> mismatch_transfer_numerator(const sys::UncertainSystem& sys,
                                                          std::span<const double> theta, int input) {
  check_input(sys, input);
  const auto r = oracle::mismatch_realization(sys, theta);
  return numerator_from(r.A, r.C, r.B.col(input), r.D.col(input));
}

std::vector<poly::Polynomial> mismatch_transfer_numerator_nominal_rows(const sys::UncertainSystem& sys,
                                                                       std::span<const double> theta,
                                                                       int input) {
  check_input(sys, input);
  const auto r = oracle::mismatch_realization(sys, theta);
  const auto cn = oracle::mismatch_realization(sys, sys.theta_star);
  return numerator_from(r.A, cn.C, r.B.col(input), r.D.col(input));
}

bool output_invariant_test(const sys::UncertainSystem& sys, std::span<const double> theta, int input, double tol) {
  for (const auto& p : mismatch_transfer_numerator(sys, theta, input)) {
    if (poly::max_abs_coeff(p) > tol) return false;
  }
  return true;
}

bool output_invariant_all(const sys::UncertainSystem& sys, std::span<const double> theta, double tol) {
  for (int i = 0; i < sys.m; ++i) {
    if (!output_invariant_test(sys, theta, i, tol)) return false;
  }
  return true;
}

InvarianceReport invariance_report(const sys::UncertainSystem& sys, std::span<const double> theta, int input,
                                   double tol) {
  InvarianceReport rep;
  rep.theta.assign(theta.begin(), theta.end());
  rep.input_index = input;
  rep.tol = tol;
  rep.ss_mismatch = dc_gain_mismatch(sys, theta, input).norm();
  const auto num = mismatch_transfer_numerator(sys, theta, input);
  const auto alt = mismatch_transfer_numerator_nominal_rows(sys, theta, input);
  double sq = 0.0;
  bool zero = true, alt_zero = true;
  for (const auto& p : num) {
    const int deg = std::max(0, p.degree());
    for (int k = 0; k <= deg; ++k) {
      const double c = p.coeff({k});
      rep.tf_numerator_coeffs.push_back(c);
      sq += c * c;
      zero = zero && std::fabs(c) <= tol;
    }
  }
  for (const auto& p : alt) alt_zero = alt_zero && poly::max_abs_coeff(p) <= tol;
  rep.numerator_norm = std::sqrt(sq);
  rep.is_fully_invariant = zero;
  rep.is_ss_invariant = rep.ss_mismatch <= tol;
  // A transfer that vanishes identically also vanishes at s = 0.
  if (rep.is_fully_invariant) rep.is_ss_invariant = true;
  rep.variant_disagrees = zero != alt_zero;
  return rep;
}

}  // namespace gainscope::inv
