#include "oracle/oracle.hpp"

#include <cmath>
#include <complex>
#include <vector>

namespace gainscope::oracle {

using Eigen::MatrixXd;

LyapunovResult lyapunov_solve(const MatrixXd& a, const MatrixXd& q) {
  const auto n = a.rows();
  if (a.cols() != n || q.rows() != n || q.cols() != n) throw OracleError("lyapunov_solve: dimension mismatch");
  if (sys::spectral_abscissa(a) >= 0.0) throw OracleError("lyapunov_solve: matrix is not Hurwitz");
  // vec(A'P + PA) = (I (x) A' + A' (x) I) vec(P)
  const auto n2 = n * n;
  MatrixXd k = MatrixXd::Zero(n2, n2);
  const MatrixXd at = a.transpose();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto row = j * n + i;  // column-major vec index of P(i, j)
      for (Eigen::Index k2 = 0; k2 < n; ++k2) {
        k(row, j * n + k2) += at(i, k2);  // (A' P)(i,j) = sum_k A'(i,k) P(k,j)
        k(row, k2 * n + i) += a(k2, j);   // (P A)(i,j) = sum_k P(i,k) A(k,j)
      }
    }
  }
  Eigen::VectorXd rhs(n2);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) rhs(j * n + i) = -q(i, j);
  }
  Eigen::VectorXd vp = k.partialPivLu().solve(rhs);
  LyapunovResult r;
  r.P = Eigen::Map<MatrixXd>(vp.data(), n, n);
  r.P = 0.5 * (r.P + r.P.transpose()).eval();
  r.residual = (at * r.P + r.P * a + q).norm();
  r.ill_conditioned = r.residual > 1e-8 * (1.0 + r.P.norm());
  return r;
}

MismatchRealization mismatch_realization(const sys::UncertainSystem& sys, std::span<const double> theta) {
  const auto cas = sys::build_cascade(sys);
  MismatchRealization r;
  r.A = sys::eval_matrix(cas.Abar, theta);
  r.B = sys::eval_matrix(cas.Bbar, theta);
  r.C = sys::eval_matrix(cas.Chat(), theta);
  r.D = sys::eval_matrix(cas.Dhat(), theta);
  return r;
}

namespace {

void require_hurwitz(const sys::UncertainSystem& sys, std::span<const double> theta) {
  const auto at = sys::eval_matrix(sys.A, theta);
  const auto as = sys::eval_matrix(sys.A, sys.theta_star);
  if (sys::spectral_abscissa(at) >= 0.0 || sys::spectral_abscissa(as) >= 0.0) {
    throw OracleError("system matrix is not Hurwitz at the requested parameter");
  }
}

}  // namespace

GramianResult mismatch_gramian(const sys::UncertainSystem& sys, std::span<const double> theta) {
  require_hurwitz(sys, theta);
  const auto r = mismatch_realization(sys, theta);
  const auto ly = lyapunov_solve(r.A, r.C.transpose() * r.C);
  return {ly.P, ly.residual};
}

double state_to_output_gain_exact(const sys::UncertainSystem& sys, std::span<const double> theta) {
  const auto g = mismatch_gramian(sys, theta);
  const MatrixXd top = g.Wo.topLeftCorner(sys.n, sys.n);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(top, Eigen::EigenvaluesOnly);
  return std::max(0.0, es.eigenvalues().maxCoeff());
}

double sigma_max_at(const MatrixXd& a, const MatrixXd& b, const MatrixXd& c, const MatrixXd& d, double omega) {
  using cplx = std::complex<double>;
  const auto n = a.rows();
  Eigen::MatrixXcd m = -a.cast<cplx>();
  for (Eigen::Index i = 0; i < n; ++i) m(i, i) += cplx(0.0, omega);
  Eigen::MatrixXcd g = c.cast<cplx>() * m.partialPivLu().solve(b.cast<cplx>()) + d.cast<cplx>();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(g);
  return svd.singularValues()(0);
}

namespace {

// True when the Hamiltonian for level gamma has an eigenvalue on the
// imaginary axis, i.e. gamma <= ||G||_inf. Frequencies of such eigenvalues
// are appended to `freqs`.
bool hamiltonian_has_imaginary(const MatrixXd& a, const MatrixXd& b, const MatrixXd& c, const MatrixXd& d,
                               double gamma, std::vector<double>* freqs) {
  const auto n = a.rows();
  const auto m = b.cols();
  const auto p = c.rows();
  const MatrixXd r = gamma * gamma * MatrixXd::Identity(m, m) - d.transpose() * d;
  const MatrixXd s = gamma * gamma * MatrixXd::Identity(p, p) - d * d.transpose();
  const Eigen::LLT<MatrixXd> rl(r);
  const Eigen::LLT<MatrixXd> sl(s);
  if (rl.info() != Eigen::Success || sl.info() != Eigen::Success) return true;  // gamma <= sigma_max(D)
  const MatrixXd rinv = rl.solve(MatrixXd::Identity(m, m));
  const MatrixXd sinv = sl.solve(MatrixXd::Identity(p, p));
  const MatrixXd a11 = a + b * rinv * d.transpose() * c;
  MatrixXd h(2 * n, 2 * n);
  h.topLeftCorner(n, n) = a11;
  h.topRightCorner(n, n) = gamma * b * rinv * b.transpose();
  h.bottomLeftCorner(n, n) = -gamma * c.transpose() * sinv * c;
  h.bottomRightCorner(n, n) = -a11.transpose();
  Eigen::EigenSolver<MatrixXd> es(h, false);
  const double scale = 1.0 + h.norm();
  bool found = false;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const auto lam = es.eigenvalues()(i);
    if (std::fabs(lam.real()) <= 1e-9 * scale) {
      found = true;
      if (freqs) freqs->push_back(std::fabs(lam.imag()));
    }
  }
  return found;
}

}  // namespace

HinfResult hinf_norm_bisection(const MatrixXd& a, const MatrixXd& b, const MatrixXd& c, const MatrixXd& d,
                               double rel_tol, int max_iter) {
  HinfResult res;
  double lo = 0.0;
  for (double w : {0.0, 1.0, 10.0, 100.0}) {
    const double s = sigma_max_at(a, b, c, d, w);
    if (s > lo) {
      lo = s;
      res.peak_frequency = w;
    }
  }
  const double dnorm = d.size() ? Eigen::JacobiSVD<MatrixXd>(d).singularValues()(0) : 0.0;
  lo = std::max(lo, dnorm);
  const double scale = 1.0 + a.norm() + b.norm() * c.norm() + dnorm;
  if (lo <= 1e-13 * scale) {
    // Either the transfer is identically zero or the peak lies elsewhere.
    const auto sw = hinf_norm_sweep(a, b, c, d, 400);
    if (sw.norm <= 1e-13 * scale) return sw;
    lo = sw.norm;
    res.peak_frequency = sw.peak_frequency;
  }
  double hi = 2.0 * lo + dnorm;
  int grow = 0;
  while (hamiltonian_has_imaginary(a, b, c, d, hi, nullptr)) {
    hi *= 2.0;
    if (++grow > 200) throw OracleError("H-infinity bisection: could not bracket the norm");
  }
  int it = 0;
  while (hi - lo > rel_tol * hi) {
    if (++it > max_iter) throw OracleError("H-infinity bisection did not converge");
    const double mid = 0.5 * (lo + hi);
    std::vector<double> freqs;
    if (hamiltonian_has_imaginary(a, b, c, d, mid, &freqs)) {
      lo = mid;
      // Raise the lower bound with the actual gain at the crossing frequencies.
      for (double w : freqs) {
        const double s = sigma_max_at(a, b, c, d, w);
        if (s > lo && s < hi) {
          lo = s;
          res.peak_frequency = w;
        }
      }
    } else {
      hi = mid;
    }
  }
  res.norm = 0.5 * (lo + hi);
  res.iterations = it;
  return res;
}

HinfResult hinf_norm_sweep(const MatrixXd& a, const MatrixXd& b, const MatrixXd& c, const MatrixXd& d, int points) {
  // Frequencies spanning the modal range of A.
  Eigen::EigenSolver<MatrixXd> es(a, false);
  double wmin = 1e300, wmax = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double mag = std::abs(es.eigenvalues()(i));
    wmin = std::min(wmin, mag);
    wmax = std::max(wmax, mag);
  }
  if (wmax == 0.0) wmin = wmax = 1.0;
  const double lo = std::log10(std::max(wmin, 1e-12)) - 4.0;
  const double hi = std::log10(wmax) + 4.0;
  HinfResult best;
  best.norm = sigma_max_at(a, b, c, d, 0.0);
  int best_k = -1;
  std::vector<double> ws(points);
  for (int k = 0; k < points; ++k) {
    ws[k] = std::pow(10.0, lo + (hi - lo) * k / (points - 1));
    const double s = sigma_max_at(a, b, c, d, ws[k]);
    if (s > best.norm) {
      best.norm = s;
      best_k = k;
    }
  }
  if (best_k < 0) return best;
  // Golden-section refinement between the neighbours of the best sample.
  double l = best_k > 0 ? ws[best_k - 1] : 0.0;
  double r = best_k + 1 < points ? ws[best_k + 1] : ws[best_k] * 10.0;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = r - g * (r - l), x2 = l + g * (r - l);
  double f1 = sigma_max_at(a, b, c, d, x1), f2 = sigma_max_at(a, b, c, d, x2);
  for (int it = 0; it < 200 && (r - l) > 1e-13 * (1.0 + r); ++it) {
    if (f1 > f2) {
      r = x2;
      x2 = x1;
      f2 = f1;
      x1 = r - g * (r - l);
      f1 = sigma_max_at(a, b, c, d, x1);
    } else {
      l = x1;
      x1 = x2;
      f1 = f2;
      x2 = l + g * (r - l);
      f2 = sigma_max_at(a, b, c, d, x2);
    }
    best.iterations = it + 1;
  }
  const double wpk = 0.5 * (l + r);
  const double fpk = sigma_max_at(a, b, c, d, wpk);
  if (fpk > best.norm) {
    best.norm = fpk;
    best.peak_frequency = wpk;
  } else {
    best.peak_frequency = ws[best_k];
  }
  return best;
}

double l2_induced_gain_exact(const sys::UncertainSystem& sys, std::span<const double> theta) {
  require_hurwitz(sys, theta);
  const auto r = mismatch_realization(sys, theta);
  const double g = hinf_norm_bisection(r.A, r.B, r.C, r.D).norm;
  return g * g;
}

double h2_norm_exact(const sys::UncertainSystem& sys, std::span<const double> theta) {
  require_hurwitz(sys, theta);
  const auto r = mismatch_realization(sys, theta);
  if (r.D.size() && r.D.cwiseAbs().maxCoeff() > 0.0) {
    throw OracleError("feedthrough not allowed: mismatch channel has nonzero D");
  }
  const auto ly = lyapunov_solve(r.A, r.C.transpose() * r.C);
  return std::max(0.0, (r.B.transpose() * ly.P * r.B).trace());
}

}  // namespace gainscope::oracle
