#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <map>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "sdpsolve/sdp.hpp"

namespace gainscope::sdp {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Blocks = std::vector<MatrixXd>;

namespace {

struct Full {
  int p, q;
  double a;
};

// Problem data laid out for the iteration.
struct Data {
  int m = 0, nf = 0;
  std::vector<int> dims;
  std::vector<std::vector<std::pair<int, std::vector<Full>>>> rows;  // row -> (block, entries)
  std::vector<std::vector<int>> rows_of_block;
  MatrixXd af;
  VectorXd b, cf;
  Blocks c;
  int n_total = 0;
};

Data layout(const SdpProblem& p) {
  Data d;
  d.m = static_cast<int>(p.rows.size());
  d.nf = p.num_free;
  d.dims = p.block_dims;
  d.rows.resize(d.m);
  d.rows_of_block.resize(d.dims.size());
  d.af = MatrixXd::Zero(d.m, d.nf);
  d.b.resize(d.m);
  d.cf = VectorXd::Zero(d.nf);
  for (int k = 0; k < d.nf && k < static_cast<int>(p.c_free.size()); ++k) d.cf(k) = p.c_free[k];
  for (int k = 0; k < d.m; ++k) {
    const auto& r = p.rows[k];
    d.b(k) = r.rhs;
    for (auto [v, a] : r.free) d.af(k, v) += a;
    std::map<int, std::vector<Full>> per;
    for (const auto& e : r.entries) {
      if (e.value == 0.0) continue;
      per[e.block].push_back({e.i, e.j, e.value});
      if (e.i != e.j) per[e.block].push_back({e.j, e.i, e.value});
    }
    for (auto& [blk, ents] : per) {
      d.rows_of_block[blk].push_back(k);
      d.rows[k].emplace_back(blk, std::move(ents));
    }
  }
  for (int n : d.dims) {
    d.c.push_back(MatrixXd::Zero(n, n));
    d.n_total += n;
  }
  for (const auto& e : p.c_entries) {
    d.c[e.block](e.i, e.j) += e.value;
    if (e.i != e.j) d.c[e.block](e.j, e.i) += e.value;
  }
  return d;
}

double inner(const Blocks& a, const Blocks& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k].cwiseProduct(b[k]).sum();
  return s;
}

double fro(const Blocks& a) { return std::sqrt(inner(a, a)); }

Blocks axpy(const Blocks& x, double alpha, const Blocks& dx) {
  Blocks r = x;
  for (std::size_t k = 0; k < r.size(); ++k) r[k] += alpha * dx[k];
  return r;
}

VectorXd apply_a(const Data& d, const Blocks& x) {
  VectorXd r = VectorXd::Zero(d.m);
  for (int k = 0; k < d.m; ++k) {
    double s = 0.0;
    for (const auto& [blk, ents] : d.rows[k]) {
      for (const auto& e : ents) s += e.a * x[blk](e.p, e.q);
    }
    r(k) = s;
  }
  return r;
}

Blocks apply_at(const Data& d, const VectorXd& y) {
  Blocks r;
  for (int n : d.dims) r.push_back(MatrixXd::Zero(n, n));
  for (int k = 0; k < d.m; ++k) {
    if (y(k) == 0.0) continue;
    for (const auto& [blk, ents] : d.rows[k]) {
      for (const auto& e : ents) r[blk](e.p, e.q) += y(k) * e.a;
    }
  }
  return r;
}

MatrixXd sym(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

// H(W) = sym(X W Zinv)
Blocks hkm(const Blocks& x, const Blocks& zi, const Blocks& w) {
  Blocks r(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) r[k] = sym(x[k] * w[k] * zi[k]);
  return r;
}

// Largest alpha in (0, cap] with X + alpha dX psd.
double max_step(const Blocks& x, const Blocks& dx, double cap) {
  double alpha = cap;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const auto n = x[k].rows();
    double lmin;
    if (n == 1) {
      lmin = dx[k](0, 0) / x[k](0, 0);
    } else {
      Eigen::LLT<MatrixXd> llt(x[k]);
      MatrixXd l = llt.matrixL();
      MatrixXd t = l.triangularView<Eigen::Lower>().solve(dx[k]);
      t = l.triangularView<Eigen::Lower>().solve(t.transpose()).transpose();
      lmin = Eigen::SelfAdjointEigenSolver<MatrixXd>(sym(t), Eigen::EigenvaluesOnly).eigenvalues()(0);
    }
    if (lmin < 0) alpha = std::min(alpha, -1.0 / lmin);
  }
  return alpha;
}

double scalar_step(double v, double dv, double cap) { return dv < 0 ? std::min(cap, -v / dv) : cap; }

struct Direction {
  Blocks dx, dz;
  VectorXd dy, dxf;
  double dtau = 0.0, dkappa = 0.0;
};

}  // namespace

SdpSolution InteriorPointBackend::solve(const SdpProblem& prob, const SolverSettings& s) const {
  prob.validate();
  const Data d = layout(prob);
  const int m = d.m, nf = d.nf;
  const double nb = 1.0 + d.b.norm();
  const double nc = 1.0 + fro(d.c) + d.cf.norm();

  // Starting point: scaled identities.
  double amax = 0.0;
  for (int k = 0; k < m; ++k) {
    double s2 = 0.0;
    for (const auto& [blk, ents] : d.rows[k]) {
      for (const auto& e : ents) s2 += e.a * e.a;
    }
    amax = std::max(amax, std::sqrt(s2));
  }
  double xi = 1.0, eta0 = 1.0;
  for (std::size_t blk = 0; blk < d.dims.size(); ++blk) {
    const double n = d.dims[blk];
    xi = std::max(xi, std::sqrt(n));
    eta0 = std::max({eta0, std::sqrt(n), d.c[blk].norm()});
  }
  for (int k = 0; k < m; ++k) xi = std::max(xi, (1.0 + std::fabs(d.b(k))) / (1.0 + amax));
  eta0 = std::max(eta0, amax);

  Blocks X, Z;
  for (int n : d.dims) {
    X.push_back(xi * MatrixXd::Identity(n, n));
    Z.push_back(eta0 * MatrixXd::Identity(n, n));
  }
  VectorXd y = VectorXd::Zero(m), xf = VectorXd::Zero(nf);
  double tau = 1.0, kappa = 1.0;

  SdpSolution sol;
  const int N = d.n_total;
  int it = 0;
  bool done = false;

  // Best iterate by worst relative residual; returned when the run ends
  // without meeting the tolerance.
  struct Snapshot {
    Blocks X, Z;
    VectorXd y, xf;
    double tau = 1.0, merit = 1e300, pobj = 0.0, dobj = 0.0, pres = 0.0, dres = 0.0, gap = 0.0;
    int it = 0;
  } best;

  auto finish = [&](SdpStatus st, const std::string& msg) {
    sol.status = st;
    sol.message = msg;
    done = true;
  };

  for (;; ++it) {
    // Residuals.
    const VectorXd ax = apply_a(d, X);
    const VectorXd rp = d.b * tau - ax - d.af * xf;
    const Blocks aty = apply_at(d, y);
    Blocks rd(X.size());
    for (std::size_t k = 0; k < X.size(); ++k) rd[k] = d.c[k] * tau - aty[k] - Z[k];
    const VectorXd rf = d.af.transpose() * y - d.cf * tau;
    const double cx = inner(d.c, X) + d.cf.dot(xf);
    const double by = d.b.dot(y);
    const double rg = kappa - by + cx;
    const double xz = inner(X, Z);
    const double mu = (xz + tau * kappa) / (N + 1);

    sol.primal_obj = cx / tau + prob.c_offset;
    sol.dual_obj = by / tau + prob.c_offset;
    sol.primal_res = rp.norm() / tau / nb;
    sol.dual_res = (fro(rd) + rf.norm()) / tau / nc;
    sol.gap = std::fabs(cx - by) / tau / (1.0 + std::fabs(cx / tau) + std::fabs(by / tau));
    sol.iterations = it;
    if (s.verbose) {
      std::cerr << "it " << it << " pobj " << sol.primal_obj << " dobj " << sol.dual_obj << " pres "
                << sol.primal_res << " dres " << sol.dual_res << " gap " << sol.gap << " tau " << tau
                << " kappa " << kappa << " mu " << mu << "\n";
    }
    if (sol.primal_res <= s.tol && sol.dual_res <= s.tol && sol.gap <= s.tol) {
      finish(SdpStatus::optimal, "optimal");
      break;
    }
    const double merit = std::max({sol.primal_res, sol.dual_res, sol.gap});
    if (std::isfinite(merit) && merit < best.merit) {
      best = {X, Z, y, xf, tau, merit, sol.primal_obj, sol.dual_obj, sol.primal_res, sol.dual_res, sol.gap, it};
    } else if (it - best.it > 30) {
      sol.message = "progress stalled";
      break;
    }
    // Infeasibility rays.
    {
      Blocks ray = aty;
      for (std::size_t k = 0; k < ray.size(); ++k) ray[k] += Z[k];
      const double dual_ray = fro(ray) + (d.af.transpose() * y).norm();
      if (by > 0 && dual_ray <= s.tol * by && tau <= 1e-3 * kappa) {
        finish(SdpStatus::infeasible, "primal infeasible (dual ray)");
        break;
      }
      const double primal_ray = (ax + d.af * xf).norm();
      if (cx < 0 && primal_ray <= s.tol * -cx && tau <= 1e-3 * kappa) {
        finish(SdpStatus::unbounded, "dual infeasible (primal ray)");
        break;
      }
    }
    if (it >= s.max_iter) break;

    Blocks zi(Z.size());
    bool bad = false;
    for (std::size_t k = 0; k < Z.size(); ++k) {
      Eigen::LLT<MatrixXd> llt(Z[k]);
      if (llt.info() != Eigen::Success) bad = true;
      zi[k] = llt.solve(MatrixXd::Identity(Z[k].rows(), Z[k].cols()));
    }
    if (bad) {
      sol.message = "dual iterate lost definiteness";
      break;
    }

    // Schur complement M_ij = tr(A_i X A_j Zinv), assembled per block.
    MatrixXd K = MatrixXd::Zero(m + nf, m + nf);
    for (std::size_t blk = 0; blk < d.dims.size(); ++blk) {
      const auto& rows = d.rows_of_block[blk];
      const MatrixXd& xb = X[blk];
      const MatrixXd& wb = zi[blk];
      const auto n = xb.rows();
      for (int j : rows) {
        const std::vector<Full>* ej = nullptr;
        for (const auto& [bb, ents] : d.rows[j]) {
          if (bb == static_cast<int>(blk)) ej = &ents;
        }
        // G = X A_j W
        MatrixXd xa = MatrixXd::Zero(n, n);
        for (const auto& e : *ej) xa.col(e.q) += e.a * xb.col(e.p);
        const MatrixXd g = xa * wb;
        for (int i : rows) {
          if (i > j) continue;
          const std::vector<Full>* ei = nullptr;
          for (const auto& [bb, ents] : d.rows[i]) {
            if (bb == static_cast<int>(blk)) ei = &ents;
          }
          double v = 0.0;
          for (const auto& e : *ei) v += e.a * g(e.q, e.p);
          K(i, j) += v;
          if (i != j) K(j, i) += v;
        }
      }
    }
    K.topRightCorner(m, nf) = d.af;
    K.bottomLeftCorner(nf, m) = d.af.transpose();
    Eigen::PartialPivLU<MatrixXd> lu(K);

    auto ksolve = [&](const VectorXd& rhs) {
      VectorXd x = lu.solve(rhs);
      for (int r = 0; r < 2; ++r) x += lu.solve(rhs - K * x);
      return x;
    };

    const Blocks hc = hkm(X, zi, d.c);
    const VectorXd h = apply_a(d, hc);
    const double chc = inner(d.c, hc);
    VectorXd rhs_v(m + nf);
    rhs_v << d.b + h, d.cf;
    const VectorXd v = ksolve(rhs_v);
    if (!v.allFinite()) {
      sol.message = "singular Schur complement";
      break;
    }

    auto direction = [&](const Blocks& rc, double rtk, double eta) {
      Direction dir;
      const Blocks hrd = hkm(X, zi, rd);
      Blocks rprime(X.size());
      for (std::size_t k = 0; k < X.size(); ++k) rprime[k] = rc[k] - eta * hrd[k];
      const VectorXd q = apply_a(d, rprime);
      VectorXd rhs_u(m + nf);
      rhs_u << eta * rp - q, -eta * rf;
      const VectorXd u = ksolve(rhs_u);
      const VectorXd bh = d.b - h;
      const double num = eta * rg + inner(d.c, rprime) + rtk / tau - bh.dot(u.head(m)) + d.cf.dot(u.tail(nf));
      const double den = bh.dot(v.head(m)) - d.cf.dot(v.tail(nf)) + chc + kappa / tau;
      dir.dtau = num / den;
      dir.dy = u.head(m) + dir.dtau * v.head(m);
      dir.dxf = u.tail(nf) + dir.dtau * v.tail(nf);
      const Blocks atdy = apply_at(d, dir.dy);
      dir.dz.resize(X.size());
      for (std::size_t k = 0; k < X.size(); ++k) dir.dz[k] = d.c[k] * dir.dtau - atdy[k] + eta * rd[k];
      const Blocks hdz = hkm(X, zi, dir.dz);
      dir.dx.resize(X.size());
      for (std::size_t k = 0; k < X.size(); ++k) dir.dx[k] = sym(rc[k] - hdz[k]);
      dir.dkappa = (rtk - kappa * dir.dtau) / tau;
      return dir;
    };

    auto step_of = [&](const Direction& dir) {
      double a = max_step(X, dir.dx, 1e300);
      a = max_step(Z, dir.dz, a);
      a = scalar_step(tau, dir.dtau, a);
      a = scalar_step(kappa, dir.dkappa, a);
      return a;
    };

    // Predictor.
    Blocks rc(X.size());
    for (std::size_t k = 0; k < X.size(); ++k) rc[k] = -X[k];
    const Direction aff = direction(rc, -tau * kappa, 1.0);
    const double a_aff = std::min(1.0, step_of(aff));
    const double mu_aff = (inner(axpy(X, a_aff, aff.dx), axpy(Z, a_aff, aff.dz)) +
                           (tau + a_aff * aff.dtau) * (kappa + a_aff * aff.dkappa)) /
                          (N + 1);
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);

    // Corrector.
    for (std::size_t k = 0; k < X.size(); ++k) {
      rc[k] = sigma * mu * zi[k] - X[k] - sym(aff.dx[k] * aff.dz[k] * zi[k]);
    }
    const double rtk = sigma * mu - tau * kappa - aff.dtau * aff.dkappa;
    const Direction dir = direction(rc, rtk, 1.0 - sigma);
    if (!std::isfinite(dir.dtau)) {
      sol.message = "non-finite search direction";
      break;
    }
    const double alpha = std::min(1.0, s.step_factor * step_of(dir));
    if (alpha < 1e-12) {
      sol.message = "step length collapsed";
      break;
    }
    X = axpy(X, alpha, dir.dx);
    Z = axpy(Z, alpha, dir.dz);
    for (std::size_t k = 0; k < X.size(); ++k) {
      X[k] = sym(X[k]);
      Z[k] = sym(Z[k]);
    }
    y += alpha * dir.dy;
    xf += alpha * dir.dxf;
    tau += alpha * dir.dtau;
    kappa += alpha * dir.dkappa;
  }
  if (!done) {
    sol.status = SdpStatus::numerical_limit;
    if (sol.message.empty()) sol.message = "iteration limit reached";
    if (best.merit < 1e300) {
      X = best.X;
      Z = best.Z;
      y = best.y;
      xf = best.xf;
      tau = best.tau;
      sol.primal_obj = best.pobj;
      sol.dual_obj = best.dobj;
      sol.primal_res = best.pres;
      sol.dual_res = best.dres;
      sol.gap = best.gap;
    }
  }

  const double scale = sol.status == SdpStatus::optimal || sol.status == SdpStatus::numerical_limit ? 1.0 / tau : 1.0;
  sol.X = X;
  sol.Z = Z;
  for (auto& b : sol.X) b *= scale;
  for (auto& b : sol.Z) b *= scale;
  sol.y = y * scale;
  sol.free = xf * scale;
  return sol;
}

}  // namespace gainscope::sdp
