#include "sdpsolve/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCore>
#include <Eigen/SparseQR>

namespace gainscope::sdp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

const char* to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::optimal:
      return "optimal";
    case SdpStatus::infeasible:
      return "infeasible";
    case SdpStatus::unbounded:
      return "unbounded";
    case SdpStatus::numerical_limit:
      return "numerical-limit";
  }
  return "unknown";
}

std::size_t SdpProblem::total_dim() const {
  std::size_t n = 0;
  for (int d : block_dims) n += d;
  return n;
}

void SdpProblem::validate() const {
  auto check = [&](const MatEntry& e) {
    if (e.block < 0 || e.block >= static_cast<int>(block_dims.size())) throw SdpError("entry block out of range");
    const int n = block_dims[e.block];
    if (e.i < 0 || e.j < 0 || e.i >= n || e.j >= n) throw SdpError("entry index out of range");
    if (e.i > e.j) throw SdpError("entries must be upper triangular (i <= j)");
  };
  for (int d : block_dims) {
    if (d <= 0) throw SdpError("block dimension must be positive");
  }
  if (num_free < 0) throw SdpError("negative free variable count");
  if (!c_free.empty() && static_cast<int>(c_free.size()) != num_free) throw SdpError("c_free has wrong length");
  for (const auto& e : c_entries) check(e);
  for (const auto& r : rows) {
    for (const auto& e : r.entries) check(e);
    for (auto [v, a] : r.free) {
      if (v < 0 || v >= num_free) throw SdpError("free variable index out of range");
    }
  }
}

namespace {

using Coord = std::tuple<int, int, int>;  // block, i, j; block -1 = free var i

// Row as a linear functional over coordinates (off-diagonal entries doubled).
std::map<Coord, double> functional(const SdpRow& r) {
  std::map<Coord, double> f;
  for (const auto& e : r.entries) f[{e.block, e.i, e.j}] += (e.i == e.j ? 1.0 : 2.0) * e.value;
  for (auto [v, a] : r.free) f[{-1, v, 0}] += a;
  for (auto it = f.begin(); it != f.end();) {
    it = it->second == 0.0 ? f.erase(it) : std::next(it);
  }
  return f;
}

SdpRow scaled(const SdpRow& r, double s) {
  SdpRow o = r;
  for (auto& e : o.entries) e.value *= s;
  for (auto& f : o.free) f.second *= s;
  o.rhs *= s;
  return o;
}

}  // namespace

Presolved presolve(const SdpProblem& p, double rank_tol) {
  p.validate();
  Presolved out;
  out.report.rows_in = static_cast<int>(p.rows.size());
  out.problem = p;
  out.problem.rows.clear();

  // Zero rows, then unit infinity-norm scaling.
  std::vector<int> cand;
  std::vector<double> cand_scale;
  std::vector<std::map<Coord, double>> funcs;
  for (std::size_t k = 0; k < p.rows.size(); ++k) {
    auto f = functional(p.rows[k]);
    double mx = 0.0;
    for (const auto& [c, v] : f) mx = std::max(mx, std::fabs(v));
    if (mx == 0.0) {
      if (std::fabs(p.rows[k].rhs) > rank_tol) {
        out.report.infeasible = true;
        out.report.reason = "row " + std::to_string(k) + " reads 0 = " + std::to_string(p.rows[k].rhs);
        return out;
      }
      ++out.report.dropped_zero;
      continue;
    }
    cand.push_back(static_cast<int>(k));
    cand_scale.push_back(1.0 / mx);
    for (auto& [c, v] : f) v /= mx;
    funcs.push_back(std::move(f));
  }

  // Rank-revealing sparse QR of A' (coordinates x rows).
  std::map<Coord, int> index;
  for (const auto& f : funcs) {
    for (const auto& [c, v] : f) index.try_emplace(c, 0);
  }
  int ncoord = 0;
  for (auto& [c, i] : index) i = ncoord++;
  const int mc = static_cast<int>(cand.size());
  std::vector<char> keep(mc, 1);
  if (mc > 0) {
    std::vector<Eigen::Triplet<double>> trip;
    for (int k = 0; k < mc; ++k) {
      for (const auto& [c, v] : funcs[k]) trip.emplace_back(index[c], k, v);
    }
    Eigen::SparseMatrix<double> at(std::max(ncoord, mc), mc);
    at.setFromTriplets(trip.begin(), trip.end());
    at.makeCompressed();
    Eigen::SparseQR<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> qr;
    qr.setPivotThreshold(rank_tol);
    qr.compute(at);
    if (qr.info() != Eigen::Success) throw SdpError("presolve factorization failed");
    const auto rank = static_cast<int>(qr.rank());
    if (rank < mc) {
      const auto& perm = qr.colsPermutation().indices();
      Eigen::SparseMatrix<double> r = qr.matrixR();
      Eigen::SparseMatrix<double> r11 = r.topLeftCorner(rank, rank);
      VectorXd bk(rank);
      for (int t = 0; t < rank; ++t) bk(t) = p.rows[cand[perm(t)]].rhs * cand_scale[perm(t)];
      for (int c = rank; c < mc; ++c) {
        const int row = perm(c);
        keep[row] = 0;
        ++out.report.dropped_dependent;
        VectorXd col = VectorXd(r.col(c)).head(rank);
        VectorXd coef = r11.triangularView<Eigen::Upper>().solve(col);
        const double bj = p.rows[cand[row]].rhs * cand_scale[row];
        const double pred = coef.dot(bk);
        const double scale = 1.0 + std::fabs(bj) + coef.cwiseAbs().dot(bk.cwiseAbs());
        if (std::fabs(bj - pred) > 1e-8 * scale) {
          out.report.infeasible = true;
          out.report.reason = "dependent row " + std::to_string(cand[row]) + " has inconsistent right-hand side";
          return out;
        }
      }
    }
  }

  for (int k = 0; k < mc; ++k) {
    if (!keep[k]) continue;
    out.kept.push_back(cand[k]);
    out.scale.push_back(cand_scale[k]);
    out.problem.rows.push_back(scaled(p.rows[cand[k]], cand_scale[k]));
  }

  // A row touching a single 1x1 block fixes its value.
  for (const auto& r : out.problem.rows) {
    if (!r.free.empty() || r.entries.size() != 1) continue;
    const auto& e = r.entries.front();
    if (p.block_dims[e.block] != 1) continue;
    if (r.rhs / e.value < -rank_tol) {
      out.report.infeasible = true;
      out.report.reason = "scalar block " + std::to_string(e.block) + " fixed to a negative value";
      return out;
    }
  }
  return out;
}

double primal_objective(const SdpProblem& p, const std::vector<MatrixXd>& X, const VectorXd& xf) {
  double s = p.c_offset;
  for (const auto& e : p.c_entries) s += (e.i == e.j ? 1.0 : 2.0) * e.value * X[e.block](e.i, e.j);
  for (int k = 0; k < p.num_free && k < static_cast<int>(p.c_free.size()); ++k) s += p.c_free[k] * xf(k);
  return s;
}

VectorXd row_residuals(const SdpProblem& p, const std::vector<MatrixXd>& X, const VectorXd& xf) {
  VectorXd r(p.rows.size());
  for (std::size_t k = 0; k < p.rows.size(); ++k) {
    double s = 0.0;
    for (const auto& e : p.rows[k].entries) s += (e.i == e.j ? 1.0 : 2.0) * e.value * X[e.block](e.i, e.j);
    for (auto [v, a] : p.rows[k].free) s += a * xf(v);
    r(k) = s - p.rows[k].rhs;
  }
  return r;
}

SdpSolution solve(const SdpProblem& p, const SolverSettings& s, const SdpBackend* backend) {
  static const InteriorPointBackend kDefault;
  if (!backend) backend = &kDefault;
  if (!s.presolve) return backend->solve(p, s);

  const Presolved pre = presolve(p, s.rank_tol);
  if (pre.report.infeasible) {
    SdpSolution sol;
    sol.status = SdpStatus::infeasible;
    sol.message = "presolve: " + pre.report.reason;
    sol.presolve = pre.report;
    for (int n : p.block_dims) {
      sol.X.push_back(MatrixXd::Zero(n, n));
      sol.Z.push_back(MatrixXd::Zero(n, n));
    }
    sol.free = VectorXd::Zero(p.num_free);
    sol.y = VectorXd::Zero(p.rows.size());
    return sol;
  }
  SdpSolution sol = backend->solve(pre.problem, s);
  sol.presolve = pre.report;
  VectorXd y = VectorXd::Zero(p.rows.size());
  for (std::size_t k = 0; k < pre.kept.size(); ++k) y(pre.kept[k]) = sol.y(k) * pre.scale[k];
  sol.y = y;
  return sol;
}

// ---------------------------------------------------------------- SDPA I/O

void write_sdpa(std::ostream& os, const SdpProblem& p) {
  p.validate();
  const int nb = static_cast<int>(p.block_dims.size());
  const bool lp = p.num_free > 0;
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  os << "* gainscope standard form: min <C,X> s.t. <A_k,X> = b_k; F0 = -C, F_k = A_k\n";
  if (p.c_offset != 0.0) os << "* objective offset " << num(p.c_offset) << "\n";
  os << p.rows.size() << "\n" << nb + (lp ? 1 : 0) << "\n";
  for (int k = 0; k < nb; ++k) os << (k ? " " : "") << p.block_dims[k];
  if (lp) os << (nb ? " " : "") << -2 * p.num_free;
  os << "\n";
  for (std::size_t k = 0; k < p.rows.size(); ++k) os << (k ? " " : "") << num(p.rows[k].rhs);
  os << "\n";
  auto emit = [&](std::size_t mat, const std::vector<MatEntry>& ents, double sign) {
    std::map<std::tuple<int, int, int>, double> acc;
    for (const auto& e : ents) acc[{e.block, e.i, e.j}] += sign * e.value;
    for (const auto& [key, v] : acc) {
      if (v == 0.0) continue;
      os << mat << " " << std::get<0>(key) + 1 << " " << std::get<1>(key) + 1 << " " << std::get<2>(key) + 1 << " "
         << num(v) << "\n";
    }
  };
  auto emit_free = [&](std::size_t mat, const std::map<int, double>& f) {
    for (const auto& [v, a] : f) {
      if (a == 0.0) continue;
      os << mat << " " << nb + 1 << " " << v + 1 << " " << v + 1 << " " << num(a) << "\n";
      os << mat << " " << nb + 1 << " " << p.num_free + v + 1 << " " << p.num_free + v + 1 << " " << num(-a) << "\n";
    }
  };
  emit(0, p.c_entries, -1.0);
  if (lp) {
    std::map<int, double> f;
    for (int v = 0; v < static_cast<int>(p.c_free.size()); ++v) f[v] -= p.c_free[v];
    emit_free(0, f);
  }
  for (std::size_t k = 0; k < p.rows.size(); ++k) {
    emit(k + 1, p.rows[k].entries, 1.0);
    if (lp) {
      std::map<int, double> f;
      for (auto [v, a] : p.rows[k].free) f[v] += a;
      emit_free(k + 1, f);
    }
  }
}

SdpProblem read_sdpa(std::istream& is) {
  std::string text, line;
  while (std::getline(is, line)) {
    if (!line.empty() && (line[0] == '*' || line[0] == '"')) continue;
    for (char& c : line) {
      if (c == ',' || c == '{' || c == '}' || c == '(' || c == ')') c = ' ';
    }
    text += line + "\n";
  }
  std::istringstream in(text);
  int m = 0, nb = 0;
  if (!(in >> m >> nb) || m < 0 || nb <= 0) throw SdpError("sdpa: bad header");
  SdpProblem p;
  std::vector<int> first(nb), kind(nb);
  for (int k = 0; k < nb; ++k) {
    int s = 0;
    if (!(in >> s) || s == 0) throw SdpError("sdpa: bad block size");
    first[k] = static_cast<int>(p.block_dims.size());
    kind[k] = s;
    if (s > 0) {
      p.block_dims.push_back(s);
    } else {
      for (int t = 0; t < -s; ++t) p.block_dims.push_back(1);
    }
  }
  p.rows.resize(m);
  for (int k = 0; k < m; ++k) {
    if (!(in >> p.rows[k].rhs)) throw SdpError("sdpa: bad objective vector");
  }
  int mat, blk, i, j;
  double v;
  while (in >> mat >> blk >> i >> j >> v) {
    if (mat < 0 || mat > m || blk < 1 || blk > nb) throw SdpError("sdpa: entry out of range");
    MatEntry e;
    if (kind[blk - 1] > 0) {
      e = {first[blk - 1], std::min(i, j) - 1, std::max(i, j) - 1, v};
    } else {
      if (i != j) throw SdpError("sdpa: off-diagonal entry in LP block");
      e = {first[blk - 1] + i - 1, 0, 0, v};
    }
    if (mat == 0) {
      e.value = -v;
      p.c_entries.push_back(e);
    } else {
      p.rows[mat - 1].entries.push_back(e);
    }
  }
  if (!in.eof()) throw SdpError("sdpa: malformed entry");
  p.validate();
  return p;
}

}  // namespace gainscope::sdp
