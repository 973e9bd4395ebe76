#include "soscompile/program.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "polycore/interval.hpp"

namespace gainscope::sos {

using poly::Exponent;
using poly::Polynomial;

namespace {

std::vector<std::size_t> indices_of(const std::vector<std::string>& vars, const std::vector<std::string>& subset) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (std::find(subset.begin(), subset.end(), vars[i]) != subset.end()) idx.push_back(i);
  }
  return idx;
}

int partial_degree(const Exponent& e, const std::vector<std::size_t>& idx) {
  int d = 0;
  for (auto i : idx) d += e[i];
  return d;
}

std::vector<std::string> complement(const std::vector<std::string>& vars, const std::vector<std::string>& sub) {
  std::vector<std::string> out;
  for (const auto& v : vars) {
    if (std::find(sub.begin(), sub.end(), v) == sub.end()) out.push_back(v);
  }
  return out;
}

Exponent add(const Exponent& a, const Exponent& b) {
  Exponent e(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) e[k] = a[k] + b[k];
  return e;
}

// Basis monomial b can only carry weight if 2b appears in the target or is
// reachable as b_i + b_j from two other basis elements; iterate to a fixpoint.
std::vector<Exponent> prune_basis(std::vector<Exponent> basis, const std::set<Exponent>& support) {
  for (bool changed = true; changed;) {
    changed = false;
    std::set<Exponent> offdiag;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      for (std::size_t j = i + 1; j < basis.size(); ++j) offdiag.insert(add(basis[i], basis[j]));
    }
    std::vector<Exponent> kept;
    for (const auto& b : basis) {
      const Exponent d = add(b, b);
      if (support.count(d) || offdiag.count(d)) {
        kept.push_back(b);
      } else {
        changed = true;
      }
    }
    basis = std::move(kept);
  }
  return basis;
}

// Affine coefficient -> row contributions.
void emit_affine(const AffineExpr& a, const VarTable& table, sdp::SdpRow& row) {
  for (auto [id, c] : a.linear()) {
    const auto& v = table[id];
    if (v.gram) {
      row.entries.push_back({v.index, v.i, v.j, v.i == v.j ? c : 0.5 * c});
    } else {
      row.free.emplace_back(v.index, c);
    }
  }
  row.rhs -= a.constant();
}

}  // namespace

std::vector<Exponent> state_quadratic_basis(const std::vector<std::string>& vars,
                                            const std::vector<std::string>& state_vars, int theta_degree) {
  const auto theta = complement(vars, state_vars);
  const auto tidx = indices_of(vars, theta);
  std::vector<Exponent> basis;
  for (const auto& s : state_vars) {
    const auto it = std::find(vars.begin(), vars.end(), s);
    if (it == vars.end()) continue;
    const auto si = static_cast<std::size_t>(it - vars.begin());
    for (const auto& a : poly::monomials_up_to(theta.size(), theta_degree)) {
      Exponent e(vars.size(), 0);
      e[si] = 1;
      for (std::size_t k = 0; k < tidx.size(); ++k) e[tidx[k]] = a[k];
      basis.push_back(e);
    }
  }
  return basis;
}

SosProgram::SosProgram() : table_(std::make_unique<VarTable>()) {}

int SosProgram::new_free(const std::string& owner) {
  return table_->add({owner, false, num_free_++, 0, 0});
}

const DecisionPoly& SosProgram::push(DecisionPoly d) {
  for (const auto& e : decisions_) {
    if (e.name == d.name) throw SosError("duplicate decision polynomial '" + d.name + "'");
  }
  decisions_.push_back(std::move(d));
  return decisions_.back();
}

const DecisionPoly& SosProgram::declare_free(const std::string& name, const std::vector<std::string>& vars,
                                             int degree) {
  if (degree < 0) throw SosError("negative degree for '" + name + "'");
  DecisionPoly d;
  d.name = name;
  d.structure = Structure::free;
  d.poly = AffinePoly(vars);
  d.vars = d.poly.vars();
  for (const auto& e : poly::monomials_up_to(d.vars.size(), degree)) {
    d.poly.add_term(e, AffineExpr::var(new_free(name), table_.get()));
  }
  return push(std::move(d));
}

const DecisionPoly& SosProgram::declare_quadratic(const std::string& name, const std::vector<std::string>& state_vars,
                                                  const std::vector<std::string>& theta_vars, int theta_degree) {
  if (theta_degree < 0) throw SosError("negative degree for '" + name + "'");
  DecisionPoly d;
  d.name = name;
  d.structure = Structure::quadratic;
  std::vector<std::string> all = state_vars;
  all.insert(all.end(), theta_vars.begin(), theta_vars.end());
  d.poly = AffinePoly(all);
  d.vars = d.poly.vars();
  const auto tidx = indices_of(d.vars, theta_vars);
  const auto tmonos = poly::monomials_up_to(tidx.size(), theta_degree);
  for (std::size_t i = 0; i < state_vars.size(); ++i) {
    for (std::size_t j = i; j < state_vars.size(); ++j) {
      for (const auto& a : tmonos) {
        Exponent e(d.vars.size(), 0);
        e[d.poly.index_of(state_vars[i])] += 1;
        e[d.poly.index_of(state_vars[j])] += 1;
        for (std::size_t k = 0; k < tidx.size(); ++k) e[tidx[k]] = a[k];
        d.poly.add_term(e, AffineExpr::var(new_free(name), table_.get(), i == j ? 1.0 : 2.0));
      }
    }
  }
  return push(std::move(d));
}

const DecisionPoly& SosProgram::declare_sos(const std::string& name, const std::vector<std::string>& vars,
                                            const std::vector<Exponent>& basis) {
  DecisionPoly d;
  d.name = name;
  d.structure = Structure::sos;
  d.poly = AffinePoly(vars);
  if (d.poly.vars() != vars) throw SosError("declare_sos expects variables in canonical order");
  d.vars = vars;
  d.basis = basis;
  d.block = static_cast<int>(declared_blocks_.size());
  const int n = static_cast<int>(basis.size());
  declared_blocks_.push_back(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const int id = table_->add({name, true, d.block, i, j});
      d.poly.add_term(add(basis[i], basis[j]), AffineExpr::var(id, table_.get(), i == j ? 1.0 : 2.0));
    }
  }
  return push(std::move(d));
}

const DecisionPoly& SosProgram::decision(const std::string& name) const {
  for (const auto& d : decisions_) {
    if (d.name == name) return d;
  }
  throw SosError("unknown decision polynomial '" + name + "'");
}

void SosProgram::set_meta(const std::string& key, const std::string& value) {
  for (auto& [k, v] : meta_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  meta_.emplace_back(key, value);
}

const SosConstraint& SosProgram::add_sos_constraint(const std::string& name, const AffinePoly& expr,
                                                    const std::vector<std::string>& state_vars,
                                                    const std::vector<Polynomial>& domain, int multiplier_degree,
                                                    bool products) {
  SosConstraint c;
  c.name = name;
  std::vector<std::string> vars = expr.vars();
  for (const auto& v : state_vars) vars.push_back(v);
  for (const auto& g : domain) vars.insert(vars.end(), g.vars().begin(), g.vars().end());
  c.vars = AffinePoly(vars).vars();
  c.state_vars = state_vars;
  c.expression = expr.aligned(c.vars);

  const auto sidx = indices_of(c.vars, state_vars);
  c.state_quadratic = !sidx.empty() && !c.expression.is_zero();
  for (const auto& [e, a] : c.expression.terms()) {
    if (partial_degree(e, sidx) != 2) c.state_quadratic = false;
  }

  std::vector<Polynomial> gs;
  for (const auto& g : domain) gs.push_back(g.aligned(c.vars));
  if (products) {
    const auto n = gs.size();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) gs.push_back(gs[i] * gs[j]);
    }
  }
  const int half = std::max(0, multiplier_degree / 2);
  for (std::size_t j = 0; j < gs.size(); ++j) {
    const std::vector<Exponent> basis = c.state_quadratic
                                            ? state_quadratic_basis(c.vars, state_vars, half)
                                            : poly::monomials_up_to(c.vars.size(), half);
    declare_sos(name + ".m" + std::to_string(j + 1), c.vars, basis);
    decisions_.back().multiplier = true;
    c.domain.push_back(gs[j]);
    c.multipliers.push_back(static_cast<int>(decisions_.size()) - 1);
  }
  constraints_.push_back(std::move(c));
  return constraints_.back();
}

void SosProgram::add_point_equality(const std::string& name, const std::vector<double>& point, double value) {
  const auto& d = decision(name);
  if (d.vars.size() != point.size()) throw SosError("point equality for '" + name + "' has wrong dimension");
  equalities_.push_back({name, point, value, 0.0});
}

CompiledProgram SosProgram::compile(const CompileOptions& opt) const {
  CompiledProgram out;
  auto& p = out.sdp;
  p.block_dims = declared_blocks_;
  p.num_free = num_free_;
  for (int n : p.block_dims) {
    if (n > opt.max_gram_dim) {
      throw SosError("Gram dimension " + std::to_string(n) + " exceeds cap " + std::to_string(opt.max_gram_dim) +
                     "; reduce the requested degrees");
    }
  }

  for (const auto& c : constraints_) {
    AffinePoly target = c.expression;
    for (std::size_t j = 0; j < c.domain.size(); ++j) {
      target -= decisions_[c.multipliers[j]].poly * lift(c.domain[j]);
    }
    target = target.pruned(opt.drop_tol, [](const AffineExpr& a) { return a.magnitude(); });
    std::map<Exponent, AffineExpr, poly::GrlexLess> coeffs;
    std::set<Exponent> support;
    for (const auto& [e, a] : target.terms()) {
      const AffineExpr q = a.pruned(opt.drop_tol);
      if (coeff_is_zero(q)) continue;
      coeffs.emplace(e, q);
      support.insert(e);
    }

    const auto sidx = indices_of(c.vars, c.state_vars);
    const auto theta = complement(c.vars, c.state_vars);
    const auto tidx = indices_of(c.vars, theta);
    std::vector<Exponent> basis;
    if (c.state_quadratic) {
      int dt = 0;
      for (const auto& e : support) dt = std::max(dt, partial_degree(e, tidx));
      basis = state_quadratic_basis(c.vars, c.state_vars, (dt + 1) / 2);
    } else {
      int d = 0;
      for (const auto& e : support) d = std::max(d, poly::total_degree(e));
      basis = poly::monomials_up_to(c.vars.size(), (d + 1) / 2);
    }
    basis = prune_basis(std::move(basis), support);
    const int n = static_cast<int>(basis.size());
    if (n > opt.max_gram_dim) {
      throw SosError("Gram dimension " + std::to_string(n) + " of constraint '" + c.name + "' exceeds cap " +
                     std::to_string(opt.max_gram_dim) + "; reduce the requested degrees");
    }
    int block = -1;
    if (n > 0) {
      block = static_cast<int>(p.block_dims.size());
      p.block_dims.push_back(n);
    }
    out.constraint_block.push_back(block);
    out.constraint_basis.push_back(basis);

    std::map<Exponent, std::vector<std::pair<int, int>>, poly::GrlexLess> pairs;
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) pairs[add(basis[i], basis[j])].emplace_back(i, j);
    }
    std::set<Exponent, poly::GrlexLess> monos;
    for (const auto& [e, a] : coeffs) monos.insert(e);
    for (const auto& [e, l] : pairs) monos.insert(e);
    for (const auto& e : monos) {
      sdp::SdpRow row;
      if (auto it = coeffs.find(e); it != coeffs.end()) emit_affine(it->second, *table_, row);
      if (auto it = pairs.find(e); it != pairs.end()) {
        for (auto [i, j] : it->second) row.entries.push_back({block, i, j, -1.0});
      }
      p.rows.push_back(std::move(row));
    }
  }

  for (const auto& eq : equalities_) {
    const auto& d = decision(eq.decision);
    AffineExpr v = d.poly.eval(eq.point);
    sdp::SdpRow row;
    emit_affine(v.pruned(opt.drop_tol), *table_, row);
    row.rhs += eq.value;
    p.rows.push_back(std::move(row));
  }

  p.c_free.assign(num_free_, 0.0);
  for (auto [id, a] : objective_.linear()) {
    const auto& v = (*table_)[id];
    if (v.gram) {
      p.c_entries.push_back({v.index, v.i, v.j, v.i == v.j ? a : 0.5 * a});
    } else {
      p.c_free[v.index] += a;
    }
  }
  p.c_offset = objective_.constant();
  p.validate();
  return out;
}

std::vector<double> SosProgram::values(const sdp::SdpSolution& sol) const {
  std::vector<double> v(table_->size());
  for (std::size_t id = 0; id < v.size(); ++id) {
    const auto& info = (*table_)[static_cast<int>(id)];
    if (info.gram) {
      v[id] = sol.X.at(info.index)(info.i, info.j);
    } else {
      v[id] = sol.free(info.index);
    }
  }
  return v;
}

BoundCertificate SosProgram::recover_and_validate(const CompiledProgram& compiled, const sdp::SdpSolution& sol,
                                                  const ValidationTolerances& tol) const {
  const auto vals = values(sol);
  BoundCertificate cert;
  cert.metadata = meta_;
  cert.objective = objective_.eval(vals);
  for (const auto& d : decisions_) {
    if (!d.multiplier) cert.decisions.emplace_back(d.name, evaluate(d.poly, vals));
  }
  for (std::size_t k = 0; k < constraints_.size(); ++k) {
    const auto& c = constraints_[k];
    ConstraintRecord rec;
    rec.name = c.name;
    rec.vars = c.vars;
    rec.expression = evaluate(c.expression, vals);
    Polynomial target = rec.expression;
    for (std::size_t j = 0; j < c.domain.size(); ++j) {
      const auto& m = decisions_[c.multipliers[j]];
      GramRecord g;
      g.name = m.name;
      g.basis = m.basis;
      g.Q = sol.X.at(m.block);
      g.Q = 0.5 * (g.Q + g.Q.transpose());
      target -= gram_polynomial(g, c.vars) * c.domain[j];
      rec.domain.push_back(c.domain[j]);
      rec.multipliers.push_back(std::move(g));
    }
    rec.gram.name = c.name + ".gram";
    rec.gram.basis = compiled.constraint_basis[k];
    const int n = static_cast<int>(rec.gram.basis.size());
    const int block = compiled.constraint_block[k];
    rec.gram.Q = block >= 0 ? Eigen::MatrixXd(sol.X.at(block)) : Eigen::MatrixXd(0, 0);
    if (n > 0) rec.gram.Q = 0.5 * (rec.gram.Q + rec.gram.Q.transpose());
    // Minimum-norm correction so that the Gram expansion matches the target
    // exactly on every monomial it can reach.
    std::map<Exponent, std::vector<std::pair<int, int>>, poly::GrlexLess> pairs;
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) pairs[add(rec.gram.basis[i], rec.gram.basis[j])].emplace_back(i, j);
    }
    for (const auto& [e, list] : pairs) {
      double have = 0.0, w2 = 0.0;
      for (auto [i, j] : list) {
        const double w = i == j ? 1.0 : 2.0;
        have += w * rec.gram.Q(i, j);
        w2 += w * w;
      }
      const double r = target.coeff(e) - have;
      for (auto [i, j] : list) {
        const double w = i == j ? 1.0 : 2.0;
        rec.gram.Q(i, j) += r * w / w2;
        rec.gram.Q(j, i) = rec.gram.Q(i, j);
      }
    }
    cert.constraints.push_back(std::move(rec));
  }
  cert.equalities = equalities_;
  validate(cert, tol);
  return cert;
}

// ------------------------------------------------------------ denominators

DenominatorEvidence certify_positive(const Polynomial& d, const std::vector<Polynomial>& domain) {
  if (d.degree() <= 0) {
    const double c = d.constant_term();
    if (c > 0) return {"constant", c};
    throw SosError("denominator positivity certificate failed: constant " + std::to_string(c) + " is not positive");
  }
  std::vector<std::string> vars = d.vars();
  for (const auto& g : domain) vars = poly::merge_vars(vars, g.vars());
  std::vector<Polynomial> dom;
  for (const auto& g : domain) dom.push_back(g.aligned(vars));
  const Polynomial da = d.aligned(vars);
  if (auto box = poly::box_from_domain(dom, vars.size())) {
    const auto r = poly::interval_eval(da, *box);
    if (r.lo > 0) return {"interval", r.lo};
  }
  // maximize e s.t. d - e - sum m_j g_j in Sigma[t]
  SosProgram aux;
  const auto& e = aux.declare_free("margin", {}, 0);
  const AffinePoly expr = lift(da) - e.poly;
  const int dm = std::max(0, 2 * ((d.degree() + 1) / 2) - 2);
  aux.add_sos_constraint("positivity", expr, {}, dom, dm);
  aux.set_objective(e.poly.constant_term() * -1.0);
  const auto compiled = aux.compile();
  const auto sol = sdp::solve(compiled.sdp);
  if (sol.status == sdp::SdpStatus::optimal) {
    auto cert = aux.recover_and_validate(compiled, sol);
    const double margin = cert.decision("margin")->constant_term();
    if (cert.valid && margin > 1e-9) return {"sos", margin};
  }
  throw SosError("denominator positivity certificate failed for d = " + poly::to_string(d));
}

AffinePoly clear_and_certify_denominator(SosProgram& prog, const AffinePoly& expr, const Polynomial& d, int k,
                                         const std::vector<Polynomial>& domain, DenominatorEvidence* evidence) {
  if (k < 0) throw SosError("negative denominator power");
  const DenominatorEvidence ev = certify_positive(d, domain);
  if (evidence) *evidence = ev;
  if (d.degree() <= 0 && d.constant_term() == 1.0) return expr;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", ev.lower_bound);
  prog.set_meta("denominator", poly::to_string(d));
  prog.set_meta("denominator_power", std::to_string(k));
  prog.set_meta("denominator_evidence", ev.method + " lower bound " + buf);
  return expr * lift(d.pow(k));
}

}  // namespace gainscope::sos
