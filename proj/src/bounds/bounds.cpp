#include "bounds/bounds.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include <Eigen/Dense>

#include "oracle/oracle.hpp"
#include "polycore/interval.hpp"

namespace gainscope::bounds {

using poly::ParamMatrix;
using poly::Polynomial;
using poly::RationalFunction;
using sos::AffineExpr;
using sos::AffinePoly;
using sos::lift;

const char* to_string(BoundKind k) {
  switch (k) {
    case BoundKind::s2o_upper: return "s2o-upper";
    case BoundKind::s2o_lower: return "s2o-lower";
    case BoundKind::l2: return "l2";
    case BoundKind::h2: return "h2";
  }
  return "?";
}

BoundKind parse_kind(const std::string& s) {
  if (s == "s2o-upper") return BoundKind::s2o_upper;
  if (s == "s2o-lower") return BoundKind::s2o_lower;
  if (s == "l2") return BoundKind::l2;
  if (s == "h2") return BoundKind::h2;
  throw BoundsError("unknown bound kind '" + s + "'");
}

bool is_upper(BoundKind k) { return k != BoundKind::s2o_lower; }

double GainBound::eval(std::span<const double> theta) const {
  const auto vars = poly::merge_vars(numerator.vars(), denominator.vars());
  const auto pt = theta.first(vars.size());
  return numerator.aligned(vars).eval(pt) / denominator.aligned(vars).eval(pt);
}

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> numbered(const std::string& prefix, int n) {
  std::vector<std::string> out;
  for (int i = 1; i <= n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

Polynomial sum_squares(const std::vector<Polynomial>& ls) {
  Polynomial s;
  for (const auto& l : ls) s += l * l;
  return s;
}

Polynomial zero_like(const std::vector<std::string>& names) { return Polynomial(names); }

bool all_polynomial(const ParamMatrix& m) {
  for (const auto& e : m.entries) {
    if (!e.is_polynomial()) return false;
  }
  return true;
}

bool all_zero(const ParamMatrix& m) {
  for (const auto& e : m.entries) {
    if (!e.is_zero()) return false;
  }
  return true;
}

ParamMatrix numerators(const ParamMatrix& m) {
  ParamMatrix out(m.rows, m.cols);
  for (std::size_t k = 0; k < m.entries.size(); ++k) out.entries[k] = m.entries[k].as_polynomial();
  return out;
}

ParamMatrix negated(ParamMatrix m) {
  for (auto& e : m.entries) e = -e;
  return m;
}

// rows of M s + N w with s, w symbol vectors
std::vector<Polynomial> apply(const ParamMatrix& m, const std::vector<std::string>& s, const ParamMatrix* n,
                              const std::vector<std::string>& w, const std::vector<std::string>& theta) {
  std::vector<Polynomial> out;
  for (int i = 0; i < m.rows; ++i) {
    Polynomial r = zero_like(theta);
    for (int j = 0; j < m.cols; ++j) r += m(i, j).as_polynomial() * Polynomial::variable(s[j]);
    if (n) {
      for (int j = 0; j < n->cols; ++j) r += (*n)(i, j).as_polynomial() * Polynomial::variable(w[j]);
    }
    out.push_back(std::move(r));
  }
  return out;
}

// d^k * (A s + B w) and d^k * |C s + D w|^2 with polynomial entries and d > 0
// certified on the domain.
struct Flow {
  Polynomial d = Polynomial::constant(1.0);
  int k = 0;
  std::string evidence;
  std::vector<Polynomial> f;
  Polynomial dy2;
};

Flow cleared_flow(const sys::UncertainSystem& sys, const ParamMatrix& A, const ParamMatrix* B, const ParamMatrix& C,
                  const ParamMatrix* D, const std::vector<std::string>& s, const std::vector<std::string>& w) {
  const auto& theta = sys.theta_names;
  std::vector<const ParamMatrix*> mats{&A, &C};
  if (B) mats.push_back(B);
  if (D) mats.push_back(D);
  bool poly_all = true;
  for (auto* m : mats) poly_all = poly_all && all_polynomial(*m);

  Flow fl;
  if (poly_all) {
    const auto nb = B ? numerators(*B) : ParamMatrix();
    const auto nd = D ? numerators(*D) : ParamMatrix();
    fl.f = apply(numerators(A), s, B ? &nb : nullptr, w, theta);
    fl.dy2 = sum_squares(apply(numerators(C), s, D ? &nd : nullptr, w, theta));
    return fl;
  }

  const auto cd = poly::common_denominator(mats);
  fl.d = cd.product.aligned(theta);
  ParamMatrix na = poly::numerators_over(A, cd);
  ParamMatrix nb = B ? poly::numerators_over(*B, cd) : ParamMatrix();
  ParamMatrix nc = poly::numerators_over(C, cd);
  ParamMatrix nd = D ? poly::numerators_over(*D, cd) : ParamMatrix();
  if (fl.d.eval(sys.theta_star) < 0) {
    fl.d = -fl.d;
    na = negated(na);
    nb = negated(nb);
    nc = negated(nc);
    nd = negated(nd);
  }
  const auto ev = sos::certify_positive(fl.d, sys.domain);
  fl.evidence = ev.method + " lower bound " + fmt17(ev.lower_bound);

  const bool out_poly = all_polynomial(C) && (!D || all_polynomial(*D));
  if (out_poly) {
    fl.k = 1;
    const auto pc = numerators(C);
    const auto pd = D ? numerators(*D) : ParamMatrix();
    fl.f = apply(na, s, B ? &nb : nullptr, w, theta);
    fl.dy2 = fl.d * sum_squares(apply(pc, s, D ? &pd : nullptr, w, theta));
  } else {
    fl.k = 2;
    fl.f = apply(na, s, B ? &nb : nullptr, w, theta);
    for (auto& e : fl.f) e = fl.d * e;
    fl.dy2 = sum_squares(apply(nc, s, D ? &nd : nullptr, w, theta));
  }
  return fl;
}

void record_flow(sos::SosProgram& prog, const Flow& fl) {
  if (fl.k == 0) return;
  prog.set_meta("denominator", poly::to_string(fl.d));
  prog.set_meta("denominator_power", std::to_string(fl.k));
  prog.set_meta("denominator_evidence", fl.evidence);
}

AffinePoly lie_derivative(const AffinePoly& v, const std::vector<std::string>& s, const std::vector<Polynomial>& f) {
  AffinePoly out;
  for (std::size_t i = 0; i < s.size(); ++i) out += v.derivative(s[i]) * lift(f[i]);
  return out;
}

// Box used for averaged objectives; falls back to theta* +- 1.
std::vector<poly::Range> averaging_box(const sys::UncertainSystem& sys) {
  if (auto b = poly::box_from_domain(sys.domain, static_cast<std::size_t>(sys.ntheta))) return *b;
  std::vector<poly::Range> out;
  for (double t : sys.theta_star) out.push_back({t - 1.0, t + 1.0});
  return out;
}

double monomial_average(int k, const poly::Range& r) {
  if (r.hi == r.lo) return std::pow(r.lo, k);
  return (std::pow(r.hi, k + 1) - std::pow(r.lo, k + 1)) / ((k + 1) * (r.hi - r.lo));
}

template <class Coeff>
Coeff box_average(const poly::BasicPolynomial<Coeff>& p, const std::vector<poly::Range>& box,
                  const std::vector<std::string>& theta) {
  const auto pa = p.aligned(theta);
  Coeff acc(0.0);
  for (const auto& [e, c] : pa.terms()) {
    double w = 1.0;
    for (std::size_t i = 0; i < e.size(); ++i) w *= monomial_average(e[i], box[i]);
    acc = acc + c * w;
  }
  return acc;
}

template <class Coeff>
Coeff at_nominal(const poly::BasicPolynomial<Coeff>& p, const sys::UncertainSystem& sys) {
  return p.aligned(sys.theta_names).eval(sys.theta_star);
}

void check_hurwitz(const sys::UncertainSystem& sys) {
  std::vector<std::vector<double>> grid{sys.theta_star};
  if (auto box = sys::domain_box(sys)) {
    const int k = sys.ntheta;
    const int r = k <= 2 ? 11 : (k <= 4 ? 5 : 3);
    if (k <= 6) {
      auto g = sys::box_grid(*box, std::vector<int>(k, r));
      grid.insert(grid.end(), g.begin(), g.end());
    }
  }
  const auto rep = sys::hurwitz_sample_check(sys, grid);
  if (!rep.all_stable) {
    for (const auto& pt : rep.points) {
      if (pt.stable) continue;
      std::string at;
      for (std::size_t i = 0; i < pt.theta.size(); ++i) at += (i ? "," : "") + fmt17(pt.theta[i]);
      throw BoundsError("A(theta) is not Hurwitz at sampled theta = (" + at + "), max real part " +
                        fmt17(pt.max_real_part));
    }
  }
}

std::string degrees_text(const Degrees& d) {
  std::ostringstream os;
  os << "v=" << d.v << " m=" << d.m << " p1=" << d.p1 << " p2=" << d.p2 << " gn=" << d.gn << " gd=" << d.gd;
  return os.str();
}

std::string hex64(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void add_trace_regularizer(sdp::SdpProblem& p, double w) {
  if (w <= 0) return;
  for (int b = 0; b < static_cast<int>(p.block_dims.size()); ++b) {
    for (int i = 0; i < p.block_dims[b]; ++i) p.c_entries.push_back({b, i, i, w});
  }
}

GainBound run(sos::SosProgram& prog, BoundKind kind, const sys::UncertainSystem& sys, const BoundOptions& opt,
              const std::function<void(const sos::BoundCertificate&, GainBound&)>& finish) {
  prog.set_meta("kind", to_string(kind));
  prog.set_meta("degrees", degrees_text(opt.deg));
  prog.set_meta("system_hash", hex64(sys.hash));
  std::string tv;
  for (std::size_t i = 0; i < sys.theta_names.size(); ++i) tv += (i ? "," : "") + sys.theta_names[i];
  prog.set_meta("theta_vars", tv.empty() ? "-" : tv);

  auto compiled = prog.compile(opt.compile);
  add_trace_regularizer(compiled.sdp, opt.trace_weight);
  if (!opt.sdpa_export.empty()) {
    std::ofstream os(opt.sdpa_export);
    if (!os) throw BoundsError("cannot write '" + opt.sdpa_export + "'");
    sdp::write_sdpa(os, compiled.sdp);
  }

  GainBound gb;
  gb.kind = kind;
  gb.degrees = opt.deg;
  gb.sdp_rows = compiled.sdp.rows.size();
  gb.sdp_blocks = compiled.sdp.block_dims;
  const auto sol = sdp::solve(compiled.sdp, opt.solver);
  gb.status = sol.status;
  gb.solver_message = sol.message;
  gb.iterations = sol.iterations;

  if (sol.status == sdp::SdpStatus::optimal || sol.status == sdp::SdpStatus::numerical_limit) {
    gb.certificate = prog.recover_and_validate(compiled, sol, opt.tol);
    finish(gb.certificate, gb);
  } else {
    gb.certificate.metadata = prog.metadata();
    gb.certificate.valid = false;
    gb.certificate.reason = sdp::to_string(sol.status);
    gb.numerator = Polynomial::constant(std::nan(""), sys.theta_names);
    if (sol.status == sdp::SdpStatus::infeasible) {
      gb.solver_message = "infeasible at the requested degrees; raise the parameter degrees";
      // a pinned bound of degree 1 cannot dominate a nonzero gain around an interior nominal point
      if (gb.certificate.meta("pinning", "off") != "off") gb.solver_message += " or turn nominal pinning off";
    }
  }
  auto& cert = gb.certificate;
  cert.set_meta("status", sdp::to_string(sol.status));
  cert.set_meta("objective_value", fmt17(gb.objective));
  if (sol.status == sdp::SdpStatus::optimal || sol.status == sdp::SdpStatus::numerical_limit) {
    cert.decisions.emplace_back("bound.num", gb.numerator);
    cert.decisions.emplace_back("bound.den", gb.denominator);
  }
  return gb;
}

Polynomial recovered(const sos::BoundCertificate& cert, const std::string& name, const sys::UncertainSystem& sys) {
  const auto* p = cert.decision(name);
  if (!p) throw BoundsError("certificate lacks decision '" + name + "'");
  return p->aligned(poly::merge_vars(p->vars(), sys.theta_names));
}

bool pin_active(const BoundOptions& opt, int degree, const sys::UncertainSystem& sys) {
  return opt.pin_nominal && degree >= 1 && sys.ntheta > 0;
}

}  // namespace

GainBound state_to_output_upper(const sys::UncertainSystem& sys, const BoundOptions& opt) {
  check_hurwitz(sys);
  const auto cas = sys::build_cascade(sys);
  const auto& T = sys.theta_names;
  auto S = numbered("x", sys.n);
  const auto E = numbered("e", sys.n);
  const auto X = S;
  S.insert(S.end(), E.begin(), E.end());
  const auto fl = cleared_flow(sys, cas.Abar, nullptr, cas.Chat(), nullptr, S, {});

  sos::SosProgram prog;
  record_flow(prog, fl);
  const auto& V = prog.declare_quadratic("V", S, T, opt.deg.v);
  const auto& p1 = prog.declare_free("p1", T, opt.deg.p1);
  const auto& p2 = prog.declare_free("p2", T, opt.deg.p2);
  Polynomial xx, ee;
  for (const auto& v : X) xx += Polynomial::variable(v) * Polynomial::variable(v);
  for (const auto& v : E) ee += Polynomial::variable(v) * Polynomial::variable(v);

  prog.add_sos_constraint("storage", V.poly, S, sys.domain, opt.deg.m);
  prog.add_sos_constraint("envelope", p1.poly * lift(xx) + p2.poly * lift(ee) - V.poly, S, sys.domain, opt.deg.m);
  prog.add_sos_constraint("dissipation", lie_derivative(V.poly, S, fl.f) * -1.0 - lift(fl.dy2), S, sys.domain,
                          opt.deg.m);

  const bool pin = pin_active(opt, opt.deg.p1, sys);
  const auto box = averaging_box(sys);
  if (pin) {
    prog.add_point_equality("p1", sys.theta_star, 0.0);
    prog.set_objective(box_average(p1.poly, box, T));
    prog.set_meta("objective", "minimize average of p1 over the domain box");
  } else {
    prog.set_objective(at_nominal(p1.poly, sys));
    prog.set_meta("objective", "minimize p1(theta*)");
  }
  prog.set_meta("pinning", pin ? "p1(theta*) = 0" : "off");
  prog.set_meta("channel", "mismatch");

  return run(prog, BoundKind::s2o_upper, sys, opt, [&](const sos::BoundCertificate& cert, GainBound& gb) {
    gb.numerator = recovered(cert, "p1", sys);
    gb.objective = pin ? box_average(gb.numerator, box, T) : at_nominal(gb.numerator, sys);
  });
}

GainBound state_to_output_lower(const sys::UncertainSystem& sys, const BoundOptions& opt) {
  check_hurwitz(sys);
  const auto cas = sys::build_cascade(sys);
  const auto& T = sys.theta_names;
  auto S = numbered("x", sys.n);
  const auto E = numbered("e", sys.n);
  Polynomial xx, ee;
  for (const auto& v : S) xx += Polynomial::variable(v) * Polynomial::variable(v);
  for (const auto& v : E) ee += Polynomial::variable(v) * Polynomial::variable(v);
  S.insert(S.end(), E.begin(), E.end());
  const auto fl = cleared_flow(sys, cas.Abar, nullptr, cas.Chat(), nullptr, S, {});

  sos::SosProgram prog;
  record_flow(prog, fl);
  // homogeneous quadratic, so V_l vanishes at the origin by construction
  const auto& V = prog.declare_quadratic("Vl", S, T, opt.deg.v);
  const auto& p1 = prog.declare_free("pl1", T, opt.deg.p1);
  const auto& p2 = prog.declare_free("pl2", T, opt.deg.p2);

  prog.add_sos_constraint("envelope", V.poly - p1.poly * lift(xx) - p2.poly * lift(ee), S, sys.domain, opt.deg.m);
  prog.add_sos_constraint("dissipation", lie_derivative(V.poly, S, fl.f) + lift(fl.dy2), S, sys.domain, opt.deg.m);

  const bool pin = pin_active(opt, opt.deg.p1, sys);
  const auto box = averaging_box(sys);
  if (pin) {
    prog.add_point_equality("pl1", sys.theta_star, 0.0);
    prog.set_objective(box_average(p1.poly, box, T) * -1.0);
    prog.set_meta("objective", "maximize average of pl1 over the domain box");
  } else {
    prog.set_objective(at_nominal(p1.poly, sys) * -1.0);
    prog.set_meta("objective", "maximize pl1(theta*)");
  }
  prog.set_meta("pinning", pin ? "pl1(theta*) = 0" : "off");
  prog.set_meta("channel", "mismatch");

  return run(prog, BoundKind::s2o_lower, sys, opt, [&](const sos::BoundCertificate& cert, GainBound& gb) {
    gb.numerator = recovered(cert, "pl1", sys);
    gb.objective = pin ? box_average(gb.numerator, box, T) : at_nominal(gb.numerator, sys);
  });
}

GainBound l2_gain_bound(const sys::UncertainSystem& sys, const BoundOptions& opt) {
  check_hurwitz(sys);
  const auto cas = sys::build_cascade(sys);
  const auto& T = sys.theta_names;
  auto S = numbered("x", sys.n);
  const auto E = numbered("e", sys.n);
  S.insert(S.end(), E.begin(), E.end());
  const auto U = numbered("u", sys.m);
  const auto Dh = cas.Dhat();
  const auto fl = cleared_flow(sys, cas.Abar, &cas.Bbar, cas.Chat(), &Dh, S, U);

  sos::SosProgram prog;
  record_flow(prog, fl);
  const auto& V = prog.declare_quadratic("V", S, T, opt.deg.v);
  const auto& gn = prog.declare_free("gamma_n", T, opt.deg.gn);
  const auto& gd = prog.declare_free("gamma_d", T, opt.deg.gd);
  Polynomial uu;
  for (const auto& v : U) uu += Polynomial::variable(v) * Polynomial::variable(v);
  const Polynomial dk = fl.d.pow(fl.k);

  auto SU = S;
  SU.insert(SU.end(), U.begin(), U.end());
  prog.add_sos_constraint("storage", V.poly, S, sys.domain, opt.deg.m);
  prog.add_sos_constraint("dissipation",
                          lie_derivative(V.poly, S, fl.f) * -1.0 - gd.poly * lift(fl.dy2) + gn.poly * lift(dk * uu), SU,
                          sys.domain, opt.deg.m);
  if (opt.deg.gd >= 1) {
    const int md = std::max(0, 2 * ((opt.deg.gd + 1) / 2) - 2);
    prog.add_sos_constraint("normalization", gd.poly - lift(Polynomial::constant(1.0)), {}, sys.domain, md);
  } else {
    prog.add_sos_constraint("normalization", gd.poly - lift(Polynomial::constant(1.0)), {}, {}, 0);
  }
  prog.set_meta("normalization", "gamma_d >= 1 on the domain");

  const bool pin = pin_active(opt, opt.deg.gn, sys);
  const auto box = averaging_box(sys);
  if (pin) {
    prog.add_point_equality("gamma_n", sys.theta_star, 0.0);
    prog.set_objective(box_average(gn.poly, box, T));
    prog.set_meta("objective", "minimize average of gamma_n over the domain box");
  } else {
    prog.set_objective(at_nominal(gn.poly, sys));
    prog.set_meta("objective", "minimize gamma_n(theta*)");
  }
  prog.set_meta("pinning", pin ? "gamma_n(theta*) = 0" : "off");
  prog.set_meta("channel", "mismatch");

  return run(prog, BoundKind::l2, sys, opt, [&](const sos::BoundCertificate& cert, GainBound& gb) {
    gb.numerator = recovered(cert, "gamma_n", sys);
    gb.denominator = recovered(cert, "gamma_d", sys);
    gb.objective = pin ? box_average(gb.numerator, box, T) : at_nominal(gb.numerator, sys);
  });
}

GainBound h2_bound(const sys::UncertainSystem& sys, const BoundOptions& opt) {
  const auto cas = sys::build_cascade(sys);
  const ParamMatrix C = opt.full_output ? cas.Cbar : cas.Chat();
  const ParamMatrix D = opt.full_output ? cas.Dbar : cas.Dhat();
  if (!all_zero(D)) {
    throw BoundsError(opt.full_output ? "feedthrough not allowed: the output feedthrough must vanish for the H2 bound"
                                      : "feedthrough not allowed: the mismatch feedthrough must vanish for the H2 bound");
  }
  check_hurwitz(sys);
  const auto& T = sys.theta_names;
  const auto Z = numbered("z", 2 * sys.n);
  const auto fl = cleared_flow(sys, cas.Abar, nullptr, C, nullptr, Z, {});

  sos::SosProgram prog;
  record_flow(prog, fl);
  const auto& P = prog.declare_quadratic("P", Z, T, opt.deg.v);
  const auto& q1 = prog.declare_free("q1", T, opt.deg.p1);
  Polynomial zz;
  for (const auto& v : Z) zz += Polynomial::variable(v) * Polynomial::variable(v);

  prog.add_sos_constraint("storage", P.poly, Z, sys.domain, opt.deg.m);
  prog.add_sos_constraint("envelope", q1.poly * lift(zz) - P.poly, Z, sys.domain, opt.deg.m);
  prog.add_sos_constraint("lyapunov", lie_derivative(P.poly, Z, fl.f) * -1.0 - lift(fl.dy2), Z, sys.domain,
                          opt.deg.m);

  const bool has_box = poly::box_from_domain(sys.domain, static_cast<std::size_t>(sys.ntheta)).has_value();
  const auto box = averaging_box(sys);
  if (has_box && sys.ntheta > 0) {
    prog.set_objective(box_average(q1.poly, box, T));
    prog.set_meta("objective", "minimize average of q1 over the domain box");
  } else {
    prog.set_objective(at_nominal(q1.poly, sys));
    prog.set_meta("objective", "minimize q1(theta*)");
  }
  prog.set_meta("pinning", "off");
  prog.set_meta("channel", opt.full_output ? "full" : "mismatch");

  RationalFunction tr = RationalFunction(Polynomial(T));
  for (const auto& b : cas.Bbar.entries) tr = tr + b * b;

  return run(prog, BoundKind::h2, sys, opt, [&](const sos::BoundCertificate& cert, GainBound& gb) {
    const Polynomial q = recovered(cert, "q1", sys);
    if (tr.is_zero()) {
      gb.numerator = Polynomial(T);
    } else {
      gb.numerator = q * tr.num();
      gb.denominator = tr.den().aligned(poly::merge_vars(tr.den().vars(), T));
    }
    gb.objective = has_box && sys.ntheta > 0 ? box_average(q, box, T) : at_nominal(q, sys);
  });
}

GainBound synthesize(BoundKind kind, const sys::UncertainSystem& sys, const BoundOptions& opt) {
  switch (kind) {
    case BoundKind::s2o_upper: return state_to_output_upper(sys, opt);
    case BoundKind::s2o_lower: return state_to_output_lower(sys, opt);
    case BoundKind::l2: return l2_gain_bound(sys, opt);
    case BoundKind::h2: return h2_bound(sys, opt);
  }
  throw BoundsError("unknown bound kind");
}

double certificate_bound(const sos::BoundCertificate& cert, std::span<const double> theta) {
  const auto* num = cert.decision("bound.num");
  const auto* den = cert.decision("bound.den");
  if (!num) throw BoundsError("certificate carries no bound function");
  const auto vars = den ? poly::merge_vars(num->vars(), den->vars()) : num->vars();
  if (theta.size() < vars.size()) throw BoundsError("parameter point too short for the certificate");
  const double n = num->aligned(vars).eval(theta.first(vars.size()));
  const double d = den ? den->aligned(vars).eval(theta.first(vars.size())) : 1.0;
  return n / d;
}

double oracle_value(BoundKind kind, const sys::UncertainSystem& sys, std::span<const double> theta, bool full_output) {
  switch (kind) {
    case BoundKind::s2o_upper:
    case BoundKind::s2o_lower: return oracle::state_to_output_gain_exact(sys, theta);
    case BoundKind::l2: return oracle::l2_induced_gain_exact(sys, theta);
    case BoundKind::h2: {
      if (!full_output) return oracle::h2_norm_exact(sys, theta);
      const auto cas = sys::build_cascade(sys);
      const auto ss = sys::eval_at(cas, theta);
      if (ss.D.norm() != 0.0) throw BoundsError("feedthrough not allowed on the full output");
      const auto ly = oracle::lyapunov_solve(ss.A, ss.C.transpose() * ss.C);
      return (ss.B.transpose() * ly.P * ss.B).trace();
    }
  }
  throw BoundsError("unknown bound kind");
}

AnalyticFixture analytic_fixture(double s1, double s2) {
  if (!(s1 > 0) || !(s2 > 0)) throw BoundsError("analytic fixture requires positive nominal parameters");
  const std::vector<std::string> T{"t1", "t2"};
  const Polynomial t1 = Polynomial::variable("t1", T);
  const Polynomial t2 = Polynomial::variable("t2", T);
  const Polynomial one = Polynomial::constant(1.0, T);
  const Polynomial den = one + s2 * (one + t2);  // 1 + theta2*(1+t2)
  const Polynomial a1 = s1 * (one + t1);          // theta1*(1+t1)
  const Polynomial w = s2 * (t2 - t1) - t1;

  AnalyticFixture fx;
  fx.theta1_star = s1;
  fx.theta2_star = s2;
  const double astar = -s1 / (1.0 + s2);
  fx.a_star = RationalFunction(Polynomial::constant(astar, T));
  fx.a = RationalFunction(-a1, den);
  fx.p2 = RationalFunction(den, a1);
  const RationalFunction q(w, a1);
  fx.p1 = RationalFunction::constant(0.5 * s1 / (1.0 + s2)) * q * q;
  fx.p1n = RationalFunction::constant(-0.5 / astar) + RationalFunction::constant(2.0) / (fx.a_star + fx.a) -
           RationalFunction::constant(0.5) / fx.a;

  const RationalFunction r(w, den);
  const RationalFunction m11 = fx.p1 * fx.a_star;
  const RationalFunction m12 = fx.p2 * fx.a_star * r;
  const RationalFunction m22 = -(fx.p2 * RationalFunction(a1, den)) + RationalFunction::constant(0.5);
  fx.M = ParamMatrix(2, 2);
  fx.M(0, 0) = m11 + m11;
  fx.M(0, 1) = m12;
  fx.M(1, 0) = m12;
  fx.M(1, 1) = m22 + m22;
  return fx;
}

std::string analytic_system_text(double s1, double s2, double lo, double hi) {
  std::ostringstream os;
  os << "# scalar example: dx/dt = -theta1/(1+theta2) x, y = x\n";
  os << "[dims]\nn, m, p, ntheta = 1, 1, 1, 2\n\n";
  os << "[A]\n-t1/(1 + t2)\n\n[B]\n0\n\n[C]\n1\n\n[D]\n0\n\n";
  os << "[nominal]\ntheta_star = " << fmt17(s1) << ", " << fmt17(s2) << "\n\n";
  os << "[domain]\n";
  os << "g1 = -(t1 - " << fmt17(lo) << ")*(t1 - " << fmt17(hi) << ")\n";
  os << "g2 = -(t2 - " << fmt17(lo) << ")*(t2 - " << fmt17(hi) << ")\n\n";
  os << "[options]\nnormalize = true\n";
  return os.str();
}

}  // namespace gainscope::bounds
