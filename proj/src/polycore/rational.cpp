#include "polycore/rational.hpp"

#include <cmath>
#include <cstdio>

namespace gainscope::poly {

namespace {

double leading_coeff(const Polynomial& p) { return p.terms().rbegin()->second; }

}  // namespace

bool proportional(const Polynomial& a, const Polynomial& b, double* k) {
  if (a.is_zero() || b.is_zero()) return false;
  auto u = merge_vars(a.vars(), b.vars());
  auto pa = a.aligned(u);
  auto pb = b.aligned(u);
  if (pa.size() != pb.size()) return false;
  const double r = leading_coeff(pa) / leading_coeff(pb);
  for (auto ia = pa.terms().begin(), ib = pb.terms().begin(); ia != pa.terms().end(); ++ia, ++ib) {
    if (ia->first != ib->first) return false;
    const double want = r * ib->second;
    if (std::fabs(ia->second - want) > 1e-14 * std::max(std::fabs(ia->second), std::fabs(want))) {
      return false;
    }
  }
  if (k) *k = r;
  return true;
}

RationalFunction::RationalFunction(Polynomial num)
    : num_(std::move(num)), den_(Polynomial::constant(1.0, num_.vars())) {}

RationalFunction::RationalFunction(Polynomial num, Polynomial den) : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) throw PolyError("zero denominator polynomial");
  canonicalize();
}

void RationalFunction::canonicalize() {
  auto u = merge_vars(num_.vars(), den_.vars());
  num_ = num_.aligned(u);
  den_ = den_.aligned(u);
  if (num_.is_zero()) {
    den_ = Polynomial::constant(1.0, u);
    return;
  }
  double k = 0.0;
  if (proportional(num_, den_, &k)) {
    num_ = Polynomial::constant(k, u);
    den_ = Polynomial::constant(1.0, u);
    return;
  }
  const double lead = leading_coeff(den_);
  if (lead != 1.0) {
    num_ = num_ * (1.0 / lead);
    den_ = den_ * (1.0 / lead);
  }
}

Polynomial RationalFunction::as_polynomial() const {
  if (!is_polynomial()) throw PolyError("rational function has a non-constant denominator");
  return num_ * (1.0 / den_.constant_term());
}

RationalFunction RationalFunction::aligned(const std::vector<std::string>& vars) const {
  RationalFunction r;
  r.num_ = num_.aligned(vars);
  r.den_ = den_.aligned(vars);
  return r;
}

double RationalFunction::eval(std::span<const double> point) const {
  const double d = den_.eval(point);
  if (std::fabs(d) <= kSingularDenominator) {
    throw PolyError("parameter singularity: denominator " + to_string(den_) + " vanishes");
  }
  return num_.eval(point) / d;
}

RationalFunction RationalFunction::substitute(const std::map<std::string, Polynomial>& subs) const {
  return {num_.substitute(subs), den_.substitute(subs)};
}

RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  double k = 0.0;
  if (proportional(b.den_, a.den_, &k)) return {a.num_ + b.num_ * (1.0 / k), a.den_};
  return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
}

RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) { return a + (-b); }

RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
  if (a.is_zero() || b.is_zero()) {
    auto u = merge_vars(a.vars(), b.vars());
    return RationalFunction(Polynomial(u));
  }
  double k = 0.0;
  if (proportional(a.den_, b.num_, &k)) return {a.num_ * (1.0 / k), b.den_};
  if (proportional(b.den_, a.num_, &k)) return {b.num_ * (1.0 / k), a.den_};
  return {a.num_ * b.num_, a.den_ * b.den_};
}

RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) {
  if (b.is_zero()) throw PolyError("division by the zero polynomial");
  return a * RationalFunction(b.den_, b.num_);
}

bool operator==(const RationalFunction& a, const RationalFunction& b) {
  return a.num_ == b.num_ && a.den_ == b.den_;
}

std::string to_string(const RationalFunction& r) {
  if (r.is_polynomial()) return to_string(r.as_polynomial());
  return "(" + to_string(r.num()) + ")/(" + to_string(r.den()) + ")";
}

namespace {

std::vector<Polynomial> distinct_denominators(std::span<const ParamMatrix* const> ms) {
  std::vector<Polynomial> out;
  for (const auto* m : ms) {
    for (const auto& e : m->entries) {
      if (e.den().is_zero()) throw PolyError("zero denominator polynomial");
      if (e.is_polynomial()) continue;
      bool seen = false;
      for (const auto& d : out) {
        if (proportional(e.den(), d, nullptr)) seen = true;
      }
      if (!seen) out.push_back(e.den());
    }
  }
  return out;
}

}  // namespace

CommonDenominator common_denominator(std::span<const ParamMatrix* const> ms) {
  CommonDenominator d;
  d.factors = distinct_denominators(ms);
  for (const auto& f : d.factors) d.product = d.product * f;
  return d;
}

ParamMatrix numerators_over(const ParamMatrix& m, const CommonDenominator& d) {
  ParamMatrix out(m.rows, m.cols);
  for (std::size_t k = 0; k < m.entries.size(); ++k) {
    const auto& e = m.entries[k];
    if (e.is_polynomial()) {
      out.entries[k] = RationalFunction(e.as_polynomial() * d.product);
      continue;
    }
    Polynomial cofactor = Polynomial::constant(1.0);
    double scale = 0.0;
    bool matched = false;
    for (const auto& f : d.factors) {
      double kf = 0.0;
      if (!matched && proportional(e.den(), f, &kf)) {
        matched = true;
        scale = kf;
      } else {
        cofactor = cofactor * f;
      }
    }
    if (!matched) throw PolyError("denominator " + to_string(e.den()) + " is not a factor of the common denominator");
    out.entries[k] = RationalFunction(e.num() * cofactor * (1.0 / scale));
  }
  return out;
}

ClearedMatrix clear_denominators(const ParamMatrix& m) {
  const ParamMatrix* p = &m;
  auto d = common_denominator(std::span<const ParamMatrix* const>(&p, 1));
  return {numerators_over(m, d), d.product};
}

}  // namespace gainscope::poly
