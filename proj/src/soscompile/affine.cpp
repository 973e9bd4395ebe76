#include "soscompile/affine.hpp"

#include <algorithm>
#include <cmath>

namespace gainscope::sos {

AffineExpr AffineExpr::var(int id, const VarTable* table, double coef) {
  AffineExpr a;
  if (coef != 0.0) a.lin_.emplace_back(id, coef);
  a.table_ = table;
  return a;
}

double AffineExpr::eval(std::span<const double> values) const {
  double s = c_;
  for (auto [id, a] : lin_) s += a * values[id];
  return s;
}

double AffineExpr::magnitude() const {
  double m = std::fabs(c_);
  for (auto [id, a] : lin_) m = std::max(m, std::fabs(a));
  return m;
}

AffineExpr AffineExpr::pruned(double tol) const {
  AffineExpr r;
  r.table_ = table_;
  r.c_ = std::fabs(c_) > tol ? c_ : 0.0;
  for (auto [id, a] : lin_) {
    if (std::fabs(a) > tol) r.lin_.emplace_back(id, a);
  }
  return r;
}

AffineExpr operator+(const AffineExpr& a, const AffineExpr& b) {
  AffineExpr r;
  r.c_ = a.c_ + b.c_;
  r.table_ = a.table_ ? a.table_ : b.table_;
  r.lin_.reserve(a.lin_.size() + b.lin_.size());
  auto i = a.lin_.begin(), j = b.lin_.begin();
  while (i != a.lin_.end() || j != b.lin_.end()) {
    if (j == b.lin_.end() || (i != a.lin_.end() && i->first < j->first)) {
      r.lin_.push_back(*i++);
    } else if (i == a.lin_.end() || j->first < i->first) {
      r.lin_.push_back(*j++);
    } else {
      const double v = i->second + j->second;
      if (v != 0.0) r.lin_.emplace_back(i->first, v);
      ++i;
      ++j;
    }
  }
  return r;
}

AffineExpr operator*(const AffineExpr& a, double s) {
  AffineExpr r;
  r.table_ = a.table_;
  if (s == 0.0) return r;
  r.c_ = a.c_ * s;
  r.lin_ = a.lin_;
  for (auto& [id, v] : r.lin_) v *= s;
  return r;
}

AffineExpr operator*(const AffineExpr& a, const AffineExpr& b) {
  if (a.is_constant()) return b * a.c_;
  if (b.is_constant()) return a * b.c_;
  const VarTable* t = a.table_ ? a.table_ : b.table_;
  auto owner = [&](int id) { return t ? "'" + (*t)[id].owner + "'" : "#" + std::to_string(id); };
  throw SosError("bilinear product of decision variables " + owner(a.lin_.front().first) + " and " +
                 owner(b.lin_.front().first));
}

AffinePoly lift(const poly::Polynomial& p) {
  return p.map_coeffs([](double c) { return AffineExpr(c); });
}

poly::Polynomial evaluate(const AffinePoly& p, std::span<const double> values) {
  return p.map_coeffs([&](const AffineExpr& c) { return c.eval(values); });
}

poly::Polynomial as_constant(const AffinePoly& p) {
  return p.map_coeffs([](const AffineExpr& c) {
    if (!c.is_constant()) throw SosError("polynomial still depends on decision variables");
    return c.constant();
  });
}

}  // namespace gainscope::sos
