#include "polycore/interval.hpp"

#include <algorithm>
#include <cmath>

namespace gainscope::poly {

std::optional<std::vector<Range>> box_from_domain(const std::vector<Polynomial>& domain, std::size_t nvars) {
  std::vector<std::optional<Range>> box(nvars);
  for (const auto& g0 : domain) {
    if (g0.degree() != 2 || g0.vars().size() > nvars) return std::nullopt;
    const auto& g = g0;
    int var = -1;
    for (const auto& [e, c] : g.terms()) {
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] == 0) continue;
        if (var >= 0 && var != static_cast<int>(i)) return std::nullopt;
        var = static_cast<int>(i);
      }
    }
    if (var < 0) return std::nullopt;
    Exponent e2(g.vars().size(), 0), e1(g.vars().size(), 0), e0(g.vars().size(), 0);
    e2[var] = 2;
    e1[var] = 1;
    const double a = g.coeff(e2), b = g.coeff(e1), c = g.coeff(e0);
    const double disc = b * b - 4 * a * c;
    if (a >= 0 || disc <= 0) return std::nullopt;
    const double r1 = (-b + std::sqrt(disc)) / (2 * a);
    const double r2 = (-b - std::sqrt(disc)) / (2 * a);
    Range iv{std::min(r1, r2), std::max(r1, r2)};
    auto& slot = box[var];
    if (slot) {
      slot->lo = std::max(slot->lo, iv.lo);
      slot->hi = std::min(slot->hi, iv.hi);
    } else {
      slot = iv;
    }
  }
  std::vector<Range> out;
  for (const auto& b : box) {
    if (!b) return std::nullopt;
    out.push_back(*b);
  }
  return out;
}

namespace {

Range ipow(Range r, int k) {
  if (k == 0) return {1.0, 1.0};
  const double a = std::pow(r.lo, k), b = std::pow(r.hi, k);
  if (k % 2 == 1) return {a, b};
  if (r.lo >= 0) return {a, b};
  if (r.hi <= 0) return {b, a};
  return {0.0, std::max(a, b)};
}

Range imul(Range a, Range b) {
  const double v[] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  return {*std::min_element(v, v + 4), *std::max_element(v, v + 4)};
}

}  // namespace

Range interval_eval(const Polynomial& p, const std::vector<Range>& box) {
  if (box.size() != p.vars().size()) throw PolyError("box dimension does not match variable count");
  Range acc{0.0, 0.0};
  for (const auto& [e, c] : p.terms()) {
    Range m{c, c};
    for (std::size_t i = 0; i < e.size(); ++i) m = imul(m, ipow(box[i], e[i]));
    acc.lo += m.lo;
    acc.hi += m.hi;
  }
  return acc;
}

}  // namespace gainscope::poly
