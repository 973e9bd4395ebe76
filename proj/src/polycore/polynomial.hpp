#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gainscope::poly {

using Exponent = std::vector<int>;

class PolyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

int total_degree(const Exponent& e);

// Graded lexicographic order: lower total degree first; within a degree the
// monomial with the larger exponent on the earliest variable comes first.
struct GrlexLess {
  bool operator()(const Exponent& a, const Exponent& b) const;
};

// Canonical ordering of variable identifiers: state symbols (x, e, u, z)
// before parameters (t) and the Laplace variable (s); numeric suffixes are
// compared as integers so t10 sorts after t9.
bool var_less(const std::string& a, const std::string& b);

std::vector<std::string> merge_vars(const std::vector<std::string>& a,
                                    const std::vector<std::string>& b);

// Coefficient traits. The double specialisation is the default; the affine
// coefficient used by the SOS compiler provides its own overloads.
inline bool coeff_is_zero(double c) { return c == 0.0; }

template <class Coeff>
class BasicPolynomial {
 public:
  using Terms = std::map<Exponent, Coeff, GrlexLess>;

  BasicPolynomial() = default;
  explicit BasicPolynomial(std::vector<std::string> vars) : vars_(sorted(std::move(vars))) {}

  static BasicPolynomial constant(const Coeff& c, std::vector<std::string> vars = {}) {
    BasicPolynomial p(std::move(vars));
    p.add_term(Exponent(p.vars_.size(), 0), c);
    return p;
  }

  static BasicPolynomial variable(const std::string& name, std::vector<std::string> vars = {}) {
    vars.push_back(name);
    BasicPolynomial p(std::move(vars));
    Exponent e(p.vars_.size(), 0);
    e[p.index_of(name)] = 1;
    p.add_term(e, Coeff(1.0));
    return p;
  }

  static BasicPolynomial monomial(const Exponent& e, const Coeff& c, std::vector<std::string> vars) {
    BasicPolynomial p(std::move(vars));
    p.add_term(e, c);
    return p;
  }

  const std::vector<std::string>& vars() const { return vars_; }
  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  bool has_var(const std::string& v) const {
    for (const auto& n : vars_) {
      if (n == v) return true;
    }
    return false;
  }

  std::size_t index_of(const std::string& v) const {
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (vars_[i] == v) return i;
    }
    throw PolyError("unknown variable '" + v + "'");
  }

  int degree() const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, total_degree(e));
    return d;
  }

  // Largest combined degree over the given subset of variables.
  int degree_in(const std::vector<std::string>& subset) const {
    std::vector<std::size_t> idx;
    for (const auto& v : subset) {
      for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (vars_[i] == v) idx.push_back(i);
      }
    }
    int d = -1;
    for (const auto& [e, c] : terms_) {
      int s = 0;
      for (auto i : idx) s += e[i];
      d = std::max(d, s);
    }
    return d;
  }

  Coeff coeff(const Exponent& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Coeff(0.0) : it->second;
  }

  // Coefficient of the constant monomial.
  Coeff constant_term() const { return coeff(Exponent(vars_.size(), 0)); }

  void add_term(const Exponent& e, const Coeff& c) {
    if (e.size() != vars_.size()) throw PolyError("exponent length does not match variable count");
    for (int k : e) {
      if (k < 0) throw PolyError("negative exponent");
    }
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) it->second = it->second + c;
    if (coeff_is_zero(it->second)) terms_.erase(it);
  }

  // Re-express over a superset of the current variables.
  BasicPolynomial aligned(const std::vector<std::string>& target) const {
    auto tv = sorted(target);
    std::vector<std::size_t> map(vars_.size());
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      bool found = false;
      for (std::size_t j = 0; j < tv.size(); ++j) {
        if (tv[j] == vars_[i]) {
          map[i] = j;
          found = true;
        }
      }
      if (!found) throw PolyError("cannot align: variable '" + vars_[i] + "' missing from target");
    }
    BasicPolynomial r(tv);
    for (const auto& [e, c] : terms_) {
      Exponent ne(tv.size(), 0);
      for (std::size_t i = 0; i < e.size(); ++i) ne[map[i]] = e[i];
      r.terms_.emplace(std::move(ne), c);
    }
    return r;
  }

  BasicPolynomial& operator+=(const BasicPolynomial& q) {
    if (vars_ != q.vars_) {
      auto u = merge_vars(vars_, q.vars_);
      *this = aligned(u);
      if (q.vars_ != u) return *this += q.aligned(u);
    }
    for (const auto& [e, c] : q.terms_) add_term(e, c);
    return *this;
  }

  BasicPolynomial& operator-=(const BasicPolynomial& q) { return *this += -q; }

  BasicPolynomial operator-() const {
    BasicPolynomial r(vars_);
    for (const auto& [e, c] : terms_) r.terms_.emplace(e, c * -1.0);
    return r;
  }

  friend BasicPolynomial operator+(BasicPolynomial p, const BasicPolynomial& q) { return p += q; }
  friend BasicPolynomial operator-(BasicPolynomial p, const BasicPolynomial& q) { return p -= q; }

  friend BasicPolynomial operator*(const BasicPolynomial& p, const BasicPolynomial& q) {
    if (p.vars_ != q.vars_) {
      auto u = merge_vars(p.vars_, q.vars_);
      return p.aligned(u) * q.aligned(u);
    }
    BasicPolynomial r(p.vars_);
    for (const auto& [ea, ca] : p.terms_) {
      for (const auto& [eb, cb] : q.terms_) {
        Exponent e(ea.size());
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
        r.add_term(e, ca * cb);
      }
    }
    return r;
  }

  friend BasicPolynomial operator*(BasicPolynomial p, double s) {
    if (s == 0.0) return BasicPolynomial(p.vars_);
    for (auto it = p.terms_.begin(); it != p.terms_.end();) {
      it->second = it->second * s;
      if (coeff_is_zero(it->second)) {
        it = p.terms_.erase(it);
      } else {
        ++it;
      }
    }
    return p;
  }
  friend BasicPolynomial operator*(double s, BasicPolynomial p) { return std::move(p) * s; }

  BasicPolynomial pow(int k) const {
    if (k < 0) throw PolyError("negative power");
    auto r = constant(Coeff(1.0), vars_);
    for (int i = 0; i < k; ++i) r = r * *this;
    return r;
  }

  BasicPolynomial derivative(const std::string& v) const {
    const auto k = index_of(v);
    BasicPolynomial r(vars_);
    for (const auto& [e, c] : terms_) {
      if (e[k] == 0) continue;
      Exponent ne = e;
      ne[k] -= 1;
      r.add_term(ne, c * static_cast<double>(e[k]));
    }
    return r;
  }

  // Direct monomial evaluation in canonical term order.
  Coeff eval(std::span<const double> point) const {
    if (point.size() != vars_.size()) {
      throw PolyError("evaluation point has length " + std::to_string(point.size()) +
                      ", expected " + std::to_string(vars_.size()));
    }
    Coeff acc(0.0);
    for (const auto& [e, c] : terms_) {
      double m = 1.0;
      for (std::size_t i = 0; i < e.size(); ++i) {
        for (int j = 0; j < e[i]; ++j) m *= point[i];
      }
      acc = acc + c * m;
    }
    return acc;
  }

  // Evaluates the named variables only; remaining variables stay symbolic.
  BasicPolynomial partial_eval(const std::vector<std::string>& names,
                               std::span<const double> values) const {
    std::vector<std::string> keep;
    std::vector<int> role(vars_.size(), -1);
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      for (std::size_t j = 0; j < names.size(); ++j) {
        if (names[j] == vars_[i]) role[i] = static_cast<int>(j);
      }
      if (role[i] < 0) keep.push_back(vars_[i]);
    }
    BasicPolynomial r(keep);
    for (const auto& [e, c] : terms_) {
      double m = 1.0;
      Exponent ne;
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (role[i] >= 0) {
          for (int j = 0; j < e[i]; ++j) m *= values[role[i]];
        } else {
          ne.push_back(e[i]);
        }
      }
      r.add_term(ne, c * m);
    }
    return r;
  }

  // Replace variable v_i by polynomial subs[i] (a polynomial in any variables).
  BasicPolynomial substitute(const std::map<std::string, BasicPolynomial>& subs) const {
    std::vector<std::string> rest;
    for (const auto& v : vars_) {
      if (!subs.contains(v)) rest.push_back(v);
    }
    BasicPolynomial result(rest);
    for (const auto& [e, c] : terms_) {
      BasicPolynomial term = constant(c, rest);
      Exponent plain(rest.size(), 0);
      std::size_t r = 0;
      for (std::size_t i = 0; i < vars_.size(); ++i) {
        auto it = subs.find(vars_[i]);
        if (it == subs.end()) {
          plain[r++] = e[i];
        } else if (e[i] > 0) {
          term = term * it->second.pow(e[i]);
        }
      }
      term = term * monomial(plain, Coeff(1.0), rest);
      result += term;
    }
    return result;
  }

  // Removes terms whose magnitude falls below tol (compilation-time cleanup).
  template <class Magnitude>
  BasicPolynomial pruned(double tol, Magnitude mag) const {
    BasicPolynomial r(vars_);
    for (const auto& [e, c] : terms_) {
      if (mag(c) > tol) r.terms_.emplace(e, c);
    }
    return r;
  }

  template <class F>
  auto map_coeffs(F f) const {
    using Out = decltype(f(std::declval<const Coeff&>()));
    BasicPolynomial<Out> r(vars_);
    for (const auto& [e, c] : terms_) r.add_term(e, f(c));
    return r;
  }

  friend bool operator==(const BasicPolynomial& a, const BasicPolynomial& b) {
    if (a.vars_ == b.vars_) return a.terms_ == b.terms_;
    auto u = merge_vars(a.vars_, b.vars_);
    return a.aligned(u).terms_ == b.aligned(u).terms_;
  }

 private:
  static std::vector<std::string> sorted(std::vector<std::string> v) {
    std::sort(v.begin(), v.end(), var_less);
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  }

  template <class>
  friend class BasicPolynomial;

  std::vector<std::string> vars_;
  Terms terms_;
};

using Polynomial = BasicPolynomial<double>;

// All monomials in `vars` of total degree <= d, graded lexicographic order.
std::vector<Exponent> monomials_up_to(std::size_t nvars, int d);
std::vector<Polynomial> monomials_up_to(const std::vector<std::string>& vars, int d);

std::string monomial_to_string(const Exponent& e, const std::vector<std::string>& vars);

// 17 significant digits, highest-degree term first; parseable by parse_polynomial.
std::string to_string(const Polynomial& p);

bool approx_equal(const Polynomial& a, const Polynomial& b, double tol);
double max_abs_coeff(const Polynomial& p);

}  // namespace gainscope::poly
