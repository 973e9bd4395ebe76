#include "polycore/polynomial.hpp"

#include <cctype>
#include <cstdio>
#include <numeric>

namespace gainscope::poly {

int total_degree(const Exponent& e) { return std::accumulate(e.begin(), e.end(), 0); }

bool GrlexLess::operator()(const Exponent& a, const Exponent& b) const {
  const int da = total_degree(a);
  const int db = total_degree(b);
  if (da != db) return da < db;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    if (a[i] != b[i]) return a[i] > b[i];
  }
  return a.size() < b.size();
}

namespace {

int prefix_rank(const std::string& p) {
  static const char* order[] = {"x", "e", "u", "z", "t", "s"};
  for (int i = 0; i < 6; ++i) {
    if (p == order[i]) return i;
  }
  return 6;
}

std::pair<std::string, long> split_name(const std::string& s) {
  std::size_t k = s.size();
  while (k > 0 && std::isdigit(static_cast<unsigned char>(s[k - 1]))) --k;
  long num = -1;
  if (k < s.size() && s.size() - k < 18) num = std::stol(s.substr(k));
  return {s.substr(0, k), num};
}

}  // namespace

bool var_less(const std::string& a, const std::string& b) {
  auto [pa, na] = split_name(a);
  auto [pb, nb] = split_name(b);
  const int ra = prefix_rank(pa);
  const int rb = prefix_rank(pb);
  if (ra != rb) return ra < rb;
  if (pa != pb) return pa < pb;
  if (na != nb) return na < nb;
  return a < b;
}

std::vector<std::string> merge_vars(const std::vector<std::string>& a,
                                    const std::vector<std::string>& b) {
  std::vector<std::string> u = a;
  u.insert(u.end(), b.begin(), b.end());
  std::sort(u.begin(), u.end(), var_less);
  u.erase(std::unique(u.begin(), u.end()), u.end());
  return u;
}

std::vector<Exponent> monomials_up_to(std::size_t nvars, int d) {
  std::vector<Exponent> out;
  if (d < 0) return out;
  // Enumerate per total degree, then sort into grlex order.
  Exponent cur(nvars, 0);
  auto rec = [&](auto&& self, std::size_t i, int left) -> void {
    if (i + 1 >= nvars) {
      if (nvars > 0) cur[nvars - 1] = left;
      out.push_back(cur);
      return;
    }
    for (int k = left; k >= 0; --k) {
      cur[i] = k;
      self(self, i + 1, left - k);
    }
    cur[i] = 0;
  };
  for (int deg = 0; deg <= d; ++deg) {
    if (nvars == 0) {
      if (deg == 0) out.push_back(cur);
      continue;
    }
    rec(rec, 0, deg);
  }
  std::sort(out.begin(), out.end(), GrlexLess{});
  return out;
}

std::vector<Polynomial> monomials_up_to(const std::vector<std::string>& vars, int d) {
  Polynomial proto(vars);
  std::vector<Polynomial> out;
  for (const auto& e : monomials_up_to(proto.vars().size(), d)) {
    out.push_back(Polynomial::monomial(e, 1.0, proto.vars()));
  }
  return out;
}

std::string monomial_to_string(const Exponent& e, const std::vector<std::string>& vars) {
  std::string s;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i] == 0) continue;
    if (!s.empty()) s += "*";
    s += vars[i];
    if (e[i] > 1) s += "^" + std::to_string(e[i]);
  }
  return s.empty() ? "1" : s;
}

namespace {
std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace

std::string to_string(const Polynomial& p) {
  if (p.is_zero()) return "0";
  std::string s;
  bool first = true;
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    const auto& [e, c] = *it;
    const bool is_const = total_degree(e) == 0;
    double mag = std::fabs(c);
    if (first) {
      if (c < 0) s += "-";
    } else {
      s += c < 0 ? " - " : " + ";
    }
    first = false;
    if (is_const) {
      s += fmt17(mag);
    } else if (mag == 1.0) {
      s += monomial_to_string(e, p.vars());
    } else {
      s += fmt17(mag) + "*" + monomial_to_string(e, p.vars());
    }
  }
  return s;
}

bool approx_equal(const Polynomial& a, const Polynomial& b, double tol) {
  return max_abs_coeff(a - b) <= tol;
}

double max_abs_coeff(const Polynomial& p) {
  double m = 0.0;
  for (const auto& [e, c] : p.terms()) m = std::max(m, std::fabs(c));
  return m;
}

}  // namespace gainscope::poly
