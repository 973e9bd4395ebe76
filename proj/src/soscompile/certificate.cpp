#include "soscompile/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "polycore/parser.hpp"
#include "soscompile/affine.hpp"

namespace gainscope::sos {

using poly::Polynomial;

const Polynomial* BoundCertificate::decision(const std::string& name) const {
  for (const auto& [n, p] : decisions) {
    if (n == name) return &p;
  }
  return nullptr;
}

std::string BoundCertificate::meta(const std::string& key, const std::string& fallback) const {
  for (const auto& [k, v] : metadata) {
    if (k == key) return v;
  }
  return fallback;
}

void BoundCertificate::set_meta(const std::string& key, const std::string& value) {
  for (auto& [k, v] : metadata) {
    if (k == key) {
      v = value;
      return;
    }
  }
  metadata.emplace_back(key, value);
}

Polynomial gram_polynomial(const GramRecord& g, const std::vector<std::string>& vars) {
  Polynomial p(vars);
  const auto n = static_cast<int>(g.basis.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double q = (i == j ? 1.0 : 2.0) * g.Q(i, j);
      if (q == 0.0) continue;
      poly::Exponent e(vars.size());
      for (std::size_t k = 0; k < e.size(); ++k) e[k] = g.basis[i][k] + g.basis[j][k];
      p.add_term(e, q);
    }
  }
  return p;
}

namespace {

double min_eigenvalue(const Eigen::MatrixXd& q) {
  if (q.rows() == 0) return 0.0;
  const Eigen::MatrixXd s = 0.5 * (q + q.transpose());
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(s, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

}  // namespace

void validate(BoundCertificate& cert, const ValidationTolerances& tol) {
  cert.coeff_residual = 0.0;
  cert.min_eig = 0.0;
  bool first_eig = true;
  auto note_eig = [&](double v) {
    cert.min_eig = first_eig ? v : std::min(cert.min_eig, v);
    first_eig = false;
  };
  for (auto& c : cert.constraints) {
    Polynomial rest = c.expression.aligned(c.vars);
    for (std::size_t j = 0; j < c.domain.size(); ++j) {
      auto& m = c.multipliers[j];
      m.min_eig = min_eigenvalue(m.Q);
      if (m.Q.rows() > 0) note_eig(m.min_eig);
      rest -= gram_polynomial(m, c.vars) * c.domain[j];
    }
    c.gram.min_eig = min_eigenvalue(c.gram.Q);
    if (c.gram.Q.rows() > 0) note_eig(c.gram.min_eig);
    rest -= gram_polynomial(c.gram, c.vars);
    c.residual = poly::max_abs_coeff(rest);
    cert.coeff_residual = std::max(cert.coeff_residual, c.residual);
  }
  double eq_res = 0.0;
  for (auto& e : cert.equalities) {
    const Polynomial* d = cert.decision(e.decision);
    if (!d || d->vars().size() != e.point.size()) {
      e.residual = INFINITY;
    } else {
      e.residual = std::fabs(d->eval(e.point) - e.value);
    }
    eq_res = std::max(eq_res, e.residual);
  }
  cert.valid = false;
  if (!(cert.coeff_residual <= tol.match)) {
    cert.reason = "coeff-mismatch";
  } else if (!(cert.min_eig >= -tol.psd)) {
    cert.reason = "gram-not-psd";
  } else if (!(eq_res <= tol.match)) {
    cert.reason = "equality-violated";
  } else {
    cert.valid = true;
    cert.reason = "ok";
  }
}

// ------------------------------------------------------------ text format

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join(const std::vector<std::string>& v) {
  if (v.empty()) return "-";
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  if (s == "-" || s.empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

void write_gram(std::ostream& os, const char* tag, const GramRecord& g) {
  const auto n = static_cast<int>(g.basis.size());
  os << tag << " " << g.name << " " << n << "\n";
  for (const auto& b : g.basis) {
    os << "b";
    for (int k : b) os << " " << k;
    os << "\n";
  }
  for (int i = 0; i < n; ++i) {
    os << "q";
    for (int j = i; j < n; ++j) os << " " << num(g.Q(i, j));
    os << "\n";
  }
}

}  // namespace

void write_certificate(std::ostream& os, const BoundCertificate& cert) {
  os << "gainscope-certificate 1\n";
  for (const auto& [k, v] : cert.metadata) os << "meta " << k << " = " << v << "\n";
  for (const auto& [n, p] : cert.decisions) {
    os << "decision " << n << " " << join(p.vars()) << " = " << poly::to_string(p) << "\n";
  }
  for (const auto& e : cert.equalities) {
    os << "equality " << e.decision << " " << e.point.size();
    for (double v : e.point) os << " " << num(v);
    os << " = " << num(e.value) << "\n";
  }
  for (const auto& c : cert.constraints) {
    os << "constraint " << c.name << " " << join(c.vars) << "\n";
    os << "expression = " << poly::to_string(c.expression.aligned(c.vars)) << "\n";
    for (std::size_t j = 0; j < c.domain.size(); ++j) {
      os << "domain = " << poly::to_string(c.domain[j].aligned(c.vars)) << "\n";
      write_gram(os, "multiplier", c.multipliers[j]);
    }
    write_gram(os, "gram", c.gram);
    os << "end\n";
  }
  os << "objective " << num(cert.objective) << "\n";
  os << "status " << (cert.valid ? "VALID" : "INVALID") << " " << cert.reason << " coeff_residual "
     << num(cert.coeff_residual) << " min_eig " << num(cert.min_eig) << "\n";
}

namespace {

struct Reader {
  std::istream& is;
  std::string line;
  int lineno = 0;

  bool next() {
    while (std::getline(is, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw SosError("certificate line " + std::to_string(lineno) + ": " + what);
  }
  std::string after_eq() const {
    const auto p = line.find(" = ");
    if (p == std::string::npos) fail("expected ' = '");
    return line.substr(p + 3);
  }
};

GramRecord read_gram(Reader& r, const std::string& tag, std::size_t nvars) {
  std::istringstream hs(r.line);
  std::string t;
  GramRecord g;
  int n = -1;
  hs >> t >> g.name >> n;
  if (t != tag || n < 0) r.fail("expected " + tag);
  g.Q = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (!r.next() || r.line[0] != 'b') r.fail("expected basis row");
    std::istringstream bs(r.line.substr(1));
    poly::Exponent e;
    int k;
    while (bs >> k) e.push_back(k);
    if (e.size() != nvars) r.fail("basis exponent has wrong length");
    g.basis.push_back(e);
  }
  for (int i = 0; i < n; ++i) {
    if (!r.next() || r.line[0] != 'q') r.fail("expected gram row");
    std::istringstream qs(r.line.substr(1));
    for (int j = i; j < n; ++j) {
      double v;
      if (!(qs >> v)) r.fail("short gram row");
      g.Q(i, j) = g.Q(j, i) = v;
    }
  }
  return g;
}

}  // namespace

BoundCertificate read_certificate(std::istream& is) {
  Reader r{is, {}, 0};
  if (!r.next() || r.line != "gainscope-certificate 1") r.fail("not a gainscope certificate");
  BoundCertificate cert;
  while (r.next()) {
    std::istringstream ls(r.line);
    std::string kw;
    ls >> kw;
    if (kw == "meta") {
      std::string key;
      ls >> key;
      cert.metadata.emplace_back(key, r.after_eq());
    } else if (kw == "decision") {
      std::string name, vars;
      ls >> name >> vars;
      const auto v = split_list(vars);
      cert.decisions.emplace_back(name, poly::parse_polynomial(r.after_eq(), v, r.lineno).aligned(v));
    } else if (kw == "equality") {
      PointEquality e;
      std::size_t n = 0;
      ls >> e.decision >> n;
      e.point.resize(n);
      for (auto& v : e.point) ls >> v;
      e.value = std::stod(r.after_eq());
      cert.equalities.push_back(e);
    } else if (kw == "constraint") {
      ConstraintRecord c;
      std::string vars;
      ls >> c.name >> vars;
      c.vars = split_list(vars);
      if (!r.next() || r.line.rfind("expression", 0) != 0) r.fail("expected expression");
      c.expression = poly::parse_polynomial(r.after_eq(), c.vars, r.lineno).aligned(c.vars);
      for (;;) {
        if (!r.next()) r.fail("unterminated constraint");
        if (r.line.rfind("domain", 0) == 0) {
          c.domain.push_back(poly::parse_polynomial(r.after_eq(), c.vars, r.lineno).aligned(c.vars));
          if (!r.next()) r.fail("missing multiplier");
          c.multipliers.push_back(read_gram(r, "multiplier", c.vars.size()));
        } else if (r.line.rfind("gram", 0) == 0) {
          c.gram = read_gram(r, "gram", c.vars.size());
        } else if (r.line == "end") {
          break;
        } else {
          r.fail("unexpected '" + r.line + "'");
        }
      }
      cert.constraints.push_back(std::move(c));
    } else if (kw == "objective") {
      ls >> cert.objective;
    } else if (kw == "status") {
      // Recomputed by validate().
    } else {
      r.fail("unknown record '" + kw + "'");
    }
  }
  validate(cert);
  return cert;
}

}  // namespace gainscope::sos
