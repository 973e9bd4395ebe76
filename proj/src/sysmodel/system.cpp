#include "sysmodel/system.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "polycore/interval.hpp"

namespace gainscope::sys {

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

struct Line {
  int number;
  std::string text;  // comment stripped, untrimmed
};

std::vector<std::string> split(const std::string& s, char sep, std::vector<int>* offsets = nullptr) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      if (offsets) offsets->push_back(static_cast<int>(start));
      start = i + 1;
    }
  }
  return out;
}

[[noreturn]] void fail_at(int line, const std::string& msg) {
  throw SystemError("line " + std::to_string(line) + ": " + msg);
}

std::vector<double> parse_vector(const std::string& s, int line) {
  std::vector<double> v;
  for (const auto& tok : split(s, ',')) {
    auto t = trim(tok);
    if (t.empty()) fail_at(line, "empty entry in numeric list");
    char* end = nullptr;
    double x = std::strtod(t.c_str(), &end);
    if (end == t.c_str() || *end != '\0') fail_at(line, "malformed number '" + t + "'");
    v.push_back(x);
  }
  return v;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ParamMatrix constant_matrix(const ParamMatrix& m, std::span<const double> theta,
                            const std::vector<std::string>& names) {
  ParamMatrix out(m.rows, m.cols);
  for (std::size_t k = 0; k < m.entries.size(); ++k) {
    out.entries[k] = poly::RationalFunction(Polynomial::constant(m.entries[k].eval(theta), names));
  }
  return out;
}

void place(ParamMatrix& dst, const ParamMatrix& src, int r0, int c0) {
  for (int i = 0; i < src.rows; ++i) {
    for (int j = 0; j < src.cols; ++j) dst(r0 + i, c0 + j) = src(i, j);
  }
}

ParamMatrix minus(const ParamMatrix& a, const ParamMatrix& b) {
  ParamMatrix out(a.rows, a.cols);
  for (std::size_t k = 0; k < a.entries.size(); ++k) out.entries[k] = a.entries[k] - b.entries[k];
  return out;
}

ParamMatrix zeros(int r, int c, const std::vector<std::string>& names) {
  ParamMatrix out(r, c);
  for (auto& e : out.entries) e = poly::RationalFunction(Polynomial(names));
  return out;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::vector<double> UncertainSystem::to_original(std::span<const double> theta) const {
  std::vector<double> out(theta.begin(), theta.end());
  if (spec.normalize) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = spec.theta_star[i] * (1.0 + theta[i]);
  }
  return out;
}

bool UncertainSystem::in_domain(std::span<const double> theta, double tol) const {
  for (const auto& g : domain) {
    if (g.eval(theta) < -tol) return false;
  }
  return true;
}

UncertainSystem load_system(std::string_view text) {
  std::map<std::string, std::vector<Line>> sections;
  std::map<std::string, int> section_line;
  std::string current;
  {
    std::istringstream in{std::string(text)};
    std::string raw;
    int ln = 0;
    while (std::getline(in, raw)) {
      ++ln;
      if (auto h = raw.find('#'); h != std::string::npos) raw = raw.substr(0, h);
      auto t = trim(raw);
      if (t.empty()) continue;
      if (t.front() == '[') {
        if (t.back() != ']') fail_at(ln, "malformed section header");
        current = trim(std::string_view(t).substr(1, t.size() - 2));
        static const char* known[] = {"dims", "A", "B", "C", "D", "nominal", "domain", "options"};
        bool ok = false;
        for (auto* k : known) ok = ok || current == k;
        if (!ok) fail_at(ln, "unknown section [" + current + "]");
        if (sections.contains(current)) fail_at(ln, "duplicate section [" + current + "]");
        sections[current];
        section_line[current] = ln;
        continue;
      }
      if (current.empty()) fail_at(ln, "content outside of any section");
      sections[current].push_back({ln, raw});
    }
  }

  SystemSpec spec;
  // [dims]: either `n = 1` style keys or a bare `n,m,p,ntheta` list.
  if (!sections.contains("dims")) throw SystemError("missing [dims] section");
  {
    std::map<std::string, int> dims;
    for (const auto& l : sections["dims"]) {
      auto eq = l.text.find('=');
      if (eq == std::string::npos) {
        auto v = parse_vector(l.text, l.number);
        if (v.size() != 4) fail_at(l.number, "expected n,m,p,ntheta");
        dims["n"] = static_cast<int>(v[0]);
        dims["m"] = static_cast<int>(v[1]);
        dims["p"] = static_cast<int>(v[2]);
        dims["ntheta"] = static_cast<int>(v[3]);
        continue;
      }
      auto keys = split(l.text.substr(0, eq), ',');
      auto vals = parse_vector(l.text.substr(eq + 1), l.number);
      if (keys.size() != vals.size()) fail_at(l.number, "dimension keys and values differ in count");
      for (std::size_t i = 0; i < keys.size(); ++i) {
        auto k = trim(keys[i]);
        if (k != "n" && k != "m" && k != "p" && k != "ntheta") fail_at(l.number, "unknown dimension '" + k + "'");
        if (vals[i] != std::floor(vals[i]) || vals[i] < 0) fail_at(l.number, "dimension must be a non-negative integer");
        dims[k] = static_cast<int>(vals[i]);
      }
    }
    for (const char* k : {"n", "m", "p", "ntheta"}) {
      if (!dims.contains(k)) throw SystemError(std::string("[dims] is missing '") + k + "'");
    }
    spec.n = dims["n"];
    spec.m = dims["m"];
    spec.p = dims["p"];
    spec.ntheta = dims["ntheta"];
    if (spec.n < 1 || spec.m < 1 || spec.p < 1) throw SystemError("dimensions n, m, p must be at least 1");
  }
  std::vector<std::string> names;
  for (int i = 1; i <= spec.ntheta; ++i) names.push_back("t" + std::to_string(i));

  auto read_matrix = [&](const std::string& key, int rows, int cols, bool optional) {
    if (!sections.contains(key)) {
      if (optional) return zeros(rows, cols, names);
      throw SystemError("missing [" + key + "] section");
    }
    const auto& ls = sections[key];
    if (static_cast<int>(ls.size()) != rows) {
      fail_at(section_line[key], "[" + key + "] has " + std::to_string(ls.size()) + " rows, expected " +
                                     std::to_string(rows));
    }
    ParamMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
      std::vector<int> offs;
      auto cells = split(ls[i].text, ',', &offs);
      if (static_cast<int>(cells.size()) != cols) {
        fail_at(ls[i].number, "[" + key + "] row has " + std::to_string(cells.size()) + " entries, expected " +
                                  std::to_string(cols));
      }
      for (int j = 0; j < cols; ++j) {
        m(i, j) = poly::parse_rational(cells[j], names, ls[i].number, offs[j]);
      }
    }
    return m;
  };
  spec.A = read_matrix("A", spec.n, spec.n, false);
  spec.B = read_matrix("B", spec.n, spec.m, false);
  spec.C = read_matrix("C", spec.p, spec.n, false);
  spec.D = read_matrix("D", spec.p, spec.m, true);

  if (!sections.contains("nominal")) throw SystemError("missing [nominal] section");
  for (const auto& l : sections["nominal"]) {
    auto eq = l.text.find('=');
    if (eq == std::string::npos || trim(l.text.substr(0, eq)) != "theta_star") {
      fail_at(l.number, "expected 'theta_star = v1,...'");
    }
    spec.theta_star = parse_vector(l.text.substr(eq + 1), l.number);
    if (static_cast<int>(spec.theta_star.size()) != spec.ntheta) {
      fail_at(l.number, "theta_star has " + std::to_string(spec.theta_star.size()) + " entries, expected " +
                            std::to_string(spec.ntheta));
    }
  }
  if (static_cast<int>(spec.theta_star.size()) != spec.ntheta) throw SystemError("theta_star not given");

  if (sections.contains("domain")) {
    for (const auto& l : sections["domain"]) {
      std::vector<int> offs;
      auto parts = split(l.text, ';', &offs);
      for (std::size_t k = 0; k < parts.size(); ++k) {
        if (trim(parts[k]).empty()) continue;
        auto eq = parts[k].find('=');
        if (eq == std::string::npos) fail_at(l.number, "expected 'gJ = <polynomial>'");
        spec.domain.push_back(poly::parse_polynomial(parts[k].substr(eq + 1), names, l.number,
                                                     offs[k] + static_cast<int>(eq) + 1));
      }
    }
  }
  if (sections.contains("options")) {
    for (const auto& l : sections["options"]) {
      auto eq = l.text.find('=');
      if (eq == std::string::npos) fail_at(l.number, "expected 'key = value'");
      auto key = trim(l.text.substr(0, eq));
      auto val = trim(l.text.substr(eq + 1));
      if (key != "normalize") fail_at(l.number, "unknown option '" + key + "'");
      if (val != "true" && val != "false") fail_at(l.number, "normalize must be true or false");
      spec.normalize = val == "true";
    }
  }

  UncertainSystem sys;
  sys.spec = spec;
  sys.n = spec.n;
  sys.m = spec.m;
  sys.p = spec.p;
  sys.ntheta = spec.ntheta;
  sys.theta_names = names;
  sys.A = spec.A;
  sys.B = spec.B;
  sys.C = spec.C;
  sys.D = spec.D;
  sys.theta_star = spec.theta_star;
  sys.domain = spec.domain;

  if (!sys.in_domain(spec.theta_star, 1e-12)) throw SystemError("nominal point outside domain");

  if (spec.normalize) {
    // t_i = t*_i (1 + s_i), expressed again with the names t_i.
    std::map<std::string, Polynomial> subs;
    for (int i = 0; i < spec.ntheta; ++i) {
      if (spec.theta_star[i] == 0.0) throw SystemError("normalize requires nonzero nominal parameters");
      subs[names[i]] = Polynomial::constant(spec.theta_star[i], names) +
                       spec.theta_star[i] * Polynomial::variable(names[i], names);
    }
    for (auto* m : {&sys.A, &sys.B, &sys.C, &sys.D}) {
      for (auto& e : m->entries) e = e.substitute(subs).aligned(names);
    }
    for (auto& g : sys.domain) g = g.substitute(subs).aligned(names);
    sys.theta_star.assign(spec.ntheta, 0.0);
  }

  for (const auto* m : {&sys.A, &sys.B, &sys.C, &sys.D}) {
    for (const auto& e : m->entries) {
      if (std::fabs(e.den().eval(sys.theta_star)) <= poly::kSingularDenominator) {
        throw SystemError("denominator " + poly::to_string(e.den()) + " vanishes at the nominal point");
      }
    }
  }
  sys.hash = fnv1a64(serialize(spec));
  return sys;
}

UncertainSystem load_system_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SystemError("cannot open system file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_system(ss.str());
}

std::string serialize(const SystemSpec& spec) {
  std::ostringstream out;
  out << "[dims]\n";
  out << "n = " << spec.n << "\nm = " << spec.m << "\np = " << spec.p << "\nntheta = " << spec.ntheta << "\n";
  auto mat = [&](const char* key, const ParamMatrix& m) {
    out << "\n[" << key << "]\n";
    for (int i = 0; i < m.rows; ++i) {
      for (int j = 0; j < m.cols; ++j) {
        if (j) out << ", ";
        out << poly::to_string(m(i, j));
      }
      out << "\n";
    }
  };
  mat("A", spec.A);
  mat("B", spec.B);
  mat("C", spec.C);
  mat("D", spec.D);
  out << "\n[nominal]\ntheta_star = ";
  for (std::size_t i = 0; i < spec.theta_star.size(); ++i) out << (i ? ", " : "") << fmt17(spec.theta_star[i]);
  out << "\n";
  if (!spec.domain.empty()) {
    out << "\n[domain]\n";
    for (std::size_t j = 0; j < spec.domain.size(); ++j) {
      out << "g" << (j + 1) << " = " << poly::to_string(spec.domain[j]) << "\n";
    }
  }
  out << "\n[options]\nnormalize = " << (spec.normalize ? "true" : "false") << "\n";
  return out.str();
}

ParamMatrix CascadeSystem::Chat() const {
  ParamMatrix out(p, 2 * n);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < 2 * n; ++j) out(i, j) = Cbar(p + i, j);
  }
  return out;
}

ParamMatrix CascadeSystem::Dhat() const {
  ParamMatrix out(p, m);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < m; ++j) out(i, j) = Dbar(p + i, j);
  }
  return out;
}

CascadeSystem build_cascade(const UncertainSystem& sys) {
  const auto& nm = sys.theta_names;
  const auto As = constant_matrix(sys.A, sys.theta_star, nm);
  const auto Bs = constant_matrix(sys.B, sys.theta_star, nm);
  const auto Cs = constant_matrix(sys.C, sys.theta_star, nm);
  const auto Ds = constant_matrix(sys.D, sys.theta_star, nm);
  CascadeSystem c;
  c.n = sys.n;
  c.m = sys.m;
  c.p = sys.p;
  c.parent = &sys;
  c.Abar = zeros(2 * sys.n, 2 * sys.n, nm);
  place(c.Abar, As, 0, 0);
  place(c.Abar, minus(As, sys.A), sys.n, 0);
  place(c.Abar, sys.A, sys.n, sys.n);
  c.Bbar = zeros(2 * sys.n, sys.m, nm);
  place(c.Bbar, Bs, 0, 0);
  place(c.Bbar, minus(Bs, sys.B), sys.n, 0);
  c.Cbar = zeros(2 * sys.p, 2 * sys.n, nm);
  place(c.Cbar, Cs, 0, 0);
  place(c.Cbar, minus(Cs, sys.C), sys.p, 0);
  place(c.Cbar, sys.C, sys.p, sys.n);
  c.Dbar = zeros(2 * sys.p, sys.m, nm);
  place(c.Dbar, Ds, 0, 0);
  place(c.Dbar, minus(Ds, sys.D), sys.p, 0);
  for (auto* m : {&c.Abar, &c.Bbar, &c.Cbar, &c.Dbar}) {
    for (auto& e : m->entries) e = e.aligned(nm);
  }
  return c;
}

Eigen::MatrixXd eval_matrix(const ParamMatrix& m, std::span<const double> theta) {
  Eigen::MatrixXd out(m.rows, m.cols);
  for (int i = 0; i < m.rows; ++i) {
    for (int j = 0; j < m.cols; ++j) out(i, j) = m(i, j).eval(theta);
  }
  return out;
}

NumericStateSpace eval_at(const UncertainSystem& sys, std::span<const double> theta) {
  return {eval_matrix(sys.A, theta), eval_matrix(sys.B, theta), eval_matrix(sys.C, theta),
          eval_matrix(sys.D, theta)};
}

NumericStateSpace eval_at(const CascadeSystem& cas, std::span<const double> theta) {
  return {eval_matrix(cas.Abar, theta), eval_matrix(cas.Bbar, theta), eval_matrix(cas.Cbar, theta),
          eval_matrix(cas.Dbar, theta)};
}

double spectral_abscissa(const Eigen::MatrixXd& a) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
  return es.eigenvalues().real().maxCoeff();
}

HurwitzReport hurwitz_sample_check(const UncertainSystem& sys, const std::vector<std::vector<double>>& grid,
                                   double eps) {
  HurwitzReport rep;
  for (const auto& th : grid) {
    HurwitzPoint pt;
    pt.theta = th;
    pt.max_real_part = spectral_abscissa(eval_matrix(sys.A, th));
    pt.stable = pt.max_real_part < -eps;
    rep.worst = std::max(rep.worst, pt.max_real_part);
    rep.all_stable = rep.all_stable && pt.stable;
    rep.points.push_back(std::move(pt));
  }
  return rep;
}

std::optional<std::vector<Interval>> domain_box(const UncertainSystem& sys) {
  std::vector<Polynomial> dom;
  for (const auto& g : sys.domain) dom.push_back(g.aligned(sys.theta_names));
  const auto box = poly::box_from_domain(dom, sys.theta_names.size());
  if (!box) return std::nullopt;
  std::vector<Interval> out;
  for (const auto& r : *box) out.push_back({r.lo, r.hi});
  return out;
}

std::vector<std::vector<double>> box_grid(const std::vector<Interval>& box, const std::vector<int>& resolution,
                                          double shrink) {
  if (box.size() != resolution.size()) throw SystemError("grid resolution does not match parameter count");
  std::vector<std::vector<double>> axes;
  for (std::size_t i = 0; i < box.size(); ++i) {
    if (resolution[i] < 2) throw SystemError("grid resolution must be at least 2 per axis");
    const double w = box[i].hi - box[i].lo;
    const double lo = box[i].lo + shrink * w, hi = box[i].hi - shrink * w;
    std::vector<double> ax(resolution[i]);
    for (int k = 0; k < resolution[i]; ++k) ax[k] = lo + (hi - lo) * k / (resolution[i] - 1);
    axes.push_back(std::move(ax));
  }
  std::vector<std::vector<double>> pts;
  std::vector<int> idx(box.size(), 0);
  if (box.empty()) return {std::vector<double>{}};
  for (;;) {
    std::vector<double> p(box.size());
    for (std::size_t i = 0; i < box.size(); ++i) p[i] = axes[i][idx[i]];
    pts.push_back(std::move(p));
    int k = static_cast<int>(box.size()) - 1;
    while (k >= 0 && ++idx[k] == resolution[k]) idx[k--] = 0;
    if (k < 0) break;
  }
  return pts;
}

}  // namespace gainscope::sys
