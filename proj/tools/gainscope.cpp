// gainscope command-line front end; talks to the library through the C API only.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gainscope/gainscope.h"

namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kIo = 1, kInvalid = 2, kNumerical = 3 };

struct Common {
  std::string system;
  std::string out = ".";
  std::string grid;
  int threads = 0;
};

struct Synth {
  std::vector<std::string> kinds{"l2"};
  gs_options opt{};
  std::string pin = "on";
  bool full_output = false;
  std::string sdpa;
  std::string cert;
};

template <class F>
std::string fetch(F f) {
  size_t need = 0;
  f(nullptr, 0, &need);
  std::string s(need, '\0');
  f(s.data(), s.size(), &need);
  if (!s.empty()) s.pop_back();
  return s;
}

int report_error(gs_status st) {
  std::fprintf(stderr, "error: %s: %s\n", gs_status_string(st), gs_last_error());
  switch (st) {
    case GS_ERR_IO:
    case GS_ERR_PARSE:
    case GS_ERR_INVALID_ARG: return kIo;
    case GS_ERR_INTERNAL: return kNumerical;
    default: return kInvalid;
  }
}

struct SystemHandle {
  gs_system* s = nullptr;
  ~SystemHandle() { gs_system_free(s); }
};

struct BoundHandle {
  gs_bound* b = nullptr;
  ~BoundHandle() { gs_bound_free(b); }
};

struct CertHandle {
  gs_certificate* c = nullptr;
  ~CertHandle() { gs_certificate_free(c); }
};

std::vector<int> parse_grid(const std::string& text, int ntheta) {
  if (text.empty()) return std::vector<int>(ntheta, 20);
  std::vector<int> r;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, 'x')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(tok, &used);
    } catch (...) {
      used = 0;
    }
    if (used != tok.size() || v < 2) throw CLI::ValidationError("--grid", "each axis needs an integer >= 2");
    r.push_back(v);
  }
  if (static_cast<int>(r.size()) != ntheta) {
    throw CLI::ValidationError("--grid", "expected " + std::to_string(ntheta) + " axes");
  }
  return r;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void add_synth_flags(CLI::App* cmd, Synth& sy, bool multi_kind) {
  auto* k = cmd->add_option("--kind", sy.kinds, "bound kind: s2o-upper, s2o-lower, l2, h2")
                ->check(CLI::IsMember({"s2o-upper", "s2o-lower", "l2", "h2"}));
  if (multi_kind) {
    k->delimiter(',');
  } else {
    k->expected(1);
  }
  cmd->add_option("--deg-v", sy.opt.deg_v, "parameter degree of the storage function")->check(CLI::NonNegativeNumber);
  cmd->add_option("--deg-m", sy.opt.deg_m, "parameter degree of the domain multipliers")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--deg-p1", sy.opt.deg_p1, "degree of p1 (q1 for h2)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--deg-p2", sy.opt.deg_p2, "degree of p2")->check(CLI::NonNegativeNumber);
  cmd->add_option("--deg-gn", sy.opt.deg_gn, "degree of gamma_n")->check(CLI::NonNegativeNumber);
  cmd->add_option("--deg-gd", sy.opt.deg_gd, "degree of gamma_d")->check(CLI::NonNegativeNumber);
  cmd->add_option("--pin-nominal", sy.pin, "pin the bound to zero at the nominal point")
      ->check(CLI::IsMember({"on", "off"}));
  cmd->add_flag("--full-output", sy.full_output, "h2: use the full output rows instead of the mismatch rows");
  cmd->add_option("--tol-solver", sy.opt.tol_solver, "interior-point tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--tol-psd", sy.opt.tol_psd, "certificate eigenvalue tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--tol-match", sy.opt.tol_match, "certificate coefficient tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--max-iter", sy.opt.max_iter, "interior-point iteration cap")->check(CLI::PositiveNumber);
  cmd->add_option("--sdpa-export", sy.sdpa, "write the compiled SDP in SDPA sparse format");
}

void add_common(CLI::App* cmd, Common& c, bool grid) {
  cmd->add_option("system", c.system, "system file")->required();
  cmd->add_option("--out", c.out, "output directory");
  if (grid) cmd->add_option("--grid", c.grid, "grid resolution, e.g. 20x20");
}

int load(const Common& c, SystemHandle& h) {
  const gs_status st = gs_system_load_file(c.system.c_str(), &h.s);
  return st == GS_OK ? kOk : report_error(st);
}

int ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    std::fprintf(stderr, "error: cannot create '%s': %s\n", dir.c_str(), ec.message().c_str());
    return kIo;
  }
  return kOk;
}

int outcome(const gs_bound* b) {
  if (gs_bound_valid(b)) return kOk;
  switch (gs_bound_solver_status(b)) {
    case GS_SOLVER_NUMERICAL_LIMIT: return kNumerical;
    default: return kInvalid;
  }
}

const char* solver_text(gs_solver_status s) {
  switch (s) {
    case GS_SOLVER_OPTIMAL: return "optimal";
    case GS_SOLVER_INFEASIBLE: return "infeasible";
    case GS_SOLVER_UNBOUNDED: return "unbounded";
    case GS_SOLVER_NUMERICAL_LIMIT: return "numerical-limit";
  }
  return "?";
}

// Synthesizes one bound, writes <out>/<kind>.cert, returns the exit class.
int synthesize(const gs_system* s, const std::string& kind_text, const Synth& sy, const std::string& out,
               BoundHandle& bh, std::string* summary) {
  gs_kind kind;
  if (gs_kind_parse(kind_text.c_str(), &kind) != GS_OK) return report_error(GS_ERR_INVALID_ARG);
  gs_options o = sy.opt;
  o.pin_nominal = sy.pin == "on";
  o.full_output = sy.full_output;
  o.sdpa_export = sy.sdpa.empty() ? nullptr : sy.sdpa.c_str();

  const auto t0 = std::chrono::steady_clock::now();
  const gs_status st = gs_bound_synthesize(s, kind, &o, &bh.b);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (st != GS_OK) return report_error(st);

  const gs_certificate* cert = gs_bound_certificate(bh.b);
  const std::string path = (fs::path(out) / (kind_text + ".cert")).string();
  if (gs_certificate_write(cert, path.c_str()) != GS_OK) return report_error(GS_ERR_IO);

  int n, m, p, k;
  gs_system_dims(s, &n, &m, &p, &k);
  std::vector<double> ts(k);
  if (k > 0) gs_system_theta_star(s, ts.data(), k);
  double at_star = std::nan("");
  gs_bound_eval(bh.b, ts.data(), k, &at_star);
  int rows = 0, blocks = 0, largest = 0;
  gs_bound_sdp_size(bh.b, &rows, &blocks, &largest);

  const std::string num = fetch([&](char* b, size_t c, size_t* nd) { return gs_bound_numerator_string(bh.b, b, c, nd); });
  const std::string den =
      fetch([&](char* b, size_t c, size_t* nd) { return gs_bound_denominator_string(bh.b, b, c, nd); });
  const std::string reason =
      fetch([&](char* b, size_t c, size_t* nd) { return gs_certificate_reason(cert, b, c, nd); });
  const std::string msg = fetch([&](char* b, size_t c, size_t* nd) { return gs_bound_message(bh.b, b, c, nd); });

  std::ostringstream os;
  os << "kind: " << kind_text << "\n";
  os << "degrees: v=" << o.deg_v << " m=" << o.deg_m << " p1=" << o.deg_p1 << " p2=" << o.deg_p2
     << " gn=" << o.deg_gn << " gd=" << o.deg_gd << "\n";
  os << "solver: " << solver_text(gs_bound_solver_status(bh.b)) << " (" << msg << "), iterations "
     << gs_bound_iterations(bh.b) << ", " << rows << " rows, " << blocks << " blocks, largest " << largest << "\n";
  os << "certificate: " << (gs_bound_valid(bh.b) ? "VALID" : "INVALID") << " (" << reason
     << "), coeff_residual " << fmt(gs_certificate_coeff_residual(cert)) << ", min_eig "
     << fmt(gs_certificate_min_eig(cert)) << "\n";
  os << "objective: " << fmt(gs_bound_objective(bh.b)) << "\n";
  os << "bound numerator: " << num << "\n";
  os << "bound denominator: " << den << "\n";
  os << "bound at nominal (squared): " << fmt(at_star) << "  (root " << fmt(std::sqrt(std::max(at_star, 0.0)))
     << ")\n";
  if (kind == GS_KIND_L2 && o.deg_gn == 0 && o.deg_gd == 0) {
    os << "guaranteed cost (squared): " << fmt(at_star) << "  (root " << fmt(std::sqrt(std::max(at_star, 0.0)))
       << ")\n";
  }
  os << "certificate file: " << path << "\n";
  if (summary) *summary += os.str();
  std::printf("%swall time: %.3f s\n\n", os.str().c_str(), secs);
  return outcome(bh.b);
}

// Certificate from --cert, or synthesized from the flags.
int obtain_certificate(const gs_system* s, Synth& sy, const std::string& out, CertHandle& ch, BoundHandle& bh,
                       const gs_certificate** cert, std::string& kind) {
  if (!sy.cert.empty()) {
    const gs_status st = gs_certificate_read(sy.cert.c_str(), &ch.c);
    if (st != GS_OK) return report_error(st);
    *cert = ch.c;
    kind = fetch([&](char* b, size_t c, size_t* nd) { return gs_certificate_meta(ch.c, "kind", b, c, nd); });
    return kOk;
  }
  kind = sy.kinds.front();
  const int rc = synthesize(s, kind, sy, out, bh, nullptr);
  if (!bh.b) return rc;
  *cert = gs_bound_certificate(bh.b);
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gainscope: certified parameter-dependent gain bounds for uncertain LTI systems"};
  app.require_subcommand(1);
  app.set_version_flag("--version", gs_version());

  Common ca, cs, cl, ci, cc;
  Synth sa, ss, sl;
  gs_options_default(&sa.opt);
  gs_options_default(&ss.opt);
  gs_options_default(&sl.opt);

  auto* analyze = app.add_subcommand("analyze", "synthesize bounds and write certificates");
  add_common(analyze, ca, false);
  add_synth_flags(analyze, sa, true);

  auto* sweep = app.add_subcommand("sweep", "bound and oracle on a parameter grid (CSV)");
  add_common(sweep, cs, true);
  add_synth_flags(sweep, ss, false);
  sweep->add_option("--cert", ss.cert, "use this certificate instead of synthesizing");

  double lambda = 1.0;
  auto* level = app.add_subcommand("levelset", "contour {bound = lambda} on a two-parameter grid");
  add_common(level, cl, true);
  add_synth_flags(level, sl, false);
  level->add_option("--cert", sl.cert, "use this certificate instead of synthesizing");
  level->add_option("--lambda", lambda, "level")->required();

  double inv_tol = 1e-9;
  auto* invariance = app.add_subcommand("invariance", "grid scan of output-invariance flags (CSV)");
  add_common(invariance, ci, true);
  invariance->add_option("--tol-invariance", inv_tol, "invariance tolerance")->check(CLI::PositiveNumber);

  std::string cert_path;
  std::uint64_t seed = 1;
  int samples = 25;
  auto* certify = app.add_subcommand("certify", "revalidate a certificate against a system");
  certify->add_option("system", cc.system, "system file")->required();
  certify->add_option("certificate", cert_path, "certificate file")->required();
  certify->add_option("--seed", seed, "seed for the dominance spot-check");
  certify->add_option("--samples", samples, "number of spot-check points")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kIo;
  }

  try {
    if (*analyze) {
      SystemHandle sh;
      if (int rc = load(ca, sh)) return rc;
      if (int rc = ensure_dir(ca.out)) return rc;
      std::string summary;
      int worst = kOk;
      for (const auto& k : sa.kinds) {
        BoundHandle bh;
        worst = std::max(worst, synthesize(sh.s, k, sa, ca.out, bh, &summary));
      }
      const std::string path = (fs::path(ca.out) / "summary.txt").string();
      std::FILE* f = std::fopen(path.c_str(), "wb");
      if (!f) return report_error(GS_ERR_IO);
      std::fputs(summary.c_str(), f);
      std::fclose(f);
      return worst;
    }

    if (*sweep || *level) {
      Common& c = *sweep ? cs : cl;
      Synth& sy = *sweep ? ss : sl;
      SystemHandle sh;
      if (int rc = load(c, sh)) return rc;
      if (int rc = ensure_dir(c.out)) return rc;
      int n, m, p, k;
      gs_system_dims(sh.s, &n, &m, &p, &k);
      const auto res = parse_grid(c.grid, k);
      CertHandle ch;
      BoundHandle bh;
      const gs_certificate* cert = nullptr;
      std::string kind;
      const int rc = obtain_certificate(sh.s, sy, c.out, ch, bh, &cert, kind);
      if (!cert || rc == kIo) return rc;
      if (*sweep) {
        const std::string path = (fs::path(c.out) / ("sweep_" + kind + ".csv")).string();
        int rows = 0;
        gs_status st = gs_sweep_write(sh.s, cert, res.data(), static_cast<int>(res.size()), path.c_str(), &rows);
        if (st != GS_OK) return report_error(st);
        const std::string gp = (fs::path(c.out) / ("sweep_" + kind + ".gp")).string();
        gs_gnuplot_write(path.c_str(), 0, k, gp.c_str());
        std::printf("sweep: %d rows written to %s\n", rows, path.c_str());
      } else {
        const std::string path = (fs::path(c.out) / ("levelset_" + kind + ".csv")).string();
        int lines = 0;
        gs_status st = gs_levelset_write(sh.s, cert, res.data(), static_cast<int>(res.size()), lambda, path.c_str(),
                                         &lines);
        if (st != GS_OK) return report_error(st);
        const std::string gp = (fs::path(c.out) / ("levelset_" + kind + ".gp")).string();
        gs_gnuplot_write(path.c_str(), 1, k, gp.c_str());
        std::printf("levelset: %d polylines at level %s written to %s\n", lines, fmt(lambda).c_str(), path.c_str());
      }
      return rc;
    }

    if (*invariance) {
      SystemHandle sh;
      if (int rc = load(ci, sh)) return rc;
      if (int rc = ensure_dir(ci.out)) return rc;
      int n, m, p, k;
      gs_system_dims(sh.s, &n, &m, &p, &k);
      const auto res = parse_grid(ci.grid, k);
      const std::string path = (fs::path(ci.out) / "invariance.csv").string();
      int rows = 0;
      gs_status st = gs_invariance_write(sh.s, res.data(), static_cast<int>(res.size()), inv_tol, path.c_str(), &rows);
      if (st != GS_OK) return report_error(st);
      std::printf("invariance: %d rows written to %s\n", rows, path.c_str());
      return kOk;
    }

    if (*certify) {
      SystemHandle sh;
      if (int rc = load(cc, sh)) return rc;
      CertHandle ch;
      gs_status st = gs_certificate_read(cert_path.c_str(), &ch.c);
      if (st != GS_OK) return report_error(st);
      gs_certify_report rep{};
      std::string reason;
      st = gs_certify(ch.c, sh.s, seed, samples, &rep, nullptr, 0, nullptr);
      if (st != GS_OK) return report_error(st);
      reason = fetch([&](char* b, size_t c, size_t* nd) {
        gs_certify_report tmp{};
        return gs_certify(ch.c, sh.s, seed, samples, &tmp, b, c, nd);
      });
      std::printf("psd/coefficients: %s\n", rep.valid ? "ok" : "failed");
      std::printf("system hash: %s\n", rep.hash_matches ? "match" : "mismatch");
      if (rep.hash_matches) {
        std::printf("dominance: %s over %d samples (%d skipped), worst margin %s\n", rep.dominance_ok ? "ok" : "failed",
                    rep.samples, rep.skipped, fmt(rep.worst_margin).c_str());
      }
      const bool ok = rep.valid && rep.hash_matches && rep.dominance_ok;
      std::printf("certificate: %s%s%s\n", ok ? "VALID" : "INVALID", ok ? "" : ": ", ok ? "" : reason.c_str());
      return ok ? kOk : kInvalid;
    }
  } catch (const CLI::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kIo;
  }
  return kOk;
}
