#include "gainscope/gainscope.h"

#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "bounds/bounds.hpp"
#include "invariance/invariance.hpp"
#include "oracle/oracle.hpp"
#include "polycore/parser.hpp"
#include "report/report.hpp"
#include "soscompile/certificate.hpp"
#include "sysmodel/system.hpp"

using namespace gainscope;

struct gs_system {
  sys::UncertainSystem sys;
};

struct gs_certificate {
  sos::BoundCertificate cert;
};

struct gs_bound {
  bounds::GainBound bound;
  gs_certificate cert;
};

namespace {

thread_local std::string g_error;

// Caller passed a malformed argument (wrong vector length and the like).
struct ArgError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

gs_status fail(gs_status s, const std::string& msg) {
  g_error = msg;
  return s;
}

gs_status map_exception() {
  try {
    throw;
  } catch (const ArgError& e) {
    return fail(GS_ERR_INVALID_ARG, e.what());
  } catch (const poly::ParseError& e) {
    return fail(GS_ERR_PARSE, e.what());
  } catch (const sys::SystemError& e) {
    return fail(GS_ERR_PARSE, e.what());
  } catch (const bounds::BoundsError& e) {
    return fail(GS_ERR_PRECONDITION, e.what());
  } catch (const oracle::OracleError& e) {
    return fail(GS_ERR_SINGULAR, e.what());
  } catch (const report::ReportError& e) {
    return fail(GS_ERR_UNSUPPORTED, e.what());
  } catch (const sos::SosError& e) {
    const std::string w = e.what();
    return fail(w.find("positivity") != std::string::npos ? GS_ERR_PRECONDITION : GS_ERR_INVALID_ARG, w);
  } catch (const poly::PolyError& e) {
    const std::string w = e.what();
    return fail(w.find("singular") != std::string::npos ? GS_ERR_SINGULAR : GS_ERR_INVALID_ARG, w);
  } catch (const std::exception& e) {
    return fail(GS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(GS_ERR_INTERNAL, "unknown error");
  }
}

gs_status copy_out(const std::string& s, char* buf, size_t cap, size_t* needed) {
  if (needed) *needed = s.size() + 1;
  if (buf && cap > 0) {
    const size_t n = std::min(cap - 1, s.size());
    std::memcpy(buf, s.data(), n);
    buf[n] = '\0';
    if (n < s.size()) return fail(GS_ERR_INVALID_ARG, "buffer too small");
  }
  return GS_OK;
}

bool read_file(const char* path, std::string& out) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return false;
  std::ostringstream ss;
  ss << is.rdbuf();
  out = ss.str();
  return true;
}

gs_status write_file(const char* path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) return fail(GS_ERR_IO, std::string("cannot write '") + path + "'");
  os << text;
  if (!os) return fail(GS_ERR_IO, std::string("write failed for '") + path + "'");
  return GS_OK;
}

bounds::BoundKind to_kind(gs_kind k) {
  switch (k) {
    case GS_KIND_S2O_UPPER: return bounds::BoundKind::s2o_upper;
    case GS_KIND_S2O_LOWER: return bounds::BoundKind::s2o_lower;
    case GS_KIND_L2: return bounds::BoundKind::l2;
    case GS_KIND_H2: return bounds::BoundKind::h2;
  }
  throw bounds::BoundsError("unknown bound kind");
}

std::span<const double> point(const gs_system* s, const double* theta, int len) {
  if (!theta || len != s->sys.ntheta) {
    throw ArgError("parameter vector has length " + std::to_string(len) + ", expected " +
                   std::to_string(s->sys.ntheta));
  }
  return {theta, static_cast<size_t>(len)};
}

std::vector<int> resolution(const gs_system* s, const int* res, int nres) {
  if (!res || nres != s->sys.ntheta) throw ArgError("grid resolution must give one entry per parameter");
  return {res, res + nres};
}

}  // namespace

extern "C" {

const char* gs_version(void) { return "1.0.0"; }

const char* gs_status_string(gs_status s) {
  switch (s) {
    case GS_OK: return "ok";
    case GS_ERR_IO: return "i/o error";
    case GS_ERR_PARSE: return "parse error";
    case GS_ERR_INVALID_ARG: return "invalid argument";
    case GS_ERR_PRECONDITION: return "precondition violated";
    case GS_ERR_SINGULAR: return "singular parameter point";
    case GS_ERR_UNSUPPORTED: return "unsupported";
    case GS_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* gs_last_error(void) { return g_error.c_str(); }

gs_status gs_kind_parse(const char* text, gs_kind* out) {
  if (!text || !out) return fail(GS_ERR_INVALID_ARG, "null argument");
  const std::string t = text;
  if (t == "s2o-upper") *out = GS_KIND_S2O_UPPER;
  else if (t == "s2o-lower") *out = GS_KIND_S2O_LOWER;
  else if (t == "l2") *out = GS_KIND_L2;
  else if (t == "h2") *out = GS_KIND_H2;
  else return fail(GS_ERR_INVALID_ARG, "unknown bound kind '" + t + "'");
  return GS_OK;
}

const char* gs_kind_string(gs_kind k) {
  try {
    return bounds::to_string(to_kind(k));
  } catch (...) {
    return "?";
  }
}

gs_status gs_system_load_file(const char* path, gs_system** out) {
  if (!path || !out) return fail(GS_ERR_INVALID_ARG, "null argument");
  std::string text;
  if (!read_file(path, text)) return fail(GS_ERR_IO, std::string("cannot read '") + path + "'");
  return gs_system_load_text(text.c_str(), out);
}

gs_status gs_system_load_text(const char* text, gs_system** out) {
  if (!text || !out) return fail(GS_ERR_INVALID_ARG, "null argument");
  try {
    *out = new gs_system{sys::load_system(text)};
    return GS_OK;
  } catch (...) {
    *out = nullptr;
    return map_exception();
  }
}

void gs_system_free(gs_system* s) { delete s; }

gs_status gs_system_dims(const gs_system* s, int* n, int* m, int* p, int* ntheta) {
  if (!s) return fail(GS_ERR_INVALID_ARG, "null system");
  if (n) *n = s->sys.n;
  if (m) *m = s->sys.m;
  if (p) *p = s->sys.p;
  if (ntheta) *ntheta = s->sys.ntheta;
  return GS_OK;
}

gs_status gs_system_theta_star(const gs_system* s, double* out, int len) {
  if (!s || !out || len != s->sys.ntheta) return fail(GS_ERR_INVALID_ARG, "bad argument");
  std::copy(s->sys.theta_star.begin(), s->sys.theta_star.end(), out);
  return GS_OK;
}

gs_status gs_system_box(const gs_system* s, double* lo, double* hi, int len) {
  if (!s || !lo || !hi || len != s->sys.ntheta) return fail(GS_ERR_INVALID_ARG, "bad argument");
  const auto box = sys::domain_box(s->sys);
  if (!box) return fail(GS_ERR_UNSUPPORTED, "domain is not a box");
  for (int i = 0; i < len; ++i) {
    lo[i] = (*box)[i].lo;
    hi[i] = (*box)[i].hi;
  }
  return GS_OK;
}

uint64_t gs_system_hash(const gs_system* s) { return s ? s->sys.hash : 0; }

gs_status gs_system_serialize(const gs_system* s, char* buf, size_t cap, size_t* needed) {
  if (!s) return fail(GS_ERR_INVALID_ARG, "null system");
  return copy_out(sys::serialize(s->sys.spec), buf, cap, needed);
}

gs_status gs_system_hurwitz_check(const gs_system* s, int res, double* worst, int* all_stable) {
  if (!s || res < 2) return fail(GS_ERR_INVALID_ARG, "bad argument");
  try {
    std::vector<std::vector<double>> grid{s->sys.theta_star};
    if (auto box = sys::domain_box(s->sys)) {
      auto g = sys::box_grid(*box, std::vector<int>(s->sys.ntheta, res));
      grid.insert(grid.end(), g.begin(), g.end());
    }
    const auto rep = sys::hurwitz_sample_check(s->sys, grid);
    if (worst) *worst = rep.worst;
    if (all_stable) *all_stable = rep.all_stable ? 1 : 0;
    return GS_OK;
  } catch (...) {
    return map_exception();
  }
}

gs_status gs_oracle(const gs_system* s, gs_kind kind, const double* theta, int len, int full_output, double* out) {
  if (!s || !out) return fail(GS_ERR_INVALID_ARG, "null argument");
  try {
    *out = bounds::oracle_value(to_kind(kind), s->sys, point(s, theta, len), full_output != 0);
    return GS_OK;
  } catch (...) {
    return map_exception();
  }
}

gs_status gs_invariance_eval(const gs_system* s, const double* theta, int len, int input, double tol,
                             gs_invariance* out) {
  if (!s || !out) return fail(GS_ERR_INVALID_ARG, "null argument");
  if (input < 0 || input >= s->sys.m) return fail(GS_ERR_INVALID_ARG, "input index out of range");
  try {
    const auto r = inv::invariance_report(s->sys, point(s, theta, len), input, tol);
    out->ss_mismatch = r.ss_mismatch;
    out->numerator_norm = r.numerator_norm;
    out->ss_invariant = r.is_ss_invariant;
    out->fully_invariant = r.is_fully_invariant;
    out->variant_disagrees = r.variant_disagrees;
    return GS_OK;
  } catch (...) {
    return map_exception();
  }
}

void gs_options_default(gs_options* o) {
  if (!o) return;
  const bounds::BoundOptions d;
  o->deg_v = d.deg.v;
  o->deg_m = d.deg.m;
  o->deg_p1 = d.deg.p1;
  o->deg_p2 = d.deg.p2;
  o->deg_gn = d.deg.gn;
  o->deg_gd = d.deg.gd;
  o->pin_nominal = d.pin_nominal ? 1 : 0;
  o->full_output = d.full_output ? 1 : 0;
  o->tol_solver = d.solver.tol;
  o->tol_psd = d.tol.psd;
  o->tol_match = d.tol.match;
  o->max_iter = d.solver.max_iter;
  o->sdpa_export = nullptr;
}

gs_status gs_bound_synthesize(const gs_system* s, gs_kind kind, const gs_options* o, gs_bound** out) {
  if (!s || !out) return fail(GS_ERR_INVALID_ARG, "null argument");
  *out = nullptr;
  gs_options opts;
  if (o) {
    opts = *o;
  } else {
    gs_options_default(&opts);
  }
  if (opts.tol_solver <= 0 || opts.tol_psd <= 0 || opts.tol_match <= 0) {
    return fail(GS_ERR_INVALID_ARG, "tolerances must be positive");
  }
  if (opts.deg_v < 0 || opts.deg_m < 0 || opts.deg_p1 < 0 || opts.deg_p2 < 0 || opts.deg_gn < 0 || opts.deg_gd < 0) {
    return fail(GS_ERR_INVALID_ARG, "degrees must be non-negative");
  }
  bounds::BoundOptions bo;
  bo.deg = {opts.deg_v, opts.deg_m, opts.deg_p1, opts.deg_p2, opts.deg_gn, opts.deg_gd};
  bo.pin_nominal = opts.pin_nominal != 0;
  bo.full_output = opts.full_output != 0;
  bo.solver.tol = opts.tol_solver;
  bo.solver.max_iter = opts.max_iter;
  bo.tol.psd = opts.tol_psd;
  bo.tol.match = opts.tol_match;
  if (opts.sdpa_export) bo.sdpa_export = opts.sdpa_export;
  try {
    auto* b = new gs_bound;
    try {
      b->bound = bounds::synthesize(to_kind(kind), s->sys, bo);
    } catch (...) {
      delete b;
      throw;
    }
    b->cert.cert = b->bound.certificate;
    *out = b;
    return GS_OK;
  } catch (...) {
    return map_exception();
  }
}

void gs_bound_free(gs_bound* b) { delete b; }

gs_solver_status gs_bound_solver_status(const gs_bound* b) {
  if (!b) return GS_SOLVER_NUMERICAL_LIMIT;
  switch (b->bound.status) {
    case sdp::SdpStatus::optimal: return GS_SOLVER_OPTIMAL;
    case sdp::SdpStatus::infeasible: return GS_SOLVER_INFEASIBLE;
    case sdp::SdpStatus::unbounded: return GS_SOLVER_UNBOUNDED;
    case sdp::SdpStatus::numerical_limit: return GS_SOLVER_NUMERICAL_LIMIT;
  }
  return GS_SOLVER_NUMERICAL_LIMIT;
}

int gs_bound_valid(const gs_bound* b) { return b && b->bound.valid() ? 1 : 0; }
int gs_bound_iterations(const gs_bound* b) { return b ? b->bound.iterations : 0; }
double gs_bound_objective(const gs_bound* b) { return b ? b->bound.objective : 0.0; }

gs_status gs_bound_eval(const gs_bound* b, const double* theta, int len, double* out) {
  if (!b || !theta || !out || len < 0) return fail(GS_ERR_INVALID_ARG, "bad argument");
  try {
    *out = b->bound.eval({theta, static_cast<size_t>(len)});
    return GS_OK;
  } catch (...) {
    return map_exception();
  }
}

gs_status gs_bound_sdp_size(const gs_bound* b, int* rows, int* blocks, int* largest_block) {
  if (!b) return fail(GS_ERR_INVALID_ARG, "null bound");
  if (rows) *rows = static_cast<int>(b->bound.sdp_rows);
  if (blocks) *blocks = static_cast<int>(b->bound.sdp_blocks.size());
  if (largest_block) {
    int mx = 0;
    for (int d : b->bound.sdp_blocks) mx = std::max(mx, d);
    *largest_block = mx;
  }
  return GS_OK;
}

gs_status gs_bound_numerator_string(const gs_bound* b, char* buf, size_t cap, size_t* needed) {
  if (!b) return fail(GS_ERR_INVALID_ARG, "null bound");
  return copy_out(poly::to_string(b->bound.numerator), buf, cap, needed);
}

gs_status gs_bound_denominator_string(const gs_bound* b, char* buf, size_t cap, size_t* needed) {
  if (!b) return fail(GS_ERR_INVALID_ARG, "null bound");
  return copy_out(poly::to_string(b->bound.denominator), buf, cap, needed);
}

gs_status gs_bound_message(const gs_bound* b, char* buf, size_t cap, size_t* needed) {
  if (!b) return fail(GS_ERR_INVALID_ARG, "null bound");
  return copy_out(b->bound.solver_message, buf, cap, needed);
}

const gs_certificate* gs_bound_certificate(const gs_bound* b) { return b ? &b->cert : nullptr; }

gs_status gs_certificate_read(const char* path, gs_certificate** out) {
  if (!path || !out) return fail(GS_ERR_INVALID_ARG, "null argument");
  *out = nullptr;
  std::ifstream is(path);
  if (!is) return fail(GS_ERR_IO, std::string("cannot read '") + path + "'");
  try {
    *out = new gs_certificate{sos::read_certificate(is)};
    return GS_OK;
  } catch (const std::exception& e) {
    return fail(GS_ERR_PARSE, e.what());
  }
}

gs_status gs_certificate_write(const gs_certificate* c, const char* path) {
  if (!c || !path) return fail(GS_ERR_INVALID_ARG, "null argument");
  std::ostringstream os;
  sos::write_certificate(os, c->cert);
  return write_file(path, os.str());
}

void gs_certificate_free(gs_certificate* c) { delete c; }
int gs_certificate_valid(const gs_certificate* c) { return c && c->cert.valid ? 1 : 0; }
double gs_certificate_coeff_residual(const gs_certificate* c) { return c ? c->cert.coeff_residual : 0.0; }
double gs_certificate_min_eig(const gs_certificate* c) { return c ? c->cert.min_eig : 0.0; }

gs_status gs_certificate_reason(const gs_certificate* c, char* buf, size_t cap, size_t* needed) {
  if (!c) return fail(GS_ERR_INVALID_ARG, "null certificate");
  return copy_out(c->cert.reason, buf, cap, needed);
}

gs_status gs_certificate_meta(const gs_certificate* c, const char* key, char* buf, size_t cap, size_t* needed) {
  if (!c || !key) return fail(GS_ERR_INVALID_ARG, "null argument");
  for (const auto& [k, v] : c->cert.metadata) {
    if (k == key) return copy_out(v, buf, cap, needed);
  }
  return fail(GS_ERR_INVALID_ARG, std::string("no metadata key '") + key + "'");
}

gs_status gs_certificate_eval(const gs_certificate* c, const double* theta, int len, double* out) {
  if (!c || !theta || !out || len < 0) return fail(GS_ERR_INVALID_ARG, "bad argument");
  try {
    *out = bounds::certificate_bound(c->cert, {theta, static_cast<size_t>(len)});
    return GS_OK;
  } catch (...) {
    return map_exception();
  }
}

gs_status gs_certify(const gs_certificate* c, const gs_system* s, uint64_t seed, int samples, gs_certify_report* out,
                     char* reason, size_t cap, size_t* needed) {
  if (!c || !s || !out || samples < 0) return fail(GS_ERR_INVALID_ARG, "bad argument");
  try {
    const auto r = report::certify(c->cert, s->sys, seed, samples);
    out->valid = r.valid;
    out->hash_matches = r.hash_matches;
    out->dominance_ok = r.dominance_ok;
    out->samples = r.samples;
    out->skipped = r.skipped;
    out->worst_margin = r.worst_margin;
    if (reason || needed) return copy_out(r.reason, reason, cap, needed);
    return GS_OK;
  } catch (...) {
    return map_exception();
  }
}

gs_status gs_sweep_write(const gs_system* s, const gs_certificate* c, const int* res, int nres, const char* path,
                         int* rows_written) {
  if (!s || !c || !path) return fail(GS_ERR_INVALID_ARG, "null argument");
  try {
    const auto kind = bounds::parse_kind(c->cert.meta("kind"));
    const bool full = c->cert.meta("channel") == "full";
    const auto grid = report::domain_grid(s->sys, resolution(s, res, nres));
    const auto rows = report::sweep(
        s->sys, [&](std::span<const double> th) { return bounds::certificate_bound(c->cert, th); }, kind, grid, full);
    if (rows_written) *rows_written = static_cast<int>(rows.size());
    return write_file(path, report::sweep_csv(s->sys, rows));
  } catch (...) {
    return map_exception();
  }
}

gs_status gs_levelset_write(const gs_system* s, const gs_certificate* c, const int* res, int nres, double level,
                            const char* path, int* polylines) {
  if (!s || !c || !path) return fail(GS_ERR_INVALID_ARG, "null argument");
  try {
    if (s->sys.ntheta != 2) return fail(GS_ERR_UNSUPPORTED, "level sets are supported for two parameters only");
    const auto lines = report::levelset(
        s->sys, [&](std::span<const double> th) { return bounds::certificate_bound(c->cert, th); },
        resolution(s, res, nres), level);
    if (polylines) *polylines = static_cast<int>(lines.size());
    return write_file(path, report::levelset_csv(lines));
  } catch (...) {
    return map_exception();
  }
}

gs_status gs_invariance_write(const gs_system* s, const int* res, int nres, double tol, const char* path,
                              int* rows_written) {
  if (!s || !path || tol <= 0) return fail(GS_ERR_INVALID_ARG, "bad argument");
  try {
    const auto grid = report::domain_grid(s->sys, resolution(s, res, nres));
    if (rows_written) *rows_written = static_cast<int>(grid.size()) * s->sys.m;
    return write_file(path, report::invariance_csv(s->sys, grid, tol));
  } catch (...) {
    return map_exception();
  }
}

gs_status gs_gnuplot_write(const char* csv_path, int levelset, int ntheta, const char* path) {
  if (!csv_path || !path) return fail(GS_ERR_INVALID_ARG, "null argument");
  return write_file(path, report::gnuplot_script(csv_path, levelset != 0, ntheta));
}

int gs_thread_count(void) { return report::thread_count(); }

}  // extern "C"
