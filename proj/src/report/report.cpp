#include "report/report.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "invariance/invariance.hpp"
#include "oracle/oracle.hpp"

namespace gainscope::report {

std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int thread_count() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("GAINSCOPE_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) n = std::min<long>(n, cap);
  }
  return n;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& f) {
  if (threads <= 0) threads = thread_count();
  threads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads), std::max<std::size_t>(n, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::mutex err_mu;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard lock(err_mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

std::vector<std::vector<double>> domain_grid(const sys::UncertainSystem& sys, const std::vector<int>& resolution,
                                             double shrink) {
  auto box = sys::domain_box(sys);
  if (!box) throw ReportError("grid evaluation needs a box domain (one interval constraint per parameter)");
  return sys::box_grid(*box, resolution, shrink);
}

namespace {

std::string classify(const std::exception& e) {
  const std::string w = e.what();
  if (w.find("singular") != std::string::npos) return "singular";
  if (dynamic_cast<const oracle::OracleError*>(&e)) return "unstable";
  return "error";
}

std::string header_theta(const sys::UncertainSystem& sys) {
  std::string h;
  for (const auto& n : sys.theta_names) h += n + ",";
  return h;
}

}  // namespace

std::vector<SweepRow> sweep(const sys::UncertainSystem& sys, const BoundFn& bound, bounds::BoundKind kind,
                            const std::vector<std::vector<double>>& grid, bool full_output, int threads) {
  std::vector<SweepRow> rows(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    SweepRow& r = rows[i];
    r.theta = grid[i];
    r.status = "ok";
    try {
      r.bound = bound(r.theta);
      r.oracle = bounds::oracle_value(kind, sys, r.theta, full_output);
      r.margin = bounds::is_upper(kind) ? r.bound - r.oracle : r.oracle - r.bound;
    } catch (const std::exception& e) {
      r.status = classify(e);
      r.bound = r.oracle = r.margin = std::nan("");
    }
  });
  return rows;
}

std::string sweep_csv(const sys::UncertainSystem& sys, const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << header_theta(sys) << "bound,oracle,margin,status\n";
  for (const auto& r : rows) {
    for (double t : r.theta) os << fmt17(t) << ",";
    os << fmt17(r.bound) << "," << fmt17(r.oracle) << "," << fmt17(r.margin) << "," << r.status << "\n";
  }
  return os.str();
}

std::vector<Polyline> marching_squares(const std::vector<double>& xs, const std::vector<double>& ys,
                                       const std::vector<double>& values, double level) {
  const std::size_t nx = xs.size(), ny = ys.size();
  if (nx < 2 || ny < 2 || values.size() != nx * ny) throw ReportError("marching squares needs a grid of at least 2x2");
  auto val = [&](std::size_t i, std::size_t j) { return values[i * ny + j]; };
  auto inside = [&](std::size_t i, std::size_t j) { return val(i, j) <= level; };

  // Edge ids: horizontal (i,j)-(i+1,j) -> 2*(i*ny+j); vertical (i,j)-(i,j+1) -> 2*(i*ny+j)+1.
  std::map<std::size_t, std::array<double, 2>> point;
  auto crossing = [&](std::size_t id) {
    if (auto it = point.find(id); it != point.end()) return;
    const std::size_t base = id / 2, i = base / ny, j = base % ny;
    const bool horiz = id % 2 == 0;
    const std::size_t i2 = horiz ? i + 1 : i, j2 = horiz ? j : j + 1;
    const double a = val(i, j), b = val(i2, j2);
    double t = 0.5;
    if (std::isfinite(a) && std::isfinite(b) && a != b) t = std::clamp((level - a) / (b - a), 0.0, 1.0);
    point[id] = {xs[i] + t * (xs[i2] - xs[i]), ys[j] + t * (ys[j2] - ys[j])};
  };

  std::vector<std::array<std::size_t, 2>> segs;
  for (std::size_t i = 0; i + 1 < nx; ++i) {
    for (std::size_t j = 0; j + 1 < ny; ++j) {
      const bool c0 = inside(i, j), c1 = inside(i + 1, j), c2 = inside(i + 1, j + 1), c3 = inside(i, j + 1);
      const std::size_t e0 = 2 * (i * ny + j), e1 = 2 * ((i + 1) * ny + j) + 1, e2 = 2 * (i * ny + j + 1),
                        e3 = 2 * (i * ny + j) + 1;
      std::vector<std::size_t> cut;
      if (c0 != c1) cut.push_back(e0);
      if (c1 != c2) cut.push_back(e1);
      if (c3 != c2) cut.push_back(e2);
      if (c0 != c3) cut.push_back(e3);
      for (auto e : cut) crossing(e);
      if (cut.size() == 2) {
        segs.push_back({cut[0], cut[1]});
      } else if (cut.size() == 4) {
        const double centre = 0.25 * (val(i, j) + val(i + 1, j) + val(i + 1, j + 1) + val(i, j + 1));
        const bool cin = centre <= level;
        if (c0 == cin) {  // the centre joins c0 and c2: isolate c1 and c3
          segs.push_back({e0, e1});
          segs.push_back({e2, e3});
        } else {
          segs.push_back({e3, e0});
          segs.push_back({e1, e2});
        }
      }
    }
  }

  std::map<std::size_t, std::vector<std::size_t>> at;
  for (std::size_t s = 0; s < segs.size(); ++s) {
    at[segs[s][0]].push_back(s);
    at[segs[s][1]].push_back(s);
  }
  std::vector<bool> used(segs.size(), false);
  std::vector<Polyline> out;
  auto trace = [&](std::size_t s, std::size_t start) {
    Polyline pl;
    std::size_t cur = start;
    pl.points.push_back(point[cur]);
    while (true) {
      used[s] = true;
      const std::size_t nxt = segs[s][0] == cur ? segs[s][1] : segs[s][0];
      pl.points.push_back(point[nxt]);
      cur = nxt;
      std::size_t cand = segs.size();
      for (auto t : at[cur]) {
        if (!used[t]) {
          cand = t;
          break;
        }
      }
      if (cand == segs.size()) break;
      s = cand;
    }
    pl.closed = pl.points.size() > 2 && cur == start;
    if (pl.closed) pl.points.pop_back();
    out.push_back(std::move(pl));
  };
  // open lines start at boundary crossings
  for (std::size_t s = 0; s < segs.size(); ++s) {
    if (used[s]) continue;
    for (auto e : segs[s]) {
      if (at[e].size() == 1) {
        trace(s, e);
        break;
      }
    }
  }
  for (std::size_t s = 0; s < segs.size(); ++s) {
    if (!used[s]) trace(s, segs[s][0]);
  }
  return out;
}

std::vector<Polyline> levelset(const sys::UncertainSystem& sys, const BoundFn& bound, const std::vector<int>& resolution,
                               double level, int threads) {
  if (sys.ntheta != 2) throw ReportError("level sets are supported for two parameters only");
  if (resolution.size() != 2) throw ReportError("level sets need a two-axis grid");
  const auto grid = domain_grid(sys, resolution, 0.0);
  std::vector<double> values(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    try {
      values[i] = bound(grid[i]);
    } catch (const std::exception&) {
      values[i] = std::nan("");
    }
  });
  std::vector<double> xs(resolution[0]), ys(resolution[1]);
  for (int i = 0; i < resolution[0]; ++i) xs[i] = grid[static_cast<std::size_t>(i) * resolution[1]][0];
  for (int j = 0; j < resolution[1]; ++j) ys[j] = grid[j][1];
  return marching_squares(xs, ys, values, level);
}

std::string levelset_csv(const std::vector<Polyline>& lines) {
  std::ostringstream os;
  os << "polyline,closed,vertex,t1,t2\n";
  for (std::size_t k = 0; k < lines.size(); ++k) {
    for (std::size_t v = 0; v < lines[k].points.size(); ++v) {
      os << k << "," << (lines[k].closed ? 1 : 0) << "," << v << "," << fmt17(lines[k].points[v][0]) << ","
         << fmt17(lines[k].points[v][1]) << "\n";
    }
  }
  return os.str();
}

std::string gnuplot_script(const std::string& csv_path, bool is_levelset, int ntheta) {
  std::ostringstream os;
  os << "set datafile separator ','\nset key autotitle columnhead\n";
  if (is_levelset) {
    os << "plot '" << csv_path << "' using 4:5 with lines title 'level set'\n";
  } else if (ntheta == 2) {
    os << "set dgrid3d\nsplot '" << csv_path << "' using 1:2:3 with lines title 'bound', '' using 1:2:4 with points "
       << "title 'oracle'\n";
  } else {
    os << "plot '" << csv_path << "' using 1:" << ntheta + 1 << " with lines title 'bound', '' using 1:" << ntheta + 2
       << " with points title 'oracle'\n";
  }
  return os.str();
}

std::string invariance_csv(const sys::UncertainSystem& sys, const std::vector<std::vector<double>>& grid, double tol,
                           int threads) {
  const std::size_t m = static_cast<std::size_t>(std::max(sys.m, 0));
  std::vector<std::string> lines(grid.size() * m);
  parallel_for(grid.size() * m, threads, [&](std::size_t k) {
    const auto& th = grid[k / m];
    const int input = static_cast<int>(k % m);
    std::ostringstream os;
    for (double t : th) os << fmt17(t) << ",";
    os << input + 1 << ",";
    try {
      const auto r = inv::invariance_report(sys, th, input, tol);
      os << fmt17(r.ss_mismatch) << "," << fmt17(r.numerator_norm) << "," << (r.is_ss_invariant ? 1 : 0) << ","
         << (r.is_fully_invariant ? 1 : 0) << "," << (r.variant_disagrees ? 1 : 0) << ",ok";
    } catch (const std::exception& e) {
      os << "nan,nan,0,0,0," << classify(e);
    }
    lines[k] = os.str();
  });
  std::ostringstream out;
  out << header_theta(sys) << "input,ss_mismatch,numerator_norm,ss_invariant,fully_invariant,variant_disagrees,status\n";
  for (const auto& l : lines) out << l << "\n";
  return out.str();
}

CertifyReport certify(sos::BoundCertificate cert, const sys::UncertainSystem& sys, std::uint64_t seed, int samples,
                      const sos::ValidationTolerances& tol, double margin_tol) {
  CertifyReport rep;
  sos::validate(cert, tol);
  rep.valid = cert.valid;
  if (!rep.valid) rep.reason = "certificate invalid: " + cert.reason;

  char hex[20];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(sys.hash));
  if (cert.meta("system_hash") != hex) {
    rep.hash_matches = false;
    if (rep.reason.empty()) rep.reason = "system hash mismatch";
    return rep;
  }
  if (!cert.decision("bound.num")) {
    rep.dominance_ok = false;
    if (rep.reason.empty()) rep.reason = "certificate carries no bound function";
    return rep;
  }

  const auto kind = bounds::parse_kind(cert.meta("kind"));
  const bool full = cert.meta("channel") == "full";
  std::vector<sys::Interval> box;
  if (auto b = sys::domain_box(sys)) {
    box = *b;
  } else {
    for (double t : sys.theta_star) box.push_back({t - 1.0, t + 1.0});
  }
  std::mt19937_64 rng(seed);
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    std::vector<double> th(box.size());
    for (std::size_t i = 0; i < box.size(); ++i) {
      th[i] = std::uniform_real_distribution<double>(box[i].lo, box[i].hi)(rng);
    }
    double b = 0.0, o = 0.0;
    try {
      b = bounds::certificate_bound(cert, th);
      o = bounds::oracle_value(kind, sys, th, full);
    } catch (const std::exception&) {
      ++rep.skipped;
      continue;
    }
    ++rep.samples;
    const double margin = bounds::is_upper(kind) ? b - o : o - b;
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.worst_theta = th;
    }
    if (margin < -margin_tol * (1.0 + std::fabs(o)) && rep.dominance_ok) {
      rep.dominance_ok = false;
      if (rep.reason.empty()) {
        std::string at;
        for (std::size_t i = 0; i < th.size(); ++i) at += (i ? "," : "") + fmt17(th[i]);
        rep.reason = "dominance violated at theta = (" + at + ")";
      }
    }
  }
  if (rep.samples == 0) rep.worst_margin = 0.0;
  return rep;
}

}  // namespace gainscope::report
