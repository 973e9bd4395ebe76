// Acceptance run: one PASS/FAIL line per criterion.
//
//   gainscope_acceptance [--out DIR] [--expect-fail N[,M...]]
//
// Criteria listed in --expect-fail are still evaluated and printed; they only
// stop counting toward the exit status.
#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bounds/bounds.hpp"
#include "fixtures.hpp"
#include "invariance/invariance.hpp"
#include "oracle/oracle.hpp"
#include "report/report.hpp"
#include "sdpsolve/sdp.hpp"
#include "soscompile/certificate.hpp"

namespace fs = std::filesystem;
using namespace gainscope;
using report::fmt17;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool pass = false;
  std::string detail;
};

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream os(p, std::ios::binary);
  os << s;
}

void write_cert(const fs::path& p, const sos::BoundCertificate& c) {
  std::ofstream os(p, std::ios::binary);
  sos::write_certificate(os, c);
}

double eval_rf(const poly::RationalFunction& r, double t1, double t2) {
  return r.aligned({"t1", "t2"}).eval(std::vector<double>{t1, t2});
}

// Everything criteria 1-5 produce, plus the numbers the checks need.
struct Products {
  double c1_worst_eig = -1e300, c1_worst_m22 = 0, c1_time = 0;
  double c2_worst_rel = 0, c2_worst_dom = 1e300, c2_time = 0;
  bounds::GainBound c3;
  double c3_time = 0, c3_grid_max = 0;
  bounds::GainBound c4;
  double c4_worst = 1e300, c4_nominal = 0;
  bounds::GainBound c5_up, c5_lo;
  double c5_worst_up = 1e300, c5_worst_lo = 1e300;
};

const std::vector<double> kAnalyticAxis = fixtures::linspace(-0.9, 3.0, 50);

Products produce(const fs::path& dir) {
  fs::create_directories(dir);
  Products p;
  auto analytic = sys::load_system(bounds::analytic_system_text(1.0, 1.0, 0.1, 4.0));
  auto numerical = fixtures::numerical();

  {  // 1: closed-form certificate matrix on the grid
    auto t0 = Clock::now();
    auto f = bounds::analytic_fixture(1.0, 1.0);
    std::ostringstream csv;
    csv << "t1,t2,lambda_max,m22\n";
    for (double t1 : kAnalyticAxis) {
      for (double t2 : kAnalyticAxis) {
        Eigen::Matrix2d m;
        for (int i = 0; i < 2; ++i) {
          for (int j = 0; j < 2; ++j) m(i, j) = eval_rf(f.M(i, j), t1, t2);
        }
        const double lmax = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(m).eigenvalues().maxCoeff();
        p.c1_worst_eig = std::max(p.c1_worst_eig, lmax);
        p.c1_worst_m22 = std::max(p.c1_worst_m22, std::fabs(m(1, 1) + 1.0));
        csv << fmt17(t1) << ',' << fmt17(t2) << ',' << fmt17(lmax) << ',' << fmt17(m(1, 1)) << '\n';
      }
    }
    p.c1_time = seconds_since(t0);
    write_text(dir / "c1_analytic_certificate.csv", csv.str());
  }

  {  // 2: oracle against the closed-form gain and the closed-form bound
    auto t0 = Clock::now();
    auto f = bounds::analytic_fixture(1.0, 1.0);
    std::ostringstream csv;
    csv << "t1,t2,oracle,p1n,p1\n";
    for (double t1 : kAnalyticAxis) {
      for (double t2 : kAnalyticAxis) {
        const double o = oracle::state_to_output_gain_exact(analytic, std::vector<double>{t1, t2});
        const double pn = eval_rf(f.p1n, t1, t2), p1 = eval_rf(f.p1, t1, t2);
        const double rel = std::fabs(o - pn) / std::max(std::fabs(pn), 1e-300);
        if (std::fabs(o - pn) > 1e-15) p.c2_worst_rel = std::max(p.c2_worst_rel, rel);
        p.c2_worst_dom = std::min(p.c2_worst_dom, p1 - pn);
        csv << fmt17(t1) << ',' << fmt17(t2) << ',' << fmt17(o) << ',' << fmt17(pn) << ',' << fmt17(p1) << '\n';
      }
    }
    p.c2_time = seconds_since(t0);
    write_text(dir / "c2_oracle_closed_form.csv", csv.str());
  }

  {  // 3: guaranteed cost
    auto t0 = Clock::now();
    bounds::BoundOptions opt;
    opt.deg.v = 3;
    opt.deg.m = 2;
    p.c3 = bounds::l2_gain_bound(numerical, opt);
    p.c3_time = seconds_since(t0);
    write_cert(dir / "c3_guaranteed_cost.cert", p.c3.certificate);
    for (double t1 : fixtures::linspace(-1.5, 1.5, 31)) {
      for (double t2 : fixtures::linspace(-1.0, 1.0, 21)) {
        p.c3_grid_max = std::max(p.c3_grid_max, oracle::l2_induced_gain_exact(numerical, std::vector<double>{t1, t2}));
      }
    }
  }

  {  // 4: parameter-dependent gain
    bounds::BoundOptions opt;
    opt.deg.v = 3;
    opt.deg.m = 2;
    opt.deg.gn = 2;
    opt.deg.gd = 1;
    p.c4 = bounds::l2_gain_bound(numerical, opt);
    write_cert(dir / "c4_parameter_dependent.cert", p.c4.certificate);
    auto box = *sys::domain_box(numerical);
    auto grid = sys::box_grid(box, {20, 20});
    const auto& gb = p.c4;
    auto rows = report::sweep(numerical, [&](std::span<const double> t) { return gb.eval(t); }, bounds::BoundKind::l2,
                              grid);
    for (const auto& r : rows) {
      if (r.status != "ok") {
        p.c4_worst = -1e300;
        continue;
      }
      p.c4_worst = std::min(p.c4_worst, r.margin + 1e-6 * (1 + r.oracle));
    }
    p.c4_nominal = gb.eval(numerical.theta_star);
    write_text(dir / "c4_sweep.csv", report::sweep_csv(numerical, rows));
  }

  {  // 5: sandwich on the analytic grid
    bounds::BoundOptions up;
    up.deg = {4, 4, 4, 4, 0, 0};
    p.c5_up = bounds::state_to_output_upper(analytic, up);
    p.c5_lo = bounds::state_to_output_lower(analytic, {});
    write_cert(dir / "c5_upper.cert", p.c5_up.certificate);
    write_cert(dir / "c5_lower.cert", p.c5_lo.certificate);
    std::ostringstream csv;
    csv << "t1,t2,lower,oracle,upper\n";
    for (double t1 : kAnalyticAxis) {
      for (double t2 : kAnalyticAxis) {
        std::vector<double> th{t1, t2};
        const double o = oracle::state_to_output_gain_exact(analytic, th);
        const double lo = p.c5_lo.eval(th), hi = p.c5_up.eval(th);
        p.c5_worst_up = std::min(p.c5_worst_up, hi - o + 1e-6);
        p.c5_worst_lo = std::min(p.c5_worst_lo, o - lo + 1e-6);
        csv << fmt17(t1) << ',' << fmt17(t2) << ',' << fmt17(lo) << ',' << fmt17(o) << ',' << fmt17(hi) << '\n';
      }
    }
    write_text(dir / "c5_sandwich.csv", csv.str());
  }
  return p;
}

std::string status_text(const bounds::GainBound& b) {
  return std::string(b.valid() ? "VALID" : "INVALID") + "/" + sdp::to_string(b.status);
}

Verdict criterion1(const Products& p) {
  Verdict v;
  v.pass = p.c1_worst_eig <= 1e-10 && p.c1_worst_m22 <= 1e-12 && p.c1_time < 1.0;
  v.detail = "max lambda_max(M) = " + fmt17(p.c1_worst_eig) + ", max |M22 + 1| = " + fmt17(p.c1_worst_m22) +
             ", " + fmt17(p.c1_time) + " s";
  return v;
}

Verdict criterion2(const Products& p) {
  Verdict v;
  v.pass = p.c2_worst_rel <= 1e-8 && p.c2_worst_dom >= -1e-10 && p.c2_time < 2.0;
  v.detail = "max relative error = " + fmt17(p.c2_worst_rel) + ", min (p1 - p1n) = " + fmt17(p.c2_worst_dom) + ", " +
             fmt17(p.c2_time) + " s";
  return v;
}

Verdict criterion3(const Products& p) {
  Verdict v;
  const double g = p.c3.eval(std::vector<double>{0.0, 0.0});
  v.pass = p.c3.valid() && g >= 4.6 * 0.95 && g <= 4.6 * 1.05 && p.c3_time < 60.0;
  v.detail = status_text(p.c3) + ", squared gain = " + fmt17(g) + ", target [4.37, 4.83], " + fmt17(p.c3_time) + " s";
  return v;
}

Verdict criterion4(const Products& p) {
  Verdict v;
  const double g00 = p.c3.eval(std::vector<double>{0.0, 0.0});
  v.pass = p.c4.valid() && p.c4_worst >= 0.0 && p.c4_nominal <= g00 + 1e-6;
  v.detail = status_text(p.c4) + ", min margin over 20x20 = " + fmt17(p.c4_worst) + ", gamma(theta*) = " +
             fmt17(p.c4_nominal) + " vs degree-(0,0) " + fmt17(g00);
  return v;
}

Verdict criterion5(const Products& p) {
  Verdict v;
  v.pass = p.c5_up.valid() && p.c5_lo.valid() && p.c5_worst_up >= 0.0 && p.c5_worst_lo >= 0.0;
  v.detail = "upper " + status_text(p.c5_up) + ", lower " + status_text(p.c5_lo) +
             ", min (upper - oracle + 1e-6) = " + fmt17(p.c5_worst_up) + ", min (oracle - lower + 1e-6) = " +
             fmt17(p.c5_worst_lo);
  return v;
}

Verdict criterion6() {
  Verdict v;
  auto analytic = sys::load_system(bounds::analytic_system_text(1.0, 1.0, 0.1, 4.0));
  double worst_line = 0;
  // zero set of the closed-form gain: t2 = 2 t1, clipped to the box
  for (double t1 : fixtures::linspace(-0.45, 1.5, 100)) {
    worst_line = std::max(worst_line, oracle::state_to_output_gain_exact(analytic, std::vector<double>{t1, 2 * t1}));
  }
  auto numerical = fixtures::numerical();
  auto grid = sys::box_grid(*sys::domain_box(numerical), {31, 21});
  grid.push_back({1.0, -1.0});
  int flagged = 0;
  double worst_flagged = 0;
  for (const auto& th : grid) {
    if (!inv::output_invariant_all(numerical, th)) continue;
    ++flagged;
    worst_flagged = std::max(worst_flagged, oracle::l2_induced_gain_exact(numerical, th));
  }
  v.pass = worst_line <= 1e-10 && flagged >= 2 && worst_flagged <= 1e-10;
  v.detail = "max s2o gain on 100 line points = " + fmt17(worst_line) + ", " + std::to_string(flagged) +
             " fully invariant grid points with max induced gain " + fmt17(worst_flagged);
  return v;
}

Verdict criterion7(const Products& p) {
  Verdict v;
  std::vector<std::string> bad;

  Eigen::MatrixXd a(1, 1), q(1, 1);
  a << -0.75;
  q << 1.0;
  const double lyap = std::fabs(oracle::lyapunov_solve(a, q).P(0, 0) - 1.0 / 1.5);
  if (lyap > 1e-12) bad.push_back("lyapunov");

  Eigen::MatrixXd b(1, 1), c(1, 1), d(1, 1);
  a << -1;
  b << 1;
  c << 1;
  d << 0;
  const double hinf = std::fabs(oracle::hinf_norm_bisection(a, b, c, d).norm - 1.0);
  if (hinf > 1e-8) bad.push_back("hinf");

  sdp::SdpProblem sp;
  sp.block_dims = {2, 1};
  sp.rows.push_back({{{0, 0, 0, 1.0}, {0, 1, 1, 1.0}, {1, 0, 0, 1.0}}, {}, 2.0});
  sp.rows.push_back({{{1, 0, 0, 1.0}}, {}, 0.5});
  sp.c_entries = {{0, 0, 0, 2.0}, {0, 0, 1, 1.0}, {0, 1, 1, 2.0}, {1, 0, 0, 0.5}};
  auto sol = sdp::solve(sp);
  const double sdp_err = std::fabs(sol.primal_obj - 1.75);
  if (sol.status != sdp::SdpStatus::optimal || sdp_err > 1e-6) bad.push_back("two-block sdp");

  int revalidated = 0, tampers = 0, tamper_caught = 0;
  for (const auto* gb : {&p.c3, &p.c4, &p.c5_up, &p.c5_lo}) {
    if (!gb->valid()) continue;
    std::ostringstream os;
    sos::write_certificate(os, gb->certificate);
    std::istringstream is(os.str());
    auto back = sos::read_certificate(is);
    sos::validate(back);
    if (back.valid) {
      ++revalidated;
    } else {
      bad.push_back("revalidation of " + gb->certificate.meta("kind"));
    }
    // every Gram block, diagonal and first off-diagonal entry
    for (std::size_t ci = 0; ci < back.constraints.size(); ++ci) {
      std::vector<sos::GramRecord*> grams{&back.constraints[ci].gram};
      for (auto& m : back.constraints[ci].multipliers) grams.push_back(&m);
      for (std::size_t gi = 0; gi < grams.size(); ++gi) {
        const auto& Q = grams[gi]->Q;
        if (Q.size() == 0) continue;
        std::vector<std::pair<int, int>> spots{{0, 0}};
        if (Q.rows() > 1) spots.emplace_back(0, 1);
        for (auto [i, j] : spots) {
          auto t = back;
          std::vector<sos::GramRecord*> tg{&t.constraints[ci].gram};
          for (auto& m : t.constraints[ci].multipliers) tg.push_back(&m);
          tg[gi]->Q(i, j) += 1e-3;
          if (i != j) tg[gi]->Q(j, i) += 1e-3;
          sos::validate(t);
          ++tampers;
          if (!t.valid) ++tamper_caught;
        }
      }
    }
  }
  if (revalidated == 0) bad.push_back("no valid certificates to revalidate");
  if (tamper_caught != tampers || tampers == 0) bad.push_back("tamper");

  v.pass = bad.empty();
  v.detail = "lyapunov err " + fmt17(lyap) + ", hinf err " + fmt17(hinf) + ", sdp err " + fmt17(sdp_err) + ", " +
             std::to_string(revalidated) + " certificates revalidated, " + std::to_string(tamper_caught) + "/" +
             std::to_string(tampers) + " tampers caught";
  for (const auto& s : bad) v.detail += "; failed: " + s;
  return v;
}

Verdict criterion8(const fs::path& a, const fs::path& b) {
  Verdict v;
  int files = 0;
  std::vector<std::string> diff;
  for (const auto& e : fs::directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    ++files;
    auto read = [](const fs::path& p) {
      std::ifstream is(p, std::ios::binary);
      return std::string((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    };
    const fs::path other = b / e.path().filename();
    if (!fs::exists(other) || read(e.path()) != read(other)) diff.push_back(e.path().filename().string());
  }
  v.pass = files >= 8 && diff.empty();
  v.detail = std::to_string(files) + " files compared";
  for (const auto& d : diff) v.detail += "; differs: " + d;
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::string out = (fs::temp_directory_path() / "gainscope_acceptance").string();
  std::vector<int> expect_fail;
  app.add_option("--out", out, "directory for the generated files");
  app.add_option("--expect-fail", expect_fail, "criteria whose failure does not affect the exit status")
      ->delimiter(',');
  CLI11_PARSE(app, argc, argv);
  const std::set<int> tolerated(expect_fail.begin(), expect_fail.end());

  const fs::path run1 = fs::path(out) / "run1", run2 = fs::path(out) / "run2";
  fs::remove_all(run1);
  fs::remove_all(run2);
  const Products p = produce(run1);
  produce(run2);

  std::vector<Verdict> verdicts{criterion1(p), criterion2(p), criterion3(p), criterion4(p),
                                criterion5(p), criterion6(),  criterion7(p), criterion8(run1, run2)};
  int failures = 0;
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    const bool excused = !verdicts[i].pass && tolerated.contains(id);
    std::printf("criterion %d: %s  %s%s\n", id, verdicts[i].pass ? "PASS" : "FAIL", verdicts[i].detail.c_str(),
                excused ? "  [expected failure]" : "");
    if (!verdicts[i].pass && !excused) ++failures;
  }
  const double g = p.c3.eval(std::vector<double>{0.0, 0.0});
  std::printf("info: guaranteed cost = %s (root %s); max oracle on a 31x21 grid = %s\n", fmt17(g).c_str(),
              fmt17(std::sqrt(std::max(g, 0.0))).c_str(), fmt17(p.c3_grid_max).c_str());
  std::printf("info: files in %s\n", run1.string().c_str());
  return failures == 0 ? 0 : 1;
}
