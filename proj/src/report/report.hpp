#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "bounds/bounds.hpp"
#include "soscompile/certificate.hpp"
#include "sysmodel/system.hpp"

namespace gainscope::report {

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Worker count: hardware concurrency capped by GAINSCOPE_THREADS (if set).
int thread_count();

// Runs f(i) for i in [0, n) on up to `threads` workers. Results must be
// written by index; the call returns once every index has run.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& f);

// Tensor grid over the domain box, shrunk by `shrink` of each width.
std::vector<std::vector<double>> domain_grid(const sys::UncertainSystem& sys, const std::vector<int>& resolution,
                                             double shrink = 0.01);

using BoundFn = std::function<double(std::span<const double>)>;

struct SweepRow {
  std::vector<double> theta;
  double bound = 0.0;
  double oracle = 0.0;
  double margin = 0.0;  // bound - oracle for upper bounds, oracle - bound for lower bounds
  std::string status;   // "ok", or why the point was skipped
};

std::vector<SweepRow> sweep(const sys::UncertainSystem& sys, const BoundFn& bound, bounds::BoundKind kind,
                            const std::vector<std::vector<double>>& grid, bool full_output = false, int threads = 0);

// Columns t1..tk, bound, oracle, margin, status; 17 significant digits.
std::string sweep_csv(const sys::UncertainSystem& sys, const std::vector<SweepRow>& rows);

struct Polyline {
  std::vector<std::array<double, 2>> points;
  bool closed = false;
};

// Contours of f = level on a rectilinear grid; values[i * ys.size() + j] = f(xs[i], ys[j]).
// Cells are classified with f <= level as inside.
std::vector<Polyline> marching_squares(const std::vector<double>& xs, const std::vector<double>& ys,
                                       const std::vector<double>& values, double level);

std::vector<Polyline> levelset(const sys::UncertainSystem& sys, const BoundFn& bound, const std::vector<int>& resolution,
                               double level, int threads = 0);

// Columns polyline, closed, vertex, t1, t2.
std::string levelset_csv(const std::vector<Polyline>& lines);

// gnuplot script plotting a sweep or level-set CSV (data only, no rendering here).
std::string gnuplot_script(const std::string& csv_path, bool levelset, int ntheta);

// One row per (grid point, input channel).
std::string invariance_csv(const sys::UncertainSystem& sys, const std::vector<std::vector<double>>& grid,
                           double tol = 1e-9, int threads = 0);

struct CertifyReport {
  bool valid = false;          // PSD and coefficient checks
  bool hash_matches = true;
  bool dominance_ok = true;
  int samples = 0;
  int skipped = 0;             // singular or non-Hurwitz sample points
  double worst_margin = 0.0;   // smallest margin over the samples
  std::vector<double> worst_theta;
  std::string reason;          // first failure, empty when everything passed

  bool ok() const { return valid && hash_matches && dominance_ok; }
};

// Standalone revalidation of a certificate against a system: Gram PSD and
// coefficient residuals, system hash, and dominance over the oracle at
// `samples` seeded uniform draws in the domain box.
CertifyReport certify(sos::BoundCertificate cert, const sys::UncertainSystem& sys, std::uint64_t seed = 1,
                      int samples = 25, const sos::ValidationTolerances& tol = {}, double margin_tol = 1e-6);

std::string fmt17(double v);

}  // namespace gainscope::report
