#pragma once

#include <optional>
#include <stdexcept>
#include <span>
#include <string>
#include <vector>

#include "polycore/rational.hpp"
#include "sdpsolve/sdp.hpp"
#include "soscompile/certificate.hpp"
#include "soscompile/program.hpp"
#include "sysmodel/system.hpp"

namespace gainscope::bounds {

// Precondition failures (feedthrough on the H2 path, non-Hurwitz samples).
class BoundsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class BoundKind { s2o_upper, s2o_lower, l2, h2 };
const char* to_string(BoundKind k);
BoundKind parse_kind(const std::string& s);
bool is_upper(BoundKind k);

// Degrees in the parameters. v: storage function (or P for h2); m: Putinar
// multipliers; p1/p2: state-to-output bound terms (p1 doubles as q1 for h2);
// gn/gd: numerator and denominator of the induced-gain bound.
struct Degrees {
  int v = 2;
  int m = 2;
  int p1 = 2;
  int p2 = 2;
  int gn = 0;
  int gd = 0;
};

struct BoundOptions {
  Degrees deg;
  bool pin_nominal = true;   // pins only decisions of degree >= 1
  bool full_output = false;  // h2: use the whole output rows instead of the mismatch rows
  double trace_weight = 1e-6;
  sdp::SolverSettings solver;
  sos::ValidationTolerances tol;
  sos::CompileOptions compile;
  std::string sdpa_export;  // write the compiled problem here when non-empty
};

struct GainBound {
  BoundKind kind = BoundKind::s2o_upper;
  poly::Polynomial numerator;
  poly::Polynomial denominator = poly::Polynomial::constant(1.0);
  sos::BoundCertificate certificate;
  sdp::SdpStatus status = sdp::SdpStatus::numerical_limit;
  std::string solver_message;
  int iterations = 0;
  double objective = 0.0;
  Degrees degrees;
  std::size_t sdp_rows = 0;
  std::vector<int> sdp_blocks;

  bool valid() const { return certificate.valid; }
  double eval(std::span<const double> theta) const;
};

GainBound state_to_output_upper(const sys::UncertainSystem& sys, const BoundOptions& opt = {});
GainBound state_to_output_lower(const sys::UncertainSystem& sys, const BoundOptions& opt = {});
GainBound l2_gain_bound(const sys::UncertainSystem& sys, const BoundOptions& opt = {});
GainBound h2_bound(const sys::UncertainSystem& sys, const BoundOptions& opt = {});
GainBound synthesize(BoundKind kind, const sys::UncertainSystem& sys, const BoundOptions& opt = {});

// The bound function stored in a certificate ("bound.num" / "bound.den").
double certificate_bound(const sos::BoundCertificate& cert, std::span<const double> theta);

// Oracle value matching a bound kind (squared quantities).
double oracle_value(BoundKind kind, const sys::UncertainSystem& sys, std::span<const double> theta,
                    bool full_output = false);

// Closed forms of the scalar analytic example in normalised coordinates.
struct AnalyticFixture {
  double theta1_star = 1.0, theta2_star = 1.0;
  poly::RationalFunction a_star;  // A(t*) (constant)
  poly::RationalFunction a;       // A(t) in normalised coordinates
  poly::RationalFunction p1, p2, p1n;
  poly::ParamMatrix M;  // 2x2, He([[p1 A*, p2 A* r], [0, -p2 t1*(1+t1)/den + 1/2]])
};
AnalyticFixture analytic_fixture(double theta1_star, double theta2_star);

// System text of the analytic example (normalised, box domain in original
// coordinates [lo, hi]^2).
std::string analytic_system_text(double theta1_star, double theta2_star, double lo, double hi);

}  // namespace gainscope::bounds
