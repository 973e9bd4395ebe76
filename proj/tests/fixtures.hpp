#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "sysmodel/system.hpp"

namespace fixtures {

// scalar plant with two affine parameters, nominal at the origin
inline const char* kNumerical = R"(
[dims]
n, m, p, ntheta = 1, 1, 1, 2
[A]
-3 + t1 + t2
[B]
-1 + t2
[C]
2 - t1
[D]
0
[nominal]
theta_star = 0, 0
[domain]
g1 = -(t1 + 1.5)*(t1 - 1.5)
g2 = -(t2 + 1)*(t2 - 1)
)";

inline const char* kMassSpring = R"(
[dims]
n, m, p, ntheta = 2, 1, 1, 2
[A]
0, 1
-t1, -t2
[B]
0
1
[C]
1, 0
[D]
0
[nominal]
theta_star = 2, 1
[domain]
g1 = -(t1 - 1)*(t1 - 3)
g2 = -(t2 - 0.5)*(t2 - 1.5)
)";

inline gainscope::sys::UncertainSystem numerical() { return gainscope::sys::load_system(kNumerical); }

// Closed-form squared state-to-output gain of dx = a x versus dx = b x from a
// common initial state: int (e^{at} - e^{bt})^2 dt.
inline double scalar_s2o(double a, double b) { return -(a - b) * (a - b) / (2.0 * a * b * (a + b)); }

// Closed-form s2o gain of the normalized analytic example, theta* = (1, 1).
inline double analytic_s2o(double t1, double t2) {
  const double a = -0.5;
  const double b = -(1.0 + t1) / (2.0 + t2);
  return scalar_s2o(a, b);
}

inline std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> r(n);
  for (int i = 0; i < n; ++i) r[i] = lo + (hi - lo) * i / (n - 1);
  return r;
}

}  // namespace fixtures
