#pragma once
// Independent reference computations used only by the tests.

#include <cmath>
#include <functional>

namespace oracle {

/// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

/// Richardson-style extrapolation of a sequence assumed to converge like c/M:
/// returns 2 S(2M) - S(M).
inline double richardson_1(double s_m, double s_2m) { return 2.0 * s_2m - s_m; }

}  // namespace oracle
