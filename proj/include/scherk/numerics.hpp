#pragma once
// Shared numerical kernels: adaptive Gauss-Kronrod quadrature, integrals with
// algebraic endpoint singularities, principal-value lattice sums and contour
// integration along polylines.

#include <algorithm>
#include <array>
#include <climits>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <queue>
#include <type_traits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "scherk/error.hpp"

namespace scherk {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

/// Truncation order of a symmetric lattice window k in {-M,...,M}, or the
/// M -> infinity limit evaluated in closed form.
struct Truncation {
  int order = 0;
  bool infinite = true;

  static constexpr Truncation limit() { return {0, true}; }
  static constexpr Truncation finite(int m) { return {m, false}; }

  constexpr Truncation doubled() const { return infinite ? *this : finite(2 * order); }
  std::string str() const { return infinite ? std::string("inf") : std::to_string(order); }
  friend constexpr bool operator==(const Truncation&, const Truncation&) = default;
};

struct QuadratureOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-15;
  int max_intervals = 4000;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
inline constexpr bool is_eigen_v = std::is_base_of_v<Eigen::MatrixBase<T>, T>;

template <class T>
T zero() {
  if constexpr (is_eigen_v<T>) {
    return T::Zero();
  } else {
    return T{};
  }
}

template <class T>
double magnitude(const T& v) {
  if constexpr (is_eigen_v<T>) {
    return v.norm();
  } else {
    return std::abs(v);
  }
}

template <class T>
bool all_finite(const T& v) {
  if constexpr (is_eigen_v<T>) {
    return v.allFinite();
  } else if constexpr (std::is_same_v<T, Complex>) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  } else {
    return std::isfinite(v);
  }
}

template <class T>
struct Panel {
  double a, b;
  T value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class T, class F>
Panel<T> kronrod_panel(const F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  T fc = f(center);
  T kronrod = fc * kKronrodWeights[7];
  T gauss = fc * kGaussWeights[3];
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kKronrodNodes[i];
    T sum = f(center - dx) + f(center + dx);
    kronrod += sum * kKronrodWeights[i];
    if (i % 2 == 1) gauss += sum * kGaussWeights[i / 2];
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, magnitude(kronrod - gauss)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) quadrature of f over [a, b].
/// T is double, Complex or a fixed-size Eigen vector. Throws NO_CONVERGENCE when the panel budget is
/// exhausted and SINGULAR_ON_PATH when f returns a non-finite value.
template <class T, class F>
T integrate(const F& f, double a, double b, const QuadratureOptions& opts = {}) {
  if (a == b) return detail::zero<T>();
  auto guarded = [&](double x) -> T {
    T v = f(x);
    if (!detail::all_finite(v)) {
      throw Error(ErrorCode::SingularOnPath, "integrand not finite at parameter " + std::to_string(x));
    }
    return v;
  };
  std::priority_queue<detail::Panel<T>> panels;
  auto first = detail::kronrod_panel<T>(guarded, a, b);
  T total = first.value;
  double total_error = first.error;
  panels.push(first);
  int count = 1;
  while (total_error > std::max(opts.abs_tol, opts.rel_tol * detail::magnitude(total))) {
    if (count >= opts.max_intervals) {
      throw Error(ErrorCode::NoConvergence,
                  "adaptive quadrature exceeded " + std::to_string(opts.max_intervals) + " panels");
    }
    auto worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      throw Error(ErrorCode::NoConvergence, "quadrature panel collapsed below machine resolution");
    }
    auto left = detail::kronrod_panel<T>(guarded, worst.a, mid);
    auto right = detail::kronrod_panel<T>(guarded, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    ++count;
  }
  // Re-sum to shed accumulated cancellation in the running total.
  T resummed = detail::zero<T>();
  while (!panels.empty()) {
    resummed += panels.top().value;
    panels.pop();
  }
  return resummed;
}

// ---------------------------------------------------------------------------
// Edge integrals with algebraic endpoint factors.

/// A point on an edge: parameter t in [0,1], its complement 1-t (carried
/// separately so distances to the far endpoint keep full relative precision)
/// and the complex position.
struct EdgePoint {
  double t;
  double tc;
  Complex z;
};

struct EdgeIntegrandSpec {
  std::pair<double, double> endpoint_exponents{0.0, 0.0};
  std::function<Complex(const EdgePoint&)> smooth_factor;
};

namespace detail {

inline bool is_half_integer_class(double e) {
  return e == 0.0 || e == 0.5 || e == -0.5;
}

}  // namespace detail

/// Integral of t^alpha (1-t)^beta f(z(t)) dz along the segment z(t) = z0 + t (z1 - z0).
///
/// Exponents in {-1/2, 0, 1/2} go through t = sin^2(u), which turns the
/// endpoint factors into smooth trigonometric weights. Other exponents in
/// (-1, 1) are handled by splitting at t = 1/2 and substituting t = s^(1/(1+alpha))
/// near each end.
inline Complex edge_integral(const EdgeIntegrandSpec& spec, Complex z0, Complex z1,
                             const QuadratureOptions& opts = {}) {
  const auto [alpha, beta] = spec.endpoint_exponents;
  if (!(alpha > -1.0) || !(beta > -1.0)) {
    throw Error(ErrorCode::NonIntegrable, "endpoint exponent must exceed -1");
  }
  if (alpha >= 1.0 || beta >= 1.0) {
    throw Error(ErrorCode::OutOfRange, "endpoint exponents must lie in (-1, 1)");
  }
  if (z0 == z1) {
    throw Error(ErrorCode::Degenerate, "edge endpoints coincide");
  }
  const Complex span = z1 - z0;
  auto point = [&](double t, double tc) { return EdgePoint{t, tc, t <= 0.5 ? z0 + t * span : z1 - tc * span}; };

  if (detail::is_half_integer_class(alpha) && detail::is_half_integer_class(beta)) {
    const int pa = static_cast<int>(std::lround(2.0 * alpha + 1.0));
    const int pb = static_cast<int>(std::lround(2.0 * beta + 1.0));
    auto integrand = [&](double u) -> Complex {
      const double s = std::sin(u), c = std::cos(u);
      const double t = s * s, tc = c * c;
      if ((t == 0.0 && alpha < 0) || (tc == 0.0 && beta < 0)) return Complex{};
      const double weight = 2.0 * std::pow(s, pa) * std::pow(c, pb);
      return weight * spec.smooth_factor(point(t, tc));
    };
    return span * integrate<Complex>(integrand, 0.0, 0.5 * kPi, opts);
  }

  // General exponents: t = s^p on [0, 1/2] with p = 1/(1+alpha), and the mirror
  // image on [1/2, 1].
  const double p = 1.0 / (1.0 + alpha);
  const double q = 1.0 / (1.0 + beta);
  const double s_max_left = std::pow(0.5, 1.0 / p);
  const double s_max_right = std::pow(0.5, 1.0 / q);
  auto left = [&](double s) -> Complex {
    if (s <= 0.0) return Complex{};
    const double t = std::pow(s, p);
    // t^alpha dt = p s^(p-1) s^(p alpha) ds = p ds.
    return p * std::pow(1.0 - t, beta) * spec.smooth_factor(point(t, 1.0 - t));
  };
  auto right = [&](double s) -> Complex {
    if (s <= 0.0) return Complex{};
    const double tc = std::pow(s, q);
    return q * std::pow(1.0 - tc, alpha) * spec.smooth_factor(point(1.0 - tc, tc));
  };
  return span * (integrate<Complex>(left, 0.0, s_max_left, opts) +
                 integrate<Complex>(right, 0.0, s_max_right, opts));
}

// ---------------------------------------------------------------------------
// Lattice sums.

struct LatticeSumSpec {
  double x = 0.0;
  int power = 1;
  Truncation truncation = Truncation::limit();
};

namespace detail {

inline bool near_integer(double x) { return std::abs(x - std::round(x)) < 1e-15; }

}  // namespace detail

/// Symmetric lattice sum  sum_{|k|<=M} (x - k)^(-p)  for p = 1 or 2.
/// For p = 2 and integer x the singular k = x term is excluded (self-term
/// convention); p = 1 with integer x is DIVERGENT.
inline double lattice_sum(const LatticeSumSpec& spec) {
  if (spec.power != 1 && spec.power != 2) {
    throw Error(ErrorCode::OutOfRange, "lattice_sum supports power 1 or 2");
  }
  const bool on_lattice = detail::near_integer(spec.x);
  if (spec.power == 1 && on_lattice) {
    throw Error(ErrorCode::Divergent, "principal-value sum diverges at integer offset");
  }
  if (spec.truncation.infinite) {
    if (spec.power == 1) return kPi / std::tan(kPi * spec.x);
    if (on_lattice) return kPi * kPi / 3.0;
    const double s = std::sin(kPi * spec.x);
    return kPi * kPi / (s * s);
  }
  const int m = spec.truncation.order;
  if (m < 0) throw Error(ErrorCode::OutOfRange, "truncation order must be non-negative");
  const long skip = on_lattice ? std::lround(spec.x) : LONG_MIN;
  // Pair +k with -k from the outside in for a stable symmetric sum.
  double sum = 0.0;
  for (int k = m; k >= 1; --k) {
    for (int sign : {-1, 1}) {
      const long kk = static_cast<long>(sign) * k;
      if (kk == skip) continue;
      const double d = spec.x - static_cast<double>(kk);
      sum += spec.power == 1 ? 1.0 / d : 1.0 / (d * d);
    }
  }
  if (skip != 0) {
    sum += spec.power == 1 ? 1.0 / spec.x : 1.0 / (spec.x * spec.x);
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Contour integration.

/// Integral of f along the polyline path[0] -> path[1] -> ... .
///
/// With endpoint_singular set, every segment is reparametrized by
/// t = sin^2(u) so integrable inverse-square-root singularities at segment
/// ends are resolved.
template <class F, class T = std::invoke_result_t<const F&, Complex>>
T contour_integral(const F& f, std::span<const Complex> path, double tol = 1e-10,
                   bool endpoint_singular = false) {
  if (path.size() < 2) {
    throw Error(ErrorCode::Degenerate, "contour needs at least two points");
  }
  QuadratureOptions opts;
  opts.rel_tol = tol;
  opts.abs_tol = tol * 1e-3;
  T total = detail::zero<T>();
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const Complex z0 = path[i];
    const Complex z1 = path[i + 1];
    if (z0 == z1) continue;
    const Complex span = z1 - z0;
    if (endpoint_singular) {
      auto g = [&](double u) -> T {
        const double s = std::sin(u), c = std::cos(u);
        const double t = s * s;
        if (t == 0.0 || c == 0.0) return detail::zero<T>();
        const Complex z = t <= 0.5 ? z0 + t * span : z1 - (c * c) * span;
        return T((2.0 * s * c * span) * f(z));
      };
      total += integrate<T>(g, 0.0, 0.5 * kPi, opts);
    } else {
      auto g = [&](double t) -> T { return T(span * f(z0 + t * span)); };
      total += integrate<T>(g, 0.0, 1.0, opts);
    }
  }
  return total;
}

template <class F, class T = std::invoke_result_t<const F&, Complex>>
T contour_integral(const F& f, std::initializer_list<Complex> path, double tol = 1e-10,
                   bool endpoint_singular = false) {
  std::vector<Complex> p(path);
  return contour_integral(f, std::span<const Complex>(p), tol, endpoint_singular);
}

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] by Newton iteration on P_n.
inline GaussRule gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorCode::OutOfRange, "rule needs at least one node");
  GaussRule rule{std::vector<double>(n), std::vector<double>(n)};
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

/// Closed regular polygon with n vertices on the circle |z - center| = radius.
inline std::vector<Complex> circle_polyline(Complex center, double radius, int n) {
  std::vector<Complex> path;
  path.reserve(n + 1);
  for (int k = 0; k <= n; ++k) {
    path.push_back(center + std::polar(radius, 2.0 * kPi * k / n));
  }
  path.back() = path.front();
  return path;
}

}  // namespace scherk
