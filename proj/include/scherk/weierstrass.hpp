#pragma once
// Weierstrass representation: immersion integrals, induced metric, periods
// and flux of the forms (1/2)(g - 1/g) dh, (i/2)(g + 1/g) dh, dh.

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "scherk/error.hpp"
#include "scherk/numerics.hpp"

namespace scherk {

using Vec3 = Eigen::Vector3d;
using Forms = Eigen::Matrix<Complex, 3, 1>;

enum class DomainKind { Plane, PuncturedPlane, HalfPlaneStrip };

struct Domain {
  DomainKind kind = DomainKind::Plane;
  /// Deck translation of the parameter domain (0 if none).
  Complex period{};
  /// Spatial translation produced by one deck translation.
  Vec3 translation = Vec3::Zero();
};

struct WeierstrassData {
  std::function<Complex(Complex)> g;
  std::function<Complex(Complex)> dh;  // coefficient h'(z) of dh = h'(z) dz
  Domain domain;
};

inline Forms forms(const WeierstrassData& data, Complex z) {
  const Complex g = data.g(z);
  const Complex dh = data.dh(z);
  if (g == 0.0 || !std::isfinite(std::abs(g)) || !std::isfinite(std::abs(dh))) {
    throw Error(ErrorCode::SingularOnPath, "Weierstrass forms singular");
  }
  const Complex ig = 1.0 / g;
  Forms f;
  f << 0.5 * (g - ig) * dh, Complex(0.0, 0.5) * (g + ig) * dh, dh;
  return f;
}

/// Induced metric factor (1/2)(|g| + 1/|g|)|h'|.
inline double metric_factor(const WeierstrassData& data, Complex z) {
  const Complex g = data.g(z);
  const Complex dh = data.dh(z);
  const double ag = std::abs(g);
  if (!(ag > 0.0) || !std::isfinite(ag) || !std::isfinite(std::abs(dh))) {
    throw Error(ErrorCode::SingularPoint, "metric evaluated at a singular point");
  }
  return 0.5 * (ag + 1.0 / ag) * std::abs(dh);
}

struct PathOptions {
  double tol = 1e-11;
  /// Resolve integrable singularities at segment ends (t = sin^2 u).
  bool endpoint_singular = false;
};

/// Integral of the three forms along a polyline.
inline Forms integrate_forms(const WeierstrassData& data, std::span<const Complex> path, const PathOptions& opts = {}) {
  auto f = [&](Complex z) { return forms(data, z); };
  return contour_integral(f, path, opts.tol, opts.endpoint_singular);
}

/// Re of the integral from base through the intermediate points to target.
inline Vec3 immersion_point(const WeierstrassData& data, Complex base, Complex target,
                            std::span<const Complex> via = {}, const PathOptions& opts = {}) {
  std::vector<Complex> path{base};
  path.insert(path.end(), via.begin(), via.end());
  path.push_back(target);
  return integrate_forms(data, path, opts).real();
}

struct PeriodVector {
  Forms value = Forms::Zero();
  /// Number of deck translations the cycle realizes.
  int winding = 0;
  bool closed = false;

  Vec3 real() const { return value.real(); }
};

/// Periods of the three forms around a polyline. The cycle counts as closed
/// when the real parts equal an integer multiple of the domain translation
/// within tol.
inline PeriodVector period_vector(const WeierstrassData& data, std::span<const Complex> cycle, double tol = 1e-8,
                                  const PathOptions& opts = {}) {
  if (cycle.size() < 2) throw Error(ErrorCode::Degenerate, "cycle needs at least two points");
  PeriodVector p;
  p.value = integrate_forms(data, cycle, opts);
  const Complex shift = cycle.back() - cycle.front();
  if (std::abs(shift) > 0.0) {
    if (data.domain.period == 0.0) throw Error(ErrorCode::Degenerate, "open path in a domain without deck translation");
    const Complex n = shift / data.domain.period;
    p.winding = static_cast<int>(std::lround(n.real()));
    if (std::abs(n - Complex(p.winding, 0.0)) > 1e-12) {
      throw Error(ErrorCode::Degenerate, "path ends do not differ by a deck translation");
    }
  }
  const Vec3 defect = p.value.real() - p.winding * data.domain.translation;
  p.closed = defect.cwiseAbs().maxCoeff() < tol;
  return p;
}

inline PeriodVector period_vector(const WeierstrassData& data, const std::vector<Complex>& cycle, double tol = 1e-8,
                                  const PathOptions& opts = {}) {
  return period_vector(data, std::span<const Complex>(cycle), tol, opts);
}

/// Largest horizontal closure defect of a cycle, measured as
/// |int g dh - conj(int dh/g)|.
inline double horizontal_conjugacy_defect(const WeierstrassData& data, std::span<const Complex> cycle,
                                          const PathOptions& opts = {}) {
  auto f = [&](Complex z) {
    const Complex g = data.g(z), dh = data.dh(z);
    if (g == 0.0 || !std::isfinite(std::abs(g)) || !std::isfinite(std::abs(dh))) {
      throw Error(ErrorCode::SingularOnPath, "Weierstrass forms singular");
    }
    Eigen::Matrix<Complex, 2, 1> v;
    v << g * dh, dh / g;
    return v;
  };
  const Eigen::Matrix<Complex, 2, 1> v = contour_integral(f, cycle, opts.tol, opts.endpoint_singular);
  return std::abs(v[0] - std::conj(v[1]));
}

inline bool check_horizontal_conjugacy(const WeierstrassData& data, std::span<const Complex> cycle, double tol,
                                       const PathOptions& opts = {}) {
  return horizontal_conjugacy_defect(data, cycle, opts) <= tol;
}

struct FluxVector {
  double x1 = 0.0;
  double x2 = 0.0;
  std::string label;

  double norm() const { return std::hypot(x1, x2); }
};

/// Conormal flux of (grad x1, grad x2) across the curve: the imaginary parts
/// of the horizontal periods.
inline FluxVector flux_vector(const WeierstrassData& data, std::span<const Complex> curve, std::string label = {},
                              const PathOptions& opts = {}) {
  const Forms v = integrate_forms(data, curve, opts);
  return {v[0].imag(), v[1].imag(), std::move(label)};
}

struct RegularityReport {
  int order_g = 0;   // zeros minus poles of g inside the circle
  int order_dh = 0;  // zeros minus poles of h'
  bool regular = false;
};

/// Argument-principle check on a small circle: a zero of dh of order n must
/// sit at a zero or pole of g of the same order.
inline RegularityReport regularity_check(const WeierstrassData& data, Complex center, double radius, int samples = 512) {
  auto winding = [&](const std::function<Complex(Complex)>& f) {
    double total = 0.0;
    Complex prev = f(center + radius);
    for (int k = 1; k <= samples; ++k) {
      const Complex cur = f(center + std::polar(radius, 2.0 * kPi * k / samples));
      total += std::arg(cur / prev);
      prev = cur;
    }
    return static_cast<int>(std::lround(total / (2.0 * kPi)));
  };
  RegularityReport r;
  r.order_g = winding(data.g);
  r.order_dh = winding(data.dh);
  r.regular = r.order_dh == std::abs(r.order_g);
  return r;
}

inline WeierstrassData catenoid_data() {
  return {[](Complex z) { return z; }, [](Complex z) { return 1.0 / z; },
          {DomainKind::PuncturedPlane, Complex{}, Vec3::Zero()}};
}

inline WeierstrassData plane_data(Complex g = 1.0) {
  return {[g](Complex) { return g; }, [](Complex) { return Complex(1.0, 0.0); }, {DomainKind::Plane, Complex{}, Vec3::Zero()}};
}

}  // namespace scherk
