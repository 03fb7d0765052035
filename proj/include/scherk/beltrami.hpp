#pragma once
// Infinitesimal edge pushes and their Beltrami differentials. Everything is
// in the chart where the pushed edge is [-a, a] x {0}.

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "scherk/error.hpp"
#include "scherk/numerics.hpp"

namespace scherk {

struct PushParams {
  double a = 1.0;      // half-length of the pushed edge
  double b = 1.0;      // vertical extent of the collar
  double delta = 1.0;  // horizontal collar width
};

enum class Region { R1 = 1, R2, R3, R4, R5, R6, Outside };

inline void validate(const PushParams& p) {
  if (!(p.a >= 0.0) || !(p.b > 0.0) || !(p.delta > 0.0)) {
    throw Error(ErrorCode::OutOfRange, "push parameters must be positive");
  }
}

/// First region (in the order R1..R6) whose closure contains z.
inline Region region_of(Complex z, const PushParams& p) {
  const double x = z.real(), y = z.imag();
  if (y < -p.b || y > p.b || std::abs(x) > p.a + p.delta) return Region::Outside;
  const bool up = y >= 0.0;
  if (std::abs(x) <= p.a) return up ? Region::R1 : Region::R2;
  if (x < 0.0) return up ? Region::R3 : Region::R5;
  return up ? Region::R4 : Region::R6;
}

/// f_eps(z) - z, evaluated without cancellation against z.
inline Complex push_displacement(Complex z, double eps, const PushParams& p) {
  validate(p);
  if (!(std::abs(eps) < p.b)) throw Error(ErrorCode::EpsTooLarge, "push size must be below the collar height");
  const double x = z.real(), y = z.imag();
  const double above = eps * (1.0 - y / p.b);  // epsilon + (b - eps) y / b - y
  const double below = eps * (1.0 + y / p.b);  // epsilon + (b + eps) y / b - y
  double dy = 0.0;
  switch (region_of(z, p)) {
    case Region::R1: dy = above; break;
    case Region::R2: dy = below; break;
    case Region::R3: dy = above * (x + p.delta + p.a) / p.delta; break;
    case Region::R4: dy = -above * (x - p.delta - p.a) / p.delta; break;
    case Region::R5: dy = below * (x + p.delta + p.a) / p.delta; break;
    case Region::R6: dy = -below * (x - p.delta - p.a) / p.delta; break;
    case Region::Outside: break;
  }
  return {0.0, dy};
}

inline Complex push_map(Complex z, double eps, const PushParams& p) { return z + push_displacement(z, eps, p); }

/// Closed-form nu_dot of one region, extended off the region.
inline Complex nu_dot_formula(Region r, Complex z, const PushParams& p) {
  const Complex zb = std::conj(z);
  const double s = 1.0 / (2.0 * p.b * p.delta);
  const Complex ib(0.0, p.b);
  switch (r) {
    case Region::R1: return 1.0 / (2.0 * p.b);
    case Region::R2: return -1.0 / (2.0 * p.b);
    case Region::R3: return s * (zb + p.delta + p.a + ib);
    case Region::R4: return s * (-zb + p.delta + p.a - ib);
    case Region::R5: return s * (-zb - p.delta - p.a + ib);
    case Region::R6: return s * (zb - p.delta - p.a - ib);
    case Region::Outside: return 0.0;
  }
  return 0.0;
}

/// d/d eps at eps = 0 of the Beltrami coefficient of the push.
inline Complex nu_dot(Complex z, const PushParams& p) {
  validate(p);
  return nu_dot_formula(region_of(z, p), z, p);
}

/// Distance from z to the nearest line separating two regions, or to the
/// collar boundary.
inline double interface_distance(Complex z, const PushParams& p) {
  const double x = z.real(), y = z.imag();
  double d = std::min({std::abs(y), std::abs(y - p.b), std::abs(y + p.b)});
  for (double xs : {-p.a - p.delta, -p.a, p.a, p.a + p.delta}) d = std::min(d, std::abs(x - xs));
  return d;
}

/// Beltrami coefficient f_zbar / f_z of f_eps at z by central differences
/// with spatial step h.
inline Complex beltrami_coefficient(Complex z, double eps, double h, const PushParams& p) {
  const Complex dx = (push_displacement(z + h, eps, p) - push_displacement(z - h, eps, p)) / (2.0 * h);
  const Complex dy = (push_displacement(z + Complex(0.0, h), eps, p) - push_displacement(z - Complex(0.0, h), eps, p)) /
                     (2.0 * h);
  const Complex fz = 1.0 + 0.5 * (dx - Complex(0.0, 1.0) * dy);
  const Complex fzb = 0.5 * (dx + Complex(0.0, 1.0) * dy);
  return fzb / fz;
}

/// Sup over samples of |(nu_eps - nu_{-eps}) / (2 eps) - nu_dot|.
inline double finite_difference_check(const PushParams& p, std::span<const Complex> samples, double eps,
                                      double h = 1e-5) {
  validate(p);
  double worst = 0.0;
  for (Complex z : samples) {
    const bool inside = region_of(z, p) != Region::Outside;
    if (inside && interface_distance(z, p) < 10.0 * h) {
      throw Error(ErrorCode::SampleTooCloseToInterface, "sample within ten steps of a region interface");
    }
    if (!inside && interface_distance(z, p) < 10.0 * h) {
      throw Error(ErrorCode::SampleTooCloseToInterface, "sample within ten steps of the collar boundary");
    }
    const Complex fd = (beltrami_coefficient(z, eps, h, p) - beltrami_coefficient(z, -eps, h, p)) / (2.0 * eps);
    worst = std::max(worst, std::abs(fd - nu_dot(z, p)));
  }
  return worst;
}

/// Half-turn about the left corner (-a, 0) of the pushed edge.
inline Complex corner_turn(Complex z, const PushParams& p) { return -z - 2.0 * p.a; }

/// Sup over samples of |Psi^* nu_dot|_{R6} + nu_dot|_{R3}| for samples in R3
/// and |Psi^* nu_dot|_{R4} + nu_dot|_{R5}| for samples in R5. Psi is a
/// half-turn, so the pullback of a Beltrami differential is composition.
inline double cancellation_check(const PushParams& p, std::span<const Complex> samples) {
  validate(p);
  double worst = 0.0;
  for (Complex z : samples) {
    const Region r = region_of(z, p);
    const Complex w = corner_turn(z, p);
    Complex v;
    if (r == Region::R3) {
      v = nu_dot_formula(Region::R6, w, p) + nu_dot_formula(Region::R3, z, p);
    } else if (r == Region::R5) {
      v = nu_dot_formula(Region::R4, w, p) + nu_dot_formula(Region::R5, z, p);
    } else {
      throw Error(ErrorCode::OutOfRange, "cancellation samples must lie in R3 or R5");
    }
    worst = std::max(worst, std::abs(v));
  }
  return worst;
}

/// The same combination with the opposite sign on the pulled-back term.
inline double cancellation_check_negated(const PushParams& p, std::span<const Complex> samples) {
  double worst = 0.0;
  for (Complex z : samples) {
    const Region r = region_of(z, p);
    const Complex w = corner_turn(z, p);
    const Complex v = r == Region::R3 ? -nu_dot_formula(Region::R6, w, p) + nu_dot_formula(Region::R3, z, p)
                                      : -nu_dot_formula(Region::R4, w, p) + nu_dot_formula(Region::R5, z, p);
    worst = std::max(worst, std::abs(v));
  }
  return worst;
}

/// Phi = (c0 + c2 w^2) dw^2 near a corner, pulled to the corner chart through
/// w = z^{1/3}. An optional single-valued c_odd dz^2 / z term is not even in w.
struct LocalQuadraticDifferential {
  Complex c0{};
  Complex c2{};
  Complex c_odd{};
};

namespace detail {

/// Cube root on the left half-plane, arg z in (pi/2, 3pi/2).
inline Complex left_cbrt(Complex z) {
  double t = std::arg(z);
  if (t < 0.0) t += 2.0 * kPi;
  return std::polar(std::cbrt(std::abs(z)), t / 3.0);
}

/// Coefficient of dz^2 given the chart value w at z.
inline Complex phi_coefficient(const LocalQuadraticDifferential& q, Complex w, Complex z) {
  const Complex w2 = w * w;
  return (q.c0 + q.c2 * w2) / (9.0 * w2 * w2) + q.c_odd / z;
}

/// Integral over the rectangle with one corner at the origin and opposite
/// corner (sx w, sy h). Each half-triangle is mapped by a Duffy transform with
/// radial variable s = u^3, which leaves a smooth integrand for r^{-4/3}.
template <class F>
Complex corner_rectangle_integral(const F& f, double sx, double sy, double width, double height, int n) {
  const GaussRule gl = gauss_legendre(n);
  const Complex p1(sx * width, 0.0), p2(sx * width, sy * height), p3(0.0, sy * height);
  Complex total = 0.0;
  for (const auto& tri : {std::array<Complex, 2>{p1, p2}, std::array<Complex, 2>{p2, p3}}) {
    const Complex e1 = tri[0], e2 = tri[1] - tri[0];
    const double jac = std::abs(e1.real() * e2.imag() - e1.imag() * e2.real());
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double u = 0.5 * (gl.nodes[i] + 1.0);
      const double s = u * u * u;
      const double ws = 0.5 * gl.weights[i] * 3.0 * u * u * s;  // ds = 3u^2 du, Duffy factor s
      for (std::size_t j = 0; j < gl.nodes.size(); ++j) {
        const double t = 0.5 * (gl.nodes[j] + 1.0);
        const Complex z = s * (e1 + t * e2);
        total += ws * 0.5 * gl.weights[j] * jac * f(z);
      }
    }
  }
  return total;
}

}  // namespace detail

struct PairingReport {
  Complex total{};
  Complex base{};   // R3 and R5 contributions
  Complex image{};  // their half-turn images
  double resolution_change = 0.0;
};

/// Pairing of Phi with nu_dot over R3 and R5 of the corner neighbourhood
/// (a = 0, clipped to the square of side r) plus the half-turn images, where
/// the image regions carry the R6 and R4 formulas and Phi the continued branch.
inline PairingReport pairing_report(const LocalQuadraticDifferential& q, PushParams p, double r, int n = 48) {
  validate(p);
  p.a = 0.0;
  const double w = std::min(p.delta, r), h = std::min(p.b, r);
  auto base = [&](Region reg) {
    return [&, reg](Complex z) { return detail::phi_coefficient(q, detail::left_cbrt(z), z) * nu_dot_formula(reg, z, p); };
  };
  auto image = [&](Region reg) {
    return [&, reg](Complex z) { return detail::phi_coefficient(q, -detail::left_cbrt(-z), z) * nu_dot_formula(reg, z, p); };
  };
  auto evaluate = [&](int m) {
    PairingReport rep;
    rep.base = detail::corner_rectangle_integral(base(Region::R3), -1.0, 1.0, w, h, m) +
               detail::corner_rectangle_integral(base(Region::R5), -1.0, -1.0, w, h, m);
    rep.image = detail::corner_rectangle_integral(image(Region::R6), 1.0, -1.0, w, h, m) +
                detail::corner_rectangle_integral(image(Region::R4), 1.0, 1.0, w, h, m);
    rep.total = rep.base + rep.image;
    return rep;
  };
  const PairingReport coarse = evaluate(n / 2);
  PairingReport fine = evaluate(n);
  fine.resolution_change = std::max(std::abs(fine.base - coarse.base), std::abs(fine.image - coarse.image));
  const double scale = std::max(1.0, std::abs(fine.base));
  if (fine.resolution_change > 1e-9 * scale) {
    throw Error(ErrorCode::NoConvergence, "pairing quadrature did not settle between resolutions");
  }
  return fine;
}

inline Complex pair_with_quadratic_differential(const LocalQuadraticDifferential& q, const PushParams& p, double r) {
  return pairing_report(q, p, r).total;
}

/// Relative defect |zeta^* nu / nu + 1| of pulling the constant edge value
/// 1/(2b) back through zeta(z) = i|c| z + c2 z^2, sampled over the R1 part of
/// a collar of height b about the edge point 0.
inline double sign_flip_defect(double b, double c, Complex c2, int samples = 16) {
  if (!(b > 0.0) || !(c > 0.0)) throw Error(ErrorCode::OutOfRange, "collar height and scale must be positive");
  double worst = 0.0;
  for (int i = 0; i <= samples; ++i) {
    for (int j = 0; j <= samples; ++j) {
      const Complex z(b * (2.0 * i / samples - 1.0), b * j / samples);
      const Complex d = Complex(0.0, c) + 2.0 * c2 * z;
      const Complex pulled = (1.0 / (2.0 * b)) * std::conj(d) / d;
      worst = std::max(worst, std::abs(pulled * (2.0 * b) + 1.0));
    }
  }
  return worst;
}

}  // namespace scherk
