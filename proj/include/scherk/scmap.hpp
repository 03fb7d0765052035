#pragma once
// Periodic Schwarz-Christoffel developing maps on the upper half-plane.
//
// The integrand is prod_k prod_j ((z - a_j - k) / (z - b_j - k))^(s/2) with
// s = +1 for the g dh structure and s = -1 for g^-1 dh. A finite window uses
// |k| <= M; the infinite window uses the sine-product closed form
//   prod_k (z - a - k)/(z - b - k) = e^{i pi (a - b)} (1 - e^{2 pi i (z - a)}) / (1 - e^{2 pi i (z - b)}).

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "scherk/error.hpp"
#include "scherk/numerics.hpp"
#include "scherk/orthodisk.hpp"

namespace scherk {

enum class Structure { Gdh, Inv };

inline const char* to_string(Structure s) { return s == Structure::Gdh ? "gdh" : "inv"; }

/// Exponent sign of the a-prevertices.
inline int exponent_sign(Structure s) { return s == Structure::Gdh ? 1 : -1; }

/// Constant in front of the developing map. Chosen so that the g dh image of
/// [b_j, a_{j+1}] has slope +1 and the two structures develop along conjugate
/// diagonals.
inline Complex prefactor(Structure s) {
  return std::polar(1.0, s == Structure::Gdh ? 0.25 * kPi : -0.25 * kPi);
}

/// Interleaved prevertices 0 = a_0 < b_0 < a_1 < ... < b_genus < 1, repeated
/// with period 1.
struct VertexConfiguration {
  int genus = 0;
  std::vector<double> a{0.0};
  std::vector<double> b{0.5};
  Truncation truncation = Truncation::limit();

  int edge_count() const { return 2 * genus + 2; }

  /// Prevertex at position i of the sequence a_0, b_0, a_1, ..., b_genus, a_0 + 1.
  double prevertex(int i) const {
    if (i == edge_count()) return 1.0 + a[0];
    return i % 2 == 0 ? a[i / 2] : b[i / 2];
  }
};

inline void validate(const VertexConfiguration& cfg) {
  const auto n = static_cast<std::size_t>(cfg.genus) + 1;
  if (cfg.genus < 0 || cfg.a.size() != n || cfg.b.size() != n) {
    throw Error(ErrorCode::BadCount, "configuration needs genus+1 a's and b's");
  }
  if (cfg.a[0] != 0.0) throw Error(ErrorCode::InvalidConfiguration, "a_0 must be 0");
  for (int i = 0; i < cfg.edge_count(); ++i) {
    if (!(cfg.prevertex(i) < cfg.prevertex(i + 1))) {
      throw Error(ErrorCode::OrderViolation, "prevertices must interleave a_j < b_j < a_{j+1}");
    }
  }
  if (!cfg.truncation.infinite && cfg.truncation.order < 1) {
    throw Error(ErrorCode::OutOfRange, "truncation order must be at least 1");
  }
}

namespace detail {

/// Log(1 - e^{2 pi i w}) for Im w >= 0, accurate near the zeros.
inline Complex log_one_minus_exp(Complex w) {
  const double x = w.real() - std::round(w.real());
  const double u = -2.0 * kPi * w.imag();
  const double v = 2.0 * kPi * x;
  const double sh = std::sin(0.5 * v);
  // e^{u+iv} - 1
  const Complex em1(std::expm1(u) * std::cos(v) - 2.0 * sh * sh, std::exp(u) * std::sin(v));
  return std::log(-em1);
}

inline Complex upper(Complex z) {
  // Points on the axis are limits from above.
  return z.imag() == 0.0 ? Complex(z.real(), 0.0) : z;
}

inline void check_not_prevertex(const VertexConfiguration& cfg, Complex z) {
  if (std::abs(z.imag()) > 1e-14) return;
  for (int i = 0; i <= cfg.edge_count(); ++i) {
    const double p = cfg.prevertex(i);
    const double k = std::round(z.real() - p);
    if (!cfg.truncation.infinite && std::abs(k) > cfg.truncation.order) continue;
    if (std::abs(z.real() - p - k) < 1e-14) {
      throw Error(ErrorCode::AtPrevertex, "integrand evaluated at a prevertex");
    }
  }
}

}  // namespace detail

/// Sum of s/2 (Log(z - a) - Log(z - b)) over the window; the log of the integrand.
inline Complex sc_log_integrand(const VertexConfiguration& cfg, Structure which, Complex z) {
  detail::check_not_prevertex(cfg, z);
  z = detail::upper(z);
  Complex sum{};
  if (cfg.truncation.infinite) {
    for (int j = 0; j <= cfg.genus; ++j) {
      sum += Complex(0.0, kPi * (cfg.a[j] - cfg.b[j])) + detail::log_one_minus_exp(z - cfg.a[j]) -
             detail::log_one_minus_exp(z - cfg.b[j]);
    }
  } else {
    const int m = cfg.truncation.order;
    for (int k = m; k >= 0; --k) {
      for (int sign : {1, -1}) {
        if (k == 0 && sign == -1) continue;
        const double kk = sign * k;
        for (int j = 0; j <= cfg.genus; ++j) {
          sum += std::log(detail::upper(z - cfg.a[j] - kk)) - std::log(detail::upper(z - cfg.b[j] - kk));
        }
      }
    }
  }
  return 0.5 * exponent_sign(which) * sum;
}

inline Complex sc_integrand(const VertexConfiguration& cfg, Structure which, Complex z) {
  return std::exp(sc_log_integrand(cfg, which, z));
}

/// Endpoint exponents of the integrand on edge i (between prevertex i and i+1).
inline std::pair<double, double> edge_exponents(Structure which, int edge) {
  const double e = 0.5 * exponent_sign(which);
  return edge % 2 == 0 ? std::pair{e, -e} : std::pair{-e, e};
}

namespace detail {

struct AxisEnd {
  int index;        // prevertex index in one period, or -1 for a regular point
  double exponent;  // exponent of the integrand at that end
};

/// Modulus of the integrand on a real interval with the endpoint prevertex
/// factors divided out: |G(x)| / (d_L^e_L d_R^e_R) times span^(e_L + e_R),
/// where d_L = span t and d_R = span (1 - t).
inline double regular_modulus(const VertexConfiguration& cfg, Structure which, double x0, double span,
                              AxisEnd left, AxisEnd right, const EdgePoint& p) {
  const double x = p.t <= 0.5 ? x0 + p.t * span : (x0 + span) - p.tc * span;
  const double dl = span * p.t, dr = span * p.tc;
  const double s = 0.5 * exponent_sign(which);
  double log_mod = 0.0;
  // Periodic prevertex sequence: index i has exponent +s for a, -s for b.
  const int n = cfg.edge_count();
  auto matches_end = [&](int i, double shift, const AxisEnd& end, double end_pos) {
    return end.index >= 0 && i % n == end.index % n && std::abs(cfg.prevertex(i) + shift - end_pos) < 0.5;
  };
  const double left_pos = x0, right_pos = x0 + span;
  if (cfg.truncation.infinite) {
    for (int i = 0; i < n; ++i) {
      const double e = i % 2 == 0 ? s : -s;
      const double pv = cfg.prevertex(i);
      double term;
      if (left.index >= 0 && i == left.index % n) {
        term = dl > 0.0 ? std::log(std::sin(kPi * dl) / dl) : std::log(kPi);
      } else if (right.index >= 0 && i == right.index % n) {
        term = dr > 0.0 ? std::log(std::sin(kPi * dr) / dr) : std::log(kPi);
      } else {
        term = std::log(std::abs(std::sin(kPi * (x - pv))));
      }
      log_mod += e * term;
    }
  } else {
    const int m = cfg.truncation.order;
    for (int k = -m; k <= m; ++k) {
      for (int i = 0; i < n; ++i) {
        const double e = i % 2 == 0 ? s : -s;
        if (matches_end(i, k, left, left_pos) || matches_end(i, k, right, right_pos)) continue;
        log_mod += e * std::log(std::abs(x - cfg.prevertex(i) - k));
      }
    }
  }
  return std::exp(log_mod) * std::pow(span, left.exponent + right.exponent);
}

/// Locates x among the prevertices: index i when x is a prevertex (up to
/// period shifts), otherwise -1.
inline int prevertex_index(const VertexConfiguration& cfg, double x) {
  for (int i = 0; i < cfg.edge_count(); ++i) {
    const double p = cfg.prevertex(i);
    const double k = std::round(x - p);
    if (std::abs(x - p - k) < 1e-14) {
      if (!cfg.truncation.infinite && std::abs(k) > cfg.truncation.order) return -1;
      return i;
    }
  }
  return -1;
}

/// Integral of the integrand over a real interval containing no prevertex in
/// its interior.
inline Complex axis_piece(const VertexConfiguration& cfg, Structure which, double x0, double x1,
                          const QuadratureOptions& opts) {
  const double sign = x1 > x0 ? 1.0 : -1.0;
  const double lo = std::min(x0, x1), hi = std::max(x0, x1);
  const double s = 0.5 * exponent_sign(which);
  auto end_at = [&](double x) {
    const int i = prevertex_index(cfg, x);
    return AxisEnd{i, i < 0 ? 0.0 : (i % 2 == 0 ? s : -s)};
  };
  const AxisEnd left = end_at(lo), right = end_at(hi);
  const double span = hi - lo;
  const Complex phase = [&] {
    const Complex g = sc_integrand(cfg, which, Complex(0.5 * (lo + hi), 0.0));
    return g / std::abs(g);
  }();
  EdgeIntegrandSpec spec{{left.exponent, right.exponent}, [&](const EdgePoint& p) {
                           return Complex(regular_modulus(cfg, which, lo, span, left, right, p), 0.0);
                         }};
  return sign * phase * edge_integral(spec, lo, hi, opts);
}

}  // namespace detail

/// Integral of the integrand along the real axis from x0 to x1, split at the
/// prevertices in between.
inline Complex axis_integral(const VertexConfiguration& cfg, Structure which, double x0, double x1,
                             const QuadratureOptions& opts = {}) {
  if (x0 == x1) return Complex{};
  if (x1 < x0) return -axis_integral(cfg, which, x1, x0, opts);
  std::vector<double> cuts{x0};
  const int n = cfg.edge_count();
  const double k0 = std::floor(x0) - 1.0, k1 = std::ceil(x1) + 1.0;
  std::vector<double> inner;
  for (double k = k0; k <= k1; k += 1.0) {
    if (!cfg.truncation.infinite && std::abs(k) > cfg.truncation.order) continue;
    for (int i = 0; i < n; ++i) {
      const double p = cfg.prevertex(i) + k;
      if (p > x0 + 1e-14 && p < x1 - 1e-14) inner.push_back(p);
    }
  }
  std::sort(inner.begin(), inner.end());
  cuts.insert(cuts.end(), inner.begin(), inner.end());
  cuts.push_back(x1);
  Complex total{};
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += detail::axis_piece(cfg, which, cuts[i], cuts[i + 1], opts);
  return total;
}

/// Integral of the integrand along a polyline in the closed upper half-plane.
/// Segments on the real axis are split at prevertices; other segments may
/// touch the axis only at their ends.
inline Complex integrate_path(const VertexConfiguration& cfg, Structure which, std::span<const Complex> path,
                              double tol = 1e-11) {
  validate(cfg);
  QuadratureOptions opts;
  opts.rel_tol = tol;
  opts.abs_tol = tol * 1e-3;
  Complex total{};
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const Complex z0 = path[i], z1 = path[i + 1];
    if (z0.imag() < 0.0 || z1.imag() < 0.0) {
      throw Error(ErrorCode::OutOfRange, "path must stay in the closed upper half-plane");
    }
    if (z0 == z1) continue;
    if (z0.imag() == 0.0 && z1.imag() == 0.0) {
      total += axis_integral(cfg, which, z0.real(), z1.real(), opts);
      continue;
    }
    const bool touches_axis = z0.imag() == 0.0 || z1.imag() == 0.0;
    auto f = [&](Complex z) { return sc_integrand(cfg, which, z); };
    const Complex seg[2] = {z0, z1};
    total += contour_integral(f, std::span<const Complex>(seg, 2), tol, touches_axis);
  }
  return total;
}

/// Like integrate_path, but a real-axis segment that crosses a prevertex in
/// its interior is an error.
inline Complex integrate_path_strict(const VertexConfiguration& cfg, Structure which, std::span<const Complex> path,
                                     double tol = 1e-11) {
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const Complex z0 = path[i], z1 = path[i + 1];
    if (z0.imag() != 0.0 || z1.imag() != 0.0) continue;
    const double lo = std::min(z0.real(), z1.real()), hi = std::max(z0.real(), z1.real());
    for (double k = std::floor(lo) - 1.0; k <= std::ceil(hi) + 1.0; k += 1.0)
      for (int v = 0; v < cfg.edge_count(); ++v) {
        const double p = cfg.prevertex(v) + k;
        if (p > lo + 1e-14 && p < hi - 1e-14) {
          throw Error(ErrorCode::PathThroughPrevertex, "path crosses a prevertex");
        }
      }
  }
  return integrate_path(cfg, which, path, tol);
}

/// Developing map F(zeta) = prefactor * integral from base to zeta along the
/// straight segment (split edge by edge on the axis).
inline Complex develop(const VertexConfiguration& cfg, Structure which, Complex zeta, Complex base = Complex(0.0, 0.0),
                       double tol = 1e-11) {
  const Complex path[2] = {base, zeta};
  return prefactor(which) * integrate_path(cfg, which, std::span<const Complex>(path, 2), tol);
}

/// Richardson-extrapolated developing map 2 F^{2M} - F^M for a finite window.
inline Complex develop_extrapolated(const VertexConfiguration& cfg, Structure which, Complex zeta,
                                    Complex base = Complex(0.0, 0.0), double tol = 1e-11) {
  if (cfg.truncation.infinite) return develop(cfg, which, zeta, base, tol);
  VertexConfiguration twice = cfg;
  twice.truncation = cfg.truncation.doubled();
  return 2.0 * develop(twice, which, zeta, base, tol) - develop(cfg, which, zeta, base, tol);
}

/// Displacement F(zeta + 1) - F(zeta).
inline Complex period_displacement(const VertexConfiguration& cfg, Structure which, Complex zeta, double tol = 1e-11) {
  return develop(cfg, which, zeta + 1.0, zeta, tol);
}

struct DevelopedEdge {
  int index = 0;
  double length = 0.0;
  Complex direction{};
};

inline DevelopedEdge developed_edge(const VertexConfiguration& cfg, Structure which, int edge, double tol = 1e-12) {
  validate(cfg);
  if (edge < 0 || edge >= cfg.edge_count()) throw Error(ErrorCode::OutOfRange, "edge index out of range");
  QuadratureOptions opts;
  opts.rel_tol = tol;
  opts.abs_tol = tol * 1e-3;
  const Complex v = prefactor(which) * detail::axis_piece(cfg, which, cfg.prevertex(edge), cfg.prevertex(edge + 1), opts);
  const double len = std::abs(v);
  return {edge, len, v / len};
}

inline double edge_image_length(const VertexConfiguration& cfg, Structure which, int edge, double tol = 1e-12) {
  return developed_edge(cfg, which, edge, tol).length;
}

inline std::vector<double> edge_image_lengths(const VertexConfiguration& cfg, Structure which, double tol = 1e-12) {
  std::vector<double> out;
  for (int i = 0; i < cfg.edge_count(); ++i) out.push_back(edge_image_length(cfg, which, i, tol));
  return out;
}

/// Start slope of the developed boundary: the g dh image of [a_0, b_0] has slope -1.
inline int start_slope(Structure which) { return which == Structure::Gdh ? -1 : 1; }

/// Boundary image over one period as a zigzag.
inline Zigzag developed_zigzag(const VertexConfiguration& cfg, Structure which, double tol = 1e-12) {
  return build_zigzag(edge_image_lengths(cfg, which, tol), start_slope(which));
}

inline double truncation_error(VertexConfiguration cfg, Structure which, Complex zeta, Complex base, int m1, int m2) {
  if (m2 < m1) throw Error(ErrorCode::OutOfRange, "truncation_error needs M2 >= M1");
  if (m1 == m2) return 0.0;
  cfg.truncation = Truncation::finite(m1);
  const Complex f1 = develop(cfg, which, zeta, base);
  cfg.truncation = Truncation::finite(m2);
  return std::abs(develop(cfg, which, zeta, base) - f1);
}

}  // namespace scherk
