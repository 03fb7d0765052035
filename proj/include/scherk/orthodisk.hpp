#pragma once
// Periodic zigzags with edges of slope +1 and -1, conjugate pairs and the
// dictionary between angle, flux and the slope of the translation.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "scherk/error.hpp"
#include "scherk/numerics.hpp"

namespace scherk {

/// Unit direction of an edge of slope s = +1 or -1.
inline Complex slope_direction(int s) {
  return Complex(1.0, static_cast<double>(s)) / std::numbers::sqrt2;
}

/// One period of a zigzag. Edge i has slope start_slope * (-1)^i.
struct Zigzag {
  std::vector<double> edge_lengths;
  int start_slope = 1;
  Complex translation{};

  int genus() const { return static_cast<int>(edge_lengths.size()) / 2 - 1; }
  int slope(std::size_t i) const { return i % 2 == 0 ? start_slope : -start_slope; }
  Complex edge_vector(std::size_t i) const { return edge_lengths[i] * slope_direction(slope(i)); }

  /// Total length of the slope +1 edges.
  double l_plus() const { return class_total(1); }
  /// Total length of the slope -1 edges.
  double l_minus() const { return class_total(-1); }

  /// Corners over the given number of periods, starting at the origin.
  std::vector<Complex> vertices(int periods = 1) const {
    std::vector<Complex> v{Complex{}};
    for (int p = 0; p < periods; ++p)
      for (std::size_t i = 0; i < edge_lengths.size(); ++i) v.push_back(v.back() + edge_vector(i));
    return v;
  }

 private:
  double class_total(int s) const {
    double total = 0.0;
    for (std::size_t i = 0; i < edge_lengths.size(); ++i)
      if (slope(i) == s) total += edge_lengths[i];
    return total;
  }
};

inline Zigzag build_zigzag(std::vector<double> edge_lengths, int start_slope) {
  if (edge_lengths.empty() || edge_lengths.size() % 2 != 0) {
    throw Error(ErrorCode::BadCount, "a zigzag period needs a positive even number of edges");
  }
  if (start_slope != 1 && start_slope != -1) {
    throw Error(ErrorCode::InvalidConfiguration, "start slope must be +1 or -1");
  }
  for (double l : edge_lengths) {
    if (!(l > 0.0)) throw Error(ErrorCode::NonpositiveLength, "edge lengths must be positive");
  }
  Zigzag z{std::move(edge_lengths), start_slope, {}};
  for (std::size_t i = 0; i < z.edge_lengths.size(); ++i) z.translation += z.edge_vector(i);
  return z;
}

inline Zigzag conjugate_zigzag(const Zigzag& z) {
  return build_zigzag(z.edge_lengths, -z.start_slope);
}

/// Argument of the translation, arctan(L+/L-) - pi/4.
inline double slope_of_orbit(double l_plus, double l_minus) {
  if (!(l_minus > 0.0)) throw Error(ErrorCode::Degenerate, "slope of orbit needs L- > 0");
  return std::atan(l_plus / l_minus) - 0.25 * kPi;
}

inline double slope_of_orbit(const Zigzag& z) { return slope_of_orbit(z.l_plus(), z.l_minus()); }

struct ClassLengths {
  double l_plus = 0.0;
  double l_minus = 0.0;
};

inline ClassLengths lengths_from_angle(double theta, double translation_length = 1.0) {
  if (!(theta > 0.0 && theta <= 0.5 * kPi)) {
    throw Error(ErrorCode::OutOfRange, "angle must lie in (0, pi/2]");
  }
  if (!(translation_length > 0.0)) {
    throw Error(ErrorCode::NonpositiveLength, "translation length must be positive");
  }
  return {translation_length * std::cos(0.5 * theta), translation_length * std::sin(0.5 * theta)};
}

/// Inverse of lengths_from_angle: theta = 2 atan(L- / L+).
inline double angle_from_lengths(double l_plus, double l_minus) {
  return 2.0 * std::atan2(l_minus, l_plus);
}

/// Flux across one end of height h with wing angle theta.
inline double flux_from_angle(double theta, double h = 1.0) { return 2.0 * std::cos(0.5 * theta) * h; }

struct OrthodiskPair {
  Zigzag gdh;
  Zigzag inv;
  double conjugacy_residual = 0.0;
};

/// Largest mismatch between corresponding edge lengths.
inline double conjugacy_residual(const Zigzag& first, const Zigzag& second) {
  if (first.edge_lengths.size() != second.edge_lengths.size()) {
    throw Error(ErrorCode::CountMismatch, "zigzags have different edge counts");
  }
  double r = 0.0;
  for (std::size_t i = 0; i < first.edge_lengths.size(); ++i) {
    r = std::max(r, std::abs(first.edge_lengths[i] - second.edge_lengths[i]));
  }
  return r;
}

inline double conjugacy_residual(const OrthodiskPair& pair) { return conjugacy_residual(pair.gdh, pair.inv); }

inline OrthodiskPair make_pair(Zigzag gdh, Zigzag inv) {
  const double r = conjugacy_residual(gdh, inv);
  return {std::move(gdh), std::move(inv), r};
}

/// Corresponding edges carry opposite slopes.
inline bool opposite_classes(const Zigzag& first, const Zigzag& second) {
  return first.edge_lengths.size() == second.edge_lengths.size() && first.start_slope == -second.start_slope;
}

}  // namespace scherk
