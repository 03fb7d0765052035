#include <gtest/gtest.h>

#include <random>

#include "scherk/beltrami.hpp"

using namespace scherk;

namespace {

// Uniform samples of a rectangle kept a margin away from its sides.
std::vector<Complex> samples_in(double x0, double x1, double y0, double y1, int n, double margin, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> ux(x0 + margin, x1 - margin), uy(y0 + margin, y1 - margin);
  std::vector<Complex> out;
  for (int i = 0; i < n; ++i) out.emplace_back(ux(rng), uy(rng));
  return out;
}

std::vector<Complex> collar_samples(const PushParams& p, int n, double margin, unsigned seed) {
  std::vector<Complex> out;
  const double xs[] = {-p.a - p.delta, -p.a, p.a, p.a + p.delta};
  for (int i = 0; i < 3; ++i) {
    for (double y0 : {-p.b, 0.0}) {
      auto s = samples_in(xs[i], xs[i + 1], y0, y0 + p.b, n, margin, seed++);
      out.insert(out.end(), s.begin(), s.end());
    }
  }
  return out;
}

}  // namespace

TEST(PushMap, Examples) {
  const PushParams p{0.7, 1.3, 0.4};
  for (double eps : {0.01, 0.3, -0.2}) {
    const Complex w = push_map(Complex(0.0, p.b / 2), eps, p);
    EXPECT_NEAR(w.real(), 0.0, 1e-15);
    EXPECT_NEAR(w.imag(), eps + (p.b - eps) / 2, 1e-15);
    EXPECT_EQ(push_map(Complex(0.3, p.b), eps, p), Complex(0.3, p.b));
    EXPECT_EQ(push_map(Complex(0.3, -p.b), eps, p), Complex(0.3, -p.b));
  }
  try {
    push_map(0.0, 1.3, p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EpsTooLarge);
  }
}

TEST(PushMap, ContinuousAcrossInterfaces) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.1, 2.0), v(0.05, 0.95);
  const double t = 1e-13;
  for (int trial = 0; trial < 200; ++trial) {
    const PushParams p{u(rng), u(rng), u(rng)};
    const double eps = (2.0 * v(rng) - 1.0) * p.b;
    const double y = v(rng) * p.b;
    for (double yy : {y, -y}) {
      for (double x : {-p.a, p.a}) {
        const Complex l = push_map(Complex(x - t, yy), eps, p), r = push_map(Complex(x + t, yy), eps, p);
        EXPECT_LT(std::abs(l - r), 1e-12);
      }
      for (double x : {-p.a - p.delta, p.a + p.delta}) {
        EXPECT_LT(std::abs(push_map(Complex(x, yy), eps, p) - Complex(x, yy)), 1e-12);
      }
    }
    const double x = (2.0 * v(rng) - 1.0) * (p.a + p.delta);
    EXPECT_LT(std::abs(push_map(Complex(x, t), eps, p) - push_map(Complex(x, -t), eps, p)), 1e-12);
  }
}

TEST(PushMap, IdentityOutsideCollar) {
  const PushParams p{1.0, 0.5, 0.25};
  for (Complex z : {Complex(1.3, 0.1), Complex(0.0, 0.6), Complex(-2.0, -2.0)}) {
    EXPECT_EQ(push_map(z, 0.2, p), z);
  }
}

TEST(NuDot, Examples) {
  const PushParams unit{1.0, 1.0, 1.0};
  EXPECT_EQ(nu_dot(Complex(0.2, 0.4), PushParams{1.0, 2.0, 1.0}), Complex(0.25));
  EXPECT_EQ(nu_dot(Complex(0.2, -0.4), PushParams{1.0, 2.0, 1.0}), Complex(-0.25));
  const Complex r3 = nu_dot(Complex(-1.5, 0.5), unit);
  EXPECT_NEAR(r3.real(), 0.25, 1e-15);
  EXPECT_NEAR(r3.imag(), 0.25, 1e-15);
  EXPECT_EQ(nu_dot(Complex(3.0, 0.0), unit), Complex(0.0));
}

TEST(NuDot, FiniteDifferenceOracle) {
  const PushParams p{0.8, 0.6, 0.5};
  const auto s = collar_samples(p, 17, 1e-3, 11);
  ASSERT_EQ(s.size(), 102u);
  EXPECT_LT(finite_difference_check(p, s, 1e-6, 1e-5), 1e-6);
}

TEST(NuDot, OutsideSamplesHaveZeroError) {
  const PushParams p{0.8, 0.6, 0.5};
  const std::vector<Complex> s = {Complex(2.0, 0.1), Complex(0.0, 1.0), Complex(-1.5, -0.9)};
  EXPECT_EQ(finite_difference_check(p, s, 1e-6), 0.0);
}

TEST(NuDot, SecondOrderInPushStep) {
  // The push is bilinear in each region, so spatial differences are exact and
  // the remaining error is the central difference in eps.
  const PushParams p{0.8, 0.6, 0.5};
  const auto s = collar_samples(p, 10, 1e-3, 23);
  const double e1 = finite_difference_check(p, s, 0.02);
  const double e2 = finite_difference_check(p, s, 0.01);
  const double e3 = finite_difference_check(p, s, 0.005);
  EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.1);
  EXPECT_NEAR(std::log2(e2 / e3), 2.0, 0.1);
}

TEST(NuDot, RejectsInterfaceSamples) {
  const PushParams p{0.8, 0.6, 0.5};
  const std::vector<Complex> s = {Complex(-0.8 + 5e-5, 0.3)};
  try {
    finite_difference_check(p, s, 1e-6, 1e-5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SampleTooCloseToInterface);
  }
}

TEST(Cancellation, ExactAtCorner) {
  const PushParams p{0.0, 0.7, 0.45};
  auto s = samples_in(-p.delta, 0.0, 0.0, p.b, 200, 1e-9, 31);
  const auto s5 = samples_in(-p.delta, 0.0, -p.b, 0.0, 200, 1e-9, 37);
  s.insert(s.end(), s5.begin(), s5.end());
  EXPECT_LT(cancellation_check(p, s), 1e-14);
}

TEST(Cancellation, NegatedCombinationDoublesR3) {
  const PushParams p{0.0, 0.7, 0.45};
  const std::vector<Complex> s = {Complex(-0.2, 0.3)};
  EXPECT_NEAR(cancellation_check_negated(p, s), 2.0 * std::abs(nu_dot(s[0], p)), 1e-14);
}

TEST(Cancellation, SymmetricSamplesCancelPairwise) {
  // Samples paired by the half-turn about the corner.
  const PushParams p{0.0, 1.0, 1.0};
  for (Complex z : {Complex(-0.25, 0.5), Complex(-0.75, -0.5)}) {
    const Complex w = corner_turn(z, p);
    EXPECT_EQ(nu_dot(w, p) + nu_dot(z, p), Complex(0.0));
  }
}

TEST(Cancellation, FailsAwayFromCorner) {
  const PushParams p{0.3, 0.7, 0.45};
  const auto s = samples_in(-p.a - p.delta, -p.a, 0.0, p.b, 20, 1e-9, 41);
  EXPECT_NEAR(cancellation_check(p, s), p.a / (p.b * p.delta), 1e-13);
}

TEST(Pairing, EvenDifferentialsVanish) {
  const PushParams p{0.0, 0.5, 0.5};
  EXPECT_EQ(pair_with_quadratic_differential({}, p, 0.5), Complex(0.0));
  std::mt19937 rng(53);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 8; ++trial) {
    const LocalQuadraticDifferential q{Complex(u(rng), u(rng)) / std::sqrt(2.0), Complex(u(rng), u(rng)) / std::sqrt(2.0)};
    const auto rep = pairing_report(q, p, 0.4);
    EXPECT_LT(std::abs(rep.total), 1e-8);
    EXPECT_GT(std::abs(rep.base), 1e-3);
  }
  const auto rep = pairing_report({1.0, 0.0}, p, 0.4);
  EXPECT_LT(std::abs(rep.total), 1e-8);
  EXPECT_LT(rep.resolution_change, 1e-9);
}

TEST(Pairing, OddTermDoesNotVanish) {
  const PushParams p{0.0, 0.5, 0.5};
  const auto rep = pairing_report({0.0, 0.0, 1.0}, p, 0.4);
  EXPECT_GT(std::abs(rep.total), 1e-2);
  EXPECT_NEAR(std::abs(rep.total - 2.0 * rep.base), 0.0, 1e-9);
}

TEST(SignFlip, DefectShrinksWithCollar) {
  const Complex c2(0.3, -0.2);
  double last = 1.0;
  for (double b : {0.1, 0.05, 0.025}) {
    const double d = sign_flip_defect(b, 1.5, c2);
    EXPECT_LT(d, last);
    EXPECT_LT(d, 3.0 * std::abs(c2) * b / 1.5 * 2.0);
    last = d;
  }
  EXPECT_LT(sign_flip_defect(0.1, 1.5, 0.0), 1e-15);
}
