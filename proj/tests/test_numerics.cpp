#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "scherk/numerics.hpp"

using namespace scherk;

namespace {

EdgeIntegrandSpec constant_spec(double alpha, double beta) {
  return {{alpha, beta}, [](const EdgePoint&) { return Complex(1.0, 0.0); }};
}

}  // namespace

TEST(Integrate, KronrodIsExactOnPolynomials) {
  auto f = [](double x) { return std::pow(x, 21) - 3.0 * x * x + 1.0; };
  const double exact = 1.0 / 22.0 - 1.0 + 1.0;
  EXPECT_NEAR(integrate<double>(f, 0.0, 1.0), exact, 1e-14);
}

TEST(Integrate, NonFiniteIntegrandIsReported) {
  auto f = [](double x) { return 1.0 / (x - 0.5); };
  try {
    integrate<double>(f, 0.0, 1.0);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_TRUE(e.code() == ErrorCode::SingularOnPath || e.code() == ErrorCode::NoConvergence);
  }
}

TEST(Integrate, BudgetExhaustionIsNoConvergence) {
  QuadratureOptions opts;
  opts.max_intervals = 3;
  opts.rel_tol = 1e-15;
  auto f = [](double x) { return std::sin(200.0 * x) * std::exp(x); };
  try {
    integrate<double>(f, 0.0, 10.0, opts);
    FAIL() << "expected NO_CONVERGENCE";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoConvergence);
  }
}

TEST(EdgeIntegral, SqrtRatioAgainstSimpsonOracle) {
  // Oracle: after t = sin^2 u, (t/(1-t))^(1/2) dt = 2 sin^2 u du.
  const double oracle = oracle::simpson([](double u) { return 2.0 * std::sin(u) * std::sin(u); }, 0.0,
                                        0.5 * kPi, 2000);
  EXPECT_NEAR(oracle, 1.5707963267948966, 1e-12);
  const Complex value = edge_integral(constant_spec(0.5, -0.5), 0.0, 1.0);
  EXPECT_NEAR(value.real(), oracle, 1e-10);
  EXPECT_NEAR(value.imag(), 0.0, 1e-15);
}

TEST(EdgeIntegral, ExamplesFromContract) {
  EXPECT_NEAR(edge_integral(constant_spec(0.0, 0.0), 0.0, 1.0).real(), 1.0, 1e-14);
  EXPECT_NEAR(edge_integral(constant_spec(-0.5, 0.5), 0.0, 1.0).real(), kPi / 2.0, 1e-10);
}

TEST(EdgeIntegral, GeneralExponentsMatchBetaFunction) {
  // B(1.3, 0.75) via lgamma.
  const double alpha = 0.3, beta = -0.25;
  const double exact = std::exp(std::lgamma(1 + alpha) + std::lgamma(1 + beta) - std::lgamma(2 + alpha + beta));
  const Complex value = edge_integral(constant_spec(alpha, beta), 0.0, 1.0);
  EXPECT_NEAR(value.real(), exact, 1e-9);
}

TEST(EdgeIntegral, RejectsNonIntegrableExponent) {
  try {
    edge_integral(constant_spec(-1.0, 0.0), 0.0, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonIntegrable);
  }
}

TEST(EdgeIntegral, ReversalWithSwappedExponentsFlipsSign) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const std::pair<double, double> exps[] = {{0.5, -0.5}, {-0.5, 0.0}, {0.5, 0.5}, {0.3, -0.6}};
  for (int trial = 0; trial < 8; ++trial) {
    const Complex c0(coef(rng), coef(rng)), c1(coef(rng), coef(rng)), c2(coef(rng), coef(rng));
    const Complex z0(coef(rng), coef(rng)), z1(coef(rng) + 2.0, coef(rng));
    auto smooth = [=](Complex z) { return c0 + c1 * z + c2 * std::exp(z); };
    for (auto [alpha, beta] : exps) {
      EdgeIntegrandSpec forward{{alpha, beta}, [&](const EdgePoint& p) { return smooth(p.z); }};
      EdgeIntegrandSpec backward{{beta, alpha}, [&](const EdgePoint& p) { return smooth(p.z); }};
      const Complex a = edge_integral(forward, z0, z1);
      const Complex b = edge_integral(backward, z1, z0);
      EXPECT_LT(std::abs(a + b), 1e-9 * std::max(1.0, std::abs(a)));
    }
  }
}

TEST(LatticeSum, ClosedFormsAndExamples) {
  EXPECT_NEAR(lattice_sum({0.5, 1, Truncation::limit()}), 0.0, 1e-15);
  // pi*cot(0.3*pi) = 2.28250066850...; the commonly quoted 2.2825024 agrees only to 2e-6.
  EXPECT_NEAR(lattice_sum({0.3, 1, Truncation::limit()}), 2.2825006685, 1e-9);
  EXPECT_NEAR(lattice_sum({0.3, 1, Truncation::limit()}), 2.2825024, 2e-6);
  EXPECT_NEAR(lattice_sum({0.0, 2, Truncation::limit()}), 3.2898681, 1e-7);
}

TEST(LatticeSum, RichardsonOracleForCotangent) {
  // The symmetric truncation converges like c/M; extrapolate from the truncations.
  const double s1 = lattice_sum({0.3, 1, Truncation::finite(4000)});
  const double s2 = lattice_sum({0.3, 1, Truncation::finite(8000)});
  EXPECT_NEAR(oracle::richardson_1(s1, s2), lattice_sum({0.3, 1, Truncation::limit()}), 1e-7);
  EXPECT_NEAR(oracle::richardson_1(s1, s2), 2.2825006685, 1e-7);
}

TEST(LatticeSum, BaselOracleForSelfTerm) {
  double basel = 0.0;
  for (int k = 200000; k >= 1; --k) basel += 2.0 / (double(k) * k);
  basel += 2.0 / 200000.0;  // tail of sum 2/k^2 beyond K
  EXPECT_NEAR(lattice_sum({0.0, 2, Truncation::limit()}), basel, 1e-9);
  EXPECT_NEAR(lattice_sum({0.0, 2, Truncation::finite(200000)}), basel - 2.0 / 200000.0, 1e-9);
}

TEST(LatticeSum, DivergentAtIntegerForPowerOne) {
  try {
    lattice_sum({2.0, 1, Truncation::finite(10)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Divergent);
  }
}

TEST(LatticeSum, TruncationsAreAntisymmetric) {
  for (int m : {1, 3, 10, 57}) {
    for (double x : {0.1, 0.25, 0.3, 0.77, 1.4}) {
      EXPECT_NEAR(lattice_sum({x, 1, Truncation::finite(m)}), -lattice_sum({-x, 1, Truncation::finite(m)}), 1e-13);
    }
  }
}

TEST(LatticeSum, TruncationErrorDecaysLikeOneOverM) {
  for (double x : {0.1, 0.25, 0.3}) {
    const double exact = lattice_sum({x, 1, Truncation::limit()});
    double previous = 0.0;
    for (int m : {100, 200, 400, 800}) {
      const double err = std::abs(lattice_sum({x, 1, Truncation::finite(m)}) - exact);
      // M * error approaches 2|x|.
      EXPECT_NEAR(m * err, 2.0 * x, 0.05 * x);
      if (previous > 0.0) EXPECT_NEAR(previous / err, 2.0, 0.05);
      previous = err;
    }
  }
}

TEST(ContourIntegral, ResidueOfOneOverZ) {
  auto f = [](Complex z) { return 1.0 / z; };
  const auto circle = circle_polyline(0.0, 1.0, 64);
  const Complex value = contour_integral(f, std::span<const Complex>(circle), 1e-12);
  EXPECT_NEAR(value.real(), 0.0, 1e-11);
  EXPECT_NEAR(value.imag(), 2.0 * kPi, 1e-11);
}

TEST(ContourIntegral, TrivialPaths) {
  auto one = [](Complex) { return Complex(1.0); };
  auto id = [](Complex z) { return z; };
  const Complex a = contour_integral(one, {Complex(0.0), Complex(1.0, 1.0)});
  EXPECT_NEAR(std::abs(a - Complex(1.0, 1.0)), 0.0, 1e-14);
  const Complex b = contour_integral(id, {Complex(0.0), Complex(2.0)});
  EXPECT_NEAR(std::abs(b - Complex(2.0)), 0.0, 1e-14);
}

TEST(ContourIntegral, ExactDerivativeOverClosedPolylineVanishes) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Complex> path;
    for (int i = 0; i < 7; ++i) path.emplace_back(u(rng), u(rng));
    path.push_back(path.front());
    // d/dz (z^3 e^z) = (3 z^2 + z^3) e^z
    auto f = [](Complex z) { return (3.0 * z * z + z * z * z) * std::exp(z); };
    EXPECT_LT(std::abs(contour_integral(f, std::span<const Complex>(path), 1e-12)), 1e-9);
  }
}

TEST(ContourIntegral, SingularOnPath) {
  auto f = [](Complex z) { return 1.0 / (z - Complex(0.5, 0.0)); };
  try {
    // The GK centre node lands exactly on the pole.
    contour_integral(f, {Complex(0.0), Complex(1.0)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularOnPath);
  }
}

TEST(ContourIntegral, EndpointSingularMode) {
  // integral_0^1 z^(-1/2) dz = 2
  auto f = [](Complex z) { return 1.0 / std::sqrt(z); };
  const Complex v = contour_integral(f, {Complex(0.0), Complex(1.0)}, 1e-12, true);
  EXPECT_NEAR(v.real(), 2.0, 1e-11);
}

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  for (int n : {1, 2, 5, 12, 48}) {
    const GaussRule r = gauss_legendre(n);
    double w = 0.0;
    for (double x : r.weights) w += x;
    EXPECT_NEAR(w, 2.0, 1e-14);
    for (int k = 0; k < 2 * n; k += 2) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += r.weights[i] * std::pow(r.nodes[i], k);
      EXPECT_NEAR(s, 2.0 / (k + 1), 1e-13) << n << " " << k;
    }
  }
  EXPECT_THROW(gauss_legendre(0), Error);
}
