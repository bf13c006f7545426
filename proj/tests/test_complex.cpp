#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "cwsoc/complex_analysis.hpp"
#include "cwsoc/quadrature.hpp"
#include "cwsoc/rng.hpp"

using namespace cwsoc;
using C = ComplexValue;

namespace {

void expect_close(C a, C b, double tol) {
  EXPECT_NEAR(a.real(), b.real(), tol);
  EXPECT_NEAR(a.imag(), b.imag(), tol);
}

// Direct quadrature over |x| <= 12 of exp(i t x - zeta x^2 / 2).
C gaussian_quadrature(double t, C zeta) {
  auto f = [&](double x) { return std::exp(C(0.0, t * x) - 0.5 * zeta * x * x); };
  return quad::integrate_panels(f, -12.0, 12.0, 0.25, {1e-13, 1e-13}).value;
}

}  // namespace

TEST(PrincipalLog, Examples) {
  expect_close(principal_log(1.0), 0.0, 1e-15);
  expect_close(principal_log(C(0, 1)), C(0, std::numbers::pi / 2), 1e-15);
  expect_close(principal_log(C(1, -2)), C(0.5 * std::log(5.0), std::atan2(-2.0, 1.0)), 1e-14);
  EXPECT_NEAR(principal_log(C(1, -2)).imag(), -std::atan(2.0), 1e-14);
}

TEST(PrincipalLog, BranchCutAndNonFinite) {
  EXPECT_THROW(principal_log(0.0), DomainError);
  EXPECT_THROW(principal_log(-1.0), DomainError);
  EXPECT_THROW(principal_log(C(-3.0, 0.0)), DomainError);
  EXPECT_THROW(principal_log(C(std::nan(""), 1.0)), DomainError);
  // Just above and below the cut the argument approaches +-pi.
  EXPECT_NEAR(principal_log(C(-1.0, 1e-300)).imag(), std::numbers::pi, 1e-15);
  EXPECT_NEAR(principal_log(C(-1.0, -1e-300)).imag(), -std::numbers::pi, 1e-15);
}

TEST(PrincipalLog, AgreesWithPolarOracleOnRandomPoints) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double r = std::exp(6.0 * rng.uniform() - 3.0);
    const double theta = std::numbers::pi * (2.0 * rng.uniform() - 1.0);
    const C z = std::polar(r, theta);
    if (z.imag() == 0.0 && z.real() <= 0.0) continue;
    const C got = principal_log(z);
    EXPECT_NEAR(got.real(), std::log(std::abs(z)), 1e-13);
    EXPECT_NEAR(got.imag(), std::atan2(z.imag(), z.real()), 1e-13);
  }
}

TEST(ComplexPow, Examples) {
  const C z(0.3, -1.7);
  expect_close(complex_pow(z, 1.0), z, 1e-15);
  expect_close(complex_pow(z, 0.0), 1.0, 0.0);
  expect_close(complex_pow(C(1, 1), -0.5), std::pow(2.0, -0.25) * std::exp(C(0, -std::numbers::pi / 8)), 1e-14);
  EXPECT_THROW(complex_pow(-2.0, 0.5), DomainError);
}

TEST(GaussianIntegral, ClosedFormExamples) {
  const double root2pi = std::sqrt(2 * std::numbers::pi);
  expect_close(complex_gaussian_integral(0.0, 1.0), root2pi, 1e-15);
  expect_close(complex_gaussian_integral(1.0, 1.0), root2pi * std::exp(-0.5), 1e-15);
  EXPECT_THROW(complex_gaussian_integral(0.0, C(0.0, 1.0)), DomainError);
  EXPECT_THROW(complex_gaussian_integral(0.0, C(-1.0, 0.0)), DomainError);
}

TEST(GaussianIntegral, MatchesQuadratureOnProbeGrid) {
  for (double t : {0.0, 1.0, 2.5}) {
    for (C zeta : {C(1, 0), C(1, 2), C(1, -2), C(0.2, 3)}) {
      // For Re zeta = 0.2 the envelope at |x| = 12 is e^-14.4, so that point
      // is checked against a wider window below.
      if (zeta.real() < 1.0) continue;
      expect_close(complex_gaussian_integral(t, zeta), gaussian_quadrature(t, zeta), 1e-8);
    }
  }
}

TEST(GaussianIntegral, SmallRealPartNeedsWiderWindow) {
  const C zeta(0.2, 3);
  for (double t : {0.0, 1.0, 2.5}) {
    auto f = [&](double x) { return std::exp(C(0.0, t * x) - 0.5 * zeta * x * x); };
    const C q = quad::integrate_panels(f, -25.0, 25.0, 0.125, {1e-13, 1e-13}).value;
    expect_close(complex_gaussian_integral(t, zeta), q, 1e-8);
  }
}

TEST(GammaLawCf, Examples) {
  expect_close(gamma_law_cf(0.0, 0.25, 3.0), 1.0, 1e-15);
  for (double u : {-4.0, -0.3, 0.7, 10.0}) {
    const double theta = 1.7;
    expect_close(gamma_law_cf(u, 1.0, theta), 1.0 / C(1.0, -theta * u), 1e-14);
    for (double k : {0.25, 2.5})
      EXPECT_NEAR(std::abs(gamma_law_cf(u, k, theta)), std::pow(1 + theta * theta * u * u, -k / 2), 1e-14);
  }
  EXPECT_THROW(gamma_law_cf(1.0, 0.0, 1.0), DomainError);
  EXPECT_THROW(gamma_law_cf(1.0, 1.0, -1.0), DomainError);
}

TEST(CharFn, Examples) {
  for (double n : {1.0, 5.0, 12.0}) {
    expect_close(char_fn(0, 0, n), 1.0, 0.0);
    for (double u : {0.3, 1.0, 2.0}) expect_close(char_fn(u, 0, n), std::exp(-n * u * u / 2), 1e-15);
  }
  expect_close(char_fn(0, 0.5, 2), C(0.5, 0.5), 1e-15);
}

TEST(CharFn, ModulusIdentityAndIntegerPowers) {
  Rng rng(4);
  for (int i = 0; i < 300; ++i) {
    const double u = 4.0 * rng.normal();
    const double v = 4.0 * rng.normal();
    const double q = 1 + 4 * v * v;
    for (int n = 1; n <= 10; ++n) {
      EXPECT_NEAR(std::abs(char_fn(u, v, n)), std::exp(-n * u * u / (2 * q)) * std::pow(q, -n / 4.0), 1e-14);
      C power = 1.0;
      for (int k = 0; k < n; ++k) power *= char_fn(u, v, 1);
      expect_close(char_fn(u, v, n), power, 1e-10);
    }
  }
}

// Phi_1 is the CF of (Z, Z^2); check it against direct quadrature over the
// Gaussian density.
TEST(CharFn, MatchesExpectationOverGaussian) {
  for (auto [u, v] : {std::pair{0.4, 0.1}, std::pair{-1.2, 0.7}, std::pair{2.0, -0.3}}) {
    auto f = [u = u, v = v](double z) {
      return std::exp(C(-0.5 * z * z, u * z + v * z * z)) / std::sqrt(2 * std::numbers::pi);
    };
    const C q = quad::integrate_panels(f, -12.0, 12.0, 0.25, {1e-14, 1e-14}).value;
    expect_close(char_fn(u, v, 1), q, 1e-12);
  }
}
