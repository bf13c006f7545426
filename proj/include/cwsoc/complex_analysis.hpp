#pragma once

// Complex-analytic building blocks for the law of (S_n, T_n): principal
// logarithm, principal powers, the complex Gaussian integral and the
// characteristic functions built from them.

#include <cmath>
#include <complex>
#include <numbers>

#include "cwsoc/errors.hpp"

namespace cwsoc {

using ComplexValue = std::complex<double>;

/// Principal logarithm on C \ (-inf, 0] by the half-angle form
///   Log z = ln|z| + 2i arctan(y / (x + |z|)).
/// For x < 0 the quotient is evaluated as (|z| - x) / y, the same number
/// without the cancellation in x + |z|.
inline ComplexValue principal_log(ComplexValue z) {
  const double x = z.real();
  const double y = z.imag();
  if (!std::isfinite(x) || !std::isfinite(y)) throw DomainError("principal_log: non-finite argument");
  if (y == 0.0 && x <= 0.0) throw DomainError("principal_log: argument on the branch cut (-inf, 0]");
  const double r = std::hypot(x, y);
  const double ratio = x >= 0.0 ? y / (x + r) : (r - x) / y;
  return {std::log(r), 2.0 * std::atan(ratio)};
}

/// z^a = exp(a Log z).
inline ComplexValue complex_pow(ComplexValue z, ComplexValue a) { return std::exp(a * principal_log(z)); }

/// Integral over the real line of exp(i t x - zeta x^2 / 2) for Re zeta > 0:
///   sqrt(2 pi / Re zeta) exp(-t^2 / (2 zeta)) (1 + i Im zeta / Re zeta)^(-1/2).
inline ComplexValue complex_gaussian_integral(double t, ComplexValue zeta) {
  const double a = zeta.real();
  if (!(a > 0.0)) throw DomainError("complex_gaussian_integral: requires Re(zeta) > 0");
  const ComplexValue shear = complex_pow({1.0, zeta.imag() / a}, -0.5);
  return std::sqrt(2.0 * std::numbers::pi / a) * std::exp(-t * t / (2.0 * zeta)) * shear;
}

/// Characteristic function (1 - i scale u)^(-shape) of Gamma(shape, scale).
inline ComplexValue gamma_law_cf(double u, double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0)) throw DomainError("gamma_law_cf: shape and scale must be positive");
  return complex_pow({1.0, -scale * u}, -shape);
}

/// Characteristic function of the n-fold convolution of the law of (Z, Z^2),
/// Z ~ N(0, 1):
///   Phi_n(u, v) = exp(-(n/2) (u^2 / (1 - 2iv) + Log(1 - 2iv))).
/// Accepts real n so that Phi_1 and fractional orders share the formula.
inline ComplexValue char_fn(double u, double v, double n) {
  const ComplexValue w{1.0, -2.0 * v};
  return std::exp(-0.5 * n * (u * u / w + principal_log(w)));
}

}  // namespace cwsoc
