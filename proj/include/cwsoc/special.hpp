#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "cwsoc/errors.hpp"

namespace cwsoc {

namespace detail {

// Lanczos approximation, g = 7, nine terms.
inline constexpr double kLanczosG = 7.0;
inline constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993227684700473478,  676.520368121885098567009190444019,
    -1259.13921672240287047156078755283, 771.3234287776530788486528258894,
    -176.61502916214059906584551354,     12.507343278686904814458936853,
    -0.13857109526572011689554707,       9.984369578019570859563e-6,
    1.50563273514931155834e-7};

inline double lanczos_sum(double zm1) {
  double x = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) x += kLanczos[i] / (zm1 + static_cast<double>(i));
  return x;
}

}  // namespace detail

/// Gamma function for z > 0.
inline double gamma_fn(double z) {
  if (!(z > 0.0)) throw DomainError("gamma_fn: argument must be positive");
  if (z < 0.5) {
    // Reflection keeps the Lanczos sum on its accurate half-plane.
    return std::numbers::pi / (std::sin(std::numbers::pi * z) * gamma_fn(1.0 - z));
  }
  const double zm1 = z - 1.0;
  const double t = zm1 + detail::kLanczosG + 0.5;
  // Split the power so arguments up to ~171 do not overflow early.
  const double half_pow = std::pow(t, 0.5 * (zm1 + 0.5));
  return std::sqrt(2.0 * std::numbers::pi) * half_pow * (half_pow * std::exp(-t)) *
         detail::lanczos_sum(zm1);
}

/// ln Gamma(z) for z > 0.
inline double log_gamma(double z) {
  if (!(z > 0.0)) throw DomainError("log_gamma: argument must be positive");
  if (z < 0.5) {
    return std::log(std::numbers::pi / std::sin(std::numbers::pi * z)) - log_gamma(1.0 - z);
  }
  const double zm1 = z - 1.0;
  const double t = zm1 + detail::kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (zm1 + 0.5) * std::log(t) - t +
         std::log(detail::lanczos_sum(zm1));
}

namespace detail {

inline double incomplete_gamma_prefactor(double a, double x) {
  return std::exp(a * std::log(x) - x - log_gamma(a));
}

// Lower regularized P(a, x) by its power series; converges fast for x < a + 1.
inline double lower_gamma_series(double a, double x) {
  double ap = a;
  double term = 1.0 / a;
  double sum = term;
  for (int i = 0; i < 1000; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * std::numeric_limits<double>::epsilon()) break;
  }
  return sum * incomplete_gamma_prefactor(a, x);
}

// Upper regularized Q(a, x) by modified Lentz on the Legendre continued fraction.
inline double upper_gamma_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < std::numeric_limits<double>::epsilon()) break;
  }
  return incomplete_gamma_prefactor(a, x) * h;
}

}  // namespace detail

/// Regularized lower incomplete gamma P(a, x).
inline double gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw DomainError("gamma_p: requires a > 0 and x >= 0");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return detail::lower_gamma_series(a, x);
  return 1.0 - detail::upper_gamma_fraction(a, x);
}

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), accurate in the tail.
inline double gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw DomainError("gamma_q: requires a > 0 and x >= 0");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - detail::lower_gamma_series(a, x);
  return detail::upper_gamma_fraction(a, x);
}

}  // namespace cwsoc
