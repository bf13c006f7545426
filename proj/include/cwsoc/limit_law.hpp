#pragma once

// The quartic law C exp(-x^4 / (4 sigma^4)) dx, limit of S_n / n^(3/4).
//
// With G = X^4 / (4 sigma^4), |X| has the law of (4 sigma^4 G)^(1/4) with
// G ~ Gamma(1/4, 1). The CDF, the sampler and the moments all follow from
// that change of variables.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include "cwsoc/errors.hpp"
#include "cwsoc/rng.hpp"
#include "cwsoc/special.hpp"

namespace cwsoc {

/// Integral of exp(-y^4 / (4 sigma^4)) over the real line: (sigma / sqrt 2) Gamma(1/4).
inline double quartic_normalizer(double sigma) {
  if (!(sigma > 0.0)) throw DomainError("quartic_normalizer: sigma must be positive");
  return sigma / std::numbers::sqrt2 * gamma_fn(0.25);
}

class QuarticLaw {
 public:
  explicit QuarticLaw(double sigma = 1.0) : sigma_(sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("QuarticLaw: sigma must be positive");
    log_normalizer_ = std::log(quartic_normalizer(sigma));
  }

  double sigma() const { return sigma_; }
  double log_normalizer() const { return log_normalizer_; }
  double normalizer() const { return std::exp(log_normalizer_); }

  double log_density(double x) const {
    const double r = x / sigma_;
    const double r2 = r * r;
    return -0.25 * r2 * r2 - log_normalizer_;
  }

  double density(double x) const { return std::exp(log_density(x)); }

  double cdf(double x) const {
    if (std::isnan(x)) throw DomainError("QuarticLaw::cdf: NaN argument");
    if (x >= 0.0) return 1.0 - upper_tail(x);
    return upper_tail(-x);
  }

  /// P(X > x) for x >= 0, evaluated without cancellation.
  double upper_tail(double x) const {
    if (std::isinf(x)) return 0.0;
    return 0.5 * gamma_q(0.25, gamma_argument(x));
  }

  /// Inverse CDF by safeguarded Newton iteration inside a bisection bracket.
  double quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("QuarticLaw::quantile: p must lie in (0, 1)");
    if (p == 0.5) return 0.0;
    if (p < 0.5) return -tail_inverse(p);
    return tail_inverse(1.0 - p);
  }

  double sample(Rng& rng) const {
    const double g = rng.gamma(0.25);
    return sample_from(g, rng.uniform() < 0.5);
  }

  /// Deterministic part of the sampler: X = +-(4 sigma^4 g)^(1/4).
  double sample_from(double gamma_draw, bool negative) const {
    const double s2 = sigma_ * sigma_;
    const double mag = std::sqrt(std::sqrt(4.0 * s2 * s2 * gamma_draw));
    return negative ? -mag : mag;
  }

  /// E[X^(2m)] = (4 sigma^4)^(m/2) Gamma((2m + 1)/4) / Gamma(1/4).
  double even_moment(unsigned m) const {
    if (m == 0) throw DomainError("QuarticLaw::even_moment: m must be at least 1");
    const double dm = static_cast<double>(m);
    const double s2 = sigma_ * sigma_;
    return std::exp(0.5 * dm * std::log(4.0 * s2 * s2) + log_gamma((2.0 * dm + 1.0) / 4.0) -
                    log_gamma(0.25));
  }

  /// Odd moments vanish by symmetry.
  double odd_moment(unsigned) const { return 0.0; }

 private:
  double gamma_argument(double x) const {
    const double r = x / sigma_;
    const double r2 = r * r;
    return 0.25 * r2 * r2;
  }

  // Solves upper_tail(x) = q for q in (0, 1/2).
  double tail_inverse(double q) const {
    double lo = 0.0;
    double hi = sigma_;
    while (upper_tail(hi) > q) {
      lo = hi;
      hi *= 2.0;
    }
    double x = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
      const double f = upper_tail(x) - q;
      if (f == 0.0) return x;
      if (f > 0.0)
        lo = x;
      else
        hi = x;
      const double dens = density(x);
      double next = dens > 0.0 ? x + f / dens : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, x) ||
          hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, hi))
        return next;
      x = next;
    }
    return x;
  }

  double sigma_;
  double log_normalizer_;
};

}  // namespace cwsoc
