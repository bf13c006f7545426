#pragma once

// Gaussian Curie-Weiss model with self-tuned temperature: energies, the
// (S_n, T_n) statistics and their exact joint law for n >= 5, and the
// Laplace-analysis functions psi and phi. Everything is a pure evaluation
// and every density is unnormalized and returned as a logarithm; the
// normalizers grow like n^(n/2) and only ever appear as logs.

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "cwsoc/errors.hpp"

namespace cwsoc {

struct ModelParams {
  std::size_t n = 1;
  double sigma = 1.0;

  ModelParams() = default;
  ModelParams(std::size_t n_, double sigma_) : n(n_), sigma(sigma_) {
    if (n == 0) throw DomainError("ModelParams: n must be at least 1");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("ModelParams: sigma must be positive");
  }

  double dn() const { return static_cast<double>(n); }
};

/// One point (x_1, ..., x_n) of the state space.
using Configuration = std::vector<double>;

/// (S_n, T_n) = (sum x_i, sum x_i^2).
struct SumStats {
  double s = 0.0;
  double t = 0.0;
};

/// Exponents of the rescaling (S_n / n^alpha, T_n / n^beta).
struct ScalingExponents {
  double alpha = 0.75;
  double beta = 1.0;

  ScalingExponents() = default;
  ScalingExponents(double a, double b) : alpha(a), beta(b) {
    if (!(a > 0.0 && a <= 1.0) || !(b > 0.0 && b <= 1.0))
      throw DomainError("ScalingExponents: alpha and beta must lie in (0, 1]");
  }
};

/// Argument of psi and phi; D+ = { y > x >= 0 }.
struct RescaledPoint {
  double x = 0.0;
  double y = 1.0;

  bool in_domain() const { return x >= 0.0 && y > x; }
};

namespace detail {

// Left-to-right compensated accumulator (Kahan-Babuska-Neumaier).
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline void require_order_five(std::size_t n, const char* who) {
  if (n < 5)
    throw UnsupportedOrderError(std::string(who) + ": closed-form law of (S_n, T_n) requires n >= 5");
}

}  // namespace detail

inline SumStats sum_stats(std::span<const double> config) {
  if (config.empty()) throw DomainError("sum_stats: empty configuration");
  detail::CompensatedSum s, t;
  for (double x : config) {
    s.add(x);
    t.add(x * x);
  }
  return {s.value(), t.value()};
}

/// s^2 / (2t): log of the tilt exp(S_n^2 / (2 T_n)). Lies in [0, n/2].
inline double log_tilt_weight(const SumStats& stats) {
  if (!(stats.t > 0.0)) throw DomainError("log_tilt_weight: t must be positive");
  return stats.s * stats.s / (2.0 * stats.t);
}

/// (sum x)^2 / (2 sum x^2) for a configuration that is not identically zero.
inline double interaction_energy(std::span<const double> config) {
  const SumStats st = sum_stats(config);
  if (!(st.t > 0.0)) throw DomainError("interaction_energy: all-zero configuration");
  return log_tilt_weight(st);
}

/// Strict support of the (S_n, T_n) law: t > 0 and s^2 < n t.
inline bool in_support(const SumStats& stats, std::size_t n) {
  return stats.t > 0.0 && stats.s * stats.s < static_cast<double>(n) * stats.t;
}

/// log of exp(s^2/2t - t/2sigma^2) (t - s^2/n)^((n-3)/2), the density of
/// (S_n, T_n) under the tilted measure up to its normalizer.
inline double log_joint_density_unnormalized(const SumStats& stats, const ModelParams& params) {
  detail::require_order_five(params.n, "log_joint_density_unnormalized");
  if (!in_support(stats, params.n))
    throw SupportError("log_joint_density_unnormalized: requires t > 0 and s^2 < n t");
  const double n = params.dn();
  const double s2 = stats.s * stats.s;
  const double gap = std::log(stats.t) + std::log1p(-s2 / (n * stats.t));
  return s2 / (2.0 * stats.t) - stats.t / (2.0 * params.sigma * params.sigma) + 0.5 * (n - 3.0) * gap;
}

/// psi(x, y) = (-x/y + y - ln(y - x)) / 2 on D+. Minimum 1/2 at (0, 1).
inline double psi(const RescaledPoint& p) {
  if (!p.in_domain()) throw DomainError("psi: requires y > x >= 0");
  return 0.5 * (-p.x / p.y + p.y - std::log(p.y - p.x));
}

/// phi(x, y) = (y - x)^(-3/2) on D+. Saturates at the largest finite
/// double when the gap is too small to represent the result.
inline double phi_weight(const RescaledPoint& p) {
  if (!p.in_domain()) throw DomainError("phi_weight: requires y > x >= 0");
  const double gap = p.y - p.x;
  const double v = 1.0 / (gap * std::sqrt(gap));
  return std::isfinite(v) ? v : std::numeric_limits<double>::max();
}

/// Maps rescaled coordinates (x, y) = (s / n^alpha, t / n^beta) to the
/// argument (x^2 / n^(2-2 alpha), y / n^(1-beta)) of psi and phi.
inline RescaledPoint rescaled_argument(double x, double y, std::size_t n, const ScalingExponents& exps) {
  const double dn = static_cast<double>(n);
  return {x * x / std::pow(dn, 2.0 - 2.0 * exps.alpha), y / std::pow(dn, 1.0 - exps.beta)};
}

/// -n psi(p) + ln phi(p) at the mapped point p: the log-density of
/// (S_n / n^alpha, T_n / n^beta) up to an n-dependent constant. Stated for
/// sigma = 1; rescale by sigma before calling.
inline double log_rescaled_density_unnormalized(double x, double y, const ModelParams& params,
                                                const ScalingExponents& exps = {}) {
  detail::require_order_five(params.n, "log_rescaled_density_unnormalized");
  if (params.sigma != 1.0)
    throw DomainError("log_rescaled_density_unnormalized: defined for sigma = 1 only");
  const RescaledPoint p = rescaled_argument(x, y, params.n, exps);
  if (!p.in_domain()) throw SupportError("log_rescaled_density_unnormalized: mapped point outside D+");
  return -params.dn() * psi(p) - 1.5 * std::log(p.y - p.x);
}

}  // namespace cwsoc
