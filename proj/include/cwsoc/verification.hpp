#pragma once

// Numerical verification of the exact law of (S_n, T_n) and of the Laplace
// analysis behind the n^(3/4) limit theorem.
//
// Every identity here is checked by two independent routes: a closed form
// against a quadrature, a Fourier inversion against a density, or two
// quadratures of the same constant in different coordinates.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <functional>
#include <future>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cwsoc/complex_analysis.hpp"
#include "cwsoc/errors.hpp"
#include "cwsoc/limit_law.hpp"
#include "cwsoc/model.hpp"
#include "cwsoc/quadrature.hpp"
#include "cwsoc/rng.hpp"
#include "cwsoc/special.hpp"

namespace cwsoc {

// ---------------------------------------------------------------------------
// Check reports

enum class Comparison { Absolute, Relative, AtLeast, Exceeds };

/// One named verification result. `pass` is decided by `comparison`:
///   Absolute:   |value - expected| <= tolerance
///   Relative:   |value - expected| <= tolerance * |expected|
///   AtLeast:    value >= expected
///   Exceeds:    value > expected
struct CheckReport {
  std::string name;
  double value = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string details;
  Comparison comparison = Comparison::Absolute;
};

inline CheckReport make_check(std::string name, double value, double expected, double tolerance,
                              Comparison cmp = Comparison::Absolute, std::string note = {}) {
  CheckReport r{std::move(name), value, expected, tolerance, false, {}, cmp};
  const double diff = std::abs(value - expected);
  switch (cmp) {
    case Comparison::Absolute:
      r.pass = diff <= tolerance;
      r.details = "absolute";
      break;
    case Comparison::Relative:
      r.pass = diff <= tolerance * std::abs(expected);
      r.details = "relative";
      break;
    case Comparison::AtLeast:
      r.pass = value >= expected;
      r.details = "lower bound: value >= expected";
      break;
    case Comparison::Exceeds:
      r.pass = value > expected;
      r.details = "strict lower bound: value > expected";
      break;
  }
  if (!note.empty()) r.details += "; " + note;
  return r;
}

// ---------------------------------------------------------------------------
// Closed-form density of the untilted convolution (sigma = 1)

/// log of (sqrt(2^n pi n) Gamma((n - 1)/2)).
inline double log_convolution_normalizer(std::size_t n) {
  const double dn = static_cast<double>(n);
  return 0.5 * (dn * std::numbers::ln2 + std::log(std::numbers::pi * dn)) + log_gamma(0.5 * (dn - 1.0));
}

/// Density of the n-fold convolution of the law of (Z, Z^2), Z ~ N(0, 1):
///   exp(-y/2) (y - x^2/n)^((n-3)/2) / (sqrt(2^n pi n) Gamma((n-1)/2))
/// on x^2 < n y, zero elsewhere.
inline double density_closed_form(double x, double y, std::size_t n) {
  detail::require_order_five(n, "density_closed_form");
  const double dn = static_cast<double>(n);
  if (!(x * x < dn * y)) return 0.0;
  const double gap = y - x * x / dn;
  return std::exp(-0.5 * y + 0.5 * (dn - 3.0) * std::log(gap) - log_convolution_normalizer(n));
}

/// Total mass of density_closed_form by nested quadrature in (x, y - x^2/n).
inline quad::Result<double> density_total_mass(std::size_t n, double tol = 1e-11) {
  const double dn = static_cast<double>(n);
  quad::Options inner_opt{tol * 1e-2, tol * 1e-2};
  auto inner = [&](double x) {
    auto f = [&](double w) { return density_closed_form(x, x * x / dn + w, n); };
    return quad::integrate_to_infinity(f, 0.0, inner_opt).value;
  };
  return quad::integrate_whole_line(inner, {tol, tol});
}

// ---------------------------------------------------------------------------
// Complex Gaussian integral by quadrature

/// Direct quadrature of the integral of exp(i t x - zeta x^2 / 2), truncated
/// where the Gaussian envelope falls below e^-40 (and never inside |x| < 12).
inline quad::Result<ComplexValue> gaussian_integral_by_quadrature(double t, ComplexValue zeta,
                                                                  double abs_tol = 1e-12) {
  if (!(zeta.real() > 0.0)) throw DomainError("gaussian_integral_by_quadrature: requires Re(zeta) > 0");
  const double half_width = std::max(12.0, std::sqrt(80.0 / zeta.real()));
  auto f = [t, zeta](double x) { return std::exp(ComplexValue{-0.5 * zeta.real() * x * x, t * x - 0.5 * zeta.imag() * x * x}); };
  return quad::integrate_panels(f, -half_width, half_width, 0.5, {abs_tol, 1e-13});
}

// ---------------------------------------------------------------------------
// Fourier inversion of the characteristic function

struct InversionOptions {
  /// |v| below which both the u and v integrals are done by quadrature.
  /// Beyond it the u integral uses the complex Gaussian closed form.
  double core_radius = 8.0;
  /// Truncation radii above this are reported as failures.
  double max_radius = 5e7;
};

struct InversionResult {
  double value = 0.0;         // real part of the inversion integral
  double imag_residue = 0.0;  // |imaginary part|; zero for an exact density
  double truncation_radius = 0.0;
  double error_bound = 0.0;  // truncation bound + quadrature error estimate
  bool ok = false;
  std::string status;
};

namespace detail {

// Coefficient c and exponent q of the truncation bound c V^(-q) on
// (2 pi)^-2 times the integral of |Phi_n| over |v| > V, from
//   integral over u of |Phi_n(u, v)| = sqrt(2 pi / n) (1 + 4 v^2)^(-(n-2)/4)
// and (1 + 4 v^2)^-p <= (2 v)^(-2p).
struct TailBound {
  double coef;
  double exponent;
};

inline TailBound inversion_tail_bound(std::size_t n) {
  const double dn = static_cast<double>(n);
  const double p = (dn - 2.0) / 4.0;
  const double q = 2.0 * p - 1.0;
  const double c = std::sqrt(2.0 * std::numbers::pi / dn) * 2.0 * std::pow(2.0, -2.0 * p) / q /
                   (4.0 * std::numbers::pi * std::numbers::pi);
  return {c, q};
}

}  // namespace detail

/// Bound on the part of the inversion integral discarded beyond |v| = V.
inline double inversion_truncation_error(std::size_t n, double radius) {
  detail::require_order_five(n, "inversion_truncation_error");
  const auto b = detail::inversion_tail_bound(n);
  return b.coef * std::pow(radius, -b.exponent);
}

/// Smallest V whose truncation bound is at most `budget`.
inline double inversion_truncation_radius(std::size_t n, double budget) {
  detail::require_order_five(n, "inversion_truncation_radius");
  const auto b = detail::inversion_tail_bound(n);
  return std::pow(b.coef / budget, 1.0 / b.exponent);
}

/// Density of the n-fold convolution at (x, y) by Fourier inversion:
///   f_n(x, y) = (2 pi)^-2 double integral of exp(-ixu - iyv) Phi_n(u, v).
/// Half of `tol` goes to the v truncation, half to quadrature.
inline InversionResult density_by_inversion(double x, double y, std::size_t n, double tol,
                                            const InversionOptions& opts = {}) {
  detail::require_order_five(n, "density_by_inversion");
  if (!(tol > 0.0)) throw DomainError("density_by_inversion: tol must be positive");
  InversionResult out;
  const double dn = static_cast<double>(n);
  const double scale = 4.0 * std::numbers::pi * std::numbers::pi;

  const double needed = inversion_truncation_radius(n, 0.5 * tol);
  out.truncation_radius = std::max(needed, opts.core_radius);
  if (!(out.truncation_radius <= opts.max_radius)) {
    out.status = "truncation radius " + std::to_string(needed) + " exceeds limit";
    return out;
  }
  const double radius = out.truncation_radius;
  const double core = std::min(opts.core_radius, radius);

  // Per-part absolute budgets in unscaled units.
  const double part_tol = 0.25 * tol * scale;
  const double inner_tol = part_tol * 1e-3 / std::max(1.0, core);
  const double v_rate = std::abs(y) + x * x / dn + 1.0;
  const double v_panel = 4.0 * std::numbers::pi / v_rate;

  // Core: u integrated numerically. Phi_n is even in u.
  auto inner = [&](double v) {
    const double spread = 1.0 + 4.0 * v * v;
    const double u_max = 6.0 * std::sqrt(spread / dn);
    const double u_rate = std::abs(x) + 2.0 * dn * std::abs(v) / spread * u_max + 1.0;
    auto g = [&](double u) { return std::cos(x * u) * char_fn(u, v, dn); };
    return 2.0 * quad::integrate_panels(g, 0.0, u_max, 4.0 * std::numbers::pi / u_rate, {inner_tol, 1e-12}).value;
  };
  auto core_integrand = [&](double v) { return std::exp(ComplexValue{0.0, -y * v}) * inner(v); };
  auto core_part = quad::integrate_panels(core_integrand, -core, core, v_panel, {part_tol, 1e-12});

  // Tail: u integral in closed form.
  auto tail_integrand = [&](double v) {
    const ComplexValue w{1.0, -2.0 * v};
    return std::exp(ComplexValue{0.0, -y * v}) * complex_pow(w, -0.5 * dn) *
           complex_gaussian_integral(-x, dn / w);
  };
  quad::Result<ComplexValue> upper, lower;
  if (radius > core) {
    upper = quad::integrate_panels(tail_integrand, core, radius, v_panel, {part_tol, 1e-12});
    lower = quad::integrate_panels(tail_integrand, -radius, -core, v_panel, {part_tol, 1e-12});
  }

  const ComplexValue total = (core_part.value + upper.value + lower.value) / scale;
  out.value = total.real();
  out.imag_residue = std::abs(total.imag());
  out.error_bound = inversion_truncation_error(n, radius) +
                    (core_part.abs_error + upper.abs_error + lower.abs_error) / scale;
  out.ok = out.error_bound <= tol;
  out.status = out.ok ? "ok" : "quadrature error bound exceeds tolerance";
  return out;
}

// ---------------------------------------------------------------------------
// Normalization constants

/// C_n and Z_n for sigma = 1, related by C_n = Z_n sqrt(2^n pi n) Gamma((n-1)/2).
struct NormalizationEstimate {
  std::size_t n = 0;
  double log_C_n = 0.0;
  double log_Z_n = 0.0;
  double quadrature_error_bound = 0.0;  // on log_C_n
};

/// Integral of exp(-n (psi - 1/2)) phi over rescaled coordinates
/// (s / n^(3/4), t / n), i.e. the Laplace integrand with its peak value
/// e^(-n/2) factored out.
inline quad::Result<double> rescaled_laplace_integral(std::size_t n, double tol = 1e-12) {
  detail::require_order_five(n, "rescaled_laplace_integral");
  const double dn = static_cast<double>(n);
  const double root_n = std::sqrt(dn);
  quad::Options inner_opt{tol * 1e-2, tol * 1e-2};
  auto inner = [&](double xt) {
    const double X = xt * xt / root_n;
    auto f = [&](double w) {
      const RescaledPoint p{X, X + w};
      if (!p.in_domain()) return 0.0;
      return std::exp(-dn * (psi(p) - 0.5) - 1.5 * std::log(p.y - p.x));
    };
    const double split = std::max(1.0 - X, 0.0) + 1.0;
    return quad::integrate(f, 0.0, split, inner_opt).value +
           quad::integrate_to_infinity(f, split, inner_opt).value;
  };
  auto r = quad::integrate_to_infinity(inner, 0.0, {tol, tol});
  r.value *= 2.0;
  r.abs_error *= 2.0;
  return r;
}

inline double log_Z_from_log_C(std::size_t n, double log_C_n) {
  return log_C_n - log_convolution_normalizer(n);
}

/// Estimates log C_n by quadrature in the Laplace coordinates and derives
/// log Z_n. Throws CheckFailure when 0 <= log Z_n <= n/2 fails, since that
/// bound holds for every n.
inline NormalizationEstimate estimate_C_n(std::size_t n, double tol = 1e-12) {
  detail::require_order_five(n, "estimate_C_n");
  const double dn = static_cast<double>(n);
  const auto J = rescaled_laplace_integral(n, tol);
  NormalizationEstimate est;
  est.n = n;
  est.log_C_n = (1.75 + 0.5 * (dn - 3.0)) * std::log(dn) - 0.5 * dn + std::log(J.value);
  est.log_Z_n = log_Z_from_log_C(n, est.log_C_n);
  est.quadrature_error_bound = J.abs_error / J.value;
  if (!(est.log_Z_n >= 0.0 && est.log_Z_n <= 0.5 * dn)) {
    std::ostringstream msg;
    msg << "estimate_C_n: log Z_" << n << " = " << est.log_Z_n << " violates 0 <= log Z_n <= n/2";
    throw CheckFailure(msg.str());
  }
  return est;
}

/// Second route to log C_n: quadrature of exp(log_joint_density_unnormalized)
/// in the original (s, t) coordinates, shifted by its value at (0, n).
inline double log_C_n_direct(std::size_t n, double tol = 1e-12) {
  const ModelParams params(n, 1.0);
  const double dn = static_cast<double>(n);
  const double shift = log_joint_density_unnormalized({0.0, dn}, params);
  quad::Options inner_opt{tol * 1e-2, tol * 1e-2};
  auto inner = [&](double s) {
    const double t_min = s * s / dn;
    auto f = [&](double w) {
      const SumStats st{s, t_min + w};
      if (!in_support(st, n)) return 0.0;
      return std::exp(log_joint_density_unnormalized(st, params) - shift);
    };
    return quad::integrate(f, 0.0, 2.0 * dn, inner_opt).value +
           quad::integrate_to_infinity(f, 2.0 * dn, inner_opt).value;
  };
  const auto r = quad::integrate_to_infinity(inner, 0.0, {tol, tol});
  return shift + std::log(2.0 * r.value);
}

/// Logarithm of sqrt(4 pi / n) e^(-n/2) Gamma(1/4)/sqrt(2) n^(7/4) n^((n-3)/2),
/// the large-n equivalent of C_n.
inline double log_C_n_asymptote(std::size_t n) {
  const double dn = static_cast<double>(n);
  return (1.75 + 0.5 * (dn - 3.0)) * std::log(dn) + 0.5 * std::log(4.0 * std::numbers::pi / dn) -
         0.5 * dn + std::log(quartic_normalizer(1.0));
}

/// C_n over its Laplace asymptote; tends to 1.
inline double laplace_ratio(std::size_t n) {
  return std::exp(estimate_C_n(n).log_C_n - log_C_n_asymptote(n));
}

// ---------------------------------------------------------------------------
// Geometry of psi near its minimum

namespace detail {
// Same formula as psi without the D+ check; central differences at x = 0
// need x < 0, where the expression is still smooth.
inline double psi_formula(double x, double y) { return 0.5 * (-x / y + y - std::log(y - x)); }
}  // namespace detail

struct PsiDerivatives {
  double grad_x, grad_y;
  double hess_xx, hess_yy, hess_xy;
};

/// Central finite differences of psi at (0, 1) with step h.
inline PsiDerivatives psi_derivatives_at_minimum(double h) {
  if (!(h > 0.0 && h < 0.1)) throw DomainError("psi_derivatives_at_minimum: requires 0 < h < 0.1");
  auto f = detail::psi_formula;
  const double c = f(0.0, 1.0);
  PsiDerivatives d{};
  d.grad_x = (f(h, 1.0) - f(-h, 1.0)) / (2.0 * h);
  d.grad_y = (f(0.0, 1.0 + h) - f(0.0, 1.0 - h)) / (2.0 * h);
  d.hess_xx = (f(h, 1.0) - 2.0 * c + f(-h, 1.0)) / (h * h);
  d.hess_yy = (f(0.0, 1.0 + h) - 2.0 * c + f(0.0, 1.0 - h)) / (h * h);
  d.hess_xy = (f(h, 1.0 + h) - f(h, 1.0 - h) - f(-h, 1.0 + h) + f(-h, 1.0 - h)) / (4.0 * h * h);
  return d;
}

/// Gradient (0, 0) and Hessian diag(1/2, 1/2) of psi at (0, 1). Tolerances
/// are the larger of the stated floor and ten times the O(h^2) truncation
/// plus O(eps / h^2) roundoff of the stencils.
inline std::vector<CheckReport> psi_expansion_check(double h, double gradient_floor = 1e-6,
                                                    double hessian_floor = 1e-4) {
  const PsiDerivatives d = psi_derivatives_at_minimum(h);
  const double eps = std::numeric_limits<double>::epsilon();
  const double grad_tol = std::max(gradient_floor, 10.0 * (h * h + eps / h));
  const double hess_tol = std::max(hessian_floor, 10.0 * (h * h + eps / (h * h)));
  std::ostringstream note;
  note << "h=" << h;
  return {
      make_check("psi_gradient_x_at_minimum", d.grad_x, 0.0, grad_tol, Comparison::Absolute, note.str()),
      make_check("psi_gradient_y_at_minimum", d.grad_y, 0.0, grad_tol, Comparison::Absolute, note.str()),
      make_check("psi_hessian_xx_at_minimum", d.hess_xx, 0.5, hess_tol, Comparison::Absolute, note.str()),
      make_check("psi_hessian_yy_at_minimum", d.hess_yy, 0.5, hess_tol, Comparison::Absolute, note.str()),
      make_check("psi_hessian_xy_at_minimum", d.hess_xy, 0.0, hess_tol, Comparison::Absolute, note.str()),
  };
}

/// Minimum of psi over a grid of D+ restricted to { x >= delta or |y - 1| >= delta }.
inline double psi_min_outside_box(double delta, double step = 0.005, double x_max = 3.0, double y_max = 6.0) {
  double best = std::numeric_limits<double>::infinity();
  const auto nx = static_cast<long>(std::floor(x_max / step));
  const auto ny = static_cast<long>(std::floor(y_max / step));
  for (long i = 0; i <= nx; ++i) {
    const double x = static_cast<double>(i) * step;
    for (long j = 1; j <= ny; ++j) {
      const double y = static_cast<double>(j) * step;
      if (!(y > x)) continue;
      if (x < delta && std::abs(y - 1.0) < delta) continue;
      best = std::min(best, psi({x, y}));
    }
  }
  return best;
}

/// Whether psi(x, y) - 1/2 >= (x^2 + (y - 1)^2) / 8 on a grid of
/// D+ with x < radius and |y - 1| < radius.
inline bool psi_local_bound_holds(double radius, double step = 0.005) {
  const auto m = static_cast<long>(std::ceil(radius / step));
  for (long i = 0; i < m; ++i) {
    const double x = static_cast<double>(i) * step;
    for (long j = -m + 1; j < m; ++j) {
      const double y = 1.0 + static_cast<double>(j) * step;
      if (!(y > x) || x >= radius || std::abs(y - 1.0) >= radius) continue;
      const double lhs = psi({x, y}) - 0.5;
      const double rhs = 0.125 * (x * x + (y - 1.0) * (y - 1.0));
      if (lhs < rhs) return false;
    }
  }
  return true;
}

/// Largest radius in {0.05, 0.10, ..., 1.00} at which the local quadratic
/// lower bound holds on the grid; 0 when none does.
inline double calibrate_local_bound_radius() {
  double best = 0.0;
  for (int k = 1; k <= 20; ++k) {
    const double r = 0.05 * k;
    if (psi_local_bound_holds(r))
      best = r;
    else
      break;
  }
  return best;
}

inline constexpr double kLocalBoundRadius = 0.5;

// ---------------------------------------------------------------------------
// Goodness of fit

/// Kolmogorov-Smirnov distance between the empirical CDF of a sorted sample
/// and `cdf`.
template <class Cdf>
double ks_statistic(std::span<const double> sorted, Cdf&& cdf) {
  if (sorted.empty()) throw DomainError("ks_statistic: empty sample");
  if (!std::is_sorted(sorted.begin(), sorted.end())) throw DomainError("ks_statistic: sample must be sorted");
  const double N = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double F = cdf(sorted[i]);
    const double above = static_cast<double>(i + 1) / N - F;
    const double below = F - static_cast<double>(i) / N;
    d = std::max({d, above, below});
  }
  return d;
}

/// Asymptotic one-sample KS critical value sqrt(-ln(alpha/2) / 2) / sqrt(N).
inline double ks_critical_value(std::size_t samples, double alpha = 0.05) {
  return std::sqrt(-0.5 * std::log(0.5 * alpha)) / std::sqrt(static_cast<double>(samples));
}

// ---------------------------------------------------------------------------
// Suites

enum class Suite { Complex, Density, Laplace, All };

struct VerifyTolerances {
  double gaussian_integral = 1e-8;
  double log_oracle = 1e-13;
  double complex_identity = 1e-14;
  double cf_consistency = 1e-10;
  double inversion = 1e-3;
  double inversion_imag = 1e-6;
  double density_mass = 1e-6;
  double normalization_cross = 1e-6;
  double psi_minimum = 1e-14;
  double psi_gradient = 1e-6;
  double psi_hessian = 1e-4;
  double normalizer = 1e-8;
  double gamma_quadrature = 1e-10;
  double laplace_100 = 0.15;
  double laplace_400 = 0.08;

  /// Sets a field by name; returns false for unknown names.
  bool set(const std::string& key, double value) {
    for (auto& [name, field] : fields()) {
      if (name == key) {
        *field = value;
        return true;
      }
    }
    return false;
  }

  std::vector<std::pair<std::string, double*>> fields() {
    return {{"gaussian_integral", &gaussian_integral},
            {"log_oracle", &log_oracle},
            {"complex_identity", &complex_identity},
            {"cf_consistency", &cf_consistency},
            {"inversion", &inversion},
            {"inversion_imag", &inversion_imag},
            {"density_mass", &density_mass},
            {"normalization_cross", &normalization_cross},
            {"psi_minimum", &psi_minimum},
            {"psi_gradient", &psi_gradient},
            {"psi_hessian", &psi_hessian},
            {"normalizer", &normalizer},
            {"gamma_quadrature", &gamma_quadrature},
            {"laplace_100", &laplace_100},
            {"laplace_400", &laplace_400}};
  }
};

struct VerifyOptions {
  std::vector<std::size_t> inversion_orders{5, 6, 8};
  std::size_t normalization_min_n = 5;
  std::size_t normalization_max_n = 30;
  VerifyTolerances tol;
};

/// Probe grid for the inversion checks: y in {n/2, n, 3n/2, 2n} and
/// x = f sqrt(n y) for f in {0, 0.4, 0.8}, all strictly inside the support.
inline std::vector<std::pair<double, double>> inversion_probe_points(std::size_t n) {
  std::vector<std::pair<double, double>> pts;
  const double dn = static_cast<double>(n);
  for (double yf : {0.5, 1.0, 1.5, 2.0}) {
    const double y = yf * dn;
    for (double xf : {0.0, 0.4, 0.8}) pts.emplace_back(xf * std::sqrt(dn * y), y);
  }
  return pts;
}

inline const std::vector<double>& gaussian_probe_t() {
  static const std::vector<double> t{0.0, 1.0, 2.5};
  return t;
}

inline const std::vector<ComplexValue>& gaussian_probe_zeta() {
  static const std::vector<ComplexValue> z{{1.0, 0.0}, {1.0, 2.0}, {1.0, -2.0}, {0.2, 3.0}};
  return z;
}

namespace detail {

inline std::string fmt_pair(const char* a, double x, const char* b, double y) {
  std::ostringstream os;
  os << a << "=" << x << " " << b << "=" << y;
  return os.str();
}

inline std::vector<CheckReport> complex_checks(const VerifyOptions& opt) {
  const auto& tol = opt.tol;
  std::vector<CheckReport> out;
  const double pi = std::numbers::pi;

  const ComplexValue log_one = principal_log({1.0, 0.0});
  out.push_back(make_check("log_of_one", std::abs(log_one), 0.0, tol.complex_identity));
  const ComplexValue log_i = principal_log({0.0, 1.0});
  out.push_back(make_check("log_of_i", std::abs(log_i - ComplexValue{0.0, pi / 2}), 0.0, tol.complex_identity));

  // Half-angle formula against ln|z| + i atan2(y, x) on random points of the slit plane.
  Rng rng(20240601);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double re = 20.0 * rng.uniform() - 10.0;
    const double im = 20.0 * rng.uniform() - 10.0;
    if (im == 0.0 && re <= 0.0) continue;
    const ComplexValue z{re, im};
    const ComplexValue polar{std::log(std::hypot(re, im)), std::atan2(im, re)};
    worst = std::max(worst, std::abs(principal_log(z) - polar));
  }
  out.push_back(make_check("log_vs_atan2_random", worst, 0.0, tol.log_oracle, Comparison::Absolute,
                           "max over 1000 points in [-10,10]^2"));

  const ComplexValue pw = complex_pow({1.0, 1.0}, -0.5);
  const ComplexValue polar_pw = std::pow(2.0, -0.25) * std::exp(ComplexValue{0.0, -pi / 8});
  out.push_back(make_check("pow_1_plus_i_minus_half", std::abs(pw - polar_pw), 0.0, tol.complex_identity));

  for (double t : gaussian_probe_t()) {
    for (const ComplexValue& z : gaussian_probe_zeta()) {
      const ComplexValue closed = complex_gaussian_integral(t, z);
      const auto numeric = gaussian_integral_by_quadrature(t, z);
      std::ostringstream name;
      name << "gaussian_integral_t" << t << "_zeta" << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
      out.push_back(make_check(name.str(), std::abs(closed - numeric.value), 0.0, tol.gaussian_integral,
                               Comparison::Absolute, "closed form vs adaptive quadrature"));
    }
  }

  double cf_worst = 0.0;
  for (double u : {0.5, 1.0, 2.0, 3.0}) {
    const ComplexValue expo = gamma_law_cf(u, 1.0, 1.5);
    cf_worst = std::max(cf_worst, std::abs(expo - 1.0 / ComplexValue{1.0, -1.5 * u}));
  }
  out.push_back(make_check("gamma_cf_shape_one_is_exponential_cf", cf_worst, 0.0, tol.complex_identity));

  out.push_back(make_check("char_fn_at_origin", std::abs(char_fn(0.0, 0.0, 7.0) - 1.0), 0.0, tol.complex_identity));
  out.push_back(make_check("char_fn_gaussian_marginal", std::abs(char_fn(0.8, 0.0, 5.0) - std::exp(-5.0 * 0.32)), 0.0,
                           tol.complex_identity));
  out.push_back(make_check("char_fn_half_order_two", std::abs(char_fn(0.0, 0.5, 2.0) - ComplexValue{0.5, 0.5}), 0.0,
                           tol.complex_identity));

  double pow_worst = 0.0;
  for (int n = 1; n <= 10; ++n) {
    for (double u : {-1.3, 0.0, 0.7}) {
      for (double v : {-2.0, -0.25, 0.0, 0.6, 3.0}) {
        ComplexValue prod{1.0, 0.0};
        const ComplexValue one = char_fn(u, v, 1.0);
        for (int k = 0; k < n; ++k) prod *= one;
        pow_worst = std::max(pow_worst, std::abs(char_fn(u, v, n) - prod));
      }
    }
  }
  out.push_back(make_check("char_fn_power_consistency", pow_worst, 0.0, tol.cf_consistency, Comparison::Absolute,
                           "Phi_n vs Phi_1^n by repeated multiplication, n <= 10"));
  return out;
}

inline std::vector<CheckReport> density_checks(const VerifyOptions& opt) {
  const auto& tol = opt.tol;
  std::vector<CheckReport> out;

  const double hand = 5.0 * std::exp(-2.5) / std::sqrt(160.0 * std::numbers::pi);
  out.push_back(make_check("density_closed_form_n5_at_0_5", density_closed_form(0.0, 5.0, 5), hand, 1e-15,
                           Comparison::Absolute, "5 e^-2.5 / sqrt(160 pi)"));

  const auto mass = density_total_mass(6);
  out.push_back(make_check("density_mass_n6", mass.value, 1.0, tol.density_mass));

  for (std::size_t n : opt.inversion_orders) {
    if (n < 5) continue;
    double worst_imag = 0.0;
    for (const auto& [x, y] : inversion_probe_points(n)) {
      const auto inv = density_by_inversion(x, y, n, 0.2 * tol.inversion);
      const double closed = density_closed_form(x, y, n);
      std::ostringstream name;
      name << "inversion_n" << n << "_x" << x << "_y" << y;
      auto r = make_check(name.str(), inv.value, closed, tol.inversion, Comparison::Absolute,
                          "truncation |v|<=" + std::to_string(inv.truncation_radius) + " status=" + inv.status);
      if (!inv.ok) r.pass = false;
      out.push_back(r);
      worst_imag = std::max(worst_imag, inv.imag_residue);
    }
    out.push_back(make_check("inversion_imag_residue_n" + std::to_string(n), worst_imag, 0.0, tol.inversion_imag));
  }

  for (std::size_t n = opt.normalization_min_n; n <= opt.normalization_max_n; ++n) {
    const double dn = static_cast<double>(n);
    double logz = std::numeric_limits<double>::quiet_NaN();
    std::string note = "0 <= log Z_n <= n/2";
    try {
      logz = estimate_C_n(n).log_Z_n;
    } catch (const CheckFailure& e) {
      note = e.what();
    }
    char buf[16];
    std::snprintf(buf, sizeof buf, "%03zu", n);
    out.push_back(make_check(std::string("log_Z_bound_n") + buf, logz, 0.25 * dn, 0.25 * dn, Comparison::Absolute, note));
  }

  const auto est5 = estimate_C_n(5);
  const double direct5 = log_C_n_direct(5);
  out.push_back(make_check("C_n_two_routes_n5", std::exp(est5.log_C_n - direct5), 1.0, tol.normalization_cross,
                           Comparison::Absolute, "ratio of rescaled-coordinate to direct quadrature"));
  return out;
}

inline std::vector<CheckReport> laplace_checks(const VerifyOptions& opt) {
  const auto& tol = opt.tol;
  std::vector<CheckReport> out;

  out.push_back(make_check("psi_at_minimum", psi({0.0, 1.0}), 0.5, tol.psi_minimum));
  for (auto& r : psi_expansion_check(1e-4, tol.psi_gradient, tol.psi_hessian)) out.push_back(std::move(r));
  out.push_back(make_check("psi_min_outside_box_0.1", psi_min_outside_box(0.1), 0.5, 0.0, Comparison::Exceeds,
                           "grid step 0.005 on [0,3]x(0,6]"));
  const double calibrated = calibrate_local_bound_radius();
  out.push_back(make_check("psi_local_quadratic_bound_radius", calibrated, kLocalBoundRadius, 0.0,
                           Comparison::AtLeast, "largest grid-verified radius of psi - 1/2 >= |.|^2/8"));

  const double gamma_quarter = 4.0 * quad::integrate(
      [](double u) { return std::exp(-u * u * u * u); }, 0.0, 7.0, {1e-15, 1e-14}).value;
  out.push_back(make_check("gamma_quarter_vs_quadrature", gamma_fn(0.25), gamma_quarter, tol.gamma_quadrature,
                           Comparison::Relative, "Gamma(1/4) = 4 * integral of exp(-u^4) over (0, inf)"));
  out.push_back(make_check("gamma_half", gamma_fn(0.5), std::sqrt(std::numbers::pi), 1e-14, Comparison::Relative));
  const double quartic = quad::integrate(
      [](double y) { return std::exp(-0.25 * y * y * y * y); }, -10.0, 10.0, {1e-15, 1e-14}).value;
  out.push_back(make_check("quartic_normalizer_vs_quadrature", quartic_normalizer(1.0), quartic, tol.normalizer));

  const double r100 = laplace_ratio(100);
  const double r400 = laplace_ratio(400);
  out.push_back(make_check("laplace_ratio_n100", r100, 1.0, tol.laplace_100, Comparison::Absolute,
                           "engineering calibration at finite n"));
  out.push_back(make_check("laplace_ratio_n400", r400, 1.0, tol.laplace_400, Comparison::Absolute,
                           "engineering calibration at finite n"));
  out.push_back(make_check("laplace_ratio_improves_100_to_400", std::abs(r100 - 1.0), std::abs(r400 - 1.0), 0.0,
                           Comparison::Exceeds, "|r100 - 1| > |r400 - 1|"));
  return out;
}

}  // namespace detail

/// Runs the selected suite, groups in parallel; reports sorted by name.
inline std::vector<CheckReport> run_suite(Suite suite, const VerifyOptions& opt = {}) {
  using Group = std::vector<CheckReport> (*)(const VerifyOptions&);
  std::vector<Group> groups;
  if (suite == Suite::Complex || suite == Suite::All) groups.push_back(&detail::complex_checks);
  if (suite == Suite::Density || suite == Suite::All) groups.push_back(&detail::density_checks);
  if (suite == Suite::Laplace || suite == Suite::All) groups.push_back(&detail::laplace_checks);

  std::vector<std::future<std::vector<CheckReport>>> pending;
  for (Group g : groups) pending.push_back(std::async(std::launch::async, g, std::cref(opt)));
  std::vector<CheckReport> all;
  for (auto& f : pending) {
    auto part = f.get();
    all.insert(all.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  std::sort(all.begin(), all.end(), [](const CheckReport& a, const CheckReport& b) { return a.name < b.name; });
  return all;
}

}  // namespace cwsoc
