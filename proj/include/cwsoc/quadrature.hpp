#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature, templated on the
// integrand's value type so the same driver handles real and complex
// integrands. Error per interval is |K15 - G7|, which is pessimistic for
// smooth integrands but never optimistic.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <type_traits>
#include <utility>
#include <vector>

namespace cwsoc::quad {

struct Options {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  std::size_t max_intervals = 50000;
};

template <class T>
struct Result {
  T value{};
  double abs_error = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

namespace detail {

inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights at kXgk[1], kXgk[3], kXgk[5], kXgk[7].
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
struct Segment {
  double a, b;
  T value;
  double err;
};

template <class T, class F>
Segment<T> kronrod15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const T fc = f(center);
  T kron = fc * kWgk[7];
  T gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const T sum = f(center - dx) + f(center + dx);
    kron += sum * kWgk[j];
    if (j % 2 == 1) gauss += sum * kWg[j / 2];
  }
  kron *= half;
  gauss *= half;
  return {a, b, kron, std::abs(kron - gauss)};
}

}  // namespace detail

/// Adaptive integral of f over the finite interval [a, b].
template <class F>
auto integrate(F&& f, double a, double b, const Options& opt = {})
    -> Result<std::decay_t<std::invoke_result_t<F&, double>>> {
  using T = std::decay_t<std::invoke_result_t<F&, double>>;
  using Seg = detail::Segment<T>;
  Result<T> out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  auto by_error = [](const Seg& l, const Seg& r) { return l.err < r.err; };

  std::vector<Seg> heap;
  heap.push_back(detail::kronrod15<T>(f, a, b));
  out.evaluations = 15;
  T total = heap.front().value;
  double total_err = heap.front().err;

  while (true) {
    const double target = std::max(opt.abs_tol, opt.rel_tol * std::abs(total));
    if (total_err <= target) {
      out.converged = true;
      break;
    }
    if (heap.size() >= opt.max_intervals) break;
    std::pop_heap(heap.begin(), heap.end(), by_error);
    const Seg worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Interval exhausted at double resolution; keep its estimate.
      heap.push_back(worst);
      std::push_heap(heap.begin(), heap.end(), by_error);
      break;
    }
    Seg left = detail::kronrod15<T>(f, worst.a, mid);
    Seg right = detail::kronrod15<T>(f, mid, worst.b);
    out.evaluations += 30;
    total += (left.value + right.value) - worst.value;
    total_err += (left.err + right.err) - worst.err;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), by_error);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), by_error);
  }

  // Re-sum from scratch to shed the running-update drift.
  std::sort(heap.begin(), heap.end(), [](const Seg& l, const Seg& r) { return l.a < r.a; });
  T sum{};
  double err = 0.0;
  for (const auto& s : heap) {
    sum += s.value;
    err += s.err;
  }
  out.value = sum;
  out.abs_error = err;
  if (!out.converged) out.converged = err <= std::max(opt.abs_tol, opt.rel_tol * std::abs(sum));
  return out;
}

/// Integral over [a, +inf) through the map x = a + u / (1 - u).
template <class F>
auto integrate_to_infinity(F&& f, double a, const Options& opt = {}) {
  auto mapped = [&f, a](double u) {
    using T = std::decay_t<std::invoke_result_t<F&, double>>;
    const double one_minus = 1.0 - u;
    // A node can round onto u = 1 once an interval shrinks to a few ulps.
    if (!(one_minus > 0.0)) return T{};
    const double x = a + u / one_minus;
    const T fx = f(x);
    return fx * (1.0 / (one_minus * one_minus));
  };
  return integrate(mapped, 0.0, 1.0, opt);
}

/// Integral over (-inf, +inf), split at zero.
template <class F>
auto integrate_whole_line(F&& f, const Options& opt = {}) {
  auto right = integrate_to_infinity(f, 0.0, opt);
  auto reflected = [&f](double x) { return f(-x); };
  auto left = integrate_to_infinity(reflected, 0.0, opt);
  right.value += left.value;
  right.abs_error += left.abs_error;
  right.evaluations += left.evaluations;
  right.converged = right.converged && left.converged;
  return right;
}

/// Splits [a, b] into panels no wider than `panel_width` and integrates each
/// adaptively, sharing the absolute tolerance in proportion to panel length.
/// Suited to long oscillatory ranges where a single global heap would grow
/// very large.
template <class F>
auto integrate_panels(F&& f, double a, double b, double panel_width, const Options& opt = {}) {
  using T = std::decay_t<std::invoke_result_t<F&, double>>;
  Result<T> out;
  out.converged = true;
  if (a == b) return out;
  const double length = b - a;
  const auto panels = static_cast<std::size_t>(std::max(1.0, std::ceil(std::abs(length) / panel_width)));
  Options local = opt;
  local.abs_tol = opt.abs_tol / static_cast<double>(panels);
  for (std::size_t i = 0; i < panels; ++i) {
    const double lo = a + length * static_cast<double>(i) / static_cast<double>(panels);
    const double hi = (i + 1 == panels) ? b : a + length * static_cast<double>(i + 1) / static_cast<double>(panels);
    auto r = integrate(f, lo, hi, local);
    out.value += r.value;
    out.abs_error += r.abs_error;
    out.evaluations += r.evaluations;
    out.converged = out.converged && r.converged;
  }
  return out;
}

}  // namespace cwsoc::quad
