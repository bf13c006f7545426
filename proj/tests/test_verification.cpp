#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "cwsoc/limit_law.hpp"
#include "cwsoc/quadrature.hpp"
#include "cwsoc/rng.hpp"
#include "cwsoc/verification.hpp"

using namespace cwsoc;

TEST(CheckReport, PassRules) {
  EXPECT_TRUE(make_check("a", 1.0, 1.05, 0.1).pass);
  EXPECT_FALSE(make_check("a", 1.0, 1.2, 0.1).pass);
  EXPECT_TRUE(make_check("r", 101.0, 100.0, 0.02, Comparison::Relative).pass);
  EXPECT_FALSE(make_check("r", 103.0, 100.0, 0.02, Comparison::Relative).pass);
  EXPECT_TRUE(make_check("l", 0.5, 0.5, 0.0, Comparison::AtLeast).pass);
  EXPECT_FALSE(make_check("l", 0.5, 0.5, 0.0, Comparison::Exceeds).pass);
  EXPECT_NE(make_check("r", 1, 1, 1, Comparison::Relative).details.find("relative"), std::string::npos);
}

TEST(DensityClosedForm, Examples) {
  EXPECT_NEAR(density_closed_form(0, 5, 5), 5 * std::exp(-2.5) / std::sqrt(160 * std::numbers::pi), 1e-16);
  EXPECT_EQ(density_closed_form(3, 1, 5), 0.0);
  EXPECT_EQ(density_closed_form(0, -1, 6), 0.0);
  EXPECT_EQ(density_closed_form(std::sqrt(5.0), 1, 5), 0.0);
  EXPECT_THROW(density_closed_form(0, 1, 4), UnsupportedOrderError);
}

TEST(DensityClosedForm, UnitMass) {
  for (std::size_t n : {5u, 6u, 9u}) {
    const auto m = density_total_mass(n);
    EXPECT_NEAR(m.value, 1.0, 1e-6) << n;
  }
}

TEST(DensityClosedForm, MatchesProductOfMarginals) {
  // Under the untilted law S ~ N(0, n) and W = T - S^2/n ~ chi-square(n-1)
  // independently; the joint density in (s, t) is their product.
  for (std::size_t n : {5u, 7u}) {
    const double dn = static_cast<double>(n);
    const double k = dn - 1;
    for (auto [s, w] : {std::pair{0.3, 2.0}, std::pair{-2.0, 5.5}, std::pair{1.0, 0.4}}) {
      const double normal = std::exp(-s * s / (2 * dn)) / std::sqrt(2 * std::numbers::pi * dn);
      const double chi2 = std::pow(w, k / 2 - 1) * std::exp(-w / 2) / (std::pow(2.0, k / 2) * std::tgamma(k / 2));
      EXPECT_NEAR(density_closed_form(s, w + s * s / dn, n), normal * chi2, 1e-15);
    }
  }
}

TEST(Inversion, MatchesClosedFormAtModeForSmallOrders) {
  for (std::size_t n : {5u, 6u, 8u}) {
    const double dn = static_cast<double>(n);
    const auto r = density_by_inversion(0.0, dn, n, 1e-4);
    EXPECT_TRUE(r.ok) << r.status;
    EXPECT_NEAR(r.value, density_closed_form(0.0, dn, n), 1e-3) << n;
    EXPECT_LE(r.imag_residue, 1e-6);
  }
}

TEST(Inversion, OutsideSupportIsNearZero) {
  const double tol = 1e-4;
  const auto r = density_by_inversion(6.0, 1.0, 6, tol);
  EXPECT_LE(std::abs(r.value), tol);
  const auto neg = density_by_inversion(0.0, -3.0, 6, tol);
  EXPECT_LE(std::abs(neg.value), tol);
}

TEST(Inversion, TailBoundAndRadius) {
  for (std::size_t n : {5u, 6u, 8u, 12u}) {
    const double V = inversion_truncation_radius(n, 1e-5);
    EXPECT_NEAR(inversion_truncation_error(n, V), 1e-5, 1e-12);
    // The bound really dominates the discarded integral of |Phi_n| (u done in
    // closed form): (2 pi)^-2 * 2 * int_V^inf sqrt(2 pi / n) (1 + 4 v^2)^(-(n-2)/4) dv.
    const double dn = static_cast<double>(n);
    auto f = [dn](double v) { return std::sqrt(2 * std::numbers::pi / dn) * std::pow(1 + 4 * v * v, -(dn - 2) / 4); };
    const double tail = 2 * quad::integrate_to_infinity(f, 10.0, {1e-14, 1e-12}).value / (4 * std::numbers::pi * std::numbers::pi);
    EXPECT_LE(tail, inversion_truncation_error(n, 10.0));
    EXPECT_GE(tail, 0.5 * inversion_truncation_error(n, 10.0));
  }
  EXPECT_THROW(inversion_truncation_radius(4, 1e-3), UnsupportedOrderError);
}

TEST(Inversion, ReportsFailureWhenRadiusIsCapped) {
  InversionOptions opts;
  opts.max_radius = 10.0;
  const auto r = density_by_inversion(0.0, 5.0, 5, 1e-6, opts);
  EXPECT_FALSE(r.ok);
  EXPECT_NE(r.status.find("exceeds"), std::string::npos);
  EXPECT_THROW(density_by_inversion(0.0, 5.0, 4, 1e-3), UnsupportedOrderError);
}

TEST(Normalization, SmallestOrderBoundsAndTwoRoutes) {
  const auto est = estimate_C_n(5);
  EXPECT_GE(est.log_Z_n, 0.0);
  EXPECT_LE(est.log_Z_n, 2.5);
  EXPECT_NEAR(est.log_Z_n, est.log_C_n - log_convolution_normalizer(5), 1e-15);
  EXPECT_NEAR(std::exp(est.log_C_n - log_C_n_direct(5)), 1.0, 1e-6);
}

// Z_n = E[exp(S^2 / 2T)] under iid N(0,1) spins. Since S and W = T - S^2/n
// are independent with S^2/n ~ chi-square(1), W ~ chi-square(n-1), this is a
// one-dimensional integral over the Beta(1/2, (n-1)/2) variable B = S^2/(nT):
// Z_n = E[exp(n B / 2)].
TEST(Normalization, MatchesBetaRepresentation) {
  for (std::size_t n : {5u, 8u, 13u, 30u}) {
    const double dn = static_cast<double>(n);
    const double a = 0.5, b = 0.5 * (dn - 1);
    const double log_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    // Substitute B = sin^2(theta) to remove the endpoint singularity.
    auto f = [&](double th) {
      const double s = std::sin(th), c = std::cos(th);
      return 2.0 * std::exp(0.5 * dn * s * s + (2 * b - 1) * std::log(c) - log_beta);
    };
    const double Z = quad::integrate(f, 0.0, std::numbers::pi / 2, {1e-14, 1e-13}).value;
    EXPECT_NEAR(estimate_C_n(n).log_Z_n, std::log(Z), 1e-8) << n;
  }
}

TEST(Normalization, BoundHoldsAcrossOrders) {
  for (std::size_t n = 5; n <= 30; ++n) {
    const auto est = estimate_C_n(n);
    EXPECT_GE(est.log_Z_n, 0.0) << n;
    EXPECT_LE(est.log_Z_n, 0.5 * static_cast<double>(n)) << n;
  }
}

TEST(Laplace, RatioApproachesOne) {
  const double r100 = laplace_ratio(100);
  const double r400 = laplace_ratio(400);
  EXPECT_GE(r100, 0.85);
  EXPECT_LE(r100, 1.15);
  EXPECT_GE(r400, 0.92);
  EXPECT_LE(r400, 1.08);
  EXPECT_LT(std::abs(r400 - 1), std::abs(r100 - 1));
}

TEST(Laplace, AsymptoteUsesQuarticNormalizer) {
  const double dn = 64.0;
  const double direct = (1.75 + 0.5 * (dn - 3)) * std::log(dn) + 0.5 * std::log(4 * std::numbers::pi / dn) - dn / 2 +
                        std::log(std::tgamma(0.25) / std::numbers::sqrt2);
  EXPECT_NEAR(log_C_n_asymptote(64), direct, 1e-12);
}

TEST(PsiGeometry, ExpansionAtMinimum) {
  const auto reports = psi_expansion_check(1e-4);
  ASSERT_EQ(reports.size(), 5u);
  for (const auto& r : reports) EXPECT_TRUE(r.pass) << r.name << " " << r.value;
  const auto d = psi_derivatives_at_minimum(1e-4);
  EXPECT_NEAR(d.hess_xx, 0.5, 1e-4);
  EXPECT_NEAR(d.hess_yy, 0.5, 1e-4);
  EXPECT_NEAR(d.hess_xy, 0.0, 1e-4);
  EXPECT_LE(std::abs(d.grad_x), 1e-6);
  EXPECT_LE(std::abs(d.grad_y), 1e-6);
  EXPECT_THROW(psi_derivatives_at_minimum(0.2), DomainError);
}

TEST(PsiGeometry, MinimumOutsideBoxAndLocalBound) {
  EXPECT_GT(psi_min_outside_box(0.1), 0.5);
  EXPECT_TRUE(psi_local_bound_holds(kLocalBoundRadius));
  EXPECT_GE(calibrate_local_bound_radius(), kLocalBoundRadius);
}

TEST(KsStatistic, SingleSampleAtMedian) {
  const std::vector<double> one{0.0};
  EXPECT_EQ(ks_statistic(one, [](double x) { return 0.5 + 0.5 * std::erf(x); }), 0.5);
}

TEST(KsStatistic, Errors) {
  const std::vector<double> empty, unsorted{2.0, 1.0};
  auto F = [](double) { return 0.5; };
  EXPECT_THROW(ks_statistic(empty, F), DomainError);
  EXPECT_THROW(ks_statistic(unsorted, F), DomainError);
}

namespace {

// sup over a dense grid and just left/right of every sample of |ECDF - F|,
// with the ECDF computed by counting.
template <class F>
double brute_force_ks(const std::vector<double>& xs, F cdf) {
  const double N = static_cast<double>(xs.size());
  auto ecdf = [&](double x, bool left) {
    double c = 0;
    for (double v : xs) c += left ? (v < x) : (v <= x);
    return c / N;
  };
  double d = 0;
  for (double x : xs) {
    d = std::max(d, std::abs(ecdf(x, false) - cdf(x)));
    d = std::max(d, std::abs(ecdf(x, true) - cdf(x)));
  }
  return d;
}

}  // namespace

TEST(KsStatistic, QuantilePlacementAndBruteForce) {
  const QuarticLaw law(1.0);
  auto F = [&](double x) { return law.cdf(x); };
  const int N = 200;
  std::vector<double> xs;
  for (int i = 1; i <= N; ++i) xs.push_back(law.quantile(static_cast<double>(i) / (N + 1)));
  const double d = ks_statistic(xs, F);
  EXPECT_LE(d, 1.0 / (N + 1) + 1e-10);
  EXPECT_NEAR(d, brute_force_ks(xs, F), 1e-12);

  Rng rng(3);
  std::vector<double> ys(500);
  for (double& y : ys) y = 1.3 * rng.normal();
  std::sort(ys.begin(), ys.end());
  EXPECT_NEAR(ks_statistic(ys, F), brute_force_ks(ys, F), 1e-12);
}

TEST(KsStatistic, InvariantUnderIncreasingMaps) {
  const QuarticLaw law(1.0);
  Rng rng(5);
  std::vector<double> xs(300);
  for (double& x : xs) x = law.sample(rng);
  std::sort(xs.begin(), xs.end());
  std::vector<double> mapped;
  for (double x : xs) mapped.push_back(std::exp(x));
  const double a = ks_statistic(xs, [&](double x) { return law.cdf(x); });
  const double b = ks_statistic(mapped, [&](double y) { return law.cdf(std::log(y)); });
  EXPECT_NEAR(a, b, 1e-14);
}

TEST(KsCritical, KnownValue) {
  EXPECT_NEAR(ks_critical_value(10000, 0.05), 1.3581 / 100.0, 1e-5);
}

TEST(Suites, ComplexSuiteOnlyHasComplexChecks) {
  const auto reports = run_suite(Suite::Complex);
  ASSERT_FALSE(reports.empty());
  for (const auto& r : reports) {
    EXPECT_TRUE(r.pass) << r.name;
    EXPECT_EQ(r.name.find("inversion"), std::string::npos);
    EXPECT_EQ(r.name.find("laplace"), std::string::npos);
  }
  EXPECT_TRUE(std::is_sorted(reports.begin(), reports.end(),
                             [](const CheckReport& a, const CheckReport& b) { return a.name < b.name; }));
  const auto grid = std::count_if(reports.begin(), reports.end(),
                                  [](const CheckReport& r) { return r.name.rfind("gaussian_integral_", 0) == 0; });
  EXPECT_EQ(grid, 12);
}

TEST(Suites, ToleranceOverrides) {
  VerifyTolerances tol;
  EXPECT_TRUE(tol.set("inversion", 5e-4));
  EXPECT_EQ(tol.inversion, 5e-4);
  EXPECT_FALSE(tol.set("no_such_key", 1.0));
  VerifyOptions opt;
  opt.tol.gaussian_integral = 0.0;  // no closed form matches quadrature bit-for-bit
  const auto reports = run_suite(Suite::Complex, opt);
  EXPECT_TRUE(std::any_of(reports.begin(), reports.end(), [](const CheckReport& r) { return !r.pass; }));
}
