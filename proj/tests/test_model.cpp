#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "cwsoc/model.hpp"
#include "cwsoc/rng.hpp"

using namespace cwsoc;

TEST(InteractionEnergy, Examples) {
  EXPECT_DOUBLE_EQ(interaction_energy(std::vector<double>{1, 1, 1, 1}), 2.0);
  EXPECT_DOUBLE_EQ(interaction_energy(std::vector<double>{1, -1}), 0.0);
  EXPECT_DOUBLE_EQ(interaction_energy(std::vector<double>{3, 4}), 0.98);
}

TEST(InteractionEnergy, AllZeroIsDomainError) {
  EXPECT_THROW(interaction_energy(std::vector<double>(5, 0.0)), DomainError);
}

TEST(InteractionEnergy, EqualsTiltOfStatsAndIsBounded) {
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(40);
    std::vector<double> c(n);
    for (double& x : c) x = rng.normal() + (trial % 3 == 0 ? 2.0 : 0.0);
    const double e = interaction_energy(c);
    EXPECT_EQ(e, log_tilt_weight(sum_stats(c)));
    EXPECT_GE(e, 0.0);
    EXPECT_LE(e, 0.5 * static_cast<double>(n) * (1.0 + 1e-15));
  }
}

TEST(SumStats, Examples) {
  const auto st = sum_stats(std::vector<double>{1, 2});
  EXPECT_EQ(st.s, 3.0);
  EXPECT_EQ(st.t, 5.0);
  const auto z = sum_stats(std::vector<double>(4, 0.0));
  EXPECT_EQ(z.s, 0.0);
  EXPECT_EQ(z.t, 0.0);
  EXPECT_THROW(sum_stats(std::vector<double>{}), DomainError);
}

TEST(SumStats, MatchesTwoPassRecomputation) {
  Rng rng(4);
  std::vector<double> c(10);
  for (double& x : c) x = 3.0 * rng.normal();
  // Oracle: long double accumulation, separate pass per statistic.
  long double s = 0, t = 0;
  for (double x : c) s += x;
  for (double x : c) t += static_cast<long double>(x) * x;
  const auto st = sum_stats(c);
  EXPECT_NEAR(st.s, static_cast<double>(s), 1e-14 * (1 + std::abs(static_cast<double>(s))));
  EXPECT_NEAR(st.t, static_cast<double>(t), 1e-14 * static_cast<double>(t));
}

TEST(LogTiltWeight, Examples) {
  EXPECT_EQ(log_tilt_weight({0, 5}), 0.0);
  EXPECT_DOUBLE_EQ(log_tilt_weight({3, 5}), 0.9);
  for (std::size_t n : {1u, 7u, 100u}) {
    const double dn = static_cast<double>(n);
    EXPECT_DOUBLE_EQ(log_tilt_weight({dn, dn}), dn / 2);
    EXPECT_DOUBLE_EQ(log_tilt_weight({-dn, dn}), dn / 2);
  }
  EXPECT_THROW(log_tilt_weight({1, 0}), DomainError);
  EXPECT_THROW(log_tilt_weight({0, -1}), DomainError);
}

TEST(LogJointDensity, Examples) {
  const ModelParams p(5, 1.0);
  EXPECT_NEAR(log_joint_density_unnormalized({0, 5}, p), -2.5 + std::log(5.0), 1e-15);
  EXPECT_NEAR(log_joint_density_unnormalized({0, 5}, p), -0.890562, 1e-6);
  EXPECT_EQ(log_joint_density_unnormalized({1.7, 3.2}, p), log_joint_density_unnormalized({-1.7, 3.2}, p));
}

TEST(LogJointDensity, Errors) {
  const ModelParams p(5, 1.0);
  EXPECT_THROW(log_joint_density_unnormalized({std::sqrt(5.0), 1.0}, p), SupportError);
  EXPECT_THROW(log_joint_density_unnormalized({5.0, 5.0}, p), SupportError);
  EXPECT_THROW(log_joint_density_unnormalized({0, 1}, ModelParams(4, 1.0)), UnsupportedOrderError);
}

TEST(LogJointDensity, HugeOrderStaysFinite) {
  const ModelParams p(100000, 1.0);
  const double v = log_joint_density_unnormalized({300.0, 1e5}, p);
  EXPECT_TRUE(std::isfinite(v));
}

TEST(InSupport, Examples) {
  EXPECT_TRUE(in_support({0, 1}, 5));
  EXPECT_FALSE(in_support({std::sqrt(5.0), 1}, 5));
  EXPECT_FALSE(in_support({2, 0.5}, 5));
  EXPECT_FALSE(in_support({0, 0}, 5));
}

TEST(Psi, Examples) {
  EXPECT_EQ(psi({0, 1}), 0.5);
  EXPECT_NEAR(psi({0, std::numbers::e}), (std::numbers::e - 1) / 2, 1e-15);
  EXPECT_NEAR(psi({0, std::numbers::e}), 0.859141, 1e-6);
  EXPECT_NEAR(psi({0.5, 2}), 0.5 * (-0.25 + 2 - std::log(1.5)), 1e-15);
  EXPECT_NEAR(psi({0.5, 2}), 0.6722674, 1e-7);
  EXPECT_THROW(psi({1, 1}), DomainError);
  EXPECT_THROW(psi({-0.1, 1}), DomainError);
}

TEST(Psi, ExceedsHalfAwayFromMinimum) {
  Rng rng(2);
  for (int i = 0; i < 20000; ++i) {
    const double x = 5.0 * rng.uniform();
    const double y = x + 1e-6 + 8.0 * rng.uniform();
    if (x == 0.0 && y == 1.0) continue;
    EXPECT_GT(psi({x, y}), 0.5) << x << "," << y;
  }
}

TEST(PhiWeight, Examples) {
  EXPECT_EQ(phi_weight({0, 1}), 1.0);
  EXPECT_EQ(phi_weight({0, 4}), 0.125);
  for (double gap : {1e-12, 1e-100, 1e-250, 1e-310}) {
    const double w = phi_weight({0.0, gap});
    EXPECT_TRUE(std::isfinite(w));
    EXPECT_GT(w, 1e17);
  }
  EXPECT_TRUE(std::isfinite(phi_weight({1.0, 1.0 + 1e-12})));
  EXPECT_THROW(phi_weight({2, 1}), DomainError);
}

TEST(RescaledDensity, MinimumPoint) {
  for (std::size_t n : {5u, 8u, 50u, 1000u}) {
    const double dn = static_cast<double>(n);
    EXPECT_NEAR(log_rescaled_density_unnormalized(0, 1, ModelParams(n, 1.0)), -dn / 2, 1e-12 * dn);
  }
}

// The change of variables s = x n^(3/4), t = y n turns the joint law into the
// rescaled one; the log-densities then differ by exactly ((n-3)/2) ln n,
// with the joint side carrying the extra term.
TEST(RescaledDensity, ChangeOfVariablesIdentity) {
  const std::size_t n = 8;
  const double dn = 8.0;
  const ModelParams p(n, 1.0);
  Rng rng(123);
  int checked = 0;
  while (checked < 5) {
    const double x = 2.0 * rng.normal();
    const double y = 0.3 + 2.0 * rng.uniform();
    const SumStats st{x * std::pow(dn, 0.75), y * dn};
    if (!in_support(st, n)) continue;
    const double joint = log_joint_density_unnormalized(st, p);
    const double rescaled = log_rescaled_density_unnormalized(x, y, p);
    EXPECT_NEAR(joint, rescaled + 0.5 * (dn - 3) * std::log(dn), 1e-12 * (1 + std::abs(joint)));
    ++checked;
  }
}

TEST(RescaledDensity, Errors) {
  const ModelParams p(16, 1.0);
  // mapped point x^2 / n^(1/2) = 4 / 4 = 1 >= y = 1
  EXPECT_THROW(log_rescaled_density_unnormalized(2.0, 1.0, p), SupportError);
  EXPECT_THROW(log_rescaled_density_unnormalized(0.0, 1.0, ModelParams(16, 2.0)), DomainError);
  EXPECT_THROW(log_rescaled_density_unnormalized(0.0, 1.0, ModelParams(4, 1.0)), UnsupportedOrderError);
}

TEST(ModelParams, Validation) {
  EXPECT_THROW(ModelParams(0, 1.0), DomainError);
  EXPECT_THROW(ModelParams(5, 0.0), DomainError);
  EXPECT_THROW(ModelParams(5, -1.0), DomainError);
  EXPECT_THROW(ScalingExponents(0.0, 1.0), DomainError);
  EXPECT_THROW(ScalingExponents(0.75, 1.5), DomainError);
}
