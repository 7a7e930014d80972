#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "tagd/lr_rules.hpp"

using namespace tagd;

namespace {

GradEval at(double e, double norm) { return GradEval::summary(e, norm); }

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(Omega, TaExamples) {
  EXPECT_EQ(omega_ta(0.0, 0.1, 1.0, 0.65), 0.0);
  EXPECT_DOUBLE_EQ(omega_ta(1.0, 0.1, 1.0, 0.65), 0.1);
  EXPECT_DOUBLE_EQ(omega_ta(0.25, 1.0, 1.0, 0.5), 0.5);
  EXPECT_THROW(omega_ta(-1e-9, 1.0, 1.0, 0.5), NegativeEnergy);
  EXPECT_THROW(omega_ta(std::nan(""), 1.0, 1.0, 0.5), NegativeEnergy);
}

TEST(Omega, FtaExamples) {
  EXPECT_EQ(omega_fta(0.0, 0.03, 0.1, 1.0, 0.65), 0.0);
  EXPECT_DOUBLE_EQ(omega_fta(1.0, 0.03, 0.1, 1.0, 0.65), 0.13);
  EXPECT_DOUBLE_EQ(omega_fta(4.0, 1.0, 1.0, 1.0, 0.5), 6.0);
  EXPECT_THROW(omega_fta(-1.0, 1.0, 1.0, 1.0, 0.5), NegativeEnergy);
}

TEST(Omega, ExponentIsRatioOfPAndQ) {
  EXPECT_DOUBLE_EQ(omega_ta(8.0, 1.0, 3.0, 1.0), 2.0);
  EXPECT_DOUBLE_EQ(omega(LrRule::pfta(1.0, 1.0, 2.0, 1.0), 4.0), 6.0);
  EXPECT_THROW(omega(LrRule::fixed(0.1), 1.0), InvalidCoefficient);
}

TEST(LrTa, Examples) {
  const LrRule r = LrRule::ta(0.1, 1.0, 0.65);
  const RateOutput out = lr_ta(at(1.0, 2.0), r);
  EXPECT_DOUBLE_EQ(out.gamma, 0.025);
  EXPECT_DOUBLE_EQ(out.omega, 0.1);
  EXPECT_FALSE(out.clamped);
  EXPECT_EQ(lr_ta(at(0.0, 3.0), r).gamma, 0.0);
}

TEST(LrTa, ZeroGradientHitsCap) {
  const RateOutput out = lr_ta(at(1.0, 0.0), LrRule::ta(1.0, 1.0, 0.65));
  EXPECT_EQ(out.gamma, 1e6);
  EXPECT_TRUE(out.clamped);
}

TEST(LrTa, UnclampedRateDivergesAsGradientVanishes) {
  LrRule r = LrRule::ta(1.0, 1.0, 0.65);
  r.gamma_max = std::numeric_limits<double>::infinity();
  r.eps_grad = 1e-300;
  double prev = 0.0;
  for (double norm = 1e-1; norm >= 1e-20; norm /= 10.0) {
    const double g = lr_ta(at(1.0, norm), r).gamma;
    EXPECT_GT(g, 99.0 * prev);
    prev = g;
  }
  EXPECT_GT(prev, 1e39);
}

TEST(LrFta, Examples) {
  const LrRule r = LrRule::fta(0.03, 0.1, 1.0, 0.65);
  EXPECT_DOUBLE_EQ(lr_fta(at(1.0, 1.0), r).gamma, 0.13);
  EXPECT_EQ(lr_fta(at(0.0, 1.0), r).gamma, 0.0);
  const RateOutput tiny = lr_fta(at(1.0, std::sqrt(1e-300)), r);
  EXPECT_EQ(tiny.gamma, r.gamma_max);
  EXPECT_TRUE(tiny.clamped);
}

TEST(LrPta, Examples) {
  const LrRule r = LrRule::pta(0.09, 1.0, 0.7);
  EXPECT_NEAR(lr_pta(at(1.0, 1.0), r).gamma, 0.0657953, 5e-8);
  EXPECT_DOUBLE_EQ(lr_pta(at(1.0, 1.0), r).gamma, 0.09 * logistic(1.0));
  EXPECT_EQ(lr_pta(at(0.0, 1.0), r).gamma, 0.0);
}

TEST(LrPta, LargeGradientStepTendsToHalfOmega) {
  const LrRule r = LrRule::pta(1.0, 1.0, 0.5);
  for (double norm : {1e6, 1e9, 1e12}) {
    const double step = lr_pta(at(1.0, norm), r).gamma * norm;
    EXPECT_NEAR(step, 0.5, 1.0 / norm);
  }
}

TEST(LrPfta, Examples) {
  const LrRule r = LrRule::pfta(0.03, 0.1, 1.0, 0.65);
  EXPECT_NEAR(lr_pfta(at(1.0, 1.0), r).gamma, 0.0950376, 5e-8);
  EXPECT_EQ(lr_pfta(at(0.0, 1.0), r).gamma, 0.0);
}

TEST(Dispatcher, RoutesByKind) {
  const GradEval g = at(1.0, 1.0);
  EXPECT_EQ(learning_rate(g, LrRule::fixed(0.3)).gamma, 0.3);
  EXPECT_EQ(learning_rate(g, LrRule::ta(0.1, 1.0, 0.65)).gamma,
            lr_ta(g, LrRule::ta(0.1, 1.0, 0.65)).gamma);
  EXPECT_EQ(learning_rate(g, LrRule::pfta(0.03, 0.1, 1.0, 0.65)).gamma,
            lr_pfta(g, LrRule::pfta(0.03, 0.1, 1.0, 0.65)).gamma);
}

TEST(Sigmoid, Limits) {
  EXPECT_EQ(sigmoid(0.0), 0.5);
  // sigma(1/g) -> 1 as g -> 0 and -> 1/2 as g -> infinity.
  EXPECT_NEAR(sigmoid(1.0 / 1e-12), 1.0, 1e-12);
  EXPECT_NEAR(sigmoid(1.0 / 1e12), 0.5, 1e-12);
  EXPECT_EQ(sigmoid(40.5), 1.0);
  EXPECT_EQ(sigmoid(-40.5), 0.0);
  EXPECT_EQ(sigmoid(1e308), 1.0);
  EXPECT_EQ(sigmoid(-1e308), 0.0);
  for (double x : {-39.0, -3.0, -0.1, 0.1, 2.0, 39.0}) {
    EXPECT_NEAR(sigmoid(x), logistic(x), 1e-16) << x;
  }
}

// dE/dt from (gamma, grad) equals the closed-form energy rate of each rule.
TEST(Properties, ExactDecoupling) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> le(-6.0, 2.0), lg(-3.0, 3.0);
  const double a = 0.03, b = 0.1, k = 0.65;
  for (int i = 0; i < 2000; ++i) {
    const double e = std::pow(10.0, le(rng));
    const double n = std::pow(10.0, lg(rng));
    const GradEval g = at(e, n);
    const double ta = b * std::pow(e, k);
    const double fta = a * e + ta;
    const double d = logistic(1.0 / n);

    LrRule ta_rule = LrRule::ta(b, 1.0, k);
    LrRule fta_rule = LrRule::fta(a, b, 1.0, k);
    ta_rule.gamma_max = fta_rule.gamma_max = std::numeric_limits<double>::infinity();
    const RateOutput r_ta = lr_ta(g, ta_rule);
    const RateOutput r_fta = lr_fta(g, fta_rule);
    ASSERT_FALSE(r_ta.clamped);
    ASSERT_FALSE(r_fta.clamped);
    EXPECT_LE(rel(energy_rate(r_ta.gamma, g), -ta), 1e-12);
    EXPECT_LE(rel(energy_rate(r_fta.gamma, g), -fta), 1e-12);
    EXPECT_LE(rel(energy_rate(lr_pta(g, LrRule::pta(b, 1.0, k)).gamma, g),
                  -n * ta * d),
              1e-12);
    EXPECT_LE(rel(energy_rate(lr_pfta(g, LrRule::pfta(a, b, 1.0, k)).gamma, g),
                  -n * fta * d),
              1e-12);
  }
}

TEST(Properties, MonotoneInEnergy) {
  const std::vector<LrRule> rules = {
      LrRule::ta(0.1, 1.0, 0.65), LrRule::fta(0.03, 0.1, 1.0, 0.65),
      LrRule::pta(0.09, 1.0, 0.7), LrRule::pfta(0.03, 0.1, 1.0, 0.65)};
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 5.0), lg(-4.0, 2.0);
  for (int i = 0; i < 2000; ++i) {
    double e1 = u(rng), e2 = u(rng);
    if (e1 == e2) continue;
    if (e1 > e2) std::swap(e1, e2);
    const double n = std::pow(10.0, lg(rng));
    for (const auto& r : rules) {
      EXPECT_LT(omega(r, e1), omega(r, e2));
      EXPECT_LE(learning_rate(at(e1, n), r).gamma,
                learning_rate(at(e2, n), r).gamma);
    }
  }
}

TEST(Properties, FtaDominatesTa) {
  for (double e = 0.0; e <= 10.0; e += 0.01) {
    for (double alpha : {0.0, 0.03, 1.0}) {
      EXPECT_GE(omega_fta(e, alpha, 0.1, 1.0, 0.65),
                omega_ta(e, 0.1, 1.0, 0.65));
    }
  }
}

TEST(Properties, PlacidStepBounded) {
  const LrRule pta = LrRule::pta(0.09, 1.0, 0.7);
  const LrRule pfta = LrRule::pfta(0.03, 0.1, 1.0, 0.65);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> le(-8.0, 4.0), lg(-300.0, 300.0);
  for (int i = 0; i < 5000; ++i) {
    const double e = std::pow(10.0, le(rng));
    for (double n : {0.0, 1e-300, 1e300, std::pow(10.0, lg(rng))}) {
      const GradEval g = at(e, n);
      EXPECT_LE(lr_pta(g, pta).gamma * n, omega(pta, e) + 1e-12);
      EXPECT_LE(lr_pfta(g, pfta).gamma * n, omega(pfta, e) + 1e-12);
    }
  }
}

TEST(Properties, TaStepUnboundedWithoutCap) {
  LrRule r = LrRule::ta(1.0, 1.0, 0.65);
  r.gamma_max = std::numeric_limits<double>::infinity();
  r.eps_grad = 1e-300;
  for (double bound : {1.0, 1e3, 1e9}) {
    const double n = 1.0 / (10.0 * bound);
    EXPECT_GT(lr_ta(at(1.0, n), r).gamma * n, bound);
  }
}

TEST(EnergyRate, IsMinusGammaGradSquared) {
  EXPECT_EQ(energy_rate(0.5, at(1.0, 2.0)), -2.0);
  EXPECT_EQ(energy_rate(0.5, at(1.0, 0.0)), 0.0);
}
