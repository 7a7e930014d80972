#include <gtest/gtest.h>

#include <cmath>

#include "tagd/integrator.hpp"
#include "tagd/objectives.hpp"

using namespace tagd;

namespace {

OptConfig config(std::size_t max_iters, double stop, double eta = 1.0) {
  OptConfig c;
  c.max_iters = max_iters;
  c.stop_energy = stop;
  c.eta = eta;
  return c;
}

}  // namespace

TEST(Step, FixedRateOnSquare) {
  const Quadratic q = Quadratic::unit_1d();
  const ParamVector w{2.0};
  EXPECT_EQ(step(w, eval(q, w), LrRule::fixed(0.1), 1.0), ParamVector{1.6});
}

TEST(Step, TaOnSquare) {
  const Quadratic q = Quadratic::unit_1d();
  const ParamVector w{1.0};
  // gamma = 1 * 1^0.5 / 2^2 = 0.25, w' = 1 - 0.25 * 2.
  EXPECT_EQ(step(w, eval(q, w), LrRule::ta(1.0, 1.0, 0.5), 1.0),
            ParamVector{0.5});
}

TEST(Step, ZeroStepAtMinimum) {
  const Quadratic q = Quadratic::unit_1d();
  const ParamVector w{0.0};
  const GradEval g = eval(q, w);
  for (const LrRule& r :
       {LrRule::fixed(0.3), LrRule::ta(1.0, 1.0, 0.5),
        LrRule::fta(1.0, 1.0, 1.0, 0.5), LrRule::pta(1.0, 1.0, 0.5),
        LrRule::pfta(1.0, 1.0, 1.0, 0.5)}) {
    EXPECT_EQ(step(w, g, r, 1.0), w) << r.describe();
  }
}

TEST(Step, NonFiniteResultThrows) {
  const GradEval g = GradEval::from_gradient(1.0, ParamVector{1e300});
  EXPECT_THROW(step(ParamVector{0.0}, g, LrRule::fixed(1e300), 1.0),
               NonFiniteStep);
}

TEST(Run, FixedRateQuartersEnergy) {
  const Quadratic q = Quadratic::unit_1d();
  const RunRecord r =
      run(q, LrRule::fixed(0.25), config(100, 1e-8), ParamVector{1.0});
  ASSERT_EQ(r.outcome, Outcome::Converged);
  // 0.25^n <= 1e-8 first at n = 14.
  EXPECT_EQ(r.outcome_iter, 14u);
  ASSERT_EQ(r.points.size(), 15u);
  for (std::size_t n = 0; n < r.points.size(); ++n) {
    EXPECT_EQ(r.points[n].energy, std::pow(0.25, static_cast<double>(n)));
    EXPECT_EQ(r.points[n].iter, n);
  }
  EXPECT_EQ(r.final_point, ParamVector{std::pow(0.5, 14.0)});
}

TEST(Run, HugeStopEnergyConvergesImmediately) {
  const RunRecord r = run(Quadratic::unit_1d(), LrRule::fixed(0.1),
                          config(10, 1e308), ParamVector{1.0});
  EXPECT_EQ(r.outcome, Outcome::Converged);
  EXPECT_EQ(r.outcome_iter, 0u);
  EXPECT_EQ(r.points.size(), 1u);
}

TEST(Run, SingleIterationBudget) {
  const RunRecord r = run(Quadratic::unit_1d(), LrRule::fixed(0.1),
                          config(1, 0.0), ParamVector{1.0});
  EXPECT_EQ(r.outcome, Outcome::MaxIters);
  EXPECT_EQ(r.points.size(), 2u);
  EXPECT_EQ(r.points[1].gamma, 0.1);
  EXPECT_DOUBLE_EQ(r.points[1].step_norm, 0.2);
}

TEST(Run, DivergenceEndsRunCleanly) {
  const RunRecord r = run(Quadratic::unit_1d(), LrRule::fixed(10.0),
                          config(100, 1e-8), ParamVector{1.0});
  EXPECT_EQ(r.outcome, Outcome::Diverged);
  EXPECT_LT(r.outcome_iter, 100u);
  for (const auto& p : r.points) EXPECT_TRUE(std::isfinite(p.energy));
}

TEST(Run, OverflowIsDivergence) {
  const RunRecord r = run(Quadratic::unit_1d(), LrRule::fixed(1e200),
                          config(100, 1e-8), ParamVector{1e100});
  EXPECT_EQ(r.outcome, Outcome::Diverged);
  EXPECT_EQ(r.outcome_iter, 1u);
}

TEST(Run, Deterministic) {
  const MlpObjective mlp(gen_dataset(50, 3));
  OptConfig c = config(60, 0.0);
  c.seed = 5;
  for (const LrRule& rule :
       {LrRule::pfta(0.03, 0.1, 1.0, 0.65), LrRule::ta(0.1, 1.0, 0.65)}) {
    const RunRecord a = run(mlp, rule, c);
    const RunRecord b = run(mlp, rule, c);
    ASSERT_EQ(a.points.size(), b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
      EXPECT_EQ(a.points[i].energy, b.points[i].energy);
      EXPECT_EQ(a.points[i].gamma, b.points[i].gamma);
    }
    EXPECT_EQ(a.final_point, b.final_point);
  }
}

TEST(Run, MiniBatchIsDeterministicAndRecordsFullEnergy) {
  const MlpObjective mlp(gen_dataset(40, 1));
  OptConfig c = config(20, 0.0);
  c.batch_mode = BatchMode::MiniBatch;
  c.batch_size = 7;
  c.seed = 2;
  const LrRule rule = LrRule::pfta(0.03, 0.1, 1.0, 0.65);
  const RunRecord a = run(mlp, rule, c);
  const RunRecord b = run(mlp, rule, c);
  ASSERT_EQ(a.points.size(), b.points.size());
  EXPECT_EQ(a.final_point, b.final_point);
  EXPECT_EQ(eval(mlp, a.final_point).energy, a.final_energy());

  c.seed = 3;
  const RunRecord other = run(mlp, rule, c);
  EXPECT_NE(other.final_point, a.final_point);
}

TEST(Run, MiniBatchNeedsSamples) {
  OptConfig c = config(5, 0.0);
  c.batch_mode = BatchMode::MiniBatch;
  c.batch_size = 2;
  EXPECT_THROW(run(Quadratic::unit_1d(), LrRule::fixed(0.1), c, ParamVector{1.0}),
               std::invalid_argument);
}

TEST(Run, ClampEventsAreCounted) {
  // On E = w^2 the uncapped TA rate is 1 / (4|w|) > 0.1 for |w| <= 1.
  LrRule r = LrRule::ta(1.0, 1.0, 0.5);
  r.gamma_max = 0.1;
  const RunRecord rec =
      run(Quadratic::unit_1d(), r, config(5, 0.0), ParamVector{1.0});
  EXPECT_EQ(rec.clamp_events(), 5u);
}

// With eta * gamma * L < 1 the quadratic energy never increases.
TEST(Properties, DescentOnConvexQuadratic) {
  const Quadratic q({1.0, 2.5, 0.5}, {0.3, -1.0, 2.0});
  const double L = q.max_curvature();
  const std::vector<LrRule> rules = {
      LrRule::fixed(0.5 / L), LrRule::ta(0.1, 1.0, 0.65),
      LrRule::fta(0.03, 0.1, 1.0, 0.65), LrRule::pta(0.09, 1.0, 0.7),
      LrRule::pfta(0.03, 0.1, 1.0, 0.65)};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ParamVector w0 = q.initial_point(seed);
    for (const auto& rule : rules) {
      ParamVector w = w0;
      GradEval g = eval(q, w);
      for (int it = 0; it < 300 && g.energy > 1e-12; ++it) {
        const RateOutput rate = learning_rate(g, rule);
        if (rate.clamped) break;
        const double eta = std::min(1.0, 0.9 / (rate.gamma * L));
        ASSERT_LT(eta * rate.gamma * L, 1.0);
        w = step(w, g, rule, eta);
        const GradEval next = eval(q, w);
        EXPECT_LE(next.energy, g.energy) << rule.describe() << " seed " << seed;
        g = next;
      }
    }
  }
}

TEST(Properties, JumpOutOfShallowWell) {
  const TwoWell well;
  LrRule ta = LrRule::ta(1.0, 1.0, 0.65);
  ta.gamma_max = 1e6;
  const LrRule pta = LrRule::pta(1.0, 1.0, 0.65);
  const OptConfig c = config(200, 1e-4);

  std::size_t escaped = 0, big_jump = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const ParamVector w0 = well.initial_point(seed);
    ASSERT_TRUE(well.in_shallow_basin(w0[0]));

    const RunRecord r = run(well, ta, c, w0);
    if (!well.in_shallow_basin(r.final_point[0])) ++escaped;
    double max_step = 0.0;
    for (const auto& p : r.points) max_step = std::max(max_step, p.step_norm);
    if (max_step > 10.0 * well.well_width()) ++big_jump;

    const RunRecord rp = run(well, pta, c, w0);
    for (std::size_t i = 1; i < rp.points.size(); ++i) {
      const double bound = c.eta * 1.0 * std::pow(rp.points[i - 1].energy, 0.65);
      EXPECT_LE(rp.points[i].step_norm, bound * (1.0 + 1e-12));
    }
  }
  EXPECT_GE(escaped, 45u);
  EXPECT_GE(big_jump, 1u);
}
