#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "tagd/core.hpp"
#include "tagd/objectives.hpp"

using namespace tagd;

TEST(ParamVector, NormsAndFiniteness) {
  ParamVector v{3.0, 4.0};
  EXPECT_DOUBLE_EQ(v.norm_sq(), 25.0);
  EXPECT_DOUBLE_EQ(v.norm(), 5.0);
  EXPECT_TRUE(v.all_finite());
  v[1] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_FALSE(v.all_finite());
  v[1] = std::numeric_limits<double>::infinity();
  EXPECT_FALSE(v.all_finite());
}

TEST(ParamVector, EqualityIsElementwise) {
  EXPECT_EQ((ParamVector{1.0, 2.0}), (ParamVector{1.0, 2.0}));
  EXPECT_NE((ParamVector{1.0, 2.0}), (ParamVector{1.0, 2.5}));
  EXPECT_NE((ParamVector{1.0}), (ParamVector{1.0, 0.0}));
}

TEST(GradEval, NormSquaredAgreesWithinFourUlps) {
  for (double a : {1e-200, 1e-8, 0.3, 7.0, 1e150}) {
    const GradEval g = GradEval::from_gradient(1.0, ParamVector{a, -2 * a, a / 3});
    const double sq = g.grad_norm * g.grad_norm;
    const double ulp = std::nextafter(g.grad_norm_sq, INFINITY) - g.grad_norm_sq;
    EXPECT_LE(std::abs(sq - g.grad_norm_sq), 4 * ulp) << a;
  }
}

TEST(GradEval, SummaryCarriesNorm) {
  const GradEval g = GradEval::summary(2.0, 3.0);
  EXPECT_EQ(g.energy, 2.0);
  EXPECT_EQ(g.grad_norm, 3.0);
  EXPECT_EQ(g.grad_norm_sq, 9.0);
}

TEST(Eval, QuadraticAtTwo) {
  const Quadratic q = Quadratic::unit_1d();
  const GradEval g = eval(q, ParamVector{2.0});
  EXPECT_EQ(g.energy, 4.0);
  EXPECT_EQ(g.gradient, ParamVector{4.0});
  EXPECT_EQ(g.grad_norm, 4.0);
}

TEST(Eval, QuadraticAtMinimum) {
  const GradEval g = eval(Quadratic::unit_1d(), ParamVector{0.0});
  EXPECT_EQ(g.energy, 0.0);
  EXPECT_EQ(g.gradient, ParamVector{0.0});
  EXPECT_EQ(g.grad_norm, 0.0);
}

TEST(Eval, RejectsWrongDimensionAndNonFiniteInput) {
  const Quadratic q = Quadratic::unit_1d();
  EXPECT_THROW(eval(q, ParamVector{1.0, 2.0}), DimensionMismatch);
  EXPECT_THROW(eval(q, ParamVector{std::nan("")}), DimensionMismatch);
}

namespace {
class NegativeObjective final : public Objective {
 public:
  std::string name() const override { return "negative"; }
  std::size_t dimension() const override { return 1; }
  double value_and_gradient(std::span<const double>,
                            std::span<double> grad) const override {
    grad[0] = 0.0;
    return -1.0;
  }
  ParamVector initial_point(std::uint64_t) const override { return ParamVector{0.0}; }
};
}  // namespace

TEST(Eval, RejectsNegativeEnergy) {
  EXPECT_THROW(eval(NegativeObjective{}, ParamVector{0.0}), NonFiniteEnergy);
}

TEST(Objective, BatchEvaluationUnsupportedByDefault) {
  const Quadratic q = Quadratic::unit_1d();
  ParamVector w{1.0}, g(1);
  std::vector<std::size_t> idx{0};
  EXPECT_THROW(q.batch_value_and_gradient(w.span(), idx, g.span()),
               std::logic_error);
}

TEST(OptConfig, Validation) {
  OptConfig c;
  EXPECT_NO_THROW(c.validate());
  c.eta = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.max_iters = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.stop_energy = -1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.batch_mode = BatchMode::MiniBatch;
  c.batch_size = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(LrRule, FactoriesAndValidation) {
  EXPECT_TRUE(LrRule::ta(0.1, 1.0, 0.65).validate().empty());
  EXPECT_TRUE(LrRule::pfta(0.03, 0.1, 1.0, 0.65).validate().empty());
  EXPECT_THROW(LrRule::ta(0.0, 1.0, 0.5).validate(), InvalidCoefficient);
  EXPECT_THROW(LrRule::ta(-1.0, 1.0, 0.5).validate(), InvalidCoefficient);
  EXPECT_THROW(LrRule::fta(0.0, 0.1, 1.0, 0.5).validate(), InvalidCoefficient);
  EXPECT_THROW(LrRule::fixed(0.0).validate(), InvalidCoefficient);
  LrRule r = LrRule::ta(1.0, 1.0, 0.5);
  r.gamma_max = 0.0;
  EXPECT_THROW(r.validate(), InvalidCoefficient);
  r = LrRule::ta(1.0, 1.0, 0.5);
  r.eps_grad = 0.0;
  EXPECT_THROW(r.validate(), InvalidCoefficient);
}

TEST(LrRule, NonTerminalExponentOnlyWarns) {
  EXPECT_EQ(LrRule::ta(1.0, 1.0, 1.0).validate().size(), 1u);
  EXPECT_EQ(LrRule::pta(1.0, 2.0, 3.0).validate().size(), 1u);
}

TEST(LrRule, DescribeAndExponent) {
  const LrRule r = LrRule::pfta(0.03, 0.1, 1.0, 0.65);
  EXPECT_EQ(r.describe(), "PFTA(alpha=0.03,beta=0.1,q/p=0.65)");
  EXPECT_DOUBLE_EQ(LrRule::ta(1.0, 3.0, 1.0).exponent(), 1.0 / 3.0);
  EXPECT_EQ(to_string(RuleKind::PTA), "PTA");
}
