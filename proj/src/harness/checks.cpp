#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "tagd/harness.hpp"
#include "tagd/lr_rules.hpp"
#include "tagd/objectives.hpp"
#include "tagd/scalar_dynamics.hpp"

namespace tagd::harness {

namespace {

std::string fmt(const char* format, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, format, a, b);
  return buf;
}

// Largest |fd_i - g_i| relative to max(|g|, 1).
double gradient_error(const Objective& obj, const ParamVector& w) {
  const GradEval g = eval(obj, w);
  const ParamVector fd = central_difference(obj, w);
  double diff = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    diff = std::max(diff, std::abs(fd[i] - g.gradient[i]));
  }
  return diff / std::max(g.grad_norm, 1.0);
}

CheckResult check_gradients(std::uint64_t seed) {
  const Quadratic quad({1.0, 3.0}, {0.5, -2.0});
  const TwoWell well;
  const TwoWell2D well2;
  double worst = 0.0;
  for (const Objective* obj :
       std::initializer_list<const Objective*>{&quad, &well, &well2}) {
    worst = std::max(worst, gradient_error(*obj, obj->initial_point(seed)));
  }
  const MlpObjective mlp(gen_dataset(30, seed));
  const ParamVector w = mlp.initial_point(seed);
  worst = std::max(worst, gradient_error(mlp, w));
  return {"analytic gradients match central differences", worst < 1e-6,
          fmt("max relative error %.3g", worst)};
}

CheckResult check_sigmoid() {
  const bool ok = sigmoid(0.0) == 0.5 && sigmoid(1e12) == 1.0 &&
                  sigmoid(-1e12) == 0.0 && sigmoid(41.0) == 1.0 &&
                  sigmoid(-41.0) == 0.0 &&
                  std::abs(sigmoid(1e-12) - 0.5) < 1e-12;
  return {"sigmoid is saturating and centred", ok, ""};
}

CheckResult check_decoupling() {
  double worst = 0.0;
  for (double e : {1e-6, 0.3, 1.0, 25.0}) {
    for (double norm : {1e-3, 0.7, 4.0}) {
      const GradEval g = GradEval::summary(e, norm);
      for (const LrRule& rule : {LrRule::ta(0.4, 1.0, 0.6),
                                 LrRule::fta(0.2, 0.5, 1.0, 0.8)}) {
        const RateOutput r = learning_rate(g, rule);
        if (r.clamped) continue;
        const double rate = energy_rate(r.gamma, g);
        worst = std::max(worst, std::abs(rate + r.omega) / r.omega);
      }
    }
  }
  return {"TA/FTA energy rate equals -Omega(E)", worst <= 1e-12,
          fmt("max relative error %.3g", worst)};
}

CheckResult check_pta_step_bound() {
  const LrRule rule = LrRule::pta(0.09, 1.0, 0.7);
  bool ok = true;
  for (double e : {1e-8, 0.01, 1.0, 100.0}) {
    for (double norm : {1e-9, 1e-3, 1.0, 1e3}) {
      const GradEval g = GradEval::summary(e, norm);
      const RateOutput r = learning_rate(g, rule);
      ok = ok && r.gamma * norm <= r.omega * (1.0 + 1e-12);
    }
  }
  return {"PTA step never exceeds Omega(E)", ok, ""};
}

CheckResult check_relaxation_time() {
  ScalarFlowSpec spec = ScalarFlowSpec::ta(0.5, 1.0, 0.6, 2.0);
  spec.tol = 0.0;
  const FlowResult res = integrate_scalar_flow(spec);
  const double predicted = *spec.predicted_time();
  const double err = res.status == FlowStatus::Reached
                         ? std::abs(res.reach_time - predicted) / predicted
                         : 1.0;
  return {"RK4 touchdown matches closed-form relaxation time", err < 1e-3,
          fmt("relative error %.3g (predicted %.6g)", err, predicted)};
}

CheckResult check_determinism(std::uint64_t seed) {
  const MlpObjective mlp(gen_dataset(40, seed));
  OptConfig cfg;
  cfg.max_iters = 30;
  cfg.seed = seed;
  const LrRule rule = LrRule::pfta(0.03, 0.1, 1.0, 0.65);
  const RunRecord a = run(mlp, rule, cfg);
  const RunRecord b = run(mlp, rule, cfg);
  bool same = a.points.size() == b.points.size() && a.final_point == b.final_point;
  for (std::size_t i = 0; same && i < a.points.size(); ++i) {
    same = a.points[i].energy == b.points[i].energy;
  }
  return {"runs are reproducible for a fixed seed", same, ""};
}

CheckResult check_dataset_roundtrip(std::uint64_t seed) {
  const Dataset d = gen_dataset(25, seed);
  std::stringstream ss;
  write_dataset_csv(ss, d);
  const Dataset back = read_dataset_csv(ss);
  const bool ok = back.raw_inputs == d.raw_inputs && back.targets == d.targets &&
                  back.inputs == d.inputs;
  return {"dataset CSV round trip is exact", ok, ""};
}

}  // namespace

ParamVector central_difference(const Objective& objective, const ParamVector& w,
                               double h) {
  ParamVector fd(w.size());
  ParamVector probe = w;
  ParamVector scratch(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    probe[i] = w[i] + h;
    const double up = objective.value_and_gradient(probe.span(), scratch.span());
    probe[i] = w[i] - h;
    const double down =
        objective.value_and_gradient(probe.span(), scratch.span());
    probe[i] = w[i];
    fd[i] = (up - down) / (2.0 * h);
  }
  return fd;
}

std::vector<CheckResult> run_invariant_checks(std::uint64_t seed) {
  return {check_gradients(seed),       check_sigmoid(),
          check_decoupling(),          check_pta_step_bound(),
          check_relaxation_time(),     check_determinism(seed),
          check_dataset_roundtrip(seed)};
}

}  // namespace tagd::harness
