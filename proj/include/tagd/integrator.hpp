#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "tagd/core.hpp"
#include "tagd/lr_rules.hpp"

namespace tagd {

/// State after one iteration. Point 0 is the starting point; for n >= 1,
/// gamma / step_norm / clamped describe the step that produced w_n.
struct TrajectoryPoint {
  std::size_t iter = 0;
  double energy = 0.0;
  double grad_norm = 0.0;
  double gamma = 0.0;
  double step_norm = 0.0;  // eta * gamma * |grad E|
  bool clamped = false;
  double elapsed = 0.0;  // seconds since the loop started
};

enum class Outcome { Converged, MaxIters, Diverged };

std::string to_string(Outcome outcome);

struct RunRecord {
  std::string rule;  // descriptor of the optimizer
  OptConfig config;
  std::vector<TrajectoryPoint> points;
  Outcome outcome = Outcome::MaxIters;
  std::size_t outcome_iter = 0;  // iteration at which the run ended
  double wall_clock_total = 0.0;
  ParamVector final_point;

  double final_energy() const { return points.empty() ? 0.0 : points.back().energy; }
  std::size_t clamp_events() const;
};

/// One Euler step w - eta * gamma * grad E. Throws NonFiniteStep when the
/// result is not finite.
ParamVector step(const ParamVector& w, const GradEval& g, const LrRule& rule,
                 double eta);

/// Result of a single update produced by an optimizer.
struct StepResult {
  ParamVector next;
  double gamma = 0.0;
  double step_norm = 0.0;
  bool clamped = false;
};

/// Optimizer hook: given the current point and its evaluation (full batch or
/// mini-batch), produce the next point. May throw NonFiniteStep.
using StepFunction =
    std::function<StepResult(const ParamVector& w, const GradEval& g)>;

/// Generic optimization loop shared by the rate rules and the baselines.
///
/// Iterates until E <= stop_energy (Converged), max_iters steps were taken
/// (MaxIters), or the state became non-finite / E exceeded 1e12 times its
/// initial value (Diverged). Divergence never escapes as an exception.
/// In mini-batch mode one iteration is one shuffled pass over the samples and
/// the recorded energy is the full-batch energy after that pass.
RunRecord run_loop(const Objective& objective, const OptConfig& config,
                   ParamVector w0, const StepFunction& step_fn,
                   std::string descriptor);

/// Gradient descent with the given learning-rate rule.
RunRecord run(const Objective& objective, const LrRule& rule,
              const OptConfig& config, ParamVector w0);

/// Same, starting from objective.initial_point(config.seed).
RunRecord run(const Objective& objective, const LrRule& rule,
              const OptConfig& config);

}  // namespace tagd
