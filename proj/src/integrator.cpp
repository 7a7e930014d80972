#include "tagd/integrator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

namespace tagd {

namespace {

constexpr double kDivergenceFactor = 1e12;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Applies a minibatch pass: one step per batch of the shuffled sample order.
StepResult minibatch_epoch(const Objective& objective, const ParamVector& w,
                           const StepFunction& step_fn, std::size_t batch_size,
                           std::vector<std::size_t>& order,
                           std::mt19937_64& rng) {
  std::shuffle(order.begin(), order.end(), rng);
  StepResult total;
  total.next = w;
  ParamVector grad(w.size());
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    const std::size_t stop = std::min(order.size(), start + batch_size);
    std::span<const std::size_t> batch(order.data() + start, stop - start);
    const double e =
        objective.batch_value_and_gradient(total.next.span(), batch, grad.span());
    if (!std::isfinite(e) || e < 0.0) throw NonFiniteStep("non-finite batch energy");
    StepResult r = step_fn(total.next, GradEval::from_gradient(e, grad));
    total.next = std::move(r.next);
    total.gamma = r.gamma;
    total.clamped = total.clamped || r.clamped;
  }
  double sq = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double d = total.next[i] - w[i];
    sq += d * d;
  }
  total.step_norm = std::sqrt(sq);
  return total;
}

ParamVector euler_update(const ParamVector& w, const GradEval& g, double scale,
                         const LrRule& rule) {
  if (g.gradient.size() != w.size()) {
    throw DimensionMismatch("gradient and parameter sizes differ");
  }
  ParamVector next(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    next[i] = w[i] - scale * g.gradient[i];
  }
  if (!next.all_finite()) {
    throw NonFiniteStep("update produced a non-finite parameter (" +
                        rule.describe() + ")");
  }
  return next;
}

}  // namespace

std::string to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Converged: return "converged";
    case Outcome::MaxIters: return "max_iters";
    case Outcome::Diverged: return "diverged";
  }
  return "?";
}

std::size_t RunRecord::clamp_events() const {
  return static_cast<std::size_t>(std::count_if(
      points.begin(), points.end(), [](const auto& p) { return p.clamped; }));
}

ParamVector step(const ParamVector& w, const GradEval& g, const LrRule& rule,
                 double eta) {
  return euler_update(w, g, eta * learning_rate(g, rule).gamma, rule);
}

RunRecord run_loop(const Objective& objective, const OptConfig& config,
                   ParamVector w0, const StepFunction& step_fn,
                   std::string descriptor) {
  config.validate();
  RunRecord rec;
  rec.rule = std::move(descriptor);
  rec.config = config;

  std::vector<std::size_t> order;
  std::mt19937_64 rng(config.seed);
  if (config.batch_mode == BatchMode::MiniBatch) {
    order.resize(objective.sample_count());
    if (order.empty()) {
      throw std::invalid_argument(objective.name() +
                                  " has no samples for mini-batch mode");
    }
    std::iota(order.begin(), order.end(), std::size_t{0});
  }

  const auto start = Clock::now();
  ParamVector w = std::move(w0);
  GradEval g = eval(objective, w);
  const double e0 = g.energy;
  rec.points.push_back({0, g.energy, g.grad_norm, 0.0, 0.0, false, 0.0});

  auto finish = [&](Outcome outcome, std::size_t iter) {
    rec.outcome = outcome;
    rec.outcome_iter = iter;
    rec.wall_clock_total = seconds_since(start);
    rec.final_point = w;
    return rec;
  };

  if (g.energy <= config.stop_energy) return finish(Outcome::Converged, 0);

  for (std::size_t n = 1; n <= config.max_iters; ++n) {
    StepResult r;
    try {
      r = config.batch_mode == BatchMode::Full
              ? step_fn(w, g)
              : minibatch_epoch(objective, w, step_fn, config.batch_size,
                                order, rng);
      if (!r.next.all_finite()) throw NonFiniteStep("non-finite parameter");
      g = eval(objective, r.next);
    } catch (const NonFiniteStep&) {
      return finish(Outcome::Diverged, n);
    } catch (const NonFiniteEnergy&) {
      return finish(Outcome::Diverged, n);
    }
    w = std::move(r.next);
    if (!std::isfinite(r.step_norm) || g.energy > kDivergenceFactor * e0) {
      return finish(Outcome::Diverged, n);
    }
    rec.points.push_back({n, g.energy, g.grad_norm, r.gamma, r.step_norm,
                          r.clamped, seconds_since(start)});
    if (g.energy <= config.stop_energy) return finish(Outcome::Converged, n);
  }
  return finish(Outcome::MaxIters, config.max_iters);
}

RunRecord run(const Objective& objective, const LrRule& rule,
              const OptConfig& config, ParamVector w0) {
  rule.validate();
  const double eta = config.eta;
  StepFunction fn = [&rule, eta](const ParamVector& w, const GradEval& g) {
    const RateOutput rate = learning_rate(g, rule);
    StepResult r;
    r.next = euler_update(w, g, eta * rate.gamma, rule);
    r.gamma = rate.gamma;
    r.step_norm = eta * rate.gamma * g.grad_norm;
    r.clamped = rate.clamped;
    return r;
  };
  return run_loop(objective, config, std::move(w0), fn, rule.describe());
}

RunRecord run(const Objective& objective, const LrRule& rule,
              const OptConfig& config) {
  return run(objective, rule, config, objective.initial_point(config.seed));
}

}  // namespace tagd
