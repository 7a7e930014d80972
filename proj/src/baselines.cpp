#include "tagd/baselines.hpp"

#include <cmath>
#include <cstdio>
#include <memory>

namespace tagd::baselines {

namespace {

void ensure(ParamVector& v, std::size_t n, const char* what) {
  if (v.empty()) {
    v = ParamVector(n);
  } else if (v.size() != n) {
    throw DimensionMismatch(std::string(what) + " has the wrong dimension");
  }
}

void check_dims(const ParamVector& w, const GradEval& g) {
  if (g.gradient.size() != w.size()) {
    throw DimensionMismatch("gradient and parameter sizes differ");
  }
}

ParamVector finite_or_throw(ParamVector w, const char* who) {
  if (!w.all_finite()) {
    throw NonFiniteStep(std::string(who) + " produced a non-finite parameter");
  }
  return w;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

Update sgd_step(BaselineState state, const ParamVector& w, const GradEval& g,
                const SgdHyper& hyper) {
  check_dims(w, g);
  ParamVector next(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    next[i] = w[i] - hyper.lr * g.gradient[i];
  }
  ++state.steps;
  return {std::move(state), finite_or_throw(std::move(next), "SGD")};
}

Update adam_step(BaselineState state, const ParamVector& w, const GradEval& g,
                 const AdamHyper& hyper) {
  check_dims(w, g);
  ensure(state.first_moment, w.size(), "Adam first moment");
  ensure(state.second_moment, w.size(), "Adam second moment");
  ++state.steps;
  const double t = static_cast<double>(state.steps);
  const double c1 = 1.0 - std::pow(hyper.beta1, t);
  const double c2 = 1.0 - std::pow(hyper.beta2, t);
  ParamVector next(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double gi = g.gradient[i];
    double& m = state.first_moment[i];
    double& v = state.second_moment[i];
    m = hyper.beta1 * m + (1.0 - hyper.beta1) * gi;
    v = hyper.beta2 * v + (1.0 - hyper.beta2) * gi * gi;
    next[i] = w[i] - hyper.lr * (m / c1) / (std::sqrt(v / c2) + hyper.eps);
  }
  return {std::move(state), finite_or_throw(std::move(next), "Adam")};
}

Update rmsprop_step(BaselineState state, const ParamVector& w,
                    const GradEval& g, const RmspropHyper& hyper) {
  check_dims(w, g);
  ensure(state.second_moment, w.size(), "RMSProp second moment");
  ++state.steps;
  ParamVector next(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double gi = g.gradient[i];
    double& v = state.second_moment[i];
    v = hyper.decay * v + (1.0 - hyper.decay) * gi * gi;
    next[i] = w[i] - hyper.lr * gi / (std::sqrt(v) + hyper.eps);
  }
  return {std::move(state), finite_or_throw(std::move(next), "RMSProp")};
}

Update adagrad_step(BaselineState state, const ParamVector& w,
                    const GradEval& g, const AdagradHyper& hyper) {
  check_dims(w, g);
  ensure(state.accumulator, w.size(), "AdaGrad accumulator");
  ++state.steps;
  ParamVector next(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double gi = g.gradient[i];
    double& acc = state.accumulator[i];
    acc += gi * gi;
    next[i] = w[i] - hyper.lr * gi / (std::sqrt(acc) + hyper.eps);
  }
  return {std::move(state), finite_or_throw(std::move(next), "AdaGrad")};
}

std::string describe(const BaselineSpec& spec) {
  struct Visitor {
    std::string operator()(const SgdHyper& h) const {
      return "SGD(lr=" + num(h.lr) + ")";
    }
    std::string operator()(const AdamHyper& h) const {
      return "Adam(lr=" + num(h.lr) + ")";
    }
    std::string operator()(const RmspropHyper& h) const {
      return "RMSProp(lr=" + num(h.lr) + ")";
    }
    std::string operator()(const AdagradHyper& h) const {
      return "AdaGrad(lr=" + num(h.lr) + ")";
    }
  };
  return std::visit(Visitor{}, spec);
}

RunRecord run(const Objective& objective, const BaselineSpec& spec,
              const OptConfig& config, ParamVector w0) {
  // The step function is copied into run_loop's std::function, so the
  // optimizer state lives behind a shared pointer.
  auto state = std::make_shared<BaselineState>();
  StepFunction fn = [state, spec](const ParamVector& w, const GradEval& g) {
    Update u = std::visit(
        [&](const auto& hyper) -> Update {
          using H = std::decay_t<decltype(hyper)>;
          if constexpr (std::is_same_v<H, SgdHyper>) {
            return sgd_step(std::move(*state), w, g, hyper);
          } else if constexpr (std::is_same_v<H, AdamHyper>) {
            return adam_step(std::move(*state), w, g, hyper);
          } else if constexpr (std::is_same_v<H, RmspropHyper>) {
            return rmsprop_step(std::move(*state), w, g, hyper);
          } else {
            return adagrad_step(std::move(*state), w, g, hyper);
          }
        },
        spec);
    *state = std::move(u.state);
    StepResult r;
    double sq = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double d = u.w[i] - w[i];
      sq += d * d;
    }
    r.step_norm = std::sqrt(sq);
    r.gamma = std::visit([](const auto& h) { return h.lr; }, spec);
    r.next = std::move(u.w);
    return r;
  };
  return run_loop(objective, config, std::move(w0), fn, describe(spec));
}

}  // namespace tagd::baselines
