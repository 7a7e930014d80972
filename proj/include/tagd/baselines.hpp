#pragma once

#include <string>
#include <variant>

#include "tagd/core.hpp"
#include "tagd/integrator.hpp"

namespace tagd::baselines {

// Reference optimizers. Learning-rate defaults are the grid-searched values
// used for the function approximation comparison (SGD 0.04, Adam 0.055,
// RMSProp 0.095); AdaGrad was not tuned there and uses 0.1.

struct SgdHyper {
  double lr = 0.04;
};

struct AdamHyper {
  double lr = 0.055;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct RmspropHyper {
  double lr = 0.095;
  double decay = 0.99;
  double eps = 1e-8;
};

struct AdagradHyper {
  double lr = 0.1;
  double eps = 1e-8;
};

/// Per-run optimizer memory. Unused vectors stay empty.
struct BaselineState {
  ParamVector first_moment;   // Adam m
  ParamVector second_moment;  // Adam v, RMSProp running mean of g^2
  ParamVector accumulator;    // AdaGrad sum of g^2
  std::size_t steps = 0;
};

struct Update {
  BaselineState state;
  ParamVector w;
};

// Each step throws NonFiniteStep if the new point is not finite and
// DimensionMismatch if the state does not match w.
Update sgd_step(BaselineState state, const ParamVector& w, const GradEval& g,
                const SgdHyper& hyper);
Update adam_step(BaselineState state, const ParamVector& w, const GradEval& g,
                 const AdamHyper& hyper);
Update rmsprop_step(BaselineState state, const ParamVector& w,
                    const GradEval& g, const RmspropHyper& hyper);
Update adagrad_step(BaselineState state, const ParamVector& w,
                    const GradEval& g, const AdagradHyper& hyper);

using BaselineSpec = std::variant<SgdHyper, AdamHyper, RmspropHyper, AdagradHyper>;

std::string describe(const BaselineSpec& spec);

/// Optimization loop with a baseline optimizer. config.eta is ignored (the
/// step size lives in the learning rate). Recorded gamma is the nominal lr.
RunRecord run(const Objective& objective, const BaselineSpec& spec,
              const OptConfig& config, ParamVector w0);

}  // namespace tagd::baselines
