#pragma once

#include "tagd/core.hpp"

namespace tagd {

/// Learning rate produced by a rule at one point.
struct RateOutput {
  double gamma = 0.0;
  double omega = 0.0;    // attractor function value Omega(E)
  bool clamped = false;  // gamma_max or the eps_grad floor was active
};

/// 1 / (1 + exp(-x)); saturates to exactly 1 above 40 and exactly 0 below -40.
double sigmoid(double x) noexcept;

/// beta * E^(q/p). Throws NegativeEnergy for E < 0.
double omega_ta(double energy, double beta, double p, double q);

/// alpha * E + beta * E^(q/p). Throws NegativeEnergy for E < 0.
double omega_fta(double energy, double alpha, double beta, double p, double q);

/// Omega(E) of a non-fixed rule (TA/PTA use omega_ta, FTA/PFTA omega_fta).
double omega(const LrRule& rule, double energy);

// gamma = Omega(E) / max(|grad|, eps)^2, capped at gamma_max.
RateOutput lr_ta(const GradEval& g, const LrRule& rule);
RateOutput lr_fta(const GradEval& g, const LrRule& rule);

// gamma = Omega(E) / max(|grad|, eps) * sigmoid(1 / max(|grad|, eps)).
// No gamma_max: the step gamma * |grad| is already bounded by Omega(E).
RateOutput lr_pta(const GradEval& g, const LrRule& rule);
RateOutput lr_pfta(const GradEval& g, const LrRule& rule);

/// Dispatches on rule.kind. Fixed returns gamma_fixed with omega = 0.
RateOutput learning_rate(const GradEval& g, const LrRule& rule);

/// Continuous-time energy rate dE/dt = -(grad E)^T dw/dt = -gamma |grad E|^2
/// for the gradient flow dw/dt = -gamma grad E.
double energy_rate(double gamma, const GradEval& g) noexcept;

}  // namespace tagd
