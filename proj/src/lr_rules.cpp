#include "tagd/lr_rules.hpp"

#include <algorithm>
#include <cmath>

namespace tagd {

namespace {

void require_nonnegative(double energy) {
  if (energy < 0.0 || std::isnan(energy)) {
    throw NegativeEnergy("attractor function needs E >= 0, got " +
                         std::to_string(energy));
  }
}

RateOutput squared_norm_rate(const GradEval& g, const LrRule& rule,
                             double om) {
  RateOutput out;
  out.omega = om;
  const double floor_sq = rule.eps_grad * rule.eps_grad;
  const bool floored = !(g.grad_norm_sq >= floor_sq);
  double gamma = om / std::max(g.grad_norm_sq, floor_sq);
  if (gamma > rule.gamma_max) {
    gamma = rule.gamma_max;
    out.clamped = true;
  }
  out.clamped = out.clamped || floored;
  out.gamma = gamma;
  return out;
}

RateOutput placid_rate(const GradEval& g, const LrRule& rule, double om) {
  RateOutput out;
  out.omega = om;
  const double norm = std::max(g.grad_norm, rule.eps_grad);
  out.clamped = !(g.grad_norm >= rule.eps_grad);
  out.gamma = om / norm * sigmoid(1.0 / norm);
  // Keep gamma * |grad| <= omega after rounding.
  while (out.gamma > 0.0 && out.gamma * g.grad_norm > om) {
    out.gamma = std::nextafter(out.gamma, 0.0);
  }
  return out;
}

}  // namespace

double sigmoid(double x) noexcept {
  if (x > 40.0) return 1.0;
  if (x < -40.0) return 0.0;
  return 1.0 / (1.0 + std::exp(-x));
}

double omega_ta(double energy, double beta, double p, double q) {
  require_nonnegative(energy);
  return beta * std::pow(energy, q / p);
}

double omega_fta(double energy, double alpha, double beta, double p,
                 double q) {
  require_nonnegative(energy);
  return alpha * energy + beta * std::pow(energy, q / p);
}

double omega(const LrRule& rule, double energy) {
  switch (rule.kind) {
    case RuleKind::TA:
    case RuleKind::PTA:
      return omega_ta(energy, rule.beta, rule.p, rule.q);
    case RuleKind::FTA:
    case RuleKind::PFTA:
      return omega_fta(energy, rule.alpha, rule.beta, rule.p, rule.q);
    case RuleKind::Fixed:
      break;
  }
  throw InvalidCoefficient("a fixed learning rate has no attractor function");
}

RateOutput lr_ta(const GradEval& g, const LrRule& rule) {
  return squared_norm_rate(g, rule,
                           omega_ta(g.energy, rule.beta, rule.p, rule.q));
}

RateOutput lr_fta(const GradEval& g, const LrRule& rule) {
  return squared_norm_rate(
      g, rule, omega_fta(g.energy, rule.alpha, rule.beta, rule.p, rule.q));
}

RateOutput lr_pta(const GradEval& g, const LrRule& rule) {
  return placid_rate(g, rule, omega_ta(g.energy, rule.beta, rule.p, rule.q));
}

RateOutput lr_pfta(const GradEval& g, const LrRule& rule) {
  return placid_rate(
      g, rule, omega_fta(g.energy, rule.alpha, rule.beta, rule.p, rule.q));
}

RateOutput learning_rate(const GradEval& g, const LrRule& rule) {
  switch (rule.kind) {
    case RuleKind::Fixed:
      return RateOutput{rule.gamma_fixed, 0.0, false};
    case RuleKind::TA:
      return lr_ta(g, rule);
    case RuleKind::FTA:
      return lr_fta(g, rule);
    case RuleKind::PTA:
      return lr_pta(g, rule);
    case RuleKind::PFTA:
      return lr_pfta(g, rule);
  }
  return {};
}

double energy_rate(double gamma, const GradEval& g) noexcept {
  return -gamma * g.grad_norm_sq;
}

}  // namespace tagd
