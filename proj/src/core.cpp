#include "tagd/core.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <string>

namespace tagd {

double ParamVector::norm_sq() const noexcept {
  double acc = 0.0;
  for (double v : values_) acc += v * v;
  return acc;
}

double ParamVector::norm() const noexcept { return std::sqrt(norm_sq()); }

bool ParamVector::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

GradEval GradEval::from_gradient(double energy, ParamVector gradient) {
  GradEval g;
  g.energy = energy;
  g.grad_norm_sq = gradient.norm_sq();
  g.grad_norm = std::sqrt(g.grad_norm_sq);
  g.gradient = std::move(gradient);
  return g;
}

GradEval GradEval::summary(double energy, double grad_norm) {
  GradEval g;
  g.energy = energy;
  g.gradient = ParamVector{grad_norm};
  g.grad_norm = grad_norm;
  g.grad_norm_sq = grad_norm * grad_norm;
  return g;
}

double Objective::batch_value_and_gradient(std::span<const double>,
                                           std::span<const std::size_t>,
                                           std::span<double>) const {
  throw std::logic_error(name() + " does not support mini-batch evaluation");
}

GradEval eval(const Objective& objective, const ParamVector& w) {
  if (w.size() != objective.dimension()) {
    throw DimensionMismatch(objective.name() + ": expected dimension " +
                            std::to_string(objective.dimension()) + ", got " +
                            std::to_string(w.size()));
  }
  if (!w.all_finite()) {
    throw DimensionMismatch(objective.name() + ": non-finite parameter");
  }
  ParamVector grad(w.size());
  const double energy = objective.value_and_gradient(w.span(), grad.span());
  if (!std::isfinite(energy) || energy < 0.0) {
    throw NonFiniteEnergy(objective.name() +
                          ": energy must be finite and >= 0, got " +
                          std::to_string(energy));
  }
  return GradEval::from_gradient(energy, std::move(grad));
}

void OptConfig::validate() const {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw std::invalid_argument("eta must be positive and finite");
  }
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (!(stop_energy >= 0.0)) {
    throw std::invalid_argument("stop_energy must be >= 0");
  }
  if (batch_mode == BatchMode::MiniBatch && batch_size < 1) {
    throw std::invalid_argument("mini-batch mode needs batch_size >= 1");
  }
}

namespace {

std::string fmt_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

LrRule LrRule::fixed(double gamma) {
  LrRule r;
  r.kind = RuleKind::Fixed;
  r.gamma_fixed = gamma;
  return r;
}

LrRule LrRule::ta(double beta, double p, double q) {
  LrRule r;
  r.kind = RuleKind::TA;
  r.beta = beta;
  r.p = p;
  r.q = q;
  return r;
}

LrRule LrRule::fta(double alpha, double beta, double p, double q) {
  LrRule r = ta(beta, p, q);
  r.kind = RuleKind::FTA;
  r.alpha = alpha;
  return r;
}

LrRule LrRule::pta(double beta, double p, double q) {
  LrRule r = ta(beta, p, q);
  r.kind = RuleKind::PTA;
  return r;
}

LrRule LrRule::pfta(double alpha, double beta, double p, double q) {
  LrRule r = fta(alpha, beta, p, q);
  r.kind = RuleKind::PFTA;
  return r;
}

std::vector<std::string> LrRule::validate() const {
  std::vector<std::string> warnings;
  if (!(gamma_max > 0.0)) throw InvalidCoefficient("gamma_max must be > 0");
  if (!(eps_grad > 0.0)) throw InvalidCoefficient("eps_grad must be > 0");
  if (kind == RuleKind::Fixed) {
    if (!(gamma_fixed > 0.0) || !std::isfinite(gamma_fixed)) {
      throw InvalidCoefficient("fixed learning rate must be positive");
    }
    return warnings;
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw InvalidCoefficient("beta must be positive");
  }
  if (!(p > 0.0) || !(q > 0.0) || !std::isfinite(p) || !std::isfinite(q)) {
    throw InvalidCoefficient("p and q must be positive");
  }
  if (kind == RuleKind::FTA || kind == RuleKind::PFTA) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
      throw InvalidCoefficient("alpha must be positive for " +
                               to_string(kind));
    }
  }
  if (q >= p) {
    warnings.push_back(describe() +
                       ": q >= p, E = 0 is not a terminal attractor");
  }
  return warnings;
}

std::string LrRule::describe() const {
  switch (kind) {
    case RuleKind::Fixed:
      return "Fixed(gamma=" + fmt_num(gamma_fixed) + ")";
    case RuleKind::TA:
    case RuleKind::PTA:
      return to_string(kind) + "(beta=" + fmt_num(beta) +
             ",q/p=" + fmt_num(exponent()) + ")";
    case RuleKind::FTA:
    case RuleKind::PFTA:
      return to_string(kind) + "(alpha=" + fmt_num(alpha) +
             ",beta=" + fmt_num(beta) + ",q/p=" + fmt_num(exponent()) + ")";
  }
  return "?";
}

std::string to_string(RuleKind kind) {
  switch (kind) {
    case RuleKind::Fixed: return "Fixed";
    case RuleKind::TA: return "TA";
    case RuleKind::FTA: return "FTA";
    case RuleKind::PTA: return "PTA";
    case RuleKind::PFTA: return "PFTA";
  }
  return "?";
}

}  // namespace tagd
