#include "tagd/scalar_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

#include "tagd/lr_rules.hpp"

namespace tagd {

namespace {

void require_terminal(double p, double q) {
  if (!(q < p)) {
    throw NotTerminal("q/p = " + std::to_string(q / p) +
                      " >= 1: E = 0 is only approached asymptotically");
  }
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidCoefficient(std::string(what) + " must be positive");
  }
}

}  // namespace

double relaxation_time_ta(double e0, double beta, double p, double q) {
  require_positive(beta, "beta");
  require_positive(p, "p");
  require_positive(q, "q");
  require_terminal(p, q);
  if (e0 < 0.0) throw NegativeEnergy("initial energy must be >= 0");
  return p / (beta * (p - q)) * std::pow(e0, 1.0 - q / p);
}

double relaxation_time_fta(double e0, double alpha, double beta, double p,
                           double q) {
  require_positive(alpha, "alpha");
  require_positive(beta, "beta");
  require_positive(p, "p");
  require_positive(q, "q");
  require_terminal(p, q);
  if (e0 < 0.0) throw NegativeEnergy("initial energy must be >= 0");
  return p / (alpha * (p - q)) *
         std::log1p(alpha / beta * std::pow(e0, (p - q) / p));
}

double tsm_total_time(std::span<const double> energies, const LrRule& rule) {
  double total = 0.0;
  for (double e : energies) {
    switch (rule.kind) {
      case RuleKind::TA:
      case RuleKind::PTA:
        total += relaxation_time_ta(e, rule.beta, rule.p, rule.q);
        break;
      case RuleKind::FTA:
      case RuleKind::PFTA:
        total += relaxation_time_fta(e, rule.alpha, rule.beta, rule.p, rule.q);
        break;
      case RuleKind::Fixed:
        throw InvalidCoefficient("a fixed rate has no sliding-mode time");
    }
  }
  return total;
}

double ScalarFlowSpec::omega(double energy) const {
  const double e = std::max(energy, 0.0);
  return form == FlowForm::TA ? omega_ta(e, beta, p, q)
                              : omega_fta(e, alpha, beta, p, q);
}

std::optional<double> ScalarFlowSpec::predicted_time() const {
  if (!(q < p)) return std::nullopt;
  return form == FlowForm::TA ? relaxation_time_ta(e0, beta, p, q)
                              : relaxation_time_fta(e0, alpha, beta, p, q);
}

ScalarFlowSpec ScalarFlowSpec::ta(double beta, double p, double q, double e0) {
  ScalarFlowSpec s;
  s.form = FlowForm::TA;
  s.beta = beta;
  s.p = p;
  s.q = q;
  s.e0 = e0;
  return s;
}

ScalarFlowSpec ScalarFlowSpec::fta(double alpha, double beta, double p,
                                   double q, double e0) {
  ScalarFlowSpec s = ta(beta, p, q, e0);
  s.form = FlowForm::FTA;
  s.alpha = alpha;
  return s;
}

FlowResult integrate_scalar_flow(const ScalarFlowSpec& spec) {
  require_positive(spec.beta, "beta");
  require_positive(spec.p, "p");
  require_positive(spec.q, "q");
  if (spec.form == FlowForm::FTA) require_positive(spec.alpha, "alpha");
  if (!(spec.e0 >= 0.0) || !std::isfinite(spec.e0)) {
    throw NegativeEnergy("initial energy must be finite and >= 0");
  }
  if (!(spec.tol >= 0.0)) throw std::invalid_argument("tol must be >= 0");

  const std::optional<double> predicted = spec.predicted_time();
  double horizon = spec.horizon;
  if (horizon <= 0.0) {
    if (predicted) {
      horizon = 10.0 * *predicted;
    } else if (spec.stop_time) {
      horizon = *spec.stop_time;
    } else {
      throw std::invalid_argument(
          "non-terminal flow needs an explicit horizon or stop_time");
    }
  }
  double dt = spec.dt;
  if (dt <= 0.0) {
    const double time_scale = predicted ? *predicted : horizon;
    dt = 1e-4 * std::min(spec.e0, time_scale);
    if (!(dt > 0.0)) dt = 1e-4 * std::max(time_scale, 1e-300);
  }

  const double t_end = spec.stop_time ? std::min(*spec.stop_time, horizon)
                                      : horizon;
  const double est_steps = std::ceil(t_end / dt);
  const std::size_t stride = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             est_steps / static_cast<double>(std::max<std::size_t>(
                             spec.max_samples, 2) - 1)));

  FlowResult res;
  res.dt = dt;
  double e = spec.e0;
  double t = 0.0;
  std::size_t n = 0;
  res.curve.push_back({t, e});

  auto done = [&](FlowStatus status) {
    res.status = status;
    res.final_time = t;
    res.final_energy = e;
    if (status == FlowStatus::Reached) res.reach_time = t;
    if (res.curve.back().t != t) res.curve.push_back({t, e});
    return res;
  };

  while (true) {
    if (e <= spec.tol) return done(FlowStatus::Reached);
    if (spec.stop_time && t >= *spec.stop_time) return done(FlowStatus::Stopped);
    if (t > horizon) return done(FlowStatus::Unreached);

    double h = dt;
    bool partial = false;
    if (spec.stop_time && t + h > *spec.stop_time) {
      h = *spec.stop_time - t;
      partial = true;
    }
    const double k1 = -spec.omega(e);
    const double k2 = -spec.omega(e + 0.5 * h * k1);
    const double k3 = -spec.omega(e + 0.5 * h * k2);
    const double k4 = -spec.omega(e + h * k3);
    double next = e + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (next > e) {
      throw StepTooLarge("energy increased from " + std::to_string(e) +
                         " to " + std::to_string(next));
    }
    e = std::max(next, 0.0);
    ++n;
    t = partial ? *spec.stop_time : static_cast<double>(n) * dt;
    if (n % stride == 0) res.curve.push_back({t, e});
  }
}

void write_curve_csv(std::ostream& out, const FlowResult& result) {
  out << "t,E\n";
  char buf[64];
  for (const auto& s : result.curve) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", s.t, s.energy);
    out << buf;
  }
}

std::string to_string(AttractorKind kind) {
  switch (kind) {
    case AttractorKind::Terminal: return "terminal";
    case AttractorKind::Marginal: return "marginal";
    case AttractorKind::Asymptotic: return "asymptotic";
  }
  return "?";
}

AttractorClass classify_attractor(const LrRule& rule) {
  if (rule.kind == RuleKind::Fixed) {
    throw InvalidCoefficient("a fixed rate has no attractor function");
  }
  require_positive(rule.beta, "beta");
  const bool linear = rule.kind == RuleKind::FTA || rule.kind == RuleKind::PFTA;
  const double a = linear ? rule.alpha : 0.0;
  const double k = rule.exponent();

  // dOmega/dE = alpha + beta k E^(k-1).
  AttractorClass c;
  if (k < 1.0) {
    c.kind = AttractorKind::Terminal;
    c.stiffness_limit = std::numeric_limits<double>::infinity();
  } else if (k == 1.0) {
    c.kind = AttractorKind::Marginal;
    c.stiffness_limit = a + rule.beta;
  } else {
    c.kind = AttractorKind::Asymptotic;
    c.stiffness_limit = a;
  }
  return c;
}

}  // namespace tagd
