#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "tagd/core.hpp"

namespace tagd {

struct NotTerminal : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct StepTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Closed-form time for dE/dt = -beta E^(q/p) to reach E = 0 from e0:
/// p / (beta (p - q)) * e0^(1 - q/p). Throws NotTerminal when q >= p.
double relaxation_time_ta(double e0, double beta, double p, double q);

/// Closed-form time for dE/dt = -(alpha E + beta E^(q/p)) to reach 0:
/// p / (alpha (p - q)) * ln((alpha / beta) e0^((p - q) / p) + 1).
double relaxation_time_fta(double e0, double alpha, double beta, double p,
                           double q);

/// Time of a sequence of sliding-mode stages, one relaxation per energy.
/// TA and PTA rules use the TA formula; FTA and PFTA the FTA formula.
double tsm_total_time(std::span<const double> energies, const LrRule& rule);

enum class FlowForm { TA, FTA };

/// Scalar energy flow dE/dt = -Omega(E) to be integrated numerically.
struct ScalarFlowSpec {
  FlowForm form = FlowForm::TA;
  double alpha = 0.0;
  double beta = 1.0;
  double p = 1.0;
  double q = 1.0;
  double e0 = 1.0;
  double tol = 1e-12;  // reach when E <= tol; 0 means touchdown at E = 0
  double dt = 0.0;     // 0 selects min(1e-4 e0, 1e-4 t_pred)
  double horizon = 0.0;  // give-up time; 0 selects 10 t_pred
  std::optional<double> stop_time;  // integrate only up to this time
  std::size_t max_samples = 2001;   // curve resolution

  double omega(double energy) const;

  /// Closed-form time to reach 0, or nullopt when the flow is not terminal.
  std::optional<double> predicted_time() const;

  static ScalarFlowSpec ta(double beta, double p, double q, double e0);
  static ScalarFlowSpec fta(double alpha, double beta, double p, double q,
                            double e0);
};

struct FlowSample {
  double t = 0.0;
  double energy = 0.0;
};

enum class FlowStatus { Reached, Unreached, Stopped };

struct FlowResult {
  FlowStatus status = FlowStatus::Unreached;
  double reach_time = 0.0;  // valid when status == Reached
  double final_time = 0.0;
  double final_energy = 0.0;
  double dt = 0.0;
  std::vector<FlowSample> curve;
};

/// Fixed-step classic RK4 integration of dE/dt = -Omega(E), E clamped at 0
/// from below. Stops at the first t with E <= tol (Reached), at stop_time
/// (Stopped), or past the horizon (Unreached). Throws StepTooLarge if a step
/// increases E.
FlowResult integrate_scalar_flow(const ScalarFlowSpec& spec);

/// Writes the curve as CSV with header "t,E".
void write_curve_csv(std::ostream& out, const FlowResult& result);

enum class AttractorKind { Terminal, Marginal, Asymptotic };

std::string to_string(AttractorKind kind);

struct AttractorClass {
  AttractorKind kind = AttractorKind::Terminal;
  // Limit of dOmega/dE as E -> 0 (+inf for terminal attractors). For TA/FTA
  // this is minus the limit of d^2E/(dE dt); for PTA/PFTA it is the factor
  // that multiplies |grad E| delta(1/|grad E|) in d^2E/(dE dt).
  double stiffness_limit = 0.0;
};

/// Classifies E = 0 for a TA/FTA/PTA/PFTA rule by the exponent q/p:
/// Terminal (q/p < 1), Marginal (q/p = 1), Asymptotic (q/p > 1).
AttractorClass classify_attractor(const LrRule& rule);

}  // namespace tagd
