#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tagd {

// Error types. Everything derives from std::runtime_error so callers that do
// not care about the specific failure can catch one type.
struct NonFiniteEnergy : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NegativeEnergy : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonFiniteStep : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidCoefficient : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat vector of optimization variables.
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(std::size_t n, double fill = 0.0) : values_(n, fill) {}
  ParamVector(std::initializer_list<double> init) : values_(init) {}
  explicit ParamVector(std::vector<double> values) : values_(std::move(values)) {}

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<double> span() noexcept { return values_; }
  std::span<const double> span() const noexcept { return values_; }
  const std::vector<double>& values() const noexcept { return values_; }

  auto begin() noexcept { return values_.begin(); }
  auto end() noexcept { return values_.end(); }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  double norm_sq() const noexcept;
  double norm() const noexcept;
  bool all_finite() const noexcept;

  friend bool operator==(const ParamVector&, const ParamVector&) = default;

 private:
  std::vector<double> values_;
};

/// Energy and gradient at a point, with cached gradient norms.
/// grad_norm is sqrt(grad_norm_sq), so the two agree to rounding.
struct GradEval {
  double energy = 0.0;
  ParamVector gradient;
  double grad_norm = 0.0;
  double grad_norm_sq = 0.0;

  static GradEval from_gradient(double energy, ParamVector gradient);

  // One-dimensional stand-in with the given gradient norm. Rate rules only
  // look at the energy and the norm, so this is enough to drive them.
  static GradEval summary(double energy, double grad_norm);
};

/// Contract for anything that can be minimized. Energies must be >= 0.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::string name() const = 0;
  virtual std::size_t dimension() const = 0;

  /// Writes dE/dw into grad (same size as w) and returns E(w).
  virtual double value_and_gradient(std::span<const double> w,
                                    std::span<double> grad) const = 0;

  /// Deterministic starting point for the given seed.
  virtual ParamVector initial_point(std::uint64_t seed) const = 0;

  // Mini-batch support. Objectives that are not sums over samples report 0
  // samples and refuse batch evaluation.
  virtual std::size_t sample_count() const { return 0; }
  virtual double batch_value_and_gradient(std::span<const double> w,
                                          std::span<const std::size_t> samples,
                                          std::span<double> grad) const;
};

/// Evaluates the objective at w. Throws NonFiniteEnergy if E is NaN, Inf or
/// negative, DimensionMismatch if w has the wrong size or non-finite entries.
GradEval eval(const Objective& objective, const ParamVector& w);

enum class BatchMode { Full, MiniBatch };

/// Settings of one optimization run.
struct OptConfig {
  double eta = 1.0;  // Euler integration step
  std::size_t max_iters = 800;
  double stop_energy = 1e-4;
  BatchMode batch_mode = BatchMode::Full;
  std::size_t batch_size = 0;  // used only for MiniBatch
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

enum class RuleKind { Fixed, TA, FTA, PTA, PFTA };

/// Learning-rate rule. Which coefficients matter depends on `kind`:
///   Fixed: gamma_fixed
///   TA, PTA: beta, p, q
///   FTA, PFTA: alpha, beta, p, q
/// gamma_max and eps_grad are the singularity safeguards used by TA/FTA
/// (eps_grad is also the gradient-norm floor of PTA/PFTA).
struct LrRule {
  RuleKind kind = RuleKind::Fixed;
  double gamma_fixed = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double p = 1.0;
  double q = 1.0;
  double gamma_max = 1e6;
  double eps_grad = 1e-12;

  static LrRule fixed(double gamma);
  static LrRule ta(double beta, double p, double q);
  static LrRule fta(double alpha, double beta, double p, double q);
  static LrRule pta(double beta, double p, double q);
  static LrRule pfta(double alpha, double beta, double p, double q);

  double exponent() const noexcept { return q / p; }

  /// Throws InvalidCoefficient for inconsistent coefficients. Returns
  /// non-fatal warnings (q >= p gives no terminal attractor).
  std::vector<std::string> validate() const;

  /// Short human-readable form, e.g. "PFTA(alpha=0.03,beta=0.1,q/p=0.65)".
  std::string describe() const;
};

std::string to_string(RuleKind kind);

}  // namespace tagd
