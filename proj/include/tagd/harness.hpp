#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "tagd/baselines.hpp"
#include "tagd/core.hpp"
#include "tagd/integrator.hpp"

namespace tagd::harness {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Optimizer = std::variant<LrRule, baselines::BaselineSpec>;

struct RuleSpec {
  std::string label;  // unique name, used for output file names
  Optimizer optimizer;

  std::string describe() const;
};

/// A campaign: every rule is run once per seed 0..n_seeds-1.
///
/// Text form (sections and "key = value" lines, ';' starts a comment):
///
///   [experiment]
///   objective = mlp            ; mlp | two_well | two_well_2d | quadratic
///   n_seeds = 20
///   stop_energy = 0.0001
///   max_iters = 800
///   eta = 1
///   batch = full               ; full | minibatch
///   batch_size = 10
///   threads = 1                ; 0 = hardware concurrency
///   output_dir = results
///   dataset_size = 100
///   dataset_seed = 0
///   dataset_low = 0
///   dataset_high = 1
///
///   [rule:pfta]
///   kind = pfta                ; fixed | ta | fta | pta | pfta | sgd | adam
///                              ; | rmsprop | adagrad
///   alpha = 0.03
///   beta = 0.1
///   q_over_p = 0.65            ; or p = ..., q = ...
///
/// Unknown sections or keys are rejected.
struct ExperimentConfig {
  std::string objective = "mlp";
  std::size_t n_seeds = 20;
  double stop_energy = 1e-4;
  std::size_t max_iters = 800;
  double eta = 1.0;
  BatchMode batch_mode = BatchMode::Full;
  std::size_t batch_size = 10;
  std::size_t threads = 1;
  std::string output_dir = "results";
  std::size_t dataset_size = 100;
  std::uint64_t dataset_seed = 0;
  double dataset_low = 0.0;
  double dataset_high = 1.0;
  std::vector<RuleSpec> rules;

  /// Throws ConfigError when the configuration cannot be run.
  void validate() const;

  OptConfig opt_config(std::uint64_t seed) const;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);
void write_config(std::ostream& out, const ExperimentConfig& config);

/// Function approximation campaign: PFTA(0.03, 0.1, 0.65), PTA(0.09, 0.7),
/// FTA, SGD(0.04), Adam, RMSProp and AdaGrad on the 2-5-1 MLP.
ExperimentConfig default_function_approximation_config();

std::unique_ptr<Objective> make_objective(const ExperimentConfig& config);

/// Seed-aggregated energy curve of one rule.
struct AggregateCurve {
  std::vector<std::size_t> iters;
  std::vector<double> mean_energy;
  std::vector<double> min_energy;
  std::vector<double> max_energy;
  std::vector<double> frac_converged;  // converged at or before this iter

  std::size_t runs = 0;
  double final_frac_converged = 0.0;
  std::optional<std::size_t> median_converge_iter;
  double mean_wall_clock = 0.0;

  std::size_t size() const { return iters.size(); }
};

/// Folds seed-ordered records. Runs that ended early hold their last energy.
AggregateCurve aggregate(const std::vector<RunRecord>& records);

/// First iteration with energy <= threshold, if any.
std::optional<std::size_t> first_hit(const RunRecord& record, double threshold);

/// Upper median over all runs of first_hit, counting runs that never hit as
/// +inf; nullopt when that median is infinite.
std::optional<std::size_t> median_hit(const std::vector<RunRecord>& records,
                                      double threshold);

struct RuleResult {
  RuleSpec spec;
  std::vector<RunRecord> records;  // index = seed
  AggregateCurve curve;

  bool all_diverged() const;
};

struct CampaignResult {
  ExperimentConfig config;
  std::vector<RuleResult> rules;
};

/// Runs every (rule, seed) pair, possibly on several threads. The result is
/// independent of scheduling order.
CampaignResult run_campaign(const ExperimentConfig& config);

/// CSV "iter,mean_E,min_E,max_E,frac_converged", 17 significant digits.
void write_curve_csv(std::ostream& out, const AggregateCurve& curve);
/// Reads back the columns written by write_curve_csv.
AggregateCurve read_curve_csv(std::istream& in);

/// JSON with one entry per (rule, seed): outcome, converge iteration,
/// final energy, wall clock and clamp-event count.
void write_summary_json(std::ostream& out, const CampaignResult& result);

/// Writes <dir>/<label>_curve.csv per rule and <dir>/summary.json.
/// Returns the paths written. Throws IoError naming the failing path.
std::vector<std::filesystem::path> emit_campaign(
    const CampaignResult& result, const std::filesystem::path& dir);

// --- invariant suite --------------------------------------------------------

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Central-difference gradient with step h.
ParamVector central_difference(const Objective& objective,
                               const ParamVector& w, double h = 1e-5);

/// Quick self-checks of the library invariants, used by `tagd check`.
std::vector<CheckResult> run_invariant_checks(std::uint64_t seed = 0);

}  // namespace tagd::harness
