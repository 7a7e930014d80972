#include <algorithm>
#include <atomic>
#include <exception>
#include <limits>
#include <thread>

#include "tagd/harness.hpp"

namespace tagd::harness {

AggregateCurve aggregate(const std::vector<RunRecord>& records) {
  AggregateCurve c;
  c.runs = records.size();
  if (records.empty()) return c;

  std::size_t length = 0;
  for (const auto& r : records) length = std::max(length, r.points.size());

  c.iters.resize(length);
  c.mean_energy.resize(length);
  c.min_energy.resize(length);
  c.max_energy.resize(length);
  c.frac_converged.resize(length);
  const double n = static_cast<double>(records.size());
  for (std::size_t i = 0; i < length; ++i) {
    double sum = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    std::size_t done = 0;
    for (const auto& r : records) {
      if (r.points.empty()) continue;
      const double e = r.points[std::min(i, r.points.size() - 1)].energy;
      sum += e;
      lo = std::min(lo, e);
      hi = std::max(hi, e);
      if (r.outcome == Outcome::Converged && r.outcome_iter <= i) ++done;
    }
    c.iters[i] = i;
    // Clamp so that rounding in the sum never puts the mean outside [lo, hi].
    c.mean_energy[i] = std::clamp(sum / n, lo, hi);
    c.min_energy[i] = lo;
    c.max_energy[i] = hi;
    c.frac_converged[i] = static_cast<double>(done) / n;
  }

  std::size_t converged = 0;
  double wall = 0.0;
  std::vector<std::size_t> hits;
  for (const auto& r : records) {
    wall += r.wall_clock_total;
    if (r.outcome == Outcome::Converged) {
      ++converged;
      hits.push_back(r.outcome_iter);
    }
  }
  c.final_frac_converged = static_cast<double>(converged) / n;
  c.mean_wall_clock = wall / n;
  const std::size_t mid = records.size() / 2;
  if (mid < hits.size()) {
    std::nth_element(hits.begin(), hits.begin() + mid, hits.end());
    c.median_converge_iter = hits[mid];
  }
  return c;
}

std::optional<std::size_t> first_hit(const RunRecord& record, double threshold) {
  for (const auto& p : record.points) {
    if (p.energy <= threshold) return p.iter;
  }
  return std::nullopt;
}

std::optional<std::size_t> median_hit(const std::vector<RunRecord>& records,
                                      double threshold) {
  std::vector<std::size_t> hits;
  for (const auto& r : records) {
    if (auto h = first_hit(r, threshold)) hits.push_back(*h);
  }
  const std::size_t mid = records.size() / 2;
  if (records.empty() || mid >= hits.size()) return std::nullopt;
  std::nth_element(hits.begin(), hits.begin() + mid, hits.end());
  return hits[mid];
}

bool RuleResult::all_diverged() const {
  return !records.empty() &&
         std::all_of(records.begin(), records.end(), [](const RunRecord& r) {
           return r.outcome == Outcome::Diverged;
         });
}

CampaignResult run_campaign(const ExperimentConfig& config) {
  config.validate();
  const auto objective = make_objective(config);

  CampaignResult result;
  result.config = config;
  result.rules.resize(config.rules.size());
  for (std::size_t k = 0; k < config.rules.size(); ++k) {
    result.rules[k].spec = config.rules[k];
    result.rules[k].records.resize(config.n_seeds);
  }

  const std::size_t jobs = config.rules.size() * config.n_seeds;
  std::vector<std::exception_ptr> errors(jobs);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t j = next++; j < jobs; j = next++) {
      const std::size_t k = j / config.n_seeds;
      const std::size_t seed = j % config.n_seeds;
      try {
        const OptConfig oc = config.opt_config(seed);
        ParamVector w0 = objective->initial_point(seed);
        const auto& opt = config.rules[k].optimizer;
        result.rules[k].records[seed] =
            std::holds_alternative<LrRule>(opt)
                ? run(*objective, std::get<LrRule>(opt), oc, std::move(w0))
                : baselines::run(*objective,
                                 std::get<baselines::BaselineSpec>(opt), oc,
                                 std::move(w0));
      } catch (...) {
        errors[j] = std::current_exception();
      }
    }
  };

  std::size_t threads = config.threads == 0
                            ? std::max(1u, std::thread::hardware_concurrency())
                            : config.threads;
  threads = std::min(threads, std::max<std::size_t>(jobs, 1));
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (auto& r : result.rules) r.curve = aggregate(r.records);
  return result;
}

}  // namespace tagd::harness
