// tagd: command-line front end for campaigns, the scalar-flow oracle, the
// function-approximation dataset and the invariant checks.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include "tagd/harness.hpp"
#include "tagd/objectives.hpp"
#include "tagd/scalar_dynamics.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDiverged = 1;
constexpr int kExitConfig = 2;
constexpr int kExitFailure = 3;
constexpr const char* kOutputEnv = "TAGD_OUTPUT_DIR";

struct RunOptions {
  std::string config_path;
  std::optional<std::size_t> seeds;
  std::optional<std::size_t> max_iters;
  std::optional<double> stop_energy;
  std::optional<double> eta;
  std::optional<std::size_t> threads;
  std::optional<std::string> output_dir;
  bool print_config = false;
};

int cmd_run(const RunOptions& opt) {
  using namespace tagd::harness;
  ExperimentConfig cfg;
  try {
    cfg = opt.config_path.empty() ? default_function_approximation_config()
                                  : load_config(opt.config_path);
    if (const char* env = std::getenv(kOutputEnv); env && *env) {
      cfg.output_dir = env;
    }
    if (opt.seeds) cfg.n_seeds = *opt.seeds;
    if (opt.max_iters) cfg.max_iters = *opt.max_iters;
    if (opt.stop_energy) cfg.stop_energy = *opt.stop_energy;
    if (opt.eta) cfg.eta = *opt.eta;
    if (opt.threads) cfg.threads = *opt.threads;
    if (opt.output_dir) cfg.output_dir = *opt.output_dir;
    cfg.validate();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (opt.print_config) {
    write_config(std::cout, cfg);
    return kExitOk;
  }

  const CampaignResult result = run_campaign(cfg);
  emit_campaign(result, cfg.output_dir);

  bool any_all_diverged = false;
  std::printf("%-10s %-40s %9s %9s %12s %10s\n", "label", "optimizer",
              "conv", "median", "final_mean", "wall_s");
  for (const auto& rule : result.rules) {
    const auto& c = rule.curve;
    const std::string median =
        c.median_converge_iter ? std::to_string(*c.median_converge_iter) : "-";
    std::printf("%-10s %-40s %8.0f%% %9s %12.4g %10.3g\n",
                rule.spec.label.c_str(), rule.spec.describe().c_str(),
                100.0 * c.final_frac_converged, median.c_str(),
                c.size() ? c.mean_energy.back() : 0.0, c.mean_wall_clock);
    if (rule.all_diverged()) {
      any_all_diverged = true;
      std::fprintf(stderr, "rule %s diverged on every seed\n",
                   rule.spec.label.c_str());
    }
  }
  std::printf("results written to %s\n", cfg.output_dir.c_str());
  return any_all_diverged ? kExitDiverged : kExitOk;
}

struct OracleOptions {
  std::vector<double> betas{0.1, 1.0, 10.0};
  std::vector<double> exponents{1.0 / 3.0, 0.65, 0.9};
  std::vector<double> alphas{0.1, 1.0};
  double e0 = 1.0;
  double tol = 1e-12;
  std::string csv_path;
  std::string curve_dir;
};

int cmd_oracle(const OracleOptions& opt) {
  using namespace tagd;
  std::ofstream csv;
  if (!opt.csv_path.empty()) {
    csv.open(opt.csv_path);
    if (!csv) {
      std::cerr << "cannot write " << opt.csv_path << "\n";
      return kExitConfig;
    }
    csv << "form,alpha,beta,q_over_p,e0,predicted,reach_tol,reach_zero,"
           "rel_err_tol,rel_err_zero\n";
  }
  if (!opt.curve_dir.empty()) std::filesystem::create_directories(opt.curve_dir);

  std::printf("%-4s %6s %6s %7s %12s %12s %12s %9s %9s\n", "form", "alpha",
              "beta", "q/p", "predicted", "reach(tol)", "touchdown", "err_tol",
              "err_zero");
  auto sweep_point = [&](ScalarFlowSpec spec, const std::string& tag) {
    spec.tol = opt.tol;
    const FlowResult at_tol = integrate_scalar_flow(spec);
    spec.tol = 0.0;
    const FlowResult at_zero = integrate_scalar_flow(spec);
    const double pred = *spec.predicted_time();
    auto rel = [&](const FlowResult& r) {
      return r.status == FlowStatus::Reached
                 ? std::abs(r.reach_time - pred) / pred
                 : std::numeric_limits<double>::infinity();
    };
    const char* form = spec.form == FlowForm::TA ? "TA" : "FTA";
    std::printf("%-4s %6.3g %6.3g %7.4g %12.6g %12.6g %12.6g %9.2e %9.2e\n",
                form, spec.alpha, spec.beta, spec.q / spec.p, pred,
                at_tol.reach_time, at_zero.reach_time, rel(at_tol),
                rel(at_zero));
    if (csv) {
      char line[512];
      std::snprintf(line, sizeof line,
                    "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                    form, spec.alpha, spec.beta, spec.q / spec.p, spec.e0,
                    pred, at_tol.reach_time, at_zero.reach_time, rel(at_tol),
                    rel(at_zero));
      csv << line;
    }
    if (!opt.curve_dir.empty()) {
      std::ofstream out(std::filesystem::path(opt.curve_dir) / (tag + ".csv"));
      write_curve_csv(out, at_tol);
    }
  };

  int index = 0;
  for (double beta : opt.betas) {
    for (double qp : opt.exponents) {
      sweep_point(ScalarFlowSpec::ta(beta, 1.0, qp, opt.e0),
                  "ta_" + std::to_string(index++));
      for (double alpha : opt.alphas) {
        sweep_point(ScalarFlowSpec::fta(alpha, beta, 1.0, qp, opt.e0),
                    "fta_" + std::to_string(index++));
      }
    }
  }
  return kExitOk;
}

int cmd_check(std::uint64_t seed) {
  bool all = true;
  for (const auto& c : tagd::harness::run_invariant_checks(seed)) {
    std::printf("[%s] %s%s%s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(),
                c.detail.empty() ? "" : ": ", c.detail.c_str());
    all = all && c.passed;
  }
  return all ? kExitOk : kExitDiverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Terminal-attractor learning-rate experiments"};
  app.require_subcommand(1);

  RunOptions run_opt;
  auto* run = app.add_subcommand("run", "run a multi-seed campaign");
  run->add_option("-c,--config", run_opt.config_path,
                  "INI config (default: built-in function approximation)")
      ->check(CLI::ExistingFile);
  run->add_option("--seeds", run_opt.seeds, "number of seeds");
  run->add_option("--max-iters", run_opt.max_iters, "iteration budget");
  run->add_option("--stop-energy", run_opt.stop_energy, "convergence threshold");
  run->add_option("--eta", run_opt.eta, "Euler step");
  run->add_option("--threads", run_opt.threads, "worker threads (0 = all)");
  run->add_option("-o,--output-dir", run_opt.output_dir,
                  std::string("output directory (overrides ") + kOutputEnv +
                      " and the config)");
  run->add_flag("--print-config", run_opt.print_config,
                "print the effective config and exit");

  OracleOptions oracle_opt;
  auto* oracle =
      app.add_subcommand("oracle", "compare RK4 reach times with closed forms");
  oracle->add_option("--beta", oracle_opt.betas, "beta grid")->delimiter(',');
  oracle->add_option("--q-over-p", oracle_opt.exponents, "q/p grid")
      ->delimiter(',');
  oracle->add_option("--alpha", oracle_opt.alphas, "alpha grid (FTA)")
      ->delimiter(',');
  oracle->add_option("--e0", oracle_opt.e0, "initial energy");
  oracle->add_option("--tol", oracle_opt.tol, "reach threshold");
  oracle->add_option("--csv", oracle_opt.csv_path, "write the table as CSV");
  oracle->add_option("--curve-dir", oracle_opt.curve_dir,
                     "write every E(t) curve here");

  auto* dataset = app.add_subcommand("dataset", "function approximation data");
  dataset->require_subcommand(1);
  std::size_t ds_n = 100;
  std::uint64_t ds_seed = 0;
  double ds_low = 0.0;
  double ds_high = 1.0;
  std::string ds_out;
  auto* emit = dataset->add_subcommand("emit", "write a generated dataset");
  emit->add_option("-n,--size", ds_n, "number of samples");
  emit->add_option("--seed", ds_seed, "sampling seed");
  emit->add_option("--low", ds_low, "lower bound of each input");
  emit->add_option("--high", ds_high, "upper bound of each input");
  emit->add_option("-o,--out", ds_out, "output CSV (default stdout)");
  std::string ds_in;
  auto* import = dataset->add_subcommand("import", "read and summarize a CSV");
  import->add_option("file", ds_in, "dataset CSV")
      ->required()
      ->check(CLI::ExistingFile);

  std::uint64_t check_seed = 0;
  auto* check = app.add_subcommand("check", "run the invariant self-checks");
  check->add_option("--seed", check_seed, "seed for sampled points");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_opt);
    if (*oracle) return cmd_oracle(oracle_opt);
    if (*check) return cmd_check(check_seed);
    if (*emit) {
      const tagd::Dataset d = tagd::gen_dataset(ds_n, ds_seed, ds_low, ds_high);
      if (ds_out.empty()) {
        tagd::write_dataset_csv(std::cout, d);
      } else {
        std::ofstream out(ds_out);
        if (!out) {
          std::cerr << "cannot write " << ds_out << "\n";
          return kExitConfig;
        }
        tagd::write_dataset_csv(out, d);
      }
      return kExitOk;
    }
    if (*import) {
      std::ifstream in(ds_in);
      const tagd::Dataset d = tagd::read_dataset_csv(in);
      std::printf("samples %zu\n", d.size());
      std::printf("shift %.17g %.17g\n", d.norm.shift[0], d.norm.shift[1]);
      std::printf("scale %.17g %.17g\n", d.norm.scale[0], d.norm.scale[1]);
      return kExitOk;
    }
  } catch (const tagd::harness::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const tagd::harness::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}
