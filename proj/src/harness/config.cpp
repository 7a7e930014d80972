#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "tagd/harness.hpp"
#include "tagd/objectives.hpp"

namespace tagd::harness {

namespace {

using boost::property_tree::ptree;

// Value with any trailing " ; comment" or " # comment" removed.
std::string clean_value(std::string v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if ((v[i] == ';' || v[i] == '#') && (v[i - 1] == ' ' || v[i - 1] == '\t')) {
      v.erase(i);
      break;
    }
  }
  while (!v.empty() && (v.back() == ' ' || v.back() == '\t')) v.pop_back();
  return v;
}

double to_double(const std::string& key, const std::string& text) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (text.empty() || end != begin + text.size() || std::isnan(v)) {
    throw ConfigError("'" + key + "': expected a number, got '" + text + "'");
  }
  return v;
}

std::uint64_t to_uint(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("'" + key + "': expected a non-negative integer, got '" +
                      text + "'");
  }
  return v;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const std::set<std::string>& allowed_keys(const std::string& kind) {
  static const std::map<std::string, std::set<std::string>> table = {
      {"fixed", {"kind", "gamma"}},
      {"ta", {"kind", "beta", "p", "q", "q_over_p", "gamma_max", "eps_grad"}},
      {"pta", {"kind", "beta", "p", "q", "q_over_p", "gamma_max", "eps_grad"}},
      {"fta",
       {"kind", "alpha", "beta", "p", "q", "q_over_p", "gamma_max", "eps_grad"}},
      {"pfta",
       {"kind", "alpha", "beta", "p", "q", "q_over_p", "gamma_max", "eps_grad"}},
      {"sgd", {"kind", "lr"}},
      {"adam", {"kind", "lr", "beta1", "beta2", "eps"}},
      {"rmsprop", {"kind", "lr", "decay", "eps"}},
      {"adagrad", {"kind", "lr", "eps"}},
  };
  const auto it = table.find(kind);
  if (it == table.end()) throw ConfigError("unknown rule kind '" + kind + "'");
  return it->second;
}

RuleSpec parse_rule(const std::string& label, const ptree& section) {
  std::map<std::string, std::string> kv;
  for (const auto& [key, node] : section) {
    if (!node.empty()) throw ConfigError("nested key '" + key + "'");
    kv[key] = clean_value(node.data());
  }
  const auto kind_it = kv.find("kind");
  if (kind_it == kv.end()) {
    throw ConfigError("rule '" + label + "' has no 'kind'");
  }
  const std::string kind = kind_it->second;
  const auto& allowed = allowed_keys(kind);
  for (const auto& [key, value] : kv) {
    if (!allowed.count(key)) {
      throw ConfigError("rule '" + label + "': unknown key '" + key +
                        "' for kind " + kind);
    }
  }
  auto get = [&](const std::string& key, double fallback) {
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : to_double(label + "." + key, it->second);
  };

  RuleSpec spec;
  spec.label = label;
  if (kind == "fixed") {
    spec.optimizer = LrRule::fixed(get("gamma", 0.0));
  } else if (kind == "sgd") {
    spec.optimizer = baselines::BaselineSpec{baselines::SgdHyper{get("lr", 0.04)}};
  } else if (kind == "adam") {
    baselines::AdamHyper h;
    h.lr = get("lr", h.lr);
    h.beta1 = get("beta1", h.beta1);
    h.beta2 = get("beta2", h.beta2);
    h.eps = get("eps", h.eps);
    spec.optimizer = baselines::BaselineSpec{h};
  } else if (kind == "rmsprop") {
    baselines::RmspropHyper h;
    h.lr = get("lr", h.lr);
    h.decay = get("decay", h.decay);
    h.eps = get("eps", h.eps);
    spec.optimizer = baselines::BaselineSpec{h};
  } else if (kind == "adagrad") {
    baselines::AdagradHyper h;
    h.lr = get("lr", h.lr);
    h.eps = get("eps", h.eps);
    spec.optimizer = baselines::BaselineSpec{h};
  } else {
    LrRule r;
    r.kind = kind == "ta"    ? RuleKind::TA
             : kind == "fta" ? RuleKind::FTA
             : kind == "pta" ? RuleKind::PTA
                             : RuleKind::PFTA;
    r.alpha = get("alpha", 0.0);
    r.beta = get("beta", 0.0);
    if (kv.count("q_over_p")) {
      if (kv.count("p") || kv.count("q")) {
        throw ConfigError("rule '" + label +
                          "': give either q_over_p or p and q, not both");
      }
      r.p = 1.0;
      r.q = get("q_over_p", 1.0);
    } else {
      r.p = get("p", 1.0);
      r.q = get("q", 1.0);
    }
    r.gamma_max = get("gamma_max", r.gamma_max);
    r.eps_grad = get("eps_grad", r.eps_grad);
    spec.optimizer = r;
  }
  return spec;
}

void parse_experiment(ExperimentConfig& c, const ptree& section) {
  for (const auto& [key, node] : section) {
    if (!node.empty()) throw ConfigError("nested key '" + key + "'");
    const std::string v = clean_value(node.data());
    if (key == "objective") {
      c.objective = v;
    } else if (key == "n_seeds") {
      c.n_seeds = to_uint(key, v);
    } else if (key == "stop_energy") {
      c.stop_energy = to_double(key, v);
    } else if (key == "max_iters") {
      c.max_iters = to_uint(key, v);
    } else if (key == "eta") {
      c.eta = to_double(key, v);
    } else if (key == "batch") {
      if (v == "full") {
        c.batch_mode = BatchMode::Full;
      } else if (v == "minibatch") {
        c.batch_mode = BatchMode::MiniBatch;
      } else {
        throw ConfigError("'batch': expected full or minibatch, got '" + v + "'");
      }
    } else if (key == "batch_size") {
      c.batch_size = to_uint(key, v);
    } else if (key == "threads") {
      c.threads = to_uint(key, v);
    } else if (key == "output_dir") {
      c.output_dir = v;
    } else if (key == "dataset_size") {
      c.dataset_size = to_uint(key, v);
    } else if (key == "dataset_seed") {
      c.dataset_seed = to_uint(key, v);
    } else if (key == "dataset_low") {
      c.dataset_low = to_double(key, v);
    } else if (key == "dataset_high") {
      c.dataset_high = to_double(key, v);
    } else {
      throw ConfigError("[experiment]: unknown key '" + key + "'");
    }
  }
}

void write_rule(std::ostream& out, const RuleSpec& spec) {
  out << "[rule:" << spec.label << "]\n";
  if (const auto* r = std::get_if<LrRule>(&spec.optimizer)) {
    switch (r->kind) {
      case RuleKind::Fixed:
        out << "kind = fixed\ngamma = " << num(r->gamma_fixed) << "\n";
        return;
      case RuleKind::TA: out << "kind = ta\n"; break;
      case RuleKind::FTA: out << "kind = fta\n"; break;
      case RuleKind::PTA: out << "kind = pta\n"; break;
      case RuleKind::PFTA: out << "kind = pfta\n"; break;
    }
    if (r->kind == RuleKind::FTA || r->kind == RuleKind::PFTA) {
      out << "alpha = " << num(r->alpha) << "\n";
    }
    out << "beta = " << num(r->beta) << "\n"
        << "p = " << num(r->p) << "\n"
        << "q = " << num(r->q) << "\n"
        << "gamma_max = " << num(r->gamma_max) << "\n"
        << "eps_grad = " << num(r->eps_grad) << "\n";
    return;
  }
  const auto& b = std::get<baselines::BaselineSpec>(spec.optimizer);
  if (const auto* h = std::get_if<baselines::SgdHyper>(&b)) {
    out << "kind = sgd\nlr = " << num(h->lr) << "\n";
  } else if (const auto* h = std::get_if<baselines::AdamHyper>(&b)) {
    out << "kind = adam\nlr = " << num(h->lr) << "\nbeta1 = " << num(h->beta1)
        << "\nbeta2 = " << num(h->beta2) << "\neps = " << num(h->eps) << "\n";
  } else if (const auto* h = std::get_if<baselines::RmspropHyper>(&b)) {
    out << "kind = rmsprop\nlr = " << num(h->lr) << "\ndecay = "
        << num(h->decay) << "\neps = " << num(h->eps) << "\n";
  } else if (const auto* h = std::get_if<baselines::AdagradHyper>(&b)) {
    out << "kind = adagrad\nlr = " << num(h->lr) << "\neps = " << num(h->eps)
        << "\n";
  }
}

}  // namespace

std::string RuleSpec::describe() const {
  if (const auto* r = std::get_if<LrRule>(&optimizer)) return r->describe();
  return baselines::describe(std::get<baselines::BaselineSpec>(optimizer));
}

void ExperimentConfig::validate() const {
  static const std::set<std::string> objectives = {"mlp", "two_well",
                                                   "two_well_2d", "quadratic"};
  if (!objectives.count(objective)) {
    throw ConfigError("unknown objective '" + objective + "'");
  }
  if (n_seeds < 1) throw ConfigError("n_seeds must be >= 1");
  if (rules.empty()) throw ConfigError("no [rule:...] sections");
  try {
    opt_config(0).validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (batch_mode == BatchMode::MiniBatch && objective != "mlp") {
    throw ConfigError("mini-batch mode needs a sample-based objective (mlp)");
  }
  if (objective == "mlp") {
    if (dataset_size < 1) throw ConfigError("dataset_size must be >= 1");
    if (!(dataset_low < dataset_high)) {
      throw ConfigError("dataset_low must be below dataset_high");
    }
  }
  std::set<std::string> labels;
  for (const auto& r : rules) {
    if (r.label.empty()) throw ConfigError("rule label must not be empty");
    if (!labels.insert(r.label).second) {
      throw ConfigError("duplicate rule label '" + r.label + "'");
    }
    if (const auto* lr = std::get_if<LrRule>(&r.optimizer)) {
      try {
        lr->validate();
      } catch (const InvalidCoefficient& e) {
        throw ConfigError("rule '" + r.label + "': " + e.what());
      }
    } else {
      const double rate = std::visit(
          [](const auto& h) { return h.lr; },
          std::get<baselines::BaselineSpec>(r.optimizer));
      if (!(rate > 0.0)) {
        throw ConfigError("rule '" + r.label + "': lr must be positive");
      }
    }
  }
}

OptConfig ExperimentConfig::opt_config(std::uint64_t seed) const {
  OptConfig c;
  c.eta = eta;
  c.max_iters = max_iters;
  c.stop_energy = stop_energy;
  c.batch_mode = batch_mode;
  c.batch_size = batch_size;
  c.seed = seed;
  return c;
}

ExperimentConfig parse_config(std::istream& in) {
  ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  ExperimentConfig c;
  for (const auto& [name, section] : tree) {
    if (section.empty()) {
      throw ConfigError("key '" + name + "' outside of a section");
    }
    if (name == "experiment") {
      parse_experiment(c, section);
    } else if (name.rfind("rule:", 0) == 0) {
      c.rules.push_back(parse_rule(name.substr(5), section));
    } else {
      throw ConfigError("unknown section [" + name + "]");
    }
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  try {
    return parse_config(in);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_config(std::ostream& out, const ExperimentConfig& c) {
  out << "[experiment]\n"
      << "objective = " << c.objective << "\n"
      << "n_seeds = " << c.n_seeds << "\n"
      << "stop_energy = " << num(c.stop_energy) << "\n"
      << "max_iters = " << c.max_iters << "\n"
      << "eta = " << num(c.eta) << "\n"
      << "batch = " << (c.batch_mode == BatchMode::Full ? "full" : "minibatch")
      << "\n"
      << "batch_size = " << c.batch_size << "\n"
      << "threads = " << c.threads << "\n"
      << "output_dir = " << c.output_dir << "\n"
      << "dataset_size = " << c.dataset_size << "\n"
      << "dataset_seed = " << c.dataset_seed << "\n"
      << "dataset_low = " << num(c.dataset_low) << "\n"
      << "dataset_high = " << num(c.dataset_high) << "\n";
  for (const auto& r : c.rules) {
    out << "\n";
    write_rule(out, r);
  }
}

ExperimentConfig default_function_approximation_config() {
  ExperimentConfig c;
  c.rules = {
      {"pfta", LrRule::pfta(0.03, 0.1, 1.0, 0.65)},
      {"pta", LrRule::pta(0.09, 1.0, 0.7)},
      {"fta", LrRule::fta(0.03, 0.1, 1.0, 0.65)},
      {"sgd", baselines::BaselineSpec{baselines::SgdHyper{}}},
      {"adam", baselines::BaselineSpec{baselines::AdamHyper{}}},
      {"rmsprop", baselines::BaselineSpec{baselines::RmspropHyper{}}},
      {"adagrad", baselines::BaselineSpec{baselines::AdagradHyper{}}},
  };
  return c;
}

std::unique_ptr<Objective> make_objective(const ExperimentConfig& config) {
  if (config.objective == "mlp") {
    return std::make_unique<MlpObjective>(
        gen_dataset(config.dataset_size, config.dataset_seed,
                    config.dataset_low, config.dataset_high));
  }
  if (config.objective == "two_well") return std::make_unique<TwoWell>();
  if (config.objective == "two_well_2d") return std::make_unique<TwoWell2D>();
  if (config.objective == "quadratic") {
    return std::make_unique<Quadratic>(Quadratic::unit_1d());
  }
  throw ConfigError("unknown objective '" + config.objective + "'");
}

}  // namespace tagd::harness
