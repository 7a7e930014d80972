#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "tagd/harness.hpp"

namespace tagd::harness {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

constexpr const char* kCurveHeader = "iter,mean_E,min_E,max_E,frac_converged";

double parse_field(const std::string& field, std::size_t line) {
  const char* begin = field.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (field.empty() || end != begin + field.size()) {
    throw IoError("curve csv line " + std::to_string(line) + ": bad number '" +
                  field + "'");
  }
  return v;
}

// JSON has no infinity; non-finite values become null.
nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

void write_curve_csv(std::ostream& out, const AggregateCurve& c) {
  out << kCurveHeader << "\n";
  for (std::size_t i = 0; i < c.size(); ++i) {
    out << c.iters[i] << "," << num(c.mean_energy[i]) << ","
        << num(c.min_energy[i]) << "," << num(c.max_energy[i]) << ","
        << num(c.frac_converged[i]) << "\n";
  }
}

AggregateCurve read_curve_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCurveHeader) {
    throw IoError("curve csv: missing header '" + std::string(kCurveHeader) + "'");
  }
  AggregateCurve c;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
    if (fields.size() != 5) {
      throw IoError("curve csv line " + std::to_string(lineno) +
                    ": expected 5 fields");
    }
    c.iters.push_back(static_cast<std::size_t>(parse_field(fields[0], lineno)));
    c.mean_energy.push_back(parse_field(fields[1], lineno));
    c.min_energy.push_back(parse_field(fields[2], lineno));
    c.max_energy.push_back(parse_field(fields[3], lineno));
    c.frac_converged.push_back(parse_field(fields[4], lineno));
  }
  return c;
}

void write_summary_json(std::ostream& out, const CampaignResult& result) {
  nlohmann::json root;
  const auto& cfg = result.config;
  root["objective"] = cfg.objective;
  root["n_seeds"] = cfg.n_seeds;
  root["stop_energy"] = cfg.stop_energy;
  root["max_iters"] = cfg.max_iters;
  root["eta"] = cfg.eta;
  root["rules"] = nlohmann::json::array();
  for (const auto& rule : result.rules) {
    nlohmann::json jr;
    jr["label"] = rule.spec.label;
    jr["optimizer"] = rule.spec.describe();
    jr["final_frac_converged"] = rule.curve.final_frac_converged;
    jr["median_converge_iter"] =
        rule.curve.median_converge_iter
            ? nlohmann::json(*rule.curve.median_converge_iter)
            : nlohmann::json(nullptr);
    jr["mean_wall_clock"] = rule.curve.mean_wall_clock;
    jr["runs"] = nlohmann::json::array();
    for (std::size_t seed = 0; seed < rule.records.size(); ++seed) {
      const auto& r = rule.records[seed];
      jr["runs"].push_back({
          {"seed", seed},
          {"outcome", to_string(r.outcome)},
          {"converge_iter", r.outcome == Outcome::Converged
                                ? nlohmann::json(r.outcome_iter)
                                : nlohmann::json(nullptr)},
          {"final_energy", number_or_null(r.final_energy())},
          {"wall_clock", r.wall_clock_total},
          {"clamp_events", r.clamp_events()},
      });
    }
    root["rules"].push_back(std::move(jr));
  }
  out << root.dump(2) << "\n";
}

std::vector<std::filesystem::path> emit_campaign(
    const CampaignResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create " + dir.string() + ": " + ec.message());
  }
  std::vector<std::filesystem::path> written;
  auto write = [&](const std::filesystem::path& path, auto&& body) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    body(out);
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
    written.push_back(path);
  };
  for (const auto& rule : result.rules) {
    write(dir / (rule.spec.label + "_curve.csv"),
          [&](std::ostream& o) { write_curve_csv(o, rule.curve); });
  }
  write(dir / "summary.json",
        [&](std::ostream& o) { write_summary_json(o, result); });
  return written;
}

}  // namespace tagd::harness
