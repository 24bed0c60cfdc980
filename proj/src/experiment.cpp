#include "aoi/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "aoi/config_io.hpp"
#include "aoi/dp_solver.hpp"

namespace aoi {

namespace {

using nlohmann::json;

SystemConfig apply_grid_value(const SystemConfig& base, SweepVariable variable, double value) {
  switch (variable) {
    case SweepVariable::None:
      return base;
    case SweepVariable::SnrDb:
      return with_snr_db(base, value);
    case SweepVariable::Lambda:
      return with_lambda(base, value);
    case SweepVariable::Truncation:
      return with_truncation(base, static_cast<int>(std::lround(value)));
  }
  return base;
}

}  // namespace

SweepVariable parse_sweep_variable(const std::string& name) {
  if (name == "none") return SweepVariable::None;
  if (name == "snr_db") return SweepVariable::SnrDb;
  if (name == "lambda") return SweepVariable::Lambda;
  if (name == "truncation") return SweepVariable::Truncation;
  throw ValidationError("unknown sweep variable '" + name +
                        "' (expected none, snr_db, lambda or truncation)");
}

std::string to_string(SweepVariable variable) {
  switch (variable) {
    case SweepVariable::None:
      return "none";
    case SweepVariable::SnrDb:
      return "snr_db";
    case SweepVariable::Lambda:
      return "lambda";
    case SweepVariable::Truncation:
      return "truncation";
  }
  return "none";
}

std::vector<double> default_grid(SweepVariable variable) {
  switch (variable) {
    case SweepVariable::None:
      return {};
    case SweepVariable::SnrDb:
      return {0, 5, 10, 15, 20, 25, 30};
    case SweepVariable::Lambda:
      return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    case SweepVariable::Truncation:
      return {4, 6, 8, 10};
  }
  return {};
}

void ExperimentSpec::validate() const {
  if (policies.empty()) throw ValidationError("experiment: at least one policy is required");
  if (episodes < 2) throw ValidationError("experiment: episodes must be >= 2");
  if (variable == SweepVariable::None && !values.empty()) {
    throw ValidationError("experiment: grid values given without a sweep variable");
  }
  for (double v : values) {
    switch (variable) {
      case SweepVariable::SnrDb:
        if (!std::isfinite(v)) throw ValidationError("experiment: snr_db values must be finite");
        break;
      case SweepVariable::Lambda:
        if (!(v > 0.0 && v <= 1.0)) throw ValidationError("experiment: lambda values must lie in (0, 1]");
        break;
      case SweepVariable::Truncation:
        if (v < 1.0 || v != std::floor(v)) {
          throw ValidationError("experiment: truncation values must be integers >= 1");
        }
        break;
      case SweepVariable::None:
        break;
    }
  }
}

ExperimentSpec parse_experiment_spec(const std::string& text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("experiment: invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ValidationError("experiment: top level must be an object");
  for (const auto& item : root.items()) {
    const auto& key = item.key();
    if (key != "config" && key != "policies" && key != "sweep" && key != "episodes" &&
        key != "out" && key != "seed") {
      throw ValidationError("experiment: unknown key '" + key + "'");
    }
  }

  ExperimentSpec spec;
  if (!root.contains("config") || !root["config"].is_string()) {
    throw ValidationError("experiment: 'config' path is required");
  }
  std::filesystem::path config_path = root["config"].get<std::string>();
  spec.config_path = config_path.is_absolute() ? config_path : base_dir / config_path;

  if (!root.contains("policies") || !root["policies"].is_array()) {
    throw ValidationError("experiment: 'policies' list is required");
  }
  for (const auto& p : root["policies"]) {
    if (!p.is_string()) throw ValidationError("experiment: policies must be strings");
    spec.policies.push_back(parse_policy_kind(p.get<std::string>()));
  }

  if (root.contains("sweep")) {
    const auto& sweep = root["sweep"];
    if (!sweep.is_object() || !sweep.contains("variable") || !sweep["variable"].is_string()) {
      throw ValidationError("experiment: 'sweep' needs a 'variable' name");
    }
    for (const auto& item : sweep.items()) {
      if (item.key() != "variable" && item.key() != "values") {
        throw ValidationError("experiment.sweep: unknown key '" + item.key() + "'");
      }
    }
    spec.variable = parse_sweep_variable(sweep["variable"].get<std::string>());
    if (sweep.contains("values")) {
      for (const auto& v : sweep["values"]) {
        if (!v.is_number()) throw ValidationError("experiment: sweep values must be numbers");
        spec.values.push_back(v.get<double>());
      }
    } else {
      spec.values = default_grid(spec.variable);
    }
  }

  if (root.contains("episodes")) {
    if (!root["episodes"].is_number_unsigned()) {
      throw ValidationError("experiment: episodes must be a positive integer");
    }
    spec.episodes = root["episodes"].get<std::size_t>();
  }
  if (root.contains("out")) {
    std::filesystem::path out = root["out"].get<std::string>();
    spec.out = out.is_absolute() ? out : base_dir / out;
  }
  if (root.contains("seed")) {
    if (!root["seed"].is_number_unsigned()) throw ValidationError("experiment: seed must be unsigned");
    spec.seed = root["seed"].get<std::uint64_t>();
  }
  spec.validate();
  return spec;
}

ExperimentSpec load_experiment_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("experiment: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment_spec(buf.str(), path.parent_path());
}

std::uint64_t resolve_seed(std::uint64_t config_seed, const char* env_value,
                           std::optional<std::uint64_t> flag) {
  if (flag) return *flag;
  if (env_value != nullptr && *env_value != '\0') {
    try {
      std::size_t used = 0;
      const auto seed = std::stoull(env_value, &used);
      if (used == std::string(env_value).size()) return seed;
    } catch (const std::exception&) {
    }
    throw ValidationError(std::string("AOI_SEED is not an unsigned integer: ") + env_value);
  }
  return config_seed;
}

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

void write_estimate_header(std::ostream& out) { out << "policy,mean,std_error,episodes\n"; }

void write_estimate_row(std::ostream& out, PolicyKind kind, const EwsaoiEstimate& estimate) {
  out << to_string(kind) << ',' << format_number(estimate.mean) << ','
      << format_number(estimate.std_error) << ',' << estimate.episodes << '\n';
}

EwsaoiEstimate simulate_policy(const SystemConfig& config, PolicyKind kind, std::size_t episodes) {
  if (kind == PolicyKind::Optimal) {
    const auto policy = solve_optimal(config);
    return estimate_ewsaoi(config, kind, episodes, &policy);
  }
  return estimate_ewsaoi(config, kind, episodes);
}

bool run_sweep(const ExperimentSpec& spec, const SystemConfig& base, std::ostream& out,
               std::ostream& log) {
  spec.validate();
  const bool analytical = spec.variable == SweepVariable::Truncation;
  out << "sweep_var,value,policy,mean,std_error" << (analytical ? ",analytical" : "") << '\n';

  std::vector<double> grid = spec.values;
  if (spec.variable == SweepVariable::None) grid = {std::nan("")};

  for (double value : grid) {
    const std::string value_text = spec.variable == SweepVariable::None ? "" : format_number(value);
    for (PolicyKind kind : spec.policies) {
      try {
        const SystemConfig config = apply_grid_value(base, spec.variable, value);
        std::string analytic;
        EwsaoiEstimate estimate;
        if (kind == PolicyKind::Optimal) {
          const auto policy = solve_optimal(config);
          estimate = estimate_ewsaoi(config, kind, spec.episodes, &policy);
          analytic = format_number(policy.ewsaoi);
        } else {
          estimate = estimate_ewsaoi(config, kind, spec.episodes);
          if (analytical && kind == PolicyKind::Myopic) {
            analytic = format_number(myopic_analytical_ewsaoi(config));
          }
        }
        out << to_string(spec.variable) << ',' << value_text << ',' << to_string(kind) << ','
            << format_number(estimate.mean) << ',' << format_number(estimate.std_error);
        if (analytical) out << ',' << analytic;
        out << '\n';
        out.flush();
        log << to_string(spec.variable) << '=' << value_text << ' ' << to_string(kind)
            << " mean=" << format_number(estimate.mean) << '\n';
      } catch (const std::exception& e) {
        out << to_string(spec.variable) << ',' << value_text << ',' << to_string(kind)
            << ",FAILED," << (analytical ? "," : "") << '\n';
        out.flush();
        log << "error: " << to_string(spec.variable) << '=' << value_text << ' '
            << to_string(kind) << ": " << e.what() << '\n';
        return false;
      }
    }
  }
  return true;
}

}  // namespace aoi
