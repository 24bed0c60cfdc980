// aoisched: solve, simulate and sweep AoI scheduling policies.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "aoi/config_io.hpp"
#include "aoi/dp_solver.hpp"
#include "aoi/experiment.hpp"
#include "aoi/simulator.hpp"

namespace {

using namespace aoi;

SystemConfig load_with_seed(const std::string& path, std::optional<std::uint64_t> flag) {
  SystemConfig config = load_config(path);
  config.seed = resolve_seed(config.seed, std::getenv("AOI_SEED"), flag);
  return config;
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw ValidationError("cannot open output file " + path);
  return file;
}

int cmd_solve(const std::string& config_path, const std::string& out_path,
              std::optional<std::uint64_t> seed, std::size_t max_states) {
  const SystemConfig config = load_with_seed(config_path, seed);
  const OptimalPolicy policy = solve_optimal(config, max_states);
  if (!out_path.empty()) {
    std::ofstream file;
    write_policy_table(open_output(out_path, file), policy, config);
  }
  std::cout << format_number(policy.ewsaoi) << '\n';
  return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& policy_name,
                 std::size_t episodes, const std::string& out_path,
                 std::optional<std::uint64_t> seed, const std::string& trace_path) {
  const SystemConfig config = load_with_seed(config_path, seed);
  const PolicyKind kind = parse_policy_kind(policy_name);

  std::optional<OptimalPolicy> optimal;
  if (kind == PolicyKind::Optimal) optimal = solve_optimal(config);
  const OptimalPolicy* table = optimal ? &*optimal : nullptr;

  const EwsaoiEstimate estimate = estimate_ewsaoi(config, kind, episodes, table);
  std::ofstream file;
  std::ostream& out = open_output(out_path, file);
  write_estimate_header(out);
  write_estimate_row(out, kind, estimate);

  if (!trace_path.empty()) {
    const auto result = run_episode(config, kind, episode_seed(config.seed, 0), table, true);
    std::ofstream trace;
    write_trace_csv(open_output(trace_path, trace), result, config.num_nodes());
  }
  return 0;
}

int cmd_sweep(const std::string& spec_path, std::optional<std::uint64_t> seed,
              std::optional<std::size_t> episodes, const std::string& out_override) {
  ExperimentSpec spec = load_experiment_spec(spec_path);
  if (episodes) spec.episodes = *episodes;
  if (!out_override.empty()) spec.out = out_override;
  SystemConfig base = load_config(spec.config_path);
  base.seed = resolve_seed(spec.seed.value_or(base.seed), std::getenv("AOI_SEED"), seed);

  std::ofstream file;
  std::ostream& out = open_output(spec.out.string(), file);
  return run_sweep(spec, base, out, std::cerr) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Age-of-information scheduling under partially observed arrivals"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string policy_name = "myopic";
  std::string spec_path;
  std::string trace_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> episodes;
  std::size_t max_states = 10'000'000;

  auto* solve = app.add_subcommand("solve", "Solve the finite-horizon DP and report the minimal EWSAoI");
  solve->add_option("--config", config_path, "System configuration (JSON)")->required();
  solve->add_option("--out", out_path, "Write the policy table here");
  solve->add_option("--seed", seed, "Override the configured seed");
  solve->add_option("--max-states", max_states, "Enumeration budget");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate of a policy's EWSAoI");
  simulate->add_option("--config", config_path, "System configuration (JSON)")->required();
  simulate->add_option("--policy", policy_name, "optimal | myopic | maxaoi | mdp")
      ->check(CLI::IsMember({"optimal", "myopic", "maxaoi", "mdp"}));
  simulate->add_option("--episodes", episodes, "Number of independent episodes");
  simulate->add_option("--out", out_path, "CSV output (default stdout)");
  simulate->add_option("--seed", seed, "Override the configured seed");
  simulate->add_option("--trace", trace_path, "Dump a per-slot CSV trace of episode 0");

  auto* sweep = app.add_subcommand("sweep", "Run an experiment grid and emit a CSV table");
  sweep->add_option("spec,--spec", spec_path, "Experiment specification (JSON)");
  sweep->add_option("--episodes", episodes, "Override the episode count");
  sweep->add_option("--out", out_path, "Override the CSV output path");
  sweep->add_option("--seed", seed, "Override the configured seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(config_path, out_path, seed, max_states);
    if (simulate->parsed()) {
      return cmd_simulate(config_path, policy_name, episodes.value_or(1000), out_path, seed,
                          trace_path);
    }
    if (sweep->parsed()) {
      if (spec_path.empty()) throw ValidationError("sweep: an experiment spec path is required");
      return cmd_sweep(spec_path, seed, episodes, out_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
