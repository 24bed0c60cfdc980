#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "aoi/core_model.hpp"
#include "aoi/policies.hpp"
#include "aoi/simulator.hpp"

namespace aoi {

enum class SweepVariable { None, SnrDb, Lambda, Truncation };

SweepVariable parse_sweep_variable(const std::string& name);
std::string to_string(SweepVariable variable);

/// Default grids: SNR {0,5,...,30} dB, lambda {0.1,...,1.0}, truncation {4,6,8,10}.
std::vector<double> default_grid(SweepVariable variable);

struct ExperimentSpec {
  std::filesystem::path config_path;
  std::vector<PolicyKind> policies;
  SweepVariable variable = SweepVariable::None;
  std::vector<double> values;
  std::size_t episodes = 1000;
  std::filesystem::path out;
  std::optional<std::uint64_t> seed;

  void validate() const;
};

/// JSON keys: `config` (path, relative to the spec file), `policies`,
/// optional `sweep` {`variable`, `values`}, `episodes`, optional `out`, optional `seed`.
ExperimentSpec parse_experiment_spec(const std::string& text,
                                     const std::filesystem::path& base_dir = {});
ExperimentSpec load_experiment_spec(const std::filesystem::path& path);

/// Config seed, overridden by the AOI_SEED environment value, overridden by
/// an explicit flag.
std::uint64_t resolve_seed(std::uint64_t config_seed, const char* env_value,
                           std::optional<std::uint64_t> flag);

/// Decimal text with 12 significant digits.
std::string format_number(double value);

void write_estimate_header(std::ostream& out);
void write_estimate_row(std::ostream& out, PolicyKind kind, const EwsaoiEstimate& estimate);

/// Simulates `kind` (solving the DP first when it is Optimal).
EwsaoiEstimate simulate_policy(const SystemConfig& config, PolicyKind kind, std::size_t episodes);

/// Runs every (grid value, policy) pair in grid order and writes
/// `sweep_var,value,policy,mean,std_error[,analytical]` rows. On the first
/// failure a FAILED marker row is written and false is returned.
bool run_sweep(const ExperimentSpec& spec, const SystemConfig& base, std::ostream& out,
               std::ostream& log);

}  // namespace aoi
