#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "aoi/core_model.hpp"
#include "aoi/dp_solver.hpp"
#include "aoi/policies.hpp"

namespace aoi {

class OracleTooLarge : public Error {
 public:
  using Error::Error;
};

struct SlotRecord {
  int t = 1;
  std::optional<Action> action;  // empty at the final slot, where no decision is made
  bool success = false;
  std::vector<int> aoi;
  std::vector<int> local_age;
};

struct EpisodeResult {
  double ewsaoi_sum = 0.0;  // sum over t and i of w_i h_i^t
  std::vector<SlotRecord> trace;
};

struct EwsaoiEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t episodes = 0;
};

/// Scheduler that follows a solved policy table along the belief tree.
std::unique_ptr<Scheduler> make_optimal_scheduler(const OptimalPolicy& policy,
                                                  const SystemConfig& config);

std::unique_ptr<Scheduler> make_scheduler(PolicyKind kind, const SystemConfig& config,
                                          const OptimalPolicy* optimal = nullptr);

/// Seed of episode `index` derived from `master` by a counter-based split.
std::uint64_t episode_seed(std::uint64_t master, std::uint64_t index);

/// Simulates T slots from z = h = 1. Each decision slot draws one uniform for
/// the transmission and one per node for arrivals regardless of the action,
/// so different policies see common random numbers under the same seed.
EpisodeResult run_episode(const SystemConfig& config, Scheduler& scheduler, std::uint64_t seed,
                          bool record_trace = false);
EpisodeResult run_episode(const SystemConfig& config, PolicyKind kind, std::uint64_t seed,
                          const OptimalPolicy* optimal = nullptr, bool record_trace = false);

/// Mean of ewsaoi_sum / (T K) over `episodes` independent episodes seeded from
/// config.seed, with std_error = sample stddev / sqrt(episodes).
EwsaoiEstimate estimate_ewsaoi(const SystemConfig& config, PolicyKind kind, std::size_t episodes,
                               const OptimalPolicy* optimal = nullptr);

/// Exact minimal EWSAoI by expectimin over information histories. Requires
/// D^K <= 9 and T <= 5.
double brute_force_optimal_ewsaoi(const SystemConfig& config);

/// CSV with columns t,action,success,h_1..h_K,z_1..z_K.
void write_trace_csv(std::ostream& out, const EpisodeResult& result, int num_nodes);

}  // namespace aoi
