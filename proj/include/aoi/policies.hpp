#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "aoi/core_model.hpp"

namespace aoi {

enum class PolicyKind { Optimal, Myopic, MaxAoI, FullKnowledgeMyopic };

/// Accepts `optimal`, `myopic`, `maxaoi`, `mdp`.
PolicyKind parse_policy_kind(std::string_view name);
std::string to_string(PolicyKind kind);

/// Index of the minimum over the K+1 candidates (nodes 0..K-1, then idle).
/// A later candidate wins only if it is smaller by more than a relative 1e-12,
/// so float noise between mathematically equal scores never breaks a tie.
Action argmin_action(std::span<const double> scores);

Action myopic_select(std::span<const int> aoi, const FactoredBelief& belief,
                     const SystemConfig& config);
Action myopic_select(const BeliefState& state, const SystemConfig& config);

Action maxaoi_select(std::span<const int> aoi, const SystemConfig& config);

/// One-step rule with point-mass beliefs at the true local ages.
Action full_knowledge_myopic_select(const GroundState& ground, const SystemConfig& config);

/// A scheduling rule driven slot by slot. The simulator owns the ground truth;
/// a scheduler sees only what its information model allows.
class Scheduler {
 public:
  virtual ~Scheduler() = default;

  virtual PolicyKind kind() const = 0;
  /// Resets the monitor-side state to the initial belief state.
  virtual void reset() = 0;
  /// `ground` is consulted only by the full-knowledge rule.
  virtual Action decide(int t, const GroundState& ground) = 0;
  /// Feeds back the action taken and the scheduled node's local-age reading.
  virtual void observe(Action action, LocalAgeReading reading) = 0;
};

/// Myopic, MaxAoI and full-knowledge schedulers. Optimal schedulers come
/// from the DP solver.
std::unique_ptr<Scheduler> make_heuristic_scheduler(PolicyKind kind, const SystemConfig& config);

}  // namespace aoi
