#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "aoi/core_model.hpp"

namespace aoi {

/// The reachable belief tree outgrew the enumeration budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// A belief state was looked up that the solver never enumerated.
class UnknownBeliefState : public Error {
 public:
  using Error::Error;
};

/// Belief states reachable at slot t, deduplicated by canonical key, with the
/// successor of every (state, action, reading) triple that has positive
/// probability.
struct BeliefLayer {
  int t = 1;
  int num_nodes = 1;
  int truncation = 1;
  std::vector<BeliefState> states;
  std::vector<std::string> keys;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::int32_t> successors;  // (K+1) x (D+1) per state, -1 when absent

  static constexpr std::int32_t kNone = -1;

  std::size_t size() const { return states.size(); }
  std::optional<std::size_t> find(const std::string& key) const;

  /// Successor index in layer t+1, or kNone.
  std::int32_t successor(std::size_t state, Action action, LocalAgeReading reading) const;
  /// True if the enumeration expanded `action` from `state`.
  bool expanded(std::size_t state, Action action) const;

  std::size_t slot(std::size_t state, Action action, LocalAgeReading reading) const;
};

using BeliefTree = std::vector<BeliefLayer>;

struct EnumerationOptions {
  std::size_t max_states = 10'000'000;
  /// Cap on stored probabilities (states x D^K); keeps large-K instances from
  /// exhausting memory long before max_states is reached.
  std::size_t max_belief_entries = 100'000'000;
  /// When set, only this policy's action is expanded from each state.
  std::function<Action(const BeliefState&)> fixed_policy;
};

BeliefTree enumerate_reachable(const BeliefState& initial, const SystemConfig& config,
                               const EnumerationOptions& options = {});

/// Expected total reward from slot t onward, one entry per local-age vector.
struct ValueVector {
  std::vector<double> values;
};

/// Minimizing action for every enumerated belief state at slots 1..T-1.
class PolicyTable {
 public:
  PolicyTable() = default;
  PolicyTable(std::shared_ptr<const BeliefTree> tree, std::vector<std::vector<Action>> actions);

  /// Stored action, or nullopt if (t, key) was never enumerated.
  std::optional<Action> find(int t, const std::string& key) const;
  Action at(int t, std::size_t state) const;

  /// Number of decision slots (T-1).
  int decision_slots() const { return static_cast<int>(actions_.size()); }
  std::size_t size() const;
  const BeliefTree& tree() const { return *tree_; }

  friend bool operator==(const PolicyTable& a, const PolicyTable& b);

 private:
  std::shared_ptr<const BeliefTree> tree_;
  std::vector<std::vector<Action>> actions_;  // [t-1][state]
};

struct DpSolution {
  std::shared_ptr<const BeliefTree> tree;
  PolicyTable table;
  std::vector<std::vector<ValueVector>> values;  // [t-1][state]

  const ValueVector& value(int t, const std::string& key) const;
  const ValueVector& root_value() const { return values.front().front(); }
};

/// Backward induction over an enumerated tree. States whose tree only holds
/// one expanded action (fixed-policy trees) are evaluated under that action.
DpSolution backward_induction(std::shared_ptr<const BeliefTree> tree, const SystemConfig& config);

/// b^1 . V(I^1) / (T K).
double analytical_ewsaoi(const BeliefState& initial, const ValueVector& values,
                         const SystemConfig& config);

/// Throws UnknownBeliefState when the state's key was not enumerated at slot t.
Action optimal_select(const PolicyTable& table, int t, const BeliefState& state);

/// Direct evaluation of the per-action objective (immediate reward plus the
/// observation-weighted continuation) for every action at an enumerated state.
/// Entries for actions the tree did not expand are +inf. Slow; for checks.
std::vector<double> action_values(const DpSolution& solution, int t, std::size_t state,
                                  const SystemConfig& config);

// Conveniences ------------------------------------------------------------------

struct OptimalPolicy {
  DpSolution solution;
  double ewsaoi = 0.0;
};

OptimalPolicy solve_optimal(const SystemConfig& config, std::size_t max_states = 10'000'000);

/// Exact EWSAoI of a stationary belief-feedback rule, by evaluating it on the
/// belief tree it induces.
double evaluate_policy_ewsaoi(const SystemConfig& config,
                              const std::function<Action(const BeliefState&)>& policy,
                              std::size_t max_states = 10'000'000);

/// Exact EWSAoI of the myopic policy (factored beliefs are the joint marginals).
double myopic_analytical_ewsaoi(const SystemConfig& config, std::size_t max_states = 10'000'000);

/// Text dump: header lines starting with '#' (config echo, EWSAoI), then one
/// `t key action` line per table entry, key in lowercase hex.
void write_policy_table(std::ostream& out, const OptimalPolicy& policy, const SystemConfig& config);

}  // namespace aoi
