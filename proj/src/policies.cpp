#include "aoi/policies.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "aoi/dynamics.hpp"

namespace aoi {

PolicyKind parse_policy_kind(std::string_view name) {
  if (name == "optimal") return PolicyKind::Optimal;
  if (name == "myopic") return PolicyKind::Myopic;
  if (name == "maxaoi") return PolicyKind::MaxAoI;
  if (name == "mdp") return PolicyKind::FullKnowledgeMyopic;
  throw ValidationError("unknown policy '" + std::string(name) +
                        "' (expected optimal, myopic, maxaoi or mdp)");
}

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Optimal:
      return "optimal";
    case PolicyKind::Myopic:
      return "myopic";
    case PolicyKind::MaxAoI:
      return "maxaoi";
    case PolicyKind::FullKnowledgeMyopic:
      return "mdp";
  }
  return "unknown";
}

Action argmin_action(std::span<const double> scores) {
  const int k = static_cast<int>(scores.size()) - 1;
  int best = 0;
  for (int a = 1; a <= k; ++a) {
    const double incumbent = scores[static_cast<std::size_t>(best)];
    const double candidate = scores[static_cast<std::size_t>(a)];
    if (std::isinf(incumbent)) {
      if (candidate < incumbent) best = a;
      continue;
    }
    const double tol = 1e-12 * std::max(1.0, std::abs(incumbent));
    if (candidate < incumbent - tol) best = a;
  }
  return best == k ? Action::idle() : Action::schedule(best);
}

Action myopic_select(std::span<const int> aoi, const FactoredBelief& belief,
                     const SystemConfig& config) {
  const int k = config.num_nodes();
  std::vector<double> scores(static_cast<std::size_t>(k) + 1);
  for (int a = 0; a < k; ++a) {
    scores[static_cast<std::size_t>(a)] =
        myopic_expected_reward(aoi, belief, Action::schedule(a), config);
  }
  scores.back() = myopic_expected_reward(aoi, belief, Action::idle(), config);
  return argmin_action(scores);
}

Action myopic_select(const BeliefState& state, const SystemConfig& config) {
  if (state.is_joint()) {
    return myopic_select(state.aoi, marginals(state.joint(), config.num_nodes(), config.truncation),
                         config);
  }
  return myopic_select(state.aoi, state.factored(), config);
}

Action maxaoi_select(std::span<const int> aoi, const SystemConfig& config) {
  (void)config;
  const auto it = std::max_element(aoi.begin(), aoi.end());  // first maximum
  return Action::schedule(static_cast<int>(it - aoi.begin()));
}

Action full_knowledge_myopic_select(const GroundState& ground, const SystemConfig& config) {
  FactoredBelief truth;
  truth.per_node.reserve(ground.local_age.size());
  for (int z : ground.local_age) {
    NodeBelief b{std::vector<double>(static_cast<std::size_t>(config.truncation), 0.0)};
    b.probs[static_cast<std::size_t>(z - 1)] = 1.0;
    truth.per_node.push_back(std::move(b));
  }
  return myopic_select(ground.aoi, truth, config);
}

namespace {

class MyopicScheduler final : public Scheduler {
 public:
  explicit MyopicScheduler(const SystemConfig& config) : config_(config) { reset(); }

  PolicyKind kind() const override { return PolicyKind::Myopic; }
  void reset() override { state_ = initial_belief_state(config_, BeliefForm::Factored); }
  Action decide(int, const GroundState&) override { return myopic_select(state_, config_); }
  void observe(Action action, LocalAgeReading reading) override {
    state_ = belief_state_update(state_, action, reading, config_);
  }

 private:
  const SystemConfig& config_;
  BeliefState state_;
};

class MaxAoIScheduler final : public Scheduler {
 public:
  explicit MaxAoIScheduler(const SystemConfig& config) : config_(config) { reset(); }

  PolicyKind kind() const override { return PolicyKind::MaxAoI; }
  void reset() override { aoi_.assign(static_cast<std::size_t>(config_.num_nodes()), 1); }
  Action decide(int, const GroundState&) override { return maxaoi_select(aoi_, config_); }
  void observe(Action action, LocalAgeReading reading) override {
    for (std::size_t i = 0; i < aoi_.size(); ++i) {
      const LocalAgeReading r = action.schedules(static_cast<int>(i)) ? reading : kNoObservation;
      aoi_[i] = aoi_update(aoi_[i], r, config_.truncation);
    }
  }

 private:
  const SystemConfig& config_;
  std::vector<int> aoi_;
};

class FullKnowledgeScheduler final : public Scheduler {
 public:
  explicit FullKnowledgeScheduler(const SystemConfig& config) : config_(config) {}

  PolicyKind kind() const override { return PolicyKind::FullKnowledgeMyopic; }
  void reset() override {}
  Action decide(int, const GroundState& ground) override {
    return full_knowledge_myopic_select(ground, config_);
  }
  void observe(Action, LocalAgeReading) override {}

 private:
  const SystemConfig& config_;
};

}  // namespace

std::unique_ptr<Scheduler> make_heuristic_scheduler(PolicyKind kind, const SystemConfig& config) {
  switch (kind) {
    case PolicyKind::Myopic:
      return std::make_unique<MyopicScheduler>(config);
    case PolicyKind::MaxAoI:
      return std::make_unique<MaxAoIScheduler>(config);
    case PolicyKind::FullKnowledgeMyopic:
      return std::make_unique<FullKnowledgeScheduler>(config);
    case PolicyKind::Optimal:
      break;
  }
  throw ValidationError("the optimal policy needs a solved policy table");
}

}  // namespace aoi
