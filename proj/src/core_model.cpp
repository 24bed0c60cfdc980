#include "aoi/core_model.hpp"

#include <cmath>
#include <limits>

namespace aoi {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

void check_distribution(const std::vector<double>& probs, const char* what) {
  double sum = 0.0;
  for (double p : probs) {
    require(std::isfinite(p) && p >= 0.0 && p <= 1.0,
            std::string(what) + ": probability outside [0,1]");
    sum += p;
  }
  require(std::abs(sum - 1.0) <= kProbabilitySumTolerance,
          std::string(what) + ": probabilities sum to " + std::to_string(sum));
}

void check_ages(const std::vector<int>& ages, const SystemConfig& config, const char* what) {
  require(static_cast<int>(ages.size()) == config.num_nodes(),
          std::string(what) + ": length differs from node count");
  for (int a : ages) {
    require(a >= 1 && a <= config.truncation, std::string(what) + ": age outside [1, D]");
  }
}

template <typename T>
void append_bytes(std::string& out, T value) {
  const auto* raw = reinterpret_cast<const char*>(&value);
  out.append(raw, sizeof(T));
}

void append_rounded(std::string& out, const std::vector<double>& probs) {
  for (double p : probs) append_bytes<std::int64_t>(out, std::llround(p * 1e9));
}

}  // namespace

std::vector<double> SystemConfig::weights() const {
  std::vector<double> w;
  w.reserve(nodes.size());
  for (const auto& n : nodes) w.push_back(n.weight);
  return w;
}

void SystemConfig::validate() const {
  require(!nodes.empty(), "config: at least one node is required");
  require(horizon >= 1, "config: horizon must be >= 1");
  require(truncation >= 1, "config: truncation must be >= 1");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    const std::string where = "config: node " + std::to_string(i) + ": ";
    require(n.lambda > 0.0 && n.lambda <= 1.0, where + "lambda must lie in (0, 1]");
    require(std::isfinite(n.weight) && n.weight > 0.0, where + "weight must be positive");
    require(n.success_prob >= 0.0 && n.success_prob <= 1.0,
            where + "success_prob must lie in [0, 1]");
  }
}

std::string Action::to_string() const {
  return is_idle() ? std::string("idle") : std::to_string(node_);
}

Observation Observation::from_reading(const std::vector<int>& aoi, Action action,
                                      LocalAgeReading reading) {
  Observation obs{aoi, std::vector<LocalAgeReading>(aoi.size(), kNoObservation)};
  if (!action.is_idle()) obs.local_age[static_cast<std::size_t>(action.node())] = reading;
  return obs;
}

std::size_t joint_size(int num_nodes, int truncation) {
  std::size_t size = 1;
  for (int i = 0; i < num_nodes; ++i) {
    size *= static_cast<std::size_t>(truncation);
    require(size <= std::numeric_limits<std::uint32_t>::max(),
            "joint belief: D^K does not fit in memory");
  }
  return size;
}

std::size_t joint_index(const std::vector<int>& local_age, int truncation) {
  std::size_t index = 0;
  for (int z : local_age) index = index * static_cast<std::size_t>(truncation) + (z - 1);
  return index;
}

std::vector<int> joint_ages(std::size_t index, int num_nodes, int truncation) {
  std::vector<int> ages(static_cast<std::size_t>(num_nodes));
  const auto d = static_cast<std::size_t>(truncation);
  for (int i = num_nodes - 1; i >= 0; --i) {
    ages[static_cast<std::size_t>(i)] = static_cast<int>(index % d) + 1;
    index /= d;
  }
  return ages;
}

void validate(const NodeBelief& belief, int truncation) {
  require(static_cast<int>(belief.probs.size()) == truncation,
          "node belief: length must equal D");
  check_distribution(belief.probs, "node belief");
}

void validate(const FactoredBelief& belief, int num_nodes, int truncation) {
  require(static_cast<int>(belief.per_node.size()) == num_nodes,
          "factored belief: length must equal K");
  for (const auto& b : belief.per_node) validate(b, truncation);
}

void validate(const JointBelief& belief, int num_nodes, int truncation) {
  require(belief.probs.size() == joint_size(num_nodes, truncation),
          "joint belief: length must equal D^K");
  check_distribution(belief.probs, "joint belief");
}

void validate(const BeliefState& state, const SystemConfig& config) {
  check_ages(state.aoi, config, "belief state aoi");
  if (state.is_joint()) {
    validate(state.joint(), config.num_nodes(), config.truncation);
  } else {
    validate(state.factored(), config.num_nodes(), config.truncation);
  }
}

void validate(const GroundState& state, const SystemConfig& config) {
  check_ages(state.aoi, config, "ground state aoi");
  check_ages(state.local_age, config, "ground state local age");
}

BeliefState initial_belief_state(const SystemConfig& config, BeliefForm form) {
  config.validate();
  const int k = config.num_nodes();
  const int d = config.truncation;
  BeliefState state;
  state.aoi.assign(static_cast<std::size_t>(k), 1);
  if (form == BeliefForm::Joint) {
    JointBelief joint;
    joint.probs.assign(joint_size(k, d), 0.0);
    joint.probs[0] = 1.0;  // z = (1, ..., 1)
    state.belief = std::move(joint);
  } else {
    FactoredBelief factored;
    NodeBelief point;
    point.probs.assign(static_cast<std::size_t>(d), 0.0);
    point.probs[0] = 1.0;
    factored.per_node.assign(static_cast<std::size_t>(k), point);
    state.belief = std::move(factored);
  }
  return state;
}

GroundState initial_ground_state(const SystemConfig& config) {
  const auto k = static_cast<std::size_t>(config.num_nodes());
  return GroundState{std::vector<int>(k, 1), std::vector<int>(k, 1)};
}

std::string canonical_key(const BeliefState& state) {
  std::string key;
  key.push_back(state.is_joint() ? 'J' : 'F');
  append_bytes<std::int32_t>(key, static_cast<std::int32_t>(state.aoi.size()));
  for (int h : state.aoi) append_bytes<std::int32_t>(key, h);
  if (state.is_joint()) {
    append_rounded(key, state.joint().probs);
  } else {
    for (const auto& b : state.factored().per_node) append_rounded(key, b.probs);
  }
  return key;
}

}  // namespace aoi
