#include "aoi/dynamics.hpp"

#include <algorithm>
#include <numeric>

namespace aoi {

int local_age_step(int z, bool arrival, int truncation) {
  return arrival ? 1 : std::min(z + 1, truncation);
}

double transition_prob(int z_next, int z, double lambda, int truncation) {
  // With D = 1 both branches land on the same age, so the masses add.
  double p = 0.0;
  if (z_next == 1) p += lambda;
  if (z_next == std::min(z + 1, truncation)) p += 1.0 - lambda;
  return p;
}

double observation_prob(LocalAgeReading obs, int z, bool scheduled, double success_prob) {
  if (!scheduled) return obs ? 0.0 : 1.0;
  if (!obs) return 1.0 - success_prob;
  return *obs == z ? success_prob : 0.0;
}

int aoi_update(int h, LocalAgeReading obs, int truncation) {
  return std::min((obs ? *obs : h) + 1, truncation);
}

std::vector<double> predict_joint(std::span<const double> probs, const SystemConfig& config) {
  const int k = config.num_nodes();
  const auto d = static_cast<std::size_t>(config.truncation);
  std::vector<double> cur(probs.begin(), probs.end());
  std::vector<double> next(cur.size());

  // Apply the per-node kernel one axis at a time.
  std::size_t stride = cur.size();
  for (int i = 0; i < k; ++i) {
    stride /= d;
    const double lambda = config.nodes[static_cast<std::size_t>(i)].lambda;
    const std::size_t block = stride * d;
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t base = 0; base < cur.size(); base += block) {
      for (std::size_t inner = 0; inner < stride; ++inner) {
        const std::size_t origin = base + inner;
        for (std::size_t z = 0; z < d; ++z) {
          const double mass = cur[origin + z * stride];
          if (mass == 0.0) continue;
          next[origin] += lambda * mass;
          next[origin + std::min(z + 1, d - 1) * stride] += (1.0 - lambda) * mass;
        }
      }
    }
    std::swap(cur, next);
  }
  return cur;
}

JointBelief joint_belief_update(const JointBelief& belief, Action action, const Observation& obs,
                                const SystemConfig& config) {
  const int k = config.num_nodes();
  const int d = config.truncation;
  std::vector<double> weighted = belief.probs;

  std::size_t stride = weighted.size();
  for (int i = 0; i < k; ++i) {
    stride /= static_cast<std::size_t>(d);
    const LocalAgeReading reading = obs.local_age[static_cast<std::size_t>(i)];
    const bool scheduled = action.schedules(i);
    if (!scheduled && !reading) continue;  // likelihood identically 1
    const double p = config.nodes[static_cast<std::size_t>(i)].success_prob;
    for (std::size_t idx = 0; idx < weighted.size(); ++idx) {
      if (weighted[idx] == 0.0) continue;
      const int z = static_cast<int>((idx / stride) % static_cast<std::size_t>(d)) + 1;
      weighted[idx] *= observation_prob(reading, z, scheduled, p);
    }
  }

  const double evidence = std::accumulate(weighted.begin(), weighted.end(), 0.0);
  if (!(evidence > 0.0)) {
    throw ZeroProbabilityObservation("joint belief update: observation has zero probability");
  }
  for (double& w : weighted) w /= evidence;

  return JointBelief{predict_joint(weighted, config)};
}

NodeBelief node_belief_update(const NodeBelief& belief, bool scheduled, LocalAgeReading obs,
                              double lambda, int truncation) {
  const auto d = static_cast<std::size_t>(truncation);
  NodeBelief next;
  next.probs.assign(d, 0.0);
  if (scheduled && obs) {
    next.probs[0] += lambda;
    next.probs[static_cast<std::size_t>(std::min(*obs + 1, truncation) - 1)] += 1.0 - lambda;
    return next;
  }
  for (std::size_t z = 0; z < d; ++z) {
    const double mass = belief.probs[z];
    if (mass == 0.0) continue;
    next.probs[0] += lambda * mass;
    next.probs[std::min(z + 1, d - 1)] += (1.0 - lambda) * mass;
  }
  return next;
}

FactoredBelief marginals(const JointBelief& belief, int num_nodes, int truncation) {
  FactoredBelief out;
  out.per_node.assign(static_cast<std::size_t>(num_nodes),
                      NodeBelief{std::vector<double>(static_cast<std::size_t>(truncation), 0.0)});
  for (std::size_t idx = 0; idx < belief.probs.size(); ++idx) {
    const double mass = belief.probs[idx];
    if (mass == 0.0) continue;
    const auto ages = joint_ages(idx, num_nodes, truncation);
    for (std::size_t i = 0; i < ages.size(); ++i) {
      out.per_node[i].probs[static_cast<std::size_t>(ages[i] - 1)] += mass;
    }
  }
  return out;
}

JointBelief product_belief(const FactoredBelief& belief, int truncation) {
  const int k = static_cast<int>(belief.per_node.size());
  JointBelief out;
  out.probs.assign(joint_size(k, truncation), 0.0);
  for (std::size_t idx = 0; idx < out.probs.size(); ++idx) {
    const auto ages = joint_ages(idx, k, truncation);
    double p = 1.0;
    for (std::size_t i = 0; i < ages.size(); ++i) {
      p *= belief.per_node[i].probs[static_cast<std::size_t>(ages[i] - 1)];
    }
    out.probs[idx] = p;
  }
  return out;
}

BeliefState belief_state_update(const BeliefState& state, Action action, LocalAgeReading reading,
                                const SystemConfig& config) {
  const int d = config.truncation;
  const Observation obs = Observation::from_reading(state.aoi, action, reading);

  BeliefState next;
  next.aoi.resize(state.aoi.size());
  for (std::size_t i = 0; i < state.aoi.size(); ++i) {
    next.aoi[i] = aoi_update(state.aoi[i], obs.local_age[i], d);
  }

  if (state.is_joint()) {
    next.belief = joint_belief_update(state.joint(), action, obs, config);
  } else {
    FactoredBelief factored;
    const auto& prior = state.factored().per_node;
    factored.per_node.reserve(prior.size());
    for (std::size_t i = 0; i < prior.size(); ++i) {
      factored.per_node.push_back(node_belief_update(prior[i],
                                                     action.schedules(static_cast<int>(i)),
                                                     obs.local_age[i], config.nodes[i].lambda, d));
    }
    next.belief = std::move(factored);
  }
  return next;
}

GroundState ground_step(const GroundState& state, const SlotOutcome& outcome, int truncation) {
  GroundState next = state;
  for (std::size_t i = 0; i < state.aoi.size(); ++i) {
    const bool received = outcome.scheduled.schedules(static_cast<int>(i)) && outcome.tx_success;
    next.aoi[i] = std::min((received ? state.local_age[i] : state.aoi[i]) + 1, truncation);
    next.local_age[i] = local_age_step(state.local_age[i], outcome.arrivals[i], truncation);
  }
  return next;
}

double reward(std::span<const int> aoi, std::span<const double> weights) {
  double total = 0.0;
  for (std::size_t i = 0; i < aoi.size(); ++i) total += weights[i] * aoi[i];
  return total;
}

double myopic_expected_reward(std::span<const int> aoi, const FactoredBelief& belief,
                              Action action, const SystemConfig& config) {
  const int d = config.truncation;
  double total = 0.0;
  for (std::size_t i = 0; i < aoi.size(); ++i) {
    const auto& node = config.nodes[i];
    const double stale = std::min(aoi[i] + 1, d);
    if (!action.schedules(static_cast<int>(i))) {
      total += node.weight * stale;
      continue;
    }
    double fresh = 0.0;
    const auto& probs = belief.per_node[i].probs;
    for (std::size_t z = 0; z < probs.size(); ++z) {
      fresh += probs[z] * std::min(static_cast<int>(z) + 2, d);
    }
    total += node.weight * (node.success_prob * fresh + (1.0 - node.success_prob) * stale);
  }
  return total;
}

}  // namespace aoi
