#pragma once

#include <span>
#include <vector>

#include "aoi/core_model.hpp"

namespace aoi {

/// The Bayes normalizer vanished: the observation is impossible under the belief.
class ZeroProbabilityObservation : public Error {
 public:
  using Error::Error;
};

/// Per-slot realization of the channel and of the arrival processes.
struct SlotOutcome {
  Action scheduled = Action::idle();
  bool tx_success = false;  // always false when idle
  std::vector<bool> arrivals;
};

// Scalar kernels. Ages saturate at D.

int local_age_step(int z, bool arrival, int truncation);
double transition_prob(int z_next, int z, double lambda, int truncation);
double observation_prob(LocalAgeReading obs, int z, bool scheduled, double success_prob);
int aoi_update(int h, LocalAgeReading obs, int truncation);

// Belief updates.

/// Bayes update of the joint local-age distribution after `action` produced `obs`.
/// Throws ZeroProbabilityObservation when the observation has zero likelihood.
JointBelief joint_belief_update(const JointBelief& belief, Action action, const Observation& obs,
                                const SystemConfig& config);

NodeBelief node_belief_update(const NodeBelief& belief, bool scheduled, LocalAgeReading obs,
                              double lambda, int truncation);

/// One-step prediction of a joint distribution through the product arrival kernel.
std::vector<double> predict_joint(std::span<const double> probs, const SystemConfig& config);

/// Per-node marginals of a joint distribution.
FactoredBelief marginals(const JointBelief& belief, int num_nodes, int truncation);

/// Product distribution built from per-node marginals.
JointBelief product_belief(const FactoredBelief& belief, int truncation);

/// Full monitor-side transition of a belief state (AoI and belief together).
BeliefState belief_state_update(const BeliefState& state, Action action, LocalAgeReading reading,
                                const SystemConfig& config);

/// Ground-truth slot step: AoI from the current local ages, then arrivals.
GroundState ground_step(const GroundState& state, const SlotOutcome& outcome, int truncation);

// Rewards.

double reward(std::span<const int> aoi, std::span<const double> weights);

/// One-step expected weighted AoI of the next slot under a factored belief.
double myopic_expected_reward(std::span<const int> aoi, const FactoredBelief& belief,
                              Action action, const SystemConfig& config);

}  // namespace aoi
