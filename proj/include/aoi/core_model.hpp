#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace aoi {

// Errors -------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration or out-of-range domain value.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Channel parameters live here so that NodeParams can remember where its
// success probability came from (sweeps over SNR recompute it).
struct ChannelParams {
  struct Physical {
    double power = 0.0;
    double noise = 0.0;
    double distance = 5.0;
    double pathloss = 2.0;
  };
  std::variant<double, Physical> snr;  // double = snr in dB
  double rate_threshold = 1.0;         // bits/s/Hz
};

// Domain types ---------------------------------------------------------------

struct NodeParams {
  double lambda = 1.0;        // Bernoulli arrival probability per slot
  double weight = 1.0;        // importance weight
  double success_prob = 1.0;  // per-transmission success probability
  std::optional<ChannelParams> channel;
};

struct SystemConfig {
  std::vector<NodeParams> nodes;
  int horizon = 1;     // T
  int truncation = 1;  // D, upper bound on AoI and local age
  std::uint64_t seed = 0;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  std::vector<double> weights() const;

  /// Throws ValidationError naming the offending field.
  void validate() const;
};

/// Either a node index or idle. At most one node per slot by construction.
class Action {
 public:
  static constexpr Action idle() { return Action(-1); }
  static constexpr Action schedule(int node) { return Action(node); }

  constexpr bool is_idle() const { return node_ < 0; }
  constexpr int node() const { return node_; }
  constexpr bool schedules(int node) const { return node_ == node; }

  friend constexpr bool operator==(Action, Action) = default;

  std::string to_string() const;

 private:
  explicit constexpr Action(int node) : node_(node < 0 ? -1 : node) {}
  int node_;
};

/// Local-age reading of one node; std::nullopt is the "no observation" symbol.
using LocalAgeReading = std::optional<int>;
inline constexpr std::nullopt_t kNoObservation = std::nullopt;

struct GroundState {
  std::vector<int> aoi;        // h
  std::vector<int> local_age;  // z
};

struct Observation {
  std::vector<int> aoi;
  std::vector<LocalAgeReading> local_age;

  /// The observation generated by `action` when the scheduled node's reading is `reading`.
  static Observation from_reading(const std::vector<int>& aoi, Action action,
                                  LocalAgeReading reading);
};

struct NodeBelief {
  std::vector<double> probs;  // probs[z - 1] = Pr(local age = z)
};

struct FactoredBelief {
  std::vector<NodeBelief> per_node;
};

/// Distribution over local-age vectors z in {1..D}^K, row-major with node 0
/// most significant.
struct JointBelief {
  std::vector<double> probs;
};

struct BeliefState {
  std::vector<int> aoi;
  std::variant<JointBelief, FactoredBelief> belief;

  bool is_joint() const { return std::holds_alternative<JointBelief>(belief); }
  const JointBelief& joint() const { return std::get<JointBelief>(belief); }
  const FactoredBelief& factored() const { return std::get<FactoredBelief>(belief); }
};

enum class BeliefForm { Joint, Factored };

// Joint indexing ---------------------------------------------------------------

/// D^K, throws ValidationError if it does not fit in 32 bits.
std::size_t joint_size(int num_nodes, int truncation);
std::size_t joint_index(const std::vector<int>& local_age, int truncation);
std::vector<int> joint_ages(std::size_t index, int num_nodes, int truncation);

// Validation -----------------------------------------------------------------

inline constexpr double kProbabilitySumTolerance = 1e-9;

void validate(const NodeBelief& belief, int truncation);
void validate(const FactoredBelief& belief, int num_nodes, int truncation);
void validate(const JointBelief& belief, int num_nodes, int truncation);
void validate(const BeliefState& state, const SystemConfig& config);
void validate(const GroundState& state, const SystemConfig& config);

// Operations -----------------------------------------------------------------

BeliefState initial_belief_state(const SystemConfig& config, BeliefForm form = BeliefForm::Joint);
GroundState initial_ground_state(const SystemConfig& config);

/// Opaque byte key: equal for states with equal AoI vectors whose
/// probabilities agree after rounding to 9 decimal places.
std::string canonical_key(const BeliefState& state);

}  // namespace aoi
