#include "aoi/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <random>

#include "aoi/dynamics.hpp"

namespace aoi {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

class OptimalScheduler final : public Scheduler {
 public:
  OptimalScheduler(const OptimalPolicy& policy, const SystemConfig& config)
      : table_(policy.solution.table) {
    if (table_.tree().size() != static_cast<std::size_t>(config.horizon)) {
      throw ValidationError("optimal scheduler: policy table horizon differs from config");
    }
  }

  PolicyKind kind() const override { return PolicyKind::Optimal; }
  void reset() override {
    t_ = 1;
    state_ = 0;
  }
  Action decide(int t, const GroundState&) override {
    if (t != t_) throw UnknownBeliefState("optimal scheduler: slot out of step with the tree");
    const auto& layer = table_.tree()[static_cast<std::size_t>(t - 1)];
    return optimal_select(table_, t, layer.states[state_]);
  }
  void observe(Action action, LocalAgeReading reading) override {
    const auto& layer = table_.tree()[static_cast<std::size_t>(t_ - 1)];
    const auto next = layer.successor(state_, action, reading);
    if (next == BeliefLayer::kNone) {
      throw UnknownBeliefState("optimal scheduler: observation leads off the enumerated tree");
    }
    state_ = static_cast<std::size_t>(next);
    ++t_;
  }

 private:
  const PolicyTable& table_;
  int t_ = 1;
  std::size_t state_ = 0;
};

struct World {
  std::vector<int> local_age;
  double weight;
};

// Expected reward accumulated from slot t onward, weighted by the probability
// of the history that produced `worlds` (their weights are joint probabilities).
double expectimin(int t, const std::vector<int>& aoi, const std::vector<World>& worlds,
                  const SystemConfig& config, const std::vector<double>& weights) {
  const int k = config.num_nodes();
  const int d = config.truncation;
  double mass = 0.0;
  for (const auto& w : worlds) mass += w.weight;
  const double now = reward(aoi, weights) * mass;
  if (t == config.horizon) return now;

  double best = std::numeric_limits<double>::infinity();
  for (int a = 0; a <= k; ++a) {
    const bool idle = a == k;
    // reading (-1 = none) -> successor worlds merged by local-age vector
    std::map<int, std::map<std::vector<int>, double>> children;
    for (const auto& world : worlds) {
      for (int success = 0; success <= 1; ++success) {
        double ps = 0.0;
        if (idle) {
          ps = success ? 0.0 : 1.0;
        } else {
          const double p = config.nodes[static_cast<std::size_t>(a)].success_prob;
          ps = success ? p : 1.0 - p;
        }
        if (ps == 0.0) continue;
        const int reading = success ? world.local_age[static_cast<std::size_t>(a)] : -1;
        for (unsigned mask = 0; mask < (1U << k); ++mask) {
          double pa = ps * world.weight;
          std::vector<int> next(static_cast<std::size_t>(k));
          for (int i = 0; i < k; ++i) {
            const bool arrival = (mask >> i) & 1U;
            const double lambda = config.nodes[static_cast<std::size_t>(i)].lambda;
            pa *= arrival ? lambda : 1.0 - lambda;
            const int z = world.local_age[static_cast<std::size_t>(i)];
            next[static_cast<std::size_t>(i)] = arrival ? 1 : std::min(z + 1, d);
          }
          if (pa == 0.0) continue;
          children[reading][next] += pa;
        }
      }
    }

    double total = 0.0;
    for (const auto& [reading, merged] : children) {
      std::vector<int> next_aoi(aoi.size());
      for (int i = 0; i < k; ++i) {
        const auto ii = static_cast<std::size_t>(i);
        const int base = (i == a && reading >= 0) ? reading : aoi[ii];
        next_aoi[ii] = std::min(base + 1, d);
      }
      std::vector<World> next_worlds;
      for (const auto& [z, w] : merged) next_worlds.push_back(World{z, w});
      total += expectimin(t + 1, next_aoi, next_worlds, config, weights);
    }
    best = std::min(best, total);
  }
  return now + best;
}

}  // namespace

std::unique_ptr<Scheduler> make_optimal_scheduler(const OptimalPolicy& policy,
                                                  const SystemConfig& config) {
  return std::make_unique<OptimalScheduler>(policy, config);
}

std::unique_ptr<Scheduler> make_scheduler(PolicyKind kind, const SystemConfig& config,
                                          const OptimalPolicy* optimal) {
  if (kind != PolicyKind::Optimal) return make_heuristic_scheduler(kind, config);
  if (optimal == nullptr) throw ValidationError("the optimal policy needs a solved policy table");
  return make_optimal_scheduler(*optimal, config);
}

std::uint64_t episode_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ (index * 0xD1B54A32D192ED03ULL));
}

EpisodeResult run_episode(const SystemConfig& config, Scheduler& scheduler, std::uint64_t seed,
                          bool record_trace) {
  const int k = config.num_nodes();
  const int d = config.truncation;
  const auto weights = config.weights();
  std::mt19937_64 rng(seed);

  EpisodeResult result;
  if (record_trace) result.trace.reserve(static_cast<std::size_t>(config.horizon));
  GroundState ground = initial_ground_state(config);
  scheduler.reset();
  SlotOutcome outcome;
  outcome.arrivals.resize(static_cast<std::size_t>(k));

  for (int t = 1; t <= config.horizon; ++t) {
    result.ewsaoi_sum += reward(ground.aoi, weights);
    if (t == config.horizon) {
      if (record_trace) result.trace.push_back(SlotRecord{t, std::nullopt, false, ground.aoi, ground.local_age});
      break;
    }

    const Action action = scheduler.decide(t, ground);
    const double u = uniform01(rng);
    outcome.scheduled = action;
    outcome.tx_success =
        !action.is_idle() && u < config.nodes[static_cast<std::size_t>(action.node())].success_prob;
    for (int i = 0; i < k; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      outcome.arrivals[ii] = uniform01(rng) < config.nodes[ii].lambda;
    }
    const LocalAgeReading reading =
        outcome.tx_success
            ? LocalAgeReading(ground.local_age[static_cast<std::size_t>(action.node())])
            : kNoObservation;

    if (record_trace) {
      result.trace.push_back(SlotRecord{t, action, outcome.tx_success, ground.aoi, ground.local_age});
    }
    ground = ground_step(ground, outcome, d);
    scheduler.observe(action, reading);
  }
  return result;
}

EpisodeResult run_episode(const SystemConfig& config, PolicyKind kind, std::uint64_t seed,
                          const OptimalPolicy* optimal, bool record_trace) {
  auto scheduler = make_scheduler(kind, config, optimal);
  return run_episode(config, *scheduler, seed, record_trace);
}

EwsaoiEstimate estimate_ewsaoi(const SystemConfig& config, PolicyKind kind, std::size_t episodes,
                               const OptimalPolicy* optimal) {
  config.validate();
  if (episodes < 2) throw ValidationError("estimate_ewsaoi: at least two episodes are required");
  auto scheduler = make_scheduler(kind, config, optimal);
  const double scale = static_cast<double>(config.horizon) * config.num_nodes();

  // Welford accumulation in episode order.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t e = 0; e < episodes; ++e) {
    const double x = run_episode(config, *scheduler, episode_seed(config.seed, e)).ewsaoi_sum / scale;
    const double delta = x - mean;
    mean += delta / static_cast<double>(e + 1);
    m2 += delta * (x - mean);
  }
  const double variance = m2 / static_cast<double>(episodes - 1);
  return EwsaoiEstimate{mean, std::sqrt(variance / static_cast<double>(episodes)), episodes};
}

double brute_force_optimal_ewsaoi(const SystemConfig& config) {
  config.validate();
  std::size_t states = 1;
  for (int i = 0; i < config.num_nodes(); ++i) states *= static_cast<std::size_t>(config.truncation);
  if (states > 9 || config.horizon > 5) {
    throw OracleTooLarge("brute-force oracle needs D^K <= 9 and T <= 5");
  }
  const auto k = static_cast<std::size_t>(config.num_nodes());
  const std::vector<int> ones(k, 1);
  const double total = expectimin(1, ones, {World{ones, 1.0}}, config, config.weights());
  return total / (static_cast<double>(config.horizon) * config.num_nodes());
}

void write_trace_csv(std::ostream& out, const EpisodeResult& result, int num_nodes) {
  out << "t,action,success";
  for (int i = 1; i <= num_nodes; ++i) out << ",h_" << i;
  for (int i = 1; i <= num_nodes; ++i) out << ",z_" << i;
  out << '\n';
  for (const auto& row : result.trace) {
    out << row.t << ',' << (row.action ? row.action->to_string() : std::string("none")) << ','
        << (row.success ? 1 : 0);
    for (int h : row.aoi) out << ',' << h;
    for (int z : row.local_age) out << ',' << z;
    out << '\n';
  }
}

}  // namespace aoi
