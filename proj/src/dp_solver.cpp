#include "aoi/dp_solver.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "aoi/dynamics.hpp"
#include "aoi/policies.hpp"

namespace aoi {

namespace {

std::size_t action_slot(Action action, int num_nodes) {
  return action.is_idle() ? static_cast<std::size_t>(num_nodes)
                          : static_cast<std::size_t>(action.node());
}

std::vector<Action> all_actions(int num_nodes) {
  std::vector<Action> actions;
  for (int i = 0; i < num_nodes; ++i) actions.push_back(Action::schedule(i));
  actions.push_back(Action::idle());
  return actions;
}

// Local-age readings with positive probability after `action` under `state`.
std::vector<LocalAgeReading> possible_readings(const BeliefState& state, Action action,
                                               const SystemConfig& config) {
  if (action.is_idle()) return {kNoObservation};
  const int node = action.node();
  const double p = config.nodes[static_cast<std::size_t>(node)].success_prob;
  std::vector<LocalAgeReading> readings;
  if (p < 1.0) readings.push_back(kNoObservation);
  if (p > 0.0) {
    const auto margin = marginals(state.joint(), config.num_nodes(), config.truncation);
    const auto& probs = margin.per_node[static_cast<std::size_t>(node)].probs;
    for (std::size_t z = 0; z < probs.size(); ++z) {
      if (probs[z] > 0.0) readings.push_back(static_cast<int>(z) + 1);
    }
  }
  return readings;
}

// E(z) = sum_{z'} Pr(z' | z) w(z'), one axis at a time.
std::vector<double> expected_next(const std::vector<double>& next_values,
                                  const SystemConfig& config) {
  const auto d = static_cast<std::size_t>(config.truncation);
  std::vector<double> cur = next_values;
  std::vector<double> out(cur.size());
  std::size_t stride = cur.size();
  for (int i = 0; i < config.num_nodes(); ++i) {
    stride /= d;
    const double lambda = config.nodes[static_cast<std::size_t>(i)].lambda;
    const std::size_t block = stride * d;
    for (std::size_t base = 0; base < cur.size(); base += block) {
      for (std::size_t inner = 0; inner < stride; ++inner) {
        const std::size_t origin = base + inner;
        const double reset = cur[origin];
        for (std::size_t z = 0; z < d; ++z) {
          out[origin + z * stride] =
              lambda * reset + (1.0 - lambda) * cur[origin + std::min(z + 1, d - 1) * stride];
        }
      }
    }
    std::swap(cur, out);
  }
  return cur;
}

// Continuation term of each local-age vector under `action`:
// sum_o Pr(o | z, a) E_{successor(a, o)}(z).
void continuation(const BeliefLayer& layer, std::size_t state, Action action,
                  const std::vector<std::vector<double>>& expected, const SystemConfig& config,
                  std::vector<double>& out) {
  const std::size_t n = out.size();
  if (action.is_idle()) {
    const auto succ = layer.successor(state, action, kNoObservation);
    const auto& e = expected[static_cast<std::size_t>(succ)];
    std::copy(e.begin(), e.end(), out.begin());
    return;
  }
  const int node = action.node();
  const double p = config.nodes[static_cast<std::size_t>(node)].success_prob;
  const auto d = static_cast<std::size_t>(config.truncation);
  std::size_t stride = 1;
  for (int i = config.num_nodes() - 1; i > node; --i) stride *= d;

  const auto failed = layer.successor(state, action, kNoObservation);
  for (std::size_t z = 0; z < n; ++z) {
    double total = 0.0;
    if (failed != BeliefLayer::kNone) {
      total += (1.0 - p) * expected[static_cast<std::size_t>(failed)][z];
    }
    const int age = static_cast<int>((z / stride) % d) + 1;
    const auto seen = layer.successor(state, action, age);
    if (seen != BeliefLayer::kNone) total += p * expected[static_cast<std::size_t>(seen)][z];
    out[z] = total;
  }
}

void write_hex(std::ostream& out, const std::string& bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  for (unsigned char c : bytes) out << kDigits[c >> 4] << kDigits[c & 0xF];
}

}  // namespace

// BeliefLayer ------------------------------------------------------------------

std::optional<std::size_t> BeliefLayer::find(const std::string& key) const {
  auto it = index.find(key);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

std::size_t BeliefLayer::slot(std::size_t state, Action action, LocalAgeReading reading) const {
  const auto width = static_cast<std::size_t>((num_nodes + 1) * (truncation + 1));
  const std::size_t reading_slot = reading ? static_cast<std::size_t>(*reading) : 0;
  return state * width + action_slot(action, num_nodes) * static_cast<std::size_t>(truncation + 1) +
         reading_slot;
}

std::int32_t BeliefLayer::successor(std::size_t state, Action action,
                                    LocalAgeReading reading) const {
  if (successors.empty()) return kNone;
  return successors[slot(state, action, reading)];
}

bool BeliefLayer::expanded(std::size_t state, Action action) const {
  if (successors.empty()) return false;
  const std::size_t first = slot(state, action, kNoObservation);
  for (int r = 0; r <= truncation; ++r) {
    if (successors[first + static_cast<std::size_t>(r)] != kNone) return true;
  }
  return false;
}

// Enumeration ------------------------------------------------------------------

BeliefTree enumerate_reachable(const BeliefState& initial, const SystemConfig& config,
                               const EnumerationOptions& options) {
  config.validate();
  validate(initial, config);
  if (!initial.is_joint()) throw ValidationError("enumerate_reachable: needs a joint belief");

  const int k = config.num_nodes();
  const int d = config.truncation;
  const auto width = static_cast<std::size_t>((k + 1) * (d + 1));
  const auto actions = all_actions(k);
  const std::size_t entries_per_state = joint_size(k, d);
  if (entries_per_state > options.max_belief_entries) {
    throw BudgetExceeded("a single joint belief of " + std::to_string(entries_per_state) +
                         " entries exceeds the enumeration budget");
  }

  auto make_layer = [&](int t) {
    BeliefLayer layer;
    layer.t = t;
    layer.num_nodes = k;
    layer.truncation = d;
    return layer;
  };

  BeliefTree tree;
  tree.push_back(make_layer(1));
  {
    auto& root = tree.front();
    root.keys.push_back(canonical_key(initial));
    root.index.emplace(root.keys.back(), 0);
    root.states.push_back(initial);
  }
  std::size_t total = 1;

  for (int t = 1; t < config.horizon; ++t) {
    BeliefLayer next = make_layer(t + 1);
    BeliefLayer& cur = tree[static_cast<std::size_t>(t - 1)];
    cur.successors.assign(cur.size() * width, BeliefLayer::kNone);

    for (std::size_t s = 0; s < cur.size(); ++s) {
      const BeliefState& state = cur.states[s];
      std::vector<Action> expand = actions;
      if (options.fixed_policy) expand = {options.fixed_policy(state)};

      for (Action action : expand) {
        for (LocalAgeReading reading : possible_readings(state, action, config)) {
          BeliefState child = belief_state_update(state, action, reading, config);
          std::string key = canonical_key(child);
          auto [it, inserted] = next.index.try_emplace(key, next.size());
          if (inserted) {
            if (++total > options.max_states) {
              throw BudgetExceeded("belief enumeration budget exceeded: more than " +
                                   std::to_string(options.max_states) + " states at slot " +
                                   std::to_string(t + 1));
            }
            if (total * entries_per_state > options.max_belief_entries) {
              throw BudgetExceeded("belief enumeration budget exceeded: more than " +
                                   std::to_string(options.max_belief_entries) +
                                   " stored probabilities at slot " + std::to_string(t + 1));
            }
            next.keys.push_back(std::move(key));
            next.states.push_back(std::move(child));
          }
          cur.successors[cur.slot(s, action, reading)] = static_cast<std::int32_t>(it->second);
        }
      }
    }
    tree.push_back(std::move(next));
  }
  return tree;
}

// Policy table -------------------------------------------------------------------

PolicyTable::PolicyTable(std::shared_ptr<const BeliefTree> tree,
                         std::vector<std::vector<Action>> actions)
    : tree_(std::move(tree)), actions_(std::move(actions)) {}

std::optional<Action> PolicyTable::find(int t, const std::string& key) const {
  if (t < 1 || t > decision_slots()) return std::nullopt;
  const auto state = (*tree_)[static_cast<std::size_t>(t - 1)].find(key);
  if (!state) return std::nullopt;
  return actions_[static_cast<std::size_t>(t - 1)][*state];
}

Action PolicyTable::at(int t, std::size_t state) const {
  return actions_.at(static_cast<std::size_t>(t - 1)).at(state);
}

std::size_t PolicyTable::size() const {
  std::size_t n = 0;
  for (const auto& layer : actions_) n += layer.size();
  return n;
}

bool operator==(const PolicyTable& a, const PolicyTable& b) {
  if (a.actions_ != b.actions_) return false;
  for (std::size_t t = 0; t < a.actions_.size(); ++t) {
    if ((*a.tree_)[t].keys != (*b.tree_)[t].keys) return false;
  }
  return true;
}

// Backward induction -------------------------------------------------------------

const ValueVector& DpSolution::value(int t, const std::string& key) const {
  const auto state = (*tree)[static_cast<std::size_t>(t - 1)].find(key);
  if (!state) throw UnknownBeliefState("no value for belief state at slot " + std::to_string(t));
  return values[static_cast<std::size_t>(t - 1)][*state];
}

DpSolution backward_induction(std::shared_ptr<const BeliefTree> tree, const SystemConfig& config) {
  const int k = config.num_nodes();
  const std::size_t n = joint_size(k, config.truncation);
  const auto weights = config.weights();
  const auto horizon = tree->size();

  DpSolution solution;
  solution.tree = tree;
  solution.values.resize(horizon);
  std::vector<std::vector<Action>> actions(horizon - 1);

  {
    const auto& last = tree->back();
    auto& values = solution.values.back();
    values.reserve(last.size());
    for (const auto& state : last.states) {
      values.push_back(ValueVector{std::vector<double>(n, reward(state.aoi, weights))});
    }
  }

  const auto candidates = all_actions(k);
  std::vector<double> cont(n);
  std::vector<double> scores(candidates.size());

  for (std::size_t t = horizon - 1; t-- > 0;) {
    const auto& layer = (*tree)[t];
    std::vector<std::vector<double>> expected;
    expected.reserve(solution.values[t + 1].size());
    for (const auto& v : solution.values[t + 1]) expected.push_back(expected_next(v.values, config));

    auto& values = solution.values[t];
    values.resize(layer.size());
    actions[t].resize(layer.size(), Action::idle());

    for (std::size_t s = 0; s < layer.size(); ++s) {
      const auto& state = layer.states[s];
      const auto& b = state.joint().probs;
      const double r = reward(state.aoi, weights);

      for (std::size_t a = 0; a < candidates.size(); ++a) {
        if (!layer.expanded(s, candidates[a])) {
          scores[a] = std::numeric_limits<double>::infinity();
          continue;
        }
        continuation(layer, s, candidates[a], expected, config, cont);
        double q = 0.0;
        for (std::size_t z = 0; z < n; ++z) q += b[z] * cont[z];
        scores[a] = r + q;
      }

      const Action best = argmin_action(scores);
      actions[t][s] = best;
      continuation(layer, s, best, expected, config, cont);
      auto& v = values[s].values;
      v.resize(n);
      for (std::size_t z = 0; z < n; ++z) v[z] = r + cont[z];
    }
  }

  solution.table = PolicyTable(tree, std::move(actions));
  return solution;
}

double analytical_ewsaoi(const BeliefState& initial, const ValueVector& values,
                         const SystemConfig& config) {
  const auto& b = initial.joint().probs;
  double total = 0.0;
  for (std::size_t z = 0; z < b.size(); ++z) total += b[z] * values.values[z];
  return total / (static_cast<double>(config.horizon) * config.num_nodes());
}

Action optimal_select(const PolicyTable& table, int t, const BeliefState& state) {
  const auto action = table.find(t, canonical_key(state));
  if (!action) {
    throw UnknownBeliefState("belief state not in the policy table at slot " + std::to_string(t));
  }
  return *action;
}

std::vector<double> action_values(const DpSolution& solution, int t, std::size_t state,
                                  const SystemConfig& config) {
  const int k = config.num_nodes();
  const int d = config.truncation;
  const auto& layer = (*solution.tree)[static_cast<std::size_t>(t - 1)];
  const auto& b = layer.states[state].joint().probs;
  const double r = reward(layer.states[state].aoi, config.weights());
  const auto& next_values = solution.values[static_cast<std::size_t>(t)];

  std::vector<double> out;
  for (Action action : all_actions(k)) {
    if (!layer.expanded(state, action)) {
      out.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    double q = 0.0;
    for (std::size_t z = 0; z < b.size(); ++z) {
      if (b[z] == 0.0) continue;
      const auto ages = joint_ages(z, k, d);
      double inner = r;
      for (int o = 0; o <= d; ++o) {
        const LocalAgeReading reading = o == 0 ? kNoObservation : LocalAgeReading(o);
        const auto succ = layer.successor(state, action, reading);
        if (succ == BeliefLayer::kNone) continue;
        double likelihood = 1.0;
        for (int i = 0; i < k; ++i) {
          const bool scheduled = action.schedules(i);
          const LocalAgeReading ri = scheduled ? reading : kNoObservation;
          likelihood *= observation_prob(ri, ages[static_cast<std::size_t>(i)], scheduled,
                                         config.nodes[static_cast<std::size_t>(i)].success_prob);
        }
        if (likelihood == 0.0) continue;
        const auto& v = next_values[static_cast<std::size_t>(succ)].values;
        double expect = 0.0;
        for (std::size_t zn = 0; zn < v.size(); ++zn) {
          const auto next_ages = joint_ages(zn, k, d);
          double pr = 1.0;
          for (int i = 0; i < k; ++i) {
            pr *= transition_prob(next_ages[static_cast<std::size_t>(i)],
                                  ages[static_cast<std::size_t>(i)],
                                  config.nodes[static_cast<std::size_t>(i)].lambda, d);
          }
          expect += pr * v[zn];
        }
        inner += likelihood * expect;
      }
      q += b[z] * inner;
    }
    out.push_back(q);
  }
  return out;
}

// Conveniences -------------------------------------------------------------------

namespace {

// Refuse before allocating the root belief, which alone may not fit.
BeliefState budgeted_root(const SystemConfig& config, const EnumerationOptions& options) {
  config.validate();
  const std::size_t entries = joint_size(config.num_nodes(), config.truncation);
  if (entries > options.max_belief_entries) {
    throw BudgetExceeded("a single joint belief of " + std::to_string(entries) +
                         " entries exceeds the enumeration budget");
  }
  return initial_belief_state(config, BeliefForm::Joint);
}

}  // namespace

OptimalPolicy solve_optimal(const SystemConfig& config, std::size_t max_states) {
  EnumerationOptions options;
  options.max_states = max_states;
  const auto initial = budgeted_root(config, options);
  auto tree = std::make_shared<const BeliefTree>(enumerate_reachable(initial, config, options));
  OptimalPolicy policy{backward_induction(std::move(tree), config), 0.0};
  policy.ewsaoi = analytical_ewsaoi(initial, policy.solution.root_value(), config);
  return policy;
}

double evaluate_policy_ewsaoi(const SystemConfig& config,
                              const std::function<Action(const BeliefState&)>& policy,
                              std::size_t max_states) {
  EnumerationOptions options;
  options.max_states = max_states;
  options.fixed_policy = policy;
  const auto initial = budgeted_root(config, options);
  auto tree = std::make_shared<const BeliefTree>(enumerate_reachable(initial, config, options));
  const auto solution = backward_induction(std::move(tree), config);
  return analytical_ewsaoi(initial, solution.root_value(), config);
}

double myopic_analytical_ewsaoi(const SystemConfig& config, std::size_t max_states) {
  return evaluate_policy_ewsaoi(
      config, [&config](const BeliefState& state) { return myopic_select(state, config); },
      max_states);
}

void write_policy_table(std::ostream& out, const OptimalPolicy& policy,
                        const SystemConfig& config) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(17);
  out << "# aoi policy table v1\n";
  out << "# nodes=" << config.num_nodes() << " horizon=" << config.horizon
      << " truncation=" << config.truncation << " seed=" << config.seed << '\n';
  for (int i = 0; i < config.num_nodes(); ++i) {
    const auto& node = config.nodes[static_cast<std::size_t>(i)];
    out << "# node " << i << " lambda=" << node.lambda << " weight=" << node.weight
        << " success_prob=" << node.success_prob << '\n';
  }
  out << "# ewsaoi=" << policy.ewsaoi << '\n';
  out << "# columns: t key action\n";
  const auto& table = policy.solution.table;
  for (int t = 1; t <= table.decision_slots(); ++t) {
    const auto& layer = table.tree()[static_cast<std::size_t>(t - 1)];
    for (std::size_t s = 0; s < layer.size(); ++s) {
      out << t << ' ';
      write_hex(out, layer.keys[s]);
      out << ' ' << table.at(t, s).to_string() << '\n';
    }
  }
  out.flags(flags);
  out.precision(precision);
}

}  // namespace aoi
