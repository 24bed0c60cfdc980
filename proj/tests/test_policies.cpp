#include <doctest.h>

#include <limits>
#include <random>

#include "aoi/dynamics.hpp"
#include "aoi/policies.hpp"

using namespace aoi;

namespace {

SystemConfig config_of(std::vector<double> weights, std::vector<double> ps, int d,
                       double lambda = 0.5) {
  SystemConfig c;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    c.nodes.push_back(NodeParams{lambda, weights[i], ps[i], {}});
  }
  c.horizon = 10;
  c.truncation = d;
  return c;
}

NodeBelief point(int z, int d) {
  NodeBelief b{std::vector<double>(static_cast<std::size_t>(d), 0.0)};
  b.probs[static_cast<std::size_t>(z - 1)] = 1.0;
  return b;
}

}  // namespace

TEST_CASE("policy names") {
  CHECK(parse_policy_kind("optimal") == PolicyKind::Optimal);
  CHECK(parse_policy_kind("myopic") == PolicyKind::Myopic);
  CHECK(parse_policy_kind("maxaoi") == PolicyKind::MaxAoI);
  CHECK(parse_policy_kind("mdp") == PolicyKind::FullKnowledgeMyopic);
  CHECK_THROWS_AS(parse_policy_kind("random"), ValidationError);
  for (auto k : {PolicyKind::Optimal, PolicyKind::Myopic, PolicyKind::MaxAoI,
                 PolicyKind::FullKnowledgeMyopic}) {
    CHECK(parse_policy_kind(to_string(k)) == k);
  }
}

TEST_CASE("argmin breaks ties toward the lowest index, idle last") {
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(argmin_action(std::vector<double>{3, 2, 1}) == Action::idle());
  CHECK(argmin_action(std::vector<double>{1, 1, 1}) == Action::schedule(0));
  CHECK(argmin_action(std::vector<double>{2, 1, 1}) == Action::schedule(1));
  CHECK(argmin_action(std::vector<double>{1.0, 1.0 - 1e-15, 5}) == Action::schedule(0));
  CHECK(argmin_action(std::vector<double>{inf, 4, 4}) == Action::schedule(1));
  CHECK(argmin_action(std::vector<double>{inf, inf, 7}) == Action::idle());
}

TEST_CASE("myopic scores a hand-worked state") {
  // h = (4, 5), D = 10, p = (0.9, 0.5), z known to be (1, 3).
  // idle: 5 + 6 = 11; node 0: 0.9*2 + 0.1*5 + 6 = 8.3; node 1: 5 + 0.5*4 + 0.5*6 = 10.
  const auto c = config_of({1, 1}, {0.9, 0.5}, 10);
  const std::vector<int> h{4, 5};
  const FactoredBelief b{{point(1, 10), point(3, 10)}};
  CHECK(myopic_expected_reward(h, b, Action::idle(), c) == doctest::Approx(11.0));
  CHECK(myopic_expected_reward(h, b, Action::schedule(0), c) == doctest::Approx(8.3));
  CHECK(myopic_expected_reward(h, b, Action::schedule(1), c) == doctest::Approx(10.0));
  CHECK(myopic_select(h, b, c) == Action::schedule(0));
}

TEST_CASE("myopic with dead links ties to node 0") {
  const auto c = config_of({1, 3, 2}, {0.0, 0.0, 0.0}, 6);
  const FactoredBelief b{{point(1, 6), point(2, 6), point(3, 6)}};
  CHECK(myopic_select(std::vector<int>{2, 5, 4}, b, c) == Action::schedule(0));
}

TEST_CASE("with certain arrivals myopic maximizes w p (h - 1)") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    const int k = 2 + static_cast<int>(rng() % 3);
    const int d = 12;
    std::vector<double> w, p;
    std::vector<int> h;
    FactoredBelief b;
    for (int i = 0; i < k; ++i) {
      w.push_back(0.5 + static_cast<double>(rng() % 8));
      p.push_back(0.1 * static_cast<double>(1 + rng() % 10));
      h.push_back(2 + static_cast<int>(rng() % 9));  // h + 1 stays below D
      b.per_node.push_back(point(1, d));
    }
    const auto c = config_of(w, p, d, 1.0);
    int best = 0;
    for (int i = 1; i < k; ++i) {
      const auto s = static_cast<std::size_t>(i);
      const auto bs = static_cast<std::size_t>(best);
      if (w[s] * p[s] * (h[s] - 1) > w[bs] * p[bs] * (h[bs] - 1) + 1e-9) best = i;
    }
    CHECK(myopic_select(h, b, c) == Action::schedule(best));
  }
}

TEST_CASE("myopic is scale invariant in the weights") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::vector<double> w{u(rng), u(rng), u(rng)};
    const std::vector<double> p{u(rng), u(rng), u(rng)};
    const auto c = config_of(w, p, 8);
    auto scaled = c;
    for (auto& n : scaled.nodes) n.weight *= 7.5;
    const std::vector<int> h{1 + static_cast<int>(rng() % 8), 1 + static_cast<int>(rng() % 8),
                             1 + static_cast<int>(rng() % 8)};
    FactoredBelief b;
    for (int i = 0; i < 3; ++i) b.per_node.push_back(point(1 + static_cast<int>(rng() % 8), 8));
    CHECK(myopic_select(h, b, c) == myopic_select(h, b, scaled));
  }
}

TEST_CASE("myopic never idles when it can transmit") {
  std::mt19937_64 rng(29);
  const auto c = config_of({1, 2}, {0.6, 0.3}, 6);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::vector<int> h{1 + static_cast<int>(rng() % 6), 1 + static_cast<int>(rng() % 6)};
    FactoredBelief b;
    for (int i = 0; i < 2; ++i) {
      const int z = 1 + static_cast<int>(rng() % static_cast<unsigned>(h[static_cast<std::size_t>(i)]));
      b.per_node.push_back(point(z, 6));
    }
    CHECK_FALSE(myopic_select(h, b, c).is_idle());
  }
}

TEST_CASE("joint beliefs are scored through their marginals") {
  const auto c = config_of({1, 1}, {0.9, 0.5}, 4);
  BeliefState joint = initial_belief_state(c);
  BeliefState fac = initial_belief_state(c, BeliefForm::Factored);
  for (int t = 0; t < 6; ++t) {
    const Action a = myopic_select(joint, c);
    CHECK(a == myopic_select(fac, c));
    joint = belief_state_update(joint, a, kNoObservation, c);
    fac = belief_state_update(fac, a, kNoObservation, c);
  }
}

TEST_CASE("max AoI picks the stalest node, lowest index on ties") {
  const auto c = config_of({1, 1, 1}, {1, 1, 1}, 9);
  CHECK(maxaoi_select(std::vector<int>{3, 5, 5}, c) == Action::schedule(1));
  CHECK(maxaoi_select(std::vector<int>{7, 2, 7}, c) == Action::schedule(0));
  CHECK(maxaoi_select(std::vector<int>{1, 1, 2}, c) == Action::schedule(2));
}

TEST_CASE("full-knowledge rule") {
  const auto c = config_of({1, 1}, {1.0, 1.0}, 10);
  // Node 0's freshest packet is old; node 1 just sampled.
  CHECK(full_knowledge_myopic_select(GroundState{{7, 7}, {6, 1}}, c) == Action::schedule(1));

  std::mt19937_64 rng(31);
  const auto d = config_of({1.5, 1}, {0.4, 0.8}, 7);
  for (int trial = 0; trial < 300; ++trial) {
    GroundState g{{1 + static_cast<int>(rng() % 7), 1 + static_cast<int>(rng() % 7)}, {1, 1}};
    for (int i = 0; i < 2; ++i) {
      const auto s = static_cast<std::size_t>(i);
      g.local_age[s] = 1 + static_cast<int>(rng() % static_cast<unsigned>(g.aoi[s]));
    }
    const FactoredBelief b{{point(g.local_age[0], 7), point(g.local_age[1], 7)}};
    CHECK(full_knowledge_myopic_select(g, d) == myopic_select(g.aoi, b, d));
  }
}

TEST_CASE("heuristic schedulers") {
  const auto c = config_of({1, 1}, {1.0, 1.0}, 5);
  CHECK_THROWS_AS(make_heuristic_scheduler(PolicyKind::Optimal, c), ValidationError);

  auto maxaoi = make_heuristic_scheduler(PolicyKind::MaxAoI, c);
  CHECK(maxaoi->kind() == PolicyKind::MaxAoI);
  const auto g = initial_ground_state(c);
  CHECK(maxaoi->decide(1, g) == Action::schedule(0));
  maxaoi->observe(Action::schedule(0), 1);  // h = (2, 2)
  CHECK(maxaoi->decide(2, g) == Action::schedule(0));
  maxaoi->observe(Action::schedule(0), 1);  // h = (2, 3)
  CHECK(maxaoi->decide(3, g) == Action::schedule(1));
  maxaoi->reset();
  CHECK(maxaoi->decide(1, g) == Action::schedule(0));

  auto myopic = make_heuristic_scheduler(PolicyKind::Myopic, c);
  CHECK(myopic->kind() == PolicyKind::Myopic);
  CHECK_FALSE(myopic->decide(1, g).is_idle());

  auto mdp = make_heuristic_scheduler(PolicyKind::FullKnowledgeMyopic, c);
  CHECK(mdp->decide(1, GroundState{{4, 4}, {3, 1}}) == Action::schedule(1));
}
