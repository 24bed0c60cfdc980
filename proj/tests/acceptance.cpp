// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "aoi/channel.hpp"
#include "aoi/config_io.hpp"
#include "aoi/dp_solver.hpp"
#include "aoi/dynamics.hpp"
#include "aoi/policies.hpp"
#include "aoi/simulator.hpp"

namespace {

using namespace aoi;

const std::vector<double> kSnrGrid = {0, 5, 10, 15, 20, 25, 30};

struct Outcome {
  bool pass = true;
  std::string detail;
};

SystemConfig uniform_config(int k, int horizon, int truncation, double lambda, double snr_db,
                            std::uint64_t seed = 20240601) {
  SystemConfig c;
  c.horizon = horizon;
  c.truncation = truncation;
  c.seed = seed;
  c.nodes.assign(static_cast<std::size_t>(k), NodeParams{lambda, 1.0, 1.0, std::nullopt});
  return with_snr_db(c, snr_db);
}

double combined(const EwsaoiEstimate& a, const EwsaoiEstimate& b) {
  return std::hypot(a.std_error, b.std_error);
}

std::string fmt(const char* pattern, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
  return buf;
}

// 1. DP value equals the expectimin oracle on random small instances.
Outcome oracle_equivalence() {
  Outcome out;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  const int configs = 24;
  for (int n = 0; n < configs; ++n) {
    SystemConfig c;
    const int k = 1 + static_cast<int>(rng() % 2);
    c.truncation = 1 + static_cast<int>(rng() % 3);
    c.horizon = 1 + static_cast<int>(rng() % 5);
    for (int i = 0; i < k; ++i) {
      NodeParams node;
      node.lambda = 0.05 + 0.95 * unit(rng);
      node.weight = 0.2 + 2.0 * unit(rng);
      node.success_prob = unit(rng);
      c.nodes.push_back(node);
    }
    const double dp = solve_optimal(c).ewsaoi;
    const double oracle = brute_force_optimal_ewsaoi(c);
    worst = std::max(worst, std::abs(dp - oracle));
    if (std::abs(dp - oracle) > 1e-9) out.pass = false;
  }
  out.detail = fmt("%.0f configs, max |dp - oracle| = %.3g", configs, worst);
  return out;
}

// 2. Analytical values match Monte Carlo for optimal and myopic.
Outcome analytical_simulation_match() {
  Outcome out;
  double worst_z = 0.0;
  for (double snr : kSnrGrid) {
    const SystemConfig c = uniform_config(2, 25, 8, 0.4, snr);
    const OptimalPolicy optimal = solve_optimal(c);
    const auto opt_sim = estimate_ewsaoi(c, PolicyKind::Optimal, 100'000, &optimal);
    const double opt_z = std::abs(opt_sim.mean - optimal.ewsaoi) / opt_sim.std_error;

    const double myopic = myopic_analytical_ewsaoi(c);
    const auto my_sim = estimate_ewsaoi(c, PolicyKind::Myopic, 100'000);
    const double my_z = std::abs(my_sim.mean - myopic) / my_sim.std_error;

    worst_z = std::max({worst_z, opt_z, my_z});
    if (opt_z > 3.0 || my_z > 3.0) out.pass = false;
    std::printf("    snr=%2.0f optimal %.6f sim %.6f (z=%.2f) | myopic %.6f sim %.6f (z=%.2f)\n", snr,
                optimal.ewsaoi, opt_sim.mean, opt_z, myopic, my_sim.mean, my_z);
  }
  out.detail = fmt("max |sim - analytical| / se = %.2f (limit 3)", worst_z);
  return out;
}

struct TruncationTable {
  std::map<int, std::vector<double>> optimal;  // D -> per SNR
  std::map<int, std::vector<double>> myopic;
};

const TruncationTable& truncation_table() {
  static const TruncationTable table = [] {
    TruncationTable t;
    for (int d : {4, 6, 8, 10}) {
      for (double snr : kSnrGrid) {
        const SystemConfig c = uniform_config(2, 25, d, 0.4, snr);
        t.optimal[d].push_back(solve_optimal(c).ewsaoi);
        t.myopic[d].push_back(myopic_analytical_ewsaoi(c));
      }
    }
    return t;
  }();
  return table;
}

// 3. Myopic analytical EWSAoI is >= optimal and within 5%.
Outcome myopic_near_optimality() {
  Outcome out;
  const auto& t = truncation_table();
  double worst_gap = 0.0;
  for (int d : {4, 6, 8, 10}) {
    for (std::size_t s = 0; s < kSnrGrid.size(); ++s) {
      const double opt = t.optimal.at(d)[s];
      const double my = t.myopic.at(d)[s];
      const double gap = (my - opt) / opt;
      worst_gap = std::max(worst_gap, gap);
      if (my < opt - 1e-9 || gap > 0.05) out.pass = false;
    }
  }
  out.detail = fmt("max relative gap %.4f%% (limit 5%%)", 100.0 * worst_gap);
  return out;
}

// 4. EWSAoI nondecreasing in D with nonincreasing increments.
Outcome truncation_monotonicity() {
  Outcome out;
  const auto& t = truncation_table();
  const std::vector<int> ds = {4, 6, 8, 10};
  int checks = 0;
  for (const auto* curves : {&t.optimal, &t.myopic}) {
    for (std::size_t s = 0; s < kSnrGrid.size(); ++s) {
      std::vector<double> inc;
      for (std::size_t j = 1; j < ds.size(); ++j) {
        inc.push_back(curves->at(ds[j])[s] - curves->at(ds[j - 1])[s]);
      }
      for (std::size_t j = 0; j < inc.size(); ++j) {
        ++checks;
        if (inc[j] < -1e-12) out.pass = false;
        if (j > 0 && inc[j] > inc[j - 1] + 1e-12) out.pass = false;
      }
    }
  }
  for (std::size_t s = 0; s < kSnrGrid.size(); ++s) {
    std::printf("    snr=%2.0f optimal D=4..10: %.5f %.5f %.5f %.5f | myopic %.5f %.5f %.5f %.5f\n",
                kSnrGrid[s], t.optimal.at(4)[s], t.optimal.at(6)[s], t.optimal.at(8)[s],
                t.optimal.at(10)[s], t.myopic.at(4)[s], t.myopic.at(6)[s], t.myopic.at(8)[s],
                t.myopic.at(10)[s]);
  }
  out.detail = fmt("%.0f increment checks over both policies and 7 SNR points", checks);
  return out;
}

struct PolicyRow {
  EwsaoiEstimate mdp, myopic, maxaoi;
};

PolicyRow run_baselines(const SystemConfig& c, std::size_t runs) {
  return PolicyRow{estimate_ewsaoi(c, PolicyKind::FullKnowledgeMyopic, runs),
                   estimate_ewsaoi(c, PolicyKind::Myopic, runs),
                   estimate_ewsaoi(c, PolicyKind::MaxAoI, runs)};
}

// 5. mdp <= myopic <= maxaoi at every SNR; the mdp-myopic gap grows with K.
Outcome policy_ordering() {
  Outcome out;
  std::map<int, std::vector<double>> gap;
  for (int k : {2, 5}) {
    for (double snr : kSnrGrid) {
      const auto row = run_baselines(uniform_config(k, 100'000, 30, 0.4, snr), 10);
      const bool first = row.mdp.mean <= row.myopic.mean + 3.0 * combined(row.mdp, row.myopic);
      const bool second =
          row.myopic.mean <= row.maxaoi.mean + 3.0 * combined(row.myopic, row.maxaoi);
      if (!first || !second) out.pass = false;
      gap[k].push_back(row.myopic.mean - row.mdp.mean);
      std::printf("    K=%d snr=%2.0f mdp %.4f(%.4f) myopic %.4f(%.4f) maxaoi %.4f(%.4f)\n", k, snr,
                  row.mdp.mean, row.mdp.std_error, row.myopic.mean, row.myopic.std_error,
                  row.maxaoi.mean, row.maxaoi.std_error);
    }
  }
  int larger = 0;
  for (std::size_t s = 0; s < kSnrGrid.size(); ++s) {
    if (gap[5][s] > gap[2][s]) ++larger;
  }
  if (larger != static_cast<int>(kSnrGrid.size())) out.pass = false;
  out.detail = "K=5 mdp-myopic gap exceeds K=2 gap at " + std::to_string(larger) + "/7 SNR points";
  return out;
}

// 6. Policies converge as lambda -> 1 at 30 dB, K=5.
Outcome arrival_rate_convergence() {
  Outcome out;
  auto max_gap = [](const PolicyRow& r) {
    return std::max({std::abs(r.mdp.mean - r.myopic.mean), std::abs(r.mdp.mean - r.maxaoi.mean),
                     std::abs(r.myopic.mean - r.maxaoi.mean)});
  };
  const auto low = run_baselines(uniform_config(5, 100'000, 30, 0.1, 30.0), 10);
  const auto high = run_baselines(uniform_config(5, 100'000, 30, 1.0, 30.0), 10);
  const bool agree =
      std::abs(high.mdp.mean - high.myopic.mean) <= 3.0 * combined(high.mdp, high.myopic) &&
      std::abs(high.mdp.mean - high.maxaoi.mean) <= 3.0 * combined(high.mdp, high.maxaoi) &&
      std::abs(high.myopic.mean - high.maxaoi.mean) <= 3.0 * combined(high.myopic, high.maxaoi);
  if (!agree || !(max_gap(high) < max_gap(low))) out.pass = false;
  out.detail = fmt("max pairwise gap at lambda=1.0: %.4g, at lambda=0.1: %.4g", max_gap(high),
                   max_gap(low));
  return out;
}

// 7. Invariant suites.
Outcome invariant_suites() {
  Outcome out;
  std::vector<std::string> failures;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Transition rows sum to exactly one.
  for (int d = 1; d <= 12; ++d) {
    for (double lambda : {0.1, 0.25, 0.4, 0.5, 0.9, 1.0}) {
      for (int z = 1; z <= d; ++z) {
        double row = 0.0;
        for (int zn = 1; zn <= d; ++zn) row += transition_prob(zn, z, lambda, d);
        if (row != 1.0) failures.push_back("transition row");
      }
    }
  }

  // Belief normalization over chained updates, joint and factored.
  {
    const SystemConfig c = uniform_config(2, 1000, 6, 0.3, 5.0);
    BeliefState joint = initial_belief_state(c, BeliefForm::Joint);
    BeliefState factored = initial_belief_state(c, BeliefForm::Factored);
    GroundState ground = initial_ground_state(c);
    for (int step = 0; step < 1000; ++step) {
      const Action a = Action::schedule(static_cast<int>(rng() % 2));
      SlotOutcome o{a, unit(rng) < c.nodes[static_cast<std::size_t>(a.node())].success_prob,
                    {unit(rng) < 0.3, unit(rng) < 0.3}};
      const LocalAgeReading r =
          o.tx_success ? LocalAgeReading(ground.local_age[static_cast<std::size_t>(a.node())])
                       : kNoObservation;
      ground = ground_step(ground, o, c.truncation);
      joint = belief_state_update(joint, a, r, c);
      factored = belief_state_update(factored, a, r, c);
      double sum = 0.0;
      for (double p : joint.joint().probs) sum += p;
      if (std::abs(sum - 1.0) > 1e-9) failures.push_back("joint normalization");
      for (const auto& b : factored.factored().per_node) {
        double s = 0.0;
        for (double p : b.probs) s += p;
        if (std::abs(s - 1.0) > 1e-9) failures.push_back("factored normalization");
      }
      // Factored and joint updates agree.
      const auto m = marginals(joint.joint(), 2, c.truncation);
      for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t z = 0; z < m.per_node[i].probs.size(); ++z) {
          if (std::abs(m.per_node[i].probs[z] - factored.factored().per_node[i].probs[z]) > 1e-12) {
            failures.push_back("factored/joint consistency");
          }
        }
      }
    }
  }

  // 1 <= z <= h <= D over 10^4 episodes.
  {
    const SystemConfig c = uniform_config(3, 60, 12, 0.3, 5.0);
    for (std::uint64_t e = 0; e < 10'000; ++e) {
      const auto kind = static_cast<PolicyKind>(1 + e % 3);
      const auto result = run_episode(c, kind, episode_seed(c.seed, e), nullptr, true);
      for (const auto& row : result.trace) {
        for (std::size_t i = 0; i < row.aoi.size(); ++i) {
          if (!(1 <= row.local_age[i] && row.local_age[i] <= row.aoi[i] &&
                row.aoi[i] <= c.truncation)) {
            failures.push_back("z <= h <= D");
          }
        }
      }
    }
  }

  // Monte Carlo agreement of the channel model over 10^6 draws.
  double channel_z = 0.0;
  {
    std::mt19937_64 draws(2024);
    std::exponential_distribution<double> fade(1.0);
    for (double snr_db : {0.0, 5.0, 10.0}) {
      ChannelParams params;
      params.snr = snr_db;
      params.rate_threshold = 1.0;
      const double p = success_probability(params);
      const double snr = std::pow(10.0, snr_db / 10.0);
      const int n = 1'000'000;
      int ok = 0;
      for (int i = 0; i < n; ++i) ok += std::log2(snr * fade(draws) + 1.0) >= 1.0;
      const double phat = static_cast<double>(ok) / n;
      const double z = std::abs(phat - p) / std::sqrt(p * (1.0 - p) / n);
      channel_z = std::max(channel_z, z);
      if (z > 3.0) failures.push_back("channel Monte Carlo");
    }
  }

  // Determinism under fixed seeds.
  {
    const SystemConfig c = uniform_config(2, 25, 8, 0.4, 10.0);
    const auto a = solve_optimal(c);
    const auto b = solve_optimal(c);
    if (!(a.solution.table == b.solution.table) || a.ewsaoi != b.ewsaoi) {
      failures.push_back("solver determinism");
    }
    std::ostringstream ta, tb;
    write_policy_table(ta, a, c);
    write_policy_table(tb, b, c);
    if (ta.str() != tb.str()) failures.push_back("table serialization determinism");
    for (auto kind : {PolicyKind::Myopic, PolicyKind::MaxAoI, PolicyKind::FullKnowledgeMyopic,
                      PolicyKind::Optimal}) {
      const auto x = estimate_ewsaoi(c, kind, 200, &a);
      const auto y = estimate_ewsaoi(c, kind, 200, &a);
      if (x.mean != y.mean || x.std_error != y.std_error) failures.push_back("simulation determinism");
    }
  }

  std::sort(failures.begin(), failures.end());
  failures.erase(std::unique(failures.begin(), failures.end()), failures.end());
  out.pass = failures.empty();
  out.detail = "channel max z = " + fmt("%.2f", channel_z);
  for (const auto& f : failures) out.detail += "; FAILED " + f;
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
    double time_limit_s;  // 0 = none stated
  };
  const std::vector<Criterion> criteria = {
      {"1 oracle equivalence", oracle_equivalence, 120.0},
      {"2 analytical-simulation match", analytical_simulation_match, 1800.0},
      {"3 myopic near-optimality", myopic_near_optimality, 0.0},
      {"4 truncation monotonicity", truncation_monotonicity, 0.0},
      {"5 policy ordering", policy_ordering, 0.0},
      {"6 arrival-rate convergence", arrival_rate_convergence, 0.0},
      {"7 invariant suites", invariant_suites, 0.0},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = Outcome{false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit_s > 0.0 && secs > c.time_limit_s) {
      o.pass = false;
      o.detail += "; exceeded time limit of " + std::to_string(static_cast<int>(c.time_limit_s)) + "s";
    }
    std::printf("[%s] %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
