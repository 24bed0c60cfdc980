#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "aoi/channel.hpp"
#include "aoi/config_io.hpp"
#include "aoi/dp_solver.hpp"
#include "aoi/experiment.hpp"
#include "aoi/simulator.hpp"

namespace py = pybind11;
using namespace aoi;

namespace {

PolicyKind policy_arg(const std::string& name) { return parse_policy_kind(name); }

SystemConfig with_seed(SystemConfig config, std::optional<std::uint64_t> seed) {
  if (seed) config.seed = *seed;
  return config;
}

py::dict estimate_dict(const EwsaoiEstimate& e) {
  py::dict d;
  d["mean"] = e.mean;
  d["std_error"] = e.std_error;
  d["episodes"] = e.episodes;
  return d;
}

}  // namespace

PYBIND11_MODULE(_aoisched, m) {
  m.doc() = "AoI scheduling under partially observed arrivals";

  // Base first: later registrations are tried first.
  const auto base = py::register_exception<Error>(m, "AoIError");
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<BudgetExceeded>(m, "BudgetExceeded", base.ptr());
  py::register_exception<UnknownBeliefState>(m, "UnknownBeliefState", base.ptr());
  py::register_exception<OracleTooLarge>(m, "OracleTooLarge", base.ptr());

  py::class_<NodeParams>(m, "Node")
      .def(py::init([](double lambda, double weight, double success_prob) {
             return NodeParams{lambda, weight, success_prob, {}};
           }),
           py::arg("lam"), py::arg("weight") = 1.0, py::arg("success_prob") = 1.0)
      .def_readwrite("lam", &NodeParams::lambda)
      .def_readwrite("weight", &NodeParams::weight)
      .def_readwrite("success_prob", &NodeParams::success_prob);

  py::class_<SystemConfig>(m, "Config")
      .def(py::init([](std::vector<NodeParams> nodes, int horizon, int truncation,
                       std::uint64_t seed) {
             SystemConfig c{std::move(nodes), horizon, truncation, seed};
             c.validate();
             return c;
           }),
           py::arg("nodes"), py::arg("horizon"), py::arg("truncation"), py::arg("seed") = 0)
      .def_readwrite("nodes", &SystemConfig::nodes)
      .def_readwrite("horizon", &SystemConfig::horizon)
      .def_readwrite("truncation", &SystemConfig::truncation)
      .def_readwrite("seed", &SystemConfig::seed)
      .def_property_readonly("num_nodes", &SystemConfig::num_nodes)
      .def("validate", &SystemConfig::validate)
      .def("to_json", &config_to_json)
      .def("with_snr_db", &with_snr_db, py::arg("snr_db"))
      .def("with_lambda", &with_lambda, py::arg("lam"))
      .def("with_truncation", &with_truncation, py::arg("truncation"));

  m.def("parse_config", &parse_config, py::arg("text"));
  m.def("load_config", [](const std::string& path) { return load_config(path); }, py::arg("path"));

  m.def("success_probability",
        [](double snr_db, double rate_threshold) {
          return success_probability(ChannelParams{snr_db, rate_threshold});
        },
        py::arg("snr_db"), py::arg("rate_threshold") = 1.0);

  py::class_<OptimalPolicy>(m, "OptimalPolicy")
      .def_readonly("ewsaoi", &OptimalPolicy::ewsaoi)
      .def_property_readonly("decision_slots",
                             [](const OptimalPolicy& p) { return p.solution.table.decision_slots(); })
      .def_property_readonly("table_size",
                             [](const OptimalPolicy& p) { return p.solution.table.size(); })
      .def_property_readonly("layer_sizes", [](const OptimalPolicy& p) {
        std::vector<std::size_t> sizes;
        for (const auto& layer : *p.solution.tree) sizes.push_back(layer.size());
        return sizes;
      });

  m.def("solve",
        [](const SystemConfig& config, std::size_t max_states) {
          py::gil_scoped_release release;
          return solve_optimal(config, max_states);
        },
        py::arg("config"), py::arg("max_states") = 10'000'000,
        "Solve the finite-horizon DP. The returned policy carries the minimal EWSAoI.");

  m.def("policy_table_text",
        [](const OptimalPolicy& policy, const SystemConfig& config) {
          std::ostringstream out;
          write_policy_table(out, policy, config);
          return out.str();
        },
        py::arg("policy"), py::arg("config"));

  m.def("myopic_ewsaoi",
        [](const SystemConfig& config, std::size_t max_states) {
          py::gil_scoped_release release;
          return myopic_analytical_ewsaoi(config, max_states);
        },
        py::arg("config"), py::arg("max_states") = 10'000'000);

  m.def("brute_force_ewsaoi", &brute_force_optimal_ewsaoi, py::arg("config"));

  m.def("simulate",
        [](const SystemConfig& config, const std::string& policy, std::size_t episodes,
           std::optional<std::uint64_t> seed, const OptimalPolicy* optimal) {
          const SystemConfig c = with_seed(config, seed);
          const PolicyKind kind = policy_arg(policy);
          EwsaoiEstimate e;
          {
            py::gil_scoped_release release;
            if (kind == PolicyKind::Optimal && optimal == nullptr) {
              e = simulate_policy(c, kind, episodes);
            } else {
              e = estimate_ewsaoi(c, kind, episodes, optimal);
            }
          }
          return estimate_dict(e);
        },
        py::arg("config"), py::arg("policy") = "myopic", py::arg("episodes") = 1000,
        py::arg("seed") = py::none(), py::arg("optimal") = nullptr,
        "Monte Carlo EWSAoI estimate: {'mean', 'std_error', 'episodes'}.");

  m.def("episode",
        [](const SystemConfig& config, const std::string& policy, std::uint64_t index,
           const OptimalPolicy* optimal) {
          const PolicyKind kind = policy_arg(policy);
          std::optional<OptimalPolicy> owned;
          if (kind == PolicyKind::Optimal && optimal == nullptr) {
            owned = solve_optimal(config);
            optimal = &*owned;
          }
          const auto result =
              run_episode(config, kind, episode_seed(config.seed, index), optimal, true);
          py::list rows;
          for (const auto& r : result.trace) {
            py::dict row;
            row["t"] = r.t;
            if (r.action) row["action"] = r.action->is_idle() ? py::object(py::str("idle"))
                                                             : py::object(py::int_(r.action->node()));
            else row["action"] = py::none();
            row["success"] = r.success;
            row["aoi"] = r.aoi;
            row["local_age"] = r.local_age;
            rows.append(row);
          }
          return rows;
        },
        py::arg("config"), py::arg("policy") = "myopic", py::arg("index") = 0,
        py::arg("optimal") = nullptr,
        "Per-slot trace of one episode as a list of dicts.");

  m.def("sweep",
        [](const std::string& spec_path, std::optional<std::uint64_t> seed) {
          const ExperimentSpec spec = load_experiment_spec(spec_path);
          SystemConfig base = load_config(spec.config_path);
          base.seed = seed.value_or(spec.seed.value_or(base.seed));
          std::ostringstream out, log;
          bool ok = false;
          {
            py::gil_scoped_release release;
            ok = run_sweep(spec, base, out, log);
          }
          if (!ok) throw Error(log.str());
          return out.str();
        },
        py::arg("spec_path"), py::arg("seed") = py::none(),
        "Run an experiment spec and return the CSV text.");
}
