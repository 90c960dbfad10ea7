#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <span>
#include <string>
#include <vector>

#include "bql/envs.hpp"
#include "bql/harness.hpp"
#include "bql/mdp.hpp"
#include "bql/oracle.hpp"
#include "bql/rng.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

// Tables cross the boundary as JSON text; the Python layer decodes them.
std::string solve(const std::string& game) {
  const auto mdp = bql::game_from_json(json::parse(game));
  const auto sol = bql::joint_value_iteration(mdp);
  return json{{"q", bql::to_json(sol.q)},
              {"converged", sol.status.converged},
              {"iterations", sol.status.iterations},
              {"optimal_return", bql::optimal_return(mdp, sol.q)}}
      .dump();
}

std::string best_possible(const std::string& game, std::size_t agent) {
  const auto mdp = bql::game_from_json(json::parse(game));
  const auto ref = bql::project_max(mdp, bql::joint_value_iteration(mdp).q, agent);
  const auto sol = bql::exact_best_possible_iteration(mdp, agent, 1e-11, 100000, &ref);
  return json{{"q", bql::to_json(sol.q)},
              {"reference", bql::to_json(ref)},
              {"converged", sol.status.converged},
              {"distance_to_ref", sol.distance_to_ref}}
      .dump();
}

std::string run(const std::string& config) {
  const auto cfg = bql::experiment_config_from_json(json::parse(config));
  const auto rep = bql::run_experiment(cfg);
  json rows = json::array();
  for (const auto& r : rep.rows)
    rows.push_back({{"step", r.step},
                    {"n", r.n},
                    {"mean_return", r.mean_return},
                    {"std_return", r.std_return},
                    {"mean_normalized", r.mean_normalized},
                    {"std_normalized", r.std_normalized}});
  return json{{"learner", rep.learner},
              {"fingerprint", rep.fingerprint},
              {"rows", rows},
              {"warnings", rep.warnings}}
      .dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Best possible Q-learning core";
  py::register_exception<bql::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<bql::OracleError>(m, "OracleError", PyExc_RuntimeError);

  m.def("derive_seed", [](std::uint64_t parent, const std::vector<std::uint64_t>& tags) {
    return bql::derive_seed(parent, std::span<const std::uint64_t>(tags));
  });
  m.def("random_game",
        [](std::size_t agents, std::size_t states, std::size_t actions, double gamma,
           std::uint64_t seed) {
          return bql::to_json(bql::generate_random_game(agents, states, actions, gamma, seed))
              .dump();
        });
  m.def("one_stage_game", [] { return bql::to_json(bql::make_one_stage_game().mdp).dump(); });
  m.def("solve", &solve);
  m.def("best_possible", &best_possible);
  m.def("differential_reward", &bql::differential_reward);
  m.def("preset", [](const std::string& name) { return bql::preset_json(name).dump(); });
  m.def("registered_learners", &bql::registered_learners);
  m.def("run_experiment", &run, py::call_guard<py::gil_scoped_release>());
}
