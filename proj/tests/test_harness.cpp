#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "bql/harness.hpp"

using namespace bql;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("bql_harness_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

json small_config(const std::string& learner) {
  return {{"learner", learner},
          {"env", {{"kind", "random"}, {"n_agents", 2}, {"n_states", 4}, {"n_actions", 2},
                   {"gamma", 0.9}, {"horizon", 50}}},
          {"params", {{"total_steps", 4000}}},
          {"n_games", 2},
          {"n_seeds", 2},
          {"master_seed", 3},
          {"eval_every", 1000}};
}

json small_bql_config() {
  json j = small_config("bql");
  j["params"] = {{"epochs", 4}, {"steps_per_epoch", 500}, {"buffer_capacity", 500},
                 {"n_sweeps", 20}};
  return j;
}

RunRecord record(const std::string& learner, std::uint64_t seed,
                 std::vector<std::pair<std::size_t, double>> pts) {
  RunRecord r;
  r.learner = learner;
  r.seed = seed;
  for (auto [s, v] : pts) r.add(s, v * 2.0, v);
  return r;
}

void write_record(const fs::path& p, const RunRecord& r) {
  std::ofstream os(p, std::ios::binary);
  write_run_csv(os, r);
}

}  // namespace

TEST_CASE("config parsing rejects unknown learners, keys and bad ranges") {
  CHECK_NOTHROW(experiment_config_from_json(small_config("iql")));
  CHECK_THROWS_AS(experiment_config_from_json(small_config("vdn")), ConfigError);
  auto j = small_config("iql");
  j["colour"] = "blue";
  CHECK_THROWS_AS(experiment_config_from_json(j), ConfigError);
  j = small_config("iql");
  j["params"]["alpha"] = 0.0;
  CHECK_THROWS_AS(experiment_config_from_json(j), ConfigError);
  j = small_config("iql");
  j["params"]["alpah"] = 0.1;
  CHECK_THROWS_AS(experiment_config_from_json(j), ConfigError);
  j = small_config("iql");
  j["env"]["gamma"] = 1.0;
  CHECK_THROWS_AS(experiment_config_from_json(j), ConfigError);
  j = small_config("iql");
  j["n_seeds"] = 0;
  CHECK_THROWS_AS(experiment_config_from_json(j), ConfigError);
  j = small_config("iql");
  j["n_games"] = "ten";
  CHECK_THROWS_AS(experiment_config_from_json(j), ConfigError);
  j = small_config("iql");
  j["env"] = {{"kind", "differential"}};
  CHECK_THROWS_AS(experiment_config_from_json(j), ConfigError);
  j = small_config("bql_neural");
  j["env"] = {{"kind", "differential"}, {"beta", 0.4}};
  CHECK_NOTHROW(experiment_config_from_json(j));
  j["env"]["beta"] = 1.5;
  CHECK_THROWS_AS(experiment_config_from_json(j), ConfigError);
}

TEST_CASE("every registered learner parses with its own defaults") {
  for (const auto& name : registered_learners()) {
    json j = small_config(name);
    j["params"] = json::object();
    CHECK_NOTHROW(experiment_config_from_json(j));
  }
}

TEST_CASE("presets parse and a user config overrides them") {
  for (const char* name : {"desk", "paper"}) {
    const auto cfg = experiment_config_from_json(preset_json(name));
    CHECK(cfg.env.kind == "random");
  }
  const auto desk = experiment_config_from_json(preset_json("desk"));
  CHECK(desk.env.n_agents == 3);
  CHECK(desk.env.n_states == 10);
  CHECK(desk.env.n_actions == 3);
  CHECK(desk.n_games == 10);
  CHECK(desk.n_seeds == 4);
  const auto paper = experiment_config_from_json(preset_json("paper"));
  CHECK(paper.env.n_agents == 4);
  CHECK(paper.env.n_states == 30);
  CHECK(paper.n_games == 20);
  CHECK_THROWS_AS(preset_json("huge"), ConfigError);
  const auto merged = merge_over(preset_json("desk"), {{"learner", "iql"}, {"env", {{"n_states", 5}}}});
  const auto cfg = experiment_config_from_json(merged);
  CHECK(cfg.learner == "iql");
  CHECK(cfg.env.n_states == 5);
  CHECK(cfg.env.n_agents == 3);
}

TEST_CASE("fingerprint depends on the experiment but not on output settings") {
  auto a = experiment_config_from_json(small_config("iql"));
  auto b = a;
  b.out = "/elsewhere";
  b.parallelism = 4;
  CHECK(config_fingerprint(a) == config_fingerprint(b));
  CHECK(config_fingerprint(a).size() == 16);
  auto c = a;
  c.params["alpha"] = 0.2;
  CHECK(config_fingerprint(a) != config_fingerprint(c));
  CHECK(experiment_config_from_json(canonical_json(a)).params == a.params);
}

TEST_CASE("seed streams differ across games and runs") {
  CHECK(game_seed(0, 0) != game_seed(0, 1));
  CHECK(run_seed(0, 0, 0) != run_seed(0, 0, 1));
  CHECK(run_seed(0, 0, 1) != run_seed(0, 1, 0));
  CHECK(game_seed(0, 0) != run_seed(0, 0, 0));
  CHECK(game_seed(1, 0) != game_seed(0, 0));
}

TEST_CASE("one game and one seed aggregate to the single run") {
  auto j = small_config("iql");
  j["n_games"] = 1;
  j["n_seeds"] = 1;
  const auto cfg = experiment_config_from_json(j);
  const auto rep = run_experiment(cfg);
  const auto single = run_learner(cfg, make_game(cfg.env, cfg.master_seed, 0), run_seed(3, 0, 0));
  REQUIRE(rep.rows.size() == single.record.points.size());
  for (std::size_t k = 0; k < rep.rows.size(); ++k) {
    CHECK(rep.rows[k].step == single.record.points[k].step);
    CHECK(rep.rows[k].mean_return == single.record.points[k].ret);
    CHECK(rep.rows[k].mean_normalized == single.record.points[k].normalized);
    CHECK(rep.rows[k].std_normalized == 0.0);
    CHECK(rep.rows[k].n == 1);
  }
}

TEST_CASE("identical configs write byte-identical CSVs, with any parallelism") {
  auto j = small_bql_config();
  const auto d1 = scratch("det1"), d2 = scratch("det2");
  j["out"] = d1.string();
  run_experiment(experiment_config_from_json(j));
  j["out"] = d2.string();
  j["parallelism"] = 3;
  run_experiment(experiment_config_from_json(j));
  CHECK(slurp(d1 / "aggregate.csv") == slurp(d2 / "aggregate.csv"));
  CHECK(slurp(d1 / "runs" / "bql_g001_s01.csv") == slurp(d2 / "runs" / "bql_g001_s01.csv"));
  CHECK(slurp(d1 / "aggregate.csv").rfind("learner,step,n,mean_return", 0) == 0);
  CHECK(fs::exists(d1 / "summary.json"));
}

TEST_CASE("distinct cells follow distinct trajectories and the mean stays in range") {
  const auto rep = run_experiment(experiment_config_from_json(small_config("iql")));
  REQUIRE(rep.runs.size() == 4);
  CHECK(rep.runs[0].seed != rep.runs[1].seed);
  CHECK(run_csv(rep.runs[0]) != run_csv(rep.runs[1]));
  CHECK(run_csv(rep.runs[0]) != run_csv(rep.runs[2]));
  for (const auto& row : rep.rows) {
    CHECK(row.mean_normalized >= row.min_normalized - 1e-12);
    CHECK(row.mean_normalized <= row.max_normalized + 1e-12);
  }
}

TEST_CASE("greedy normalized returns never exceed 1") {
  for (const char* learner : {"bql", "iql", "bql_single", "hysteretic_iql", "ma2ql", "jql"}) {
    auto j = learner == std::string("bql") ? small_bql_config() : small_config(learner);
    const auto rep = run_experiment(experiment_config_from_json(j));
    for (const auto& r : rep.runs)
      for (const auto& p : r.points) CHECK(p.normalized <= 1.0 + 1e-6);
  }
}

TEST_CASE("aggregate uses the sample standard deviation") {
  std::vector<RunRecord> runs;
  const double finals[] = {0.5, 0.7, 0.9, 1.0};
  for (std::uint64_t s = 0; s < 4; ++s) runs.push_back(record("x", s, {{10, 0.1}, {20, finals[s]}}));
  const auto rep = aggregate("x", runs);
  const double mean = (0.5 + 0.7 + 0.9 + 1.0) / 4.0;
  double ss = 0.0;
  for (double v : finals) ss += (v - mean) * (v - mean);
  CHECK(rep.final().mean_normalized == doctest::Approx(mean));
  CHECK(rep.final().std_normalized == doctest::Approx(std::sqrt(ss / 3.0)));
  CHECK(rep.final().mean_return == doctest::Approx(2.0 * mean));
  CHECK(rep.final().min_normalized == 0.5);
  CHECK(rep.final().max_normalized == 1.0);
  CHECK(rep.rows[0].std_normalized == 0.0);
  runs.push_back(record("x", 9, {{10, 0.1}, {30, 0.2}}));
  CHECK_THROWS_AS(aggregate("x", runs), std::invalid_argument);
}

TEST_CASE("report merges files by learner and step") {
  const auto d = scratch("report");
  write_record(d / "a.csv", record("bql", 1, {{100, 0.5}, {200, 0.9}}));
  write_record(d / "b.csv", record("iql", 1, {{100, 0.4}, {200, 0.6}}));
  const auto reps = report({d / "a.csv", d / "b.csv"});
  REQUIRE(reps.size() == 2);
  for (const auto& r : reps) CHECK(r.final().std_normalized == 0.0);

  const auto self = report({d / "a.csv", d / "a.csv"});
  REQUIRE(self.size() == 1);
  CHECK(self[0].final().mean_normalized == 0.9);
  CHECK(self[0].final().std_normalized == 0.0);
  CHECK(self[0].final().n == 2);

  std::ostringstream csv, text;
  write_report_csv(csv, reps);
  write_report_text(text, reps);
  CHECK(csv.str().rfind("learner,step,n,mean_return,std_return,mean_normalized,std_normalized\n", 0) == 0);
  CHECK(text.str().find("bql") != std::string::npos);
}

TEST_CASE("report reproduces a hand-computed mean and std over four seeds") {
  const auto d = scratch("report4");
  const double finals[] = {0.82, 0.91, 0.77, 0.95};
  std::vector<fs::path> files;
  for (int s = 0; s < 4; ++s) {
    files.push_back(d / ("s" + std::to_string(s) + ".csv"));
    write_record(files.back(), record("bql", s, {{50, 0.1}, {100, finals[s]}}));
  }
  const auto reps = report(files);
  REQUIRE(reps.size() == 1);
  // mean 0.8625; deviations -0.0425 0.0475 -0.0925 0.0875; sum of squares 0.020275
  CHECK(reps[0].final().mean_normalized == doctest::Approx(0.8625));
  CHECK(reps[0].final().std_normalized == doctest::Approx(std::sqrt(0.020275 / 3.0)));
}

TEST_CASE("report names the files whose grids disagree") {
  const auto d = scratch("mismatch");
  write_record(d / "good.csv", record("bql", 1, {{100, 0.5}, {200, 0.9}}));
  write_record(d / "odd.csv", record("bql", 2, {{100, 0.5}, {300, 0.9}}));
  try {
    report({d / "good.csv", d / "odd.csv"});
    FAIL("expected a grid mismatch");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("good.csv") != std::string::npos);
    CHECK(msg.find("odd.csv") != std::string::npos);
  }
}

TEST_CASE("run CSV round-trips") {
  const auto r = record("bql", 7, {{100, 0.123456789012345}, {200, 1.0 / 3.0}});
  std::istringstream is(run_csv(r));
  const auto back = read_run_csv(is);
  CHECK(back.learner == "bql");
  CHECK(back.seed == 7);
  CHECK(back.points == r.points);
  CHECK(run_csv(r).rfind("step,seed,learner,return,normalized_return\n", 0) == 0);
}

TEST_CASE("sweep shares games across values and writes a summary") {
  auto j = small_bql_config();
  const auto d = scratch("sweep");
  j["out"] = d.string();
  const auto cfg = experiment_config_from_json(j);
  const auto points = sweep(cfg, "buffer_capacity", {json(100), json(500)});
  REQUIRE(points.size() == 2);
  CHECK(points[0].report.runs[0].seed == points[1].report.runs[0].seed);
  CHECK(points[0].report.runs[0].game_id == points[1].report.runs[0].game_id);
  CHECK(fs::exists(d / "sweep_buffer_capacity.csv"));
  CHECK(fs::exists(d / "buffer_capacity=100" / "aggregate.csv"));
  CHECK_THROWS_AS(sweep(cfg, "learning_rate", {json(0.1)}), ConfigError);
  CHECK_THROWS_AS(sweep(cfg, "buffer_capacity", {json(-5)}), ConfigError);
}

TEST_CASE("the differential game runs through the harness") {
  json j = {{"learner", "iql_neural"},
            {"env", {{"kind", "differential"}, {"beta", 0.4}}},
            {"params", {{"total_steps", 600}, {"warmup", 100}, {"hidden_width", 8},
                        {"batch_size", 8}, {"eval_every", 300}, {"eval_episodes", 1}}},
            {"n_games", 1},
            {"n_seeds", 1}};
  const auto rep = run_experiment(experiment_config_from_json(j));
  CHECK(rep.rows.size() == 2);
  CHECK(rep.final().mean_return >= 0.0);
  CHECK(rep.final().mean_return <= 100.0);
}

TEST_CASE("unsolvable games raise an oracle error") {
  json j = small_config("iql");
  j["env"] = {{"kind", "random"}, {"n_agents", 1}, {"n_states", 2}, {"n_actions", 1},
              {"gamma", 0.9999999}};
  CHECK_THROWS_AS(make_game(experiment_config_from_json(j).env, 0, 0), OracleError);
  CHECK_THROWS_AS(run_experiment(experiment_config_from_json(j)), OracleError);
}
