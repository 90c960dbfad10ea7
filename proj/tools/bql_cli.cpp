// Command-line driver: gen-game, train, experiment, sweep, report.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "bql/harness.hpp"
#include "bql/oracle.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitOracle = 3;

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::size_t> parallelism;
  std::string preset;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "Experiment config JSON file");
  cmd->add_option("--seed", o.seed, "Master seed (overrides the config)");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--parallelism", o.parallelism, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--preset", o.preset, "Named base config")
      ->check(CLI::IsMember({"desk", "paper"}));
}

json read_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw bql::ConfigError("cannot open config " + path);
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw bql::ConfigError(fmt::format("{}: {}", path, e.what()));
  }
}

bql::ExperimentConfig load_config(const CommonOptions& o) {
  json j = o.preset.empty() ? json::object() : bql::preset_json(o.preset);
  if (!o.config.empty()) j = bql::merge_over(j, read_json_file(o.config));
  if (o.seed) j["master_seed"] = *o.seed;
  if (!o.out.empty()) j["out"] = o.out;
  if (o.parallelism) j["parallelism"] = *o.parallelism;
  return bql::experiment_config_from_json(j);
}

void write_file(const fs::path& p, const std::string& s) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  os << s;
}

void print_final(const bql::AggregateReport& rep) {
  const auto& f = rep.final();
  std::cout << fmt::format("{} step {} n {} normalized {:.4f} +- {:.4f} return {:.4f} +- {:.4f}\n",
                           rep.learner, f.step, f.n, f.mean_normalized, f.std_normalized,
                           f.mean_return, f.std_return);
  for (const auto& w : rep.warnings) std::cerr << "warning: " << w << '\n';
}

int cmd_gen_game(const CommonOptions& o) {
  const auto cfg = load_config(o);
  if (cfg.env.kind == "differential") throw bql::ConfigError("gen-game needs a JointMDP environment");
  const fs::path out = cfg.out.empty() ? fs::path(".") : fs::path(cfg.out);
  for (std::size_t g = 0; g < cfg.n_games; ++g) {
    const auto game = bql::make_game(cfg.env, cfg.master_seed, g);
    json j = bql::to_json(*game.mdp);
    j["optimal_return"] = game.evaluator->optimal();
    write_file(out / fmt::format("game_{:03}.json", g), j.dump(2) + "\n");
    std::cout << fmt::format("game {} optimal_return {:.6f}\n", g, game.evaluator->optimal());
  }
  return 0;
}

int cmd_train(const CommonOptions& o, std::size_t game_index, std::size_t seed_index,
              const std::string& game_file) {
  const auto cfg = load_config(o);
  bql::GameInstance game;
  if (!game_file.empty()) {
    json gj = read_json_file(game_file);
    gj.erase("optimal_return");
    game.id = game_index;
    game.horizon = cfg.env.horizon;
    try {
      game.mdp = std::make_shared<const bql::JointMDP>(bql::game_from_json(gj));
    } catch (const std::invalid_argument& e) {
      throw bql::ConfigError(e.what());
    }
    double optimum = 0.0;
    try {
      optimum = bql::optimal_return(*game.mdp);
    } catch (const std::runtime_error& e) {
      throw bql::OracleError(e.what());
    }
    game.evaluator = std::make_shared<const bql::PolicyEvaluator>(*game.mdp, optimum);
    game.env = std::make_shared<bql::MdpEnv>(game.mdp, game.horizon);
  } else {
    game = bql::make_game(cfg.env, cfg.master_seed, game_index);
  }
  const auto out =
      bql::run_learner(cfg, game, bql::run_seed(cfg.master_seed, game_index, seed_index));
  const auto& f = out.record.final();
  std::cout << fmt::format("{} game {} seed {} step {} return {:.6f} normalized {:.6f}\n",
                           out.record.learner, game_index, out.record.seed, f.step, f.ret,
                           f.normalized);
  if (!cfg.out.empty()) {
    write_file(fs::path(cfg.out) / "run.csv", bql::run_csv(out.record));
    write_file(fs::path(cfg.out) / "model.json", out.model.dump() + "\n");
  }
  return 0;
}

int cmd_experiment(const CommonOptions& o) {
  print_final(bql::run_experiment(load_config(o)));
  return 0;
}

int cmd_sweep(const CommonOptions& o, const std::string& param,
              const std::vector<std::string>& raw_values) {
  std::vector<json> values;
  for (const auto& v : raw_values) {
    try {
      values.push_back(json::parse(v));
    } catch (const json::parse_error&) {
      throw bql::ConfigError("sweep value is not JSON: " + v);
    }
  }
  for (const auto& p : bql::sweep(load_config(o), param, values)) {
    std::cout << param << '=' << p.value.dump() << ": ";
    print_final(p.report);
  }
  return 0;
}

int cmd_report(const std::vector<std::string>& inputs, const std::string& out) {
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::recursive_directory_iterator(in))
        if (e.is_regular_file() && e.path().extension() == ".csv" &&
            e.path().parent_path().filename() == "runs")
          found.push_back(e.path());
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.emplace_back(in);
    }
  }
  std::vector<bql::AggregateReport> reps;
  try {
    reps = bql::report(files);
  } catch (const std::invalid_argument& e) {
    throw bql::ConfigError(e.what());
  }
  std::ostringstream text;
  bql::write_report_text(text, reps);
  std::cout << text.str();
  if (!out.empty()) {
    std::ostringstream csv;
    bql::write_report_csv(csv, reps);
    write_file(fs::path(out) / "report.csv", csv.str());
    write_file(fs::path(out) / "report.txt", text.str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Best possible Q-learning laboratory"};
  app.require_subcommand(1);

  CommonOptions gen_o, train_o, exp_o, sweep_o;
  auto* gen = app.add_subcommand("gen-game", "Write generated games as JSON");
  add_common(gen, gen_o);

  auto* train = app.add_subcommand("train", "Run one learner on one game");
  add_common(train, train_o);
  std::size_t game_index = 0, seed_index = 0;
  std::string game_file;
  train->add_option("--game", game_index, "Game index within the suite");
  train->add_option("--run", seed_index, "Seed index within the game");
  train->add_option("--game-file", game_file, "Game JSON written by gen-game");

  auto* exp = app.add_subcommand("experiment", "Run every (game, seed) cell");
  add_common(exp, exp_o);

  auto* sw = app.add_subcommand("sweep", "Run the experiment once per parameter value");
  add_common(sw, sweep_o);
  std::string param;
  std::vector<std::string> values;
  sw->add_option("--param", param, "Parameter name")->required();
  sw->add_option("--values", values, "Values (JSON scalars)")->required()->delimiter(',');

  auto* rep = app.add_subcommand("report", "Merge run CSVs by (learner, step)");
  std::vector<std::string> inputs;
  std::string report_out;
  rep->add_option("inputs", inputs, "Run CSV files or experiment directories")->required();
  rep->add_option("--out", report_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*gen) return cmd_gen_game(gen_o);
    if (*train) return cmd_train(train_o, game_index, seed_index, game_file);
    if (*exp) return cmd_experiment(exp_o);
    if (*sw) return cmd_sweep(sweep_o, param, values);
    if (*rep) return cmd_report(inputs, report_out);
  } catch (const bql::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const bql::OracleError& e) {
    std::cerr << "oracle failure: " << e.what() << '\n';
    return kExitOracle;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
