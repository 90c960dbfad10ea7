#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bql/envs.hpp"
#include "bql/mdp.hpp"
#include "bql/run_record.hpp"
#include "bql/tabular.hpp"

namespace bql {

/// Invalid or inconsistent experiment configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The oracle could not solve a game the experiment depends on (exit code 3).
class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EnvSpec {
  /// random | deterministic | one_stage | coordination | differential
  std::string kind = "random";
  std::size_t n_agents = 3;
  std::size_t n_states = 10;
  std::size_t n_actions = 3;
  double gamma = 0.95;
  std::size_t horizon = 100;
  double delta = 0.01;    // coordination game payoff gap
  double eps_tol = 0.0;   // random reward shaping when > 0
  DifferentialGameConfig differential{};
};

struct ExperimentConfig {
  std::string learner = "bql";
  EnvSpec env{};
  nlohmann::json params = nlohmann::json::object();
  std::size_t n_games = 10;
  std::size_t n_seeds = 4;
  std::uint64_t master_seed = 0;
  std::optional<std::size_t> eval_every;
  std::string out;
  std::size_t parallelism = 1;
};

/// Parses and validates; unknown keys and out-of-range values raise ConfigError.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
/// Canonical form used for fingerprinting (excludes out and parallelism).
nlohmann::json canonical_json(const ExperimentConfig& cfg);
/// 16 hex digits of FNV-1a over the canonical JSON text.
std::string config_fingerprint(const ExperimentConfig& cfg);

/// Named starting points: "desk" is the 3-agent 10-state suite, "paper" the
/// 4-agent 30-state one. A user config is merged over the preset.
nlohmann::json preset_json(const std::string& name);
nlohmann::json merge_over(nlohmann::json base, const nlohmann::json& overlay);

std::vector<std::string> registered_learners();
std::vector<std::string> sweepable_parameters();

/// Seed of game g and of run (g, s), both split from the master seed.
std::uint64_t game_seed(std::uint64_t master, std::size_t game);
std::uint64_t run_seed(std::uint64_t master, std::size_t game, std::size_t seed_index);

/// One environment instance of an experiment, with its oracle score when the
/// environment is a JointMDP.
struct GameInstance {
  std::size_t id = 0;
  std::shared_ptr<const JointMDP> mdp;             // null for the differential game
  std::shared_ptr<const PolicyEvaluator> evaluator;
  std::shared_ptr<const DiscreteEnv> env;          // neural learners' view
  std::size_t horizon = 100;
  std::uint64_t eval_seed = 0;  // rollout episodes when there is no oracle
};

/// Builds game `g`. Throws OracleError when the game cannot be solved.
GameInstance make_game(const EnvSpec& env, std::uint64_t master_seed, std::size_t g);

struct LearnerOutput {
  RunRecord record;
  nlohmann::json model;  // Q tables or network parameters
};

/// Runs the configured learner once on a game.
LearnerOutput run_learner(const ExperimentConfig& cfg, const GameInstance& game,
                          std::uint64_t seed);

struct AggregateRow {
  std::size_t step = 0;
  std::size_t n = 0;
  double mean_return = 0.0;
  double std_return = 0.0;
  double mean_normalized = 0.0;
  double std_normalized = 0.0;
  double min_normalized = 0.0;
  double max_normalized = 0.0;
};

struct AggregateReport {
  std::string learner;
  std::string fingerprint;
  std::vector<AggregateRow> rows;
  std::vector<RunRecord> runs;
  std::vector<std::string> warnings;

  const AggregateRow& final() const;
};

/// Mean and sample standard deviation per step. All runs must share one grid.
AggregateReport aggregate(const std::string& learner, std::vector<RunRecord> runs);

void write_aggregate_csv(std::ostream& os, const AggregateReport& report);

/// Every (game, seed) cell, run on `cfg.parallelism` workers. Writes
/// runs/<learner>_g<game>_s<seed>.csv, aggregate.csv and summary.json under
/// cfg.out when it is non-empty.
AggregateReport run_experiment(const ExperimentConfig& cfg);

struct SweepPoint {
  nlohmann::json value;
  AggregateReport report;
};

/// run_experiment per value with the same master seed, so every value sees
/// the same games and run seeds. Writes <out>/<param>=<value>/ and
/// sweep_<param>.csv.
std::vector<SweepPoint> sweep(const ExperimentConfig& cfg, const std::string& parameter,
                              const std::vector<nlohmann::json>& values);

/// Merges run CSVs by (learner, step). Throws std::invalid_argument naming the
/// offending files when a learner's runs disagree on the step grid.
std::vector<AggregateReport> report(const std::vector<std::filesystem::path>& paths);
void write_report_csv(std::ostream& os, const std::vector<AggregateReport>& reports);
void write_report_text(std::ostream& os, const std::vector<AggregateReport>& reports);

}  // namespace bql
