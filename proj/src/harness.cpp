#include "bql/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>
#include <type_traits>

#include <fmt/format.h>

#include "bql/neural.hpp"
#include "bql/oracle.hpp"

namespace bql {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kGameStream = 0;
constexpr std::uint64_t kRunStream = 1;
constexpr std::uint64_t kShapingStream = 2;
constexpr std::uint64_t kEvalStream = 3;

const std::set<std::string> kMdpKinds{"random", "deterministic", "one_stage", "coordination"};

// Hyperparameter keys each learner accepts.
const std::map<std::string, std::set<std::string>>& learner_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"bql",
       {"total_steps", "epochs", "steps_per_epoch", "buffer_capacity", "subset_fraction",
        "n_sweeps", "min_count", "eval_every", "horizon"}},
      {"bql_single",
       {"total_steps", "buffer_capacity", "epsilon", "alpha", "lambda", "sync_every",
        "updates_per_step", "eval_every", "horizon"}},
      {"iql", {"total_steps", "epsilon", "alpha", "visit_count_alpha", "eval_every", "horizon"}},
      {"hysteretic_iql",
       {"total_steps", "epsilon", "alpha", "visit_count_alpha", "lambda", "eval_every",
        "horizon"}},
      {"distributed_iql",
       {"total_steps", "epsilon", "alpha", "visit_count_alpha", "eval_every", "horizon"}},
      {"ma2ql",
       {"total_steps", "round_length", "alpha", "epsilon", "eval_every", "horizon",
        "initial_preference", "preference_bonus"}},
      {"jql", {"total_steps", "epsilon", "alpha", "visit_count_alpha", "eval_every", "horizon"}},
      {"bql_neural",
       {"total_steps", "lambda", "tau", "batch_size", "buffer_capacity", "warmup", "epsilon",
        "hidden_width", "hidden_layers", "learning_rate", "update_every", "eval_every",
        "eval_episodes"}},
      {"iql_neural",
       {"total_steps", "tau", "batch_size", "buffer_capacity", "warmup", "epsilon",
        "hidden_width", "hidden_layers", "learning_rate", "update_every", "eval_every",
        "eval_episodes"}},
  };
  return keys;
}

bool is_neural(const std::string& learner) { return learner.ends_with("_neural"); }

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
  for (const auto& [k, v] : j.items())
    if (!allowed.contains(k)) throw ConfigError(fmt::format("{}: unknown key '{}'", where, k));
}

bool is_count(const json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

template <typename T>
T read(const json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T>)
    if (!is_count(j.at(key)))
      throw ConfigError(fmt::format("{}: '{}' must be a non-negative integer", where, key));
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(fmt::format("{}: bad value for '{}'", where, key));
  }
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

void validate_epsilon(const EpsilonSchedule& e) {
  require(in_unit(e.start) && in_unit(e.end) && in_unit(e.decay_fraction),
          "params.epsilon: values must lie in [0,1]");
}

// Parses the learner's own config struct so range errors surface before any
// run starts.
void validate_params(const std::string& learner, const json& p) {
  static const std::set<std::string> counts{
      "total_steps", "epochs",     "steps_per_epoch", "buffer_capacity", "n_sweeps",
      "min_count",   "eval_every", "horizon",         "sync_every",      "updates_per_step",
      "round_length", "batch_size", "warmup",         "hidden_width",    "hidden_layers",
      "update_every", "eval_episodes"};
  for (const auto& [k, v] : p.items())
    if (counts.contains(k) && !is_count(v))
      throw ConfigError(fmt::format("params.{} must be a non-negative integer", k));
  try {
    if (learner == "bql") {
      BqlTabularConfig c = p.get<BqlTabularConfig>();
      require(c.epochs > 0 && c.steps_per_epoch > 0 && c.buffer_capacity > 0,
              "params: epochs, steps_per_epoch and buffer_capacity must be positive");
      require(c.subset_fraction > 0.0 && c.subset_fraction <= 1.0,
              "params.subset_fraction must lie in (0,1]");
      require(c.n_sweeps > 0 && c.min_count > 0 && c.horizon > 0,
              "params: n_sweeps, min_count and horizon must be positive");
    } else if (learner == "bql_single") {
      BqlSingleBufferConfig c = p.get<BqlSingleBufferConfig>();
      validate_epsilon(c.epsilon);
      require(c.total_steps > 0 && c.buffer_capacity > 0 && c.sync_every > 0 && c.horizon > 0,
              "params: sizes must be positive");
      require(c.alpha > 0.0 && c.alpha <= 1.0, "params.alpha must lie in (0,1]");
      require(in_unit(c.lambda), "params.lambda must lie in [0,1]");
    } else if (learner == "iql" || learner == "hysteretic_iql" || learner == "distributed_iql") {
      IqlConfig c = p.get<IqlConfig>();
      validate_epsilon(c.epsilon);
      require(c.total_steps > 0 && c.horizon > 0, "params: sizes must be positive");
      require(c.alpha > 0.0 && c.alpha <= 1.0, "params.alpha must lie in (0,1]");
      if (p.contains("lambda")) require(in_unit(p.at("lambda").get<double>()),
                                        "params.lambda must lie in [0,1]");
    } else if (learner == "ma2ql") {
      Ma2qlConfig c = p.get<Ma2qlConfig>();
      require(c.total_steps > 0 && c.horizon > 0 && c.round_length > 0,
              "params: sizes must be positive");
      require(c.alpha > 0.0 && c.alpha <= 1.0, "params.alpha must lie in (0,1]");
      require(in_unit(c.epsilon), "params.epsilon must lie in [0,1]");
    } else if (learner == "jql") {
      JqlConfig c = p.get<JqlConfig>();
      validate_epsilon(c.epsilon);
      require(c.total_steps > 0 && c.horizon > 0, "params: sizes must be positive");
      require(c.alpha > 0.0 && c.alpha <= 1.0, "params.alpha must lie in (0,1]");
    } else {
      NeuralConfig c = p.get<NeuralConfig>();
      validate_epsilon(c.epsilon);
      require(c.total_steps > 0 && c.batch_size > 0 && c.buffer_capacity > 0 &&
                  c.hidden_width > 0 && c.hidden_layers > 0 && c.update_every > 0 &&
                  c.eval_every > 0 && c.eval_episodes > 0,
              "params: sizes must be positive");
      require(c.tau > 0.0 && c.tau <= 1.0, "params.tau must lie in (0,1]");
      require(in_unit(c.lambda), "params.lambda must lie in [0,1]");
      require(c.learning_rate > 0.0, "params.learning_rate must be positive");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("params: ") + e.what());
  }
}

EnvSpec env_from_json(const json& j) {
  const std::string w = "env";
  EnvSpec e;
  e.kind = read<std::string>(j, "kind", e.kind, w);
  if (e.kind == "differential") {
    check_keys(j, {"kind", "n_actions", "gamma", "horizon", "beta"}, w);
    auto& d = e.differential;
    d.beta = read(j, "beta", d.beta, w);
    d.n_actions = read(j, "n_actions", d.n_actions, w);
    d.gamma = read(j, "gamma", d.gamma, w);
    d.horizon = read(j, "horizon", d.horizon, w);
    require(in_unit(d.beta), "env.beta must lie in [0,1]");
    require(d.n_actions >= 2, "env.n_actions must be >= 2");
    require(d.gamma >= 0.0 && d.gamma < 1.0, "env.gamma must lie in [0,1)");
    require(d.horizon > 0, "env.horizon must be positive");
    e.n_agents = 3;
    e.n_actions = d.n_actions;
    e.gamma = d.gamma;
    e.horizon = d.horizon;
    return e;
  }
  if (e.kind == "one_stage" || e.kind == "coordination") {
    check_keys(j, {"kind", "delta", "eps_tol"}, w);
    e.n_agents = 2;
    e.n_actions = e.kind == "one_stage" ? 3 : 2;
    e.n_states = 1 + e.n_actions * e.n_actions;
    e.gamma = 0.0;
    e.horizon = MatrixGame::kHorizon;
    e.delta = read(j, "delta", e.delta, w);
    e.eps_tol = read(j, "eps_tol", e.eps_tol, w);
    require(e.delta > 0.0 && e.delta < 1.0, "env.delta must lie in (0,1)");
    require(e.eps_tol >= 0.0, "env.eps_tol must be >= 0");
    if (e.kind == "one_stage") e.delta = 0.0;
    return e;
  }
  if (e.kind != "random" && e.kind != "deterministic")
    throw ConfigError(fmt::format("env: unknown kind '{}'", e.kind));
  check_keys(j, {"kind", "n_agents", "n_states", "n_actions", "gamma", "horizon", "eps_tol"}, w);
  e.n_agents = read(j, "n_agents", e.n_agents, w);
  e.n_states = read(j, "n_states", e.n_states, w);
  e.n_actions = read(j, "n_actions", e.n_actions, w);
  e.gamma = read(j, "gamma", e.gamma, w);
  e.horizon = read(j, "horizon", e.horizon, w);
  e.eps_tol = read(j, "eps_tol", e.eps_tol, w);
  require(e.n_agents >= 1 && e.n_states >= 1 && e.n_actions >= 1,
          "env: n_agents, n_states and n_actions must be positive");
  require(e.gamma >= 0.0 && e.gamma < 1.0, "env.gamma must lie in [0,1)");
  require(e.horizon > 0, "env.horizon must be positive");
  require(e.eps_tol >= 0.0, "env.eps_tol must be >= 0");
  return e;
}

json env_to_json(const EnvSpec& e) {
  if (e.kind == "differential")
    return {{"kind", e.kind},
            {"beta", e.differential.beta},
            {"n_actions", e.differential.n_actions},
            {"gamma", e.differential.gamma},
            {"horizon", e.differential.horizon}};
  if (e.kind == "one_stage") return {{"kind", e.kind}, {"eps_tol", e.eps_tol}};
  if (e.kind == "coordination")
    return {{"kind", e.kind}, {"delta", e.delta}, {"eps_tol", e.eps_tol}};
  return {{"kind", e.kind},        {"n_agents", e.n_agents}, {"n_states", e.n_states},
          {"n_actions", e.n_actions}, {"gamma", e.gamma},     {"horizon", e.horizon},
          {"eps_tol", e.eps_tol}};
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

json full_json(const ExperimentConfig& cfg) {
  json j = canonical_json(cfg);
  j["out"] = cfg.out;
  j["parallelism"] = cfg.parallelism;
  return j;
}

// Learner params with the experiment-level horizon and cadence folded in.
json resolved_params(const ExperimentConfig& cfg) {
  json p = cfg.params;
  if (!is_neural(cfg.learner) && !p.contains("horizon")) p["horizon"] = cfg.env.horizon;
  if (cfg.eval_every && cfg.learner != "bql") p["eval_every"] = *cfg.eval_every;
  return p;
}

json tables_json(const std::vector<QTable>& tables) {
  json arr = json::array();
  for (const auto& t : tables) arr.push_back(to_json(t));
  return {{"tables", arr}};
}

json networks_json(const NeuralRun& run) {
  json q = json::array(), qe = json::array();
  for (const auto& n : run.q) q.push_back(to_json(n));
  for (const auto& n : run.qe) qe.push_back(to_json(n));
  return {{"q", q}, {"qe", qe}};
}

double sample_std(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

void write_text_file(const fs::path& p, const std::string& content) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  os << content;
}

std::string run_file_name(const RunRecord& r, std::size_t seed_index) {
  return fmt::format("{}_g{:03}_s{:02}.csv", r.learner, r.game_id, seed_index);
}

}  // namespace

ExperimentConfig experiment_config_from_json(const json& j) {
  const std::string w = "config";
  check_keys(j, {"learner", "env", "params", "n_games", "n_seeds", "master_seed", "eval_every",
                 "out", "parallelism"},
             w);
  ExperimentConfig c;
  c.learner = read<std::string>(j, "learner", c.learner, w);
  const auto it = learner_keys().find(c.learner);
  if (it == learner_keys().end()) throw ConfigError(fmt::format("unknown learner '{}'", c.learner));
  c.env = env_from_json(j.value("env", json::object()));
  c.params = j.value("params", json::object());
  check_keys(c.params, it->second, "params");
  c.n_games = read(j, "n_games", c.n_games, w);
  c.n_seeds = read(j, "n_seeds", c.n_seeds, w);
  c.master_seed = read(j, "master_seed", c.master_seed, w);
  if (j.contains("eval_every") && !j.at("eval_every").is_null())
    c.eval_every = read<std::size_t>(j, "eval_every", 0, w);
  c.out = read(j, "out", c.out, w);
  c.parallelism = read(j, "parallelism", c.parallelism, w);
  require(c.n_games > 0 && c.n_seeds > 0, "n_games and n_seeds must be positive");
  require(!c.eval_every || *c.eval_every > 0, "eval_every must be positive");
  require(c.parallelism > 0, "parallelism must be positive");
  const bool differential = c.env.kind == "differential";
  if (differential && !is_neural(c.learner))
    throw ConfigError("the differential game needs a neural learner");
  if (c.learner == "ma2ql" && c.params.contains("initial_preference"))
    require(c.params.at("initial_preference").size() == c.env.n_agents,
            "params.initial_preference needs one entry per agent");
  validate_params(c.learner, resolved_params(c));
  return c;
}

json canonical_json(const ExperimentConfig& cfg) {
  json j{{"learner", cfg.learner},   {"env", env_to_json(cfg.env)},
         {"params", cfg.params},     {"n_games", cfg.n_games},
         {"n_seeds", cfg.n_seeds},   {"master_seed", cfg.master_seed}};
  if (cfg.eval_every) j["eval_every"] = *cfg.eval_every;
  return j;
}

std::string config_fingerprint(const ExperimentConfig& cfg) {
  return fmt::format("{:016x}", fnv1a(canonical_json(cfg).dump()));
}

json preset_json(const std::string& name) {
  if (name == "desk")
    return {{"env",
             {{"kind", "random"}, {"n_agents", 3}, {"n_states", 10}, {"n_actions", 3},
              {"gamma", 0.95}, {"horizon", 100}}},
            {"n_games", 10},
            {"n_seeds", 4},
            {"params", {{"total_steps", 200000}}}};
  if (name == "paper")
    return {{"env",
             {{"kind", "random"}, {"n_agents", 4}, {"n_states", 30}, {"n_actions", 4},
              {"gamma", 0.95}, {"horizon", 100}}},
            {"n_games", 20},
            {"n_seeds", 4},
            {"params", {{"total_steps", 1000000}}}};
  throw ConfigError(fmt::format("unknown preset '{}'", name));
}

json merge_over(json base, const json& overlay) {
  if (!base.is_object() || !overlay.is_object()) return overlay;
  for (const auto& [k, v] : overlay.items()) {
    if (base.contains(k) && base[k].is_object() && v.is_object())
      base[k] = merge_over(base[k], v);
    else
      base[k] = v;
  }
  return base;
}

std::vector<std::string> registered_learners() {
  std::vector<std::string> names;
  for (const auto& [k, v] : learner_keys()) names.push_back(k);
  return names;
}

std::vector<std::string> sweepable_parameters() {
  return {"lambda", "buffer_capacity", "subset_fraction", "alpha", "eps_tol"};
}

std::uint64_t game_seed(std::uint64_t master, std::size_t game) {
  return derive_seed(master, {kGameStream, game});
}

std::uint64_t run_seed(std::uint64_t master, std::size_t game, std::size_t seed_index) {
  return derive_seed(master, {kRunStream, game, seed_index});
}

GameInstance make_game(const EnvSpec& env, std::uint64_t master_seed, std::size_t g) {
  GameInstance inst;
  inst.id = g;
  inst.horizon = env.horizon;
  const auto gs = game_seed(master_seed, g);
  inst.eval_seed = derive_seed(gs, {kEvalStream});
  if (env.kind == "differential") {
    inst.env = std::make_shared<DifferentialGameEnv>(env.differential);
    return inst;
  }
  std::optional<JointMDP> mdp;
  if (env.kind == "random")
    mdp = generate_random_game(env.n_agents, env.n_states, env.n_actions, env.gamma, gs);
  else if (env.kind == "deterministic")
    mdp = generate_deterministic_game(env.n_agents, env.n_states, env.n_actions, env.gamma, gs);
  else if (env.kind == "one_stage")
    mdp = make_one_stage_game().mdp;
  else
    mdp = make_coordination_game(env.delta).mdp;
  if (env.eps_tol > 0.0)
    mdp = wrap_shaped_reward(*mdp, env.eps_tol, derive_seed(gs, {kShapingStream}));
  inst.mdp = std::make_shared<const JointMDP>(std::move(*mdp));
  double optimum = 0.0;
  try {
    optimum = optimal_return(*inst.mdp);
  } catch (const std::runtime_error& e) {
    throw OracleError(fmt::format("game {}: {}", g, e.what()));
  }
  if (!std::isfinite(optimum)) throw OracleError(fmt::format("game {}: non-finite optimum", g));
  inst.evaluator = std::make_shared<const PolicyEvaluator>(*inst.mdp, optimum);
  inst.env = std::make_shared<MdpEnv>(inst.mdp, inst.horizon);
  return inst;
}

LearnerOutput run_learner(const ExperimentConfig& cfg, const GameInstance& game,
                          std::uint64_t seed) {
  const json p = resolved_params(cfg);
  const std::string& L = cfg.learner;
  LearnerOutput out;
  if (is_neural(L)) {
    NeuralConfig c = p.get<NeuralConfig>();
    NetworkEvaluator ev =
        game.mdp ? oracle_evaluator(*game.mdp, *game.evaluator)
                 : rollout_evaluator(*game.env, c.eval_episodes, game.eval_seed,
                                     static_cast<double>(game.env->horizon()));
    NeuralRun run = L == "bql_neural" ? bql_neural_train(*game.env, c, seed, ev)
                                      : iql_neural_train(*game.env, c, seed, ev);
    out.model = networks_json(run);
    out.record = std::move(run.record);
  } else {
    if (!game.mdp) throw ConfigError(L + " needs a JointMDP environment");
    const JointMDP& mdp = *game.mdp;
    const PolicyEvaluator* ev = game.evaluator.get();
    TabularRun run;
    if (L == "bql") {
      BqlTabularConfig c = p.get<BqlTabularConfig>();
      if (cfg.eval_every)
        c.eval_every = std::max<std::size_t>(1, *cfg.eval_every / c.steps_per_epoch);
      run = bql_tabular_train(mdp, c, seed, ev);
    } else if (L == "bql_single") {
      run = bql_single_buffer_train(mdp, p.get<BqlSingleBufferConfig>(), seed, ev);
    } else if (L == "iql") {
      run = iql_train(mdp, p.get<IqlConfig>(), seed, ev);
    } else if (L == "hysteretic_iql" || L == "distributed_iql") {
      IqlConfig c = p.get<IqlConfig>();
      c.lambda_h = L == "distributed_iql" ? 0.0 : p.value("lambda", 0.5);
      run = hysteretic_iql_train(mdp, c, seed, ev);
      run.record.learner = L;
    } else if (L == "ma2ql") {
      run = ma2ql_train(mdp, p.get<Ma2qlConfig>(), seed, ev);
    } else if (L == "jql") {
      run = jql_train(mdp, p.get<JqlConfig>(), seed, ev);
    } else {
      throw ConfigError("unknown learner " + L);
    }
    out.model = tables_json(run.tables);
    out.record = std::move(run.record);
  }
  out.record.game_id = game.id;
  out.record.fingerprint = config_fingerprint(cfg);
  return out;
}

const AggregateRow& AggregateReport::final() const {
  if (rows.empty()) throw std::logic_error("AggregateReport: no rows");
  return rows.back();
}

AggregateReport aggregate(const std::string& learner, std::vector<RunRecord> runs) {
  AggregateReport rep;
  rep.learner = learner;
  if (runs.empty()) return rep;
  const auto& grid = runs.front().points;
  for (const auto& r : runs) {
    bool same = r.points.size() == grid.size();
    for (std::size_t k = 0; same && k < grid.size(); ++k) same = r.points[k].step == grid[k].step;
    if (!same) throw std::invalid_argument("aggregate: runs disagree on the evaluation grid");
  }
  for (std::size_t k = 0; k < grid.size(); ++k) {
    std::vector<double> ret, norm;
    for (const auto& r : runs) {
      ret.push_back(r.points[k].ret);
      norm.push_back(r.points[k].normalized);
    }
    AggregateRow row;
    row.step = grid[k].step;
    row.n = runs.size();
    row.mean_return = mean_of(ret);
    row.std_return = sample_std(ret, row.mean_return);
    row.mean_normalized = mean_of(norm);
    row.std_normalized = sample_std(norm, row.mean_normalized);
    row.min_normalized = *std::min_element(norm.begin(), norm.end());
    row.max_normalized = *std::max_element(norm.begin(), norm.end());
    rep.rows.push_back(row);
  }
  rep.runs = std::move(runs);
  return rep;
}

void write_aggregate_csv(std::ostream& os, const AggregateReport& report) {
  os << "learner,step,n,mean_return,std_return,mean_normalized,std_normalized,min_normalized,"
        "max_normalized\n";
  for (const auto& r : report.rows)
    os << report.learner << ',' << r.step << ',' << r.n << ',' << format_double(r.mean_return)
       << ',' << format_double(r.std_return) << ',' << format_double(r.mean_normalized) << ','
       << format_double(r.std_normalized) << ',' << format_double(r.min_normalized) << ','
       << format_double(r.max_normalized) << '\n';
}

AggregateReport run_experiment(const ExperimentConfig& cfg) {
  std::vector<std::string> warnings;
  std::vector<GameInstance> games;
  for (std::size_t g = 0; g < cfg.n_games; ++g) {
    try {
      games.push_back(make_game(cfg.env, cfg.master_seed, g));
    } catch (const OracleError& e) {
      warnings.push_back(fmt::format("excluded: {}", e.what()));
    }
  }
  if (games.empty()) throw OracleError("no game could be solved by the oracle");

  struct Cell {
    std::size_t game_index, seed_index;
  };
  std::vector<Cell> cells;
  for (std::size_t gi = 0; gi < games.size(); ++gi)
    for (std::size_t s = 0; s < cfg.n_seeds; ++s) cells.push_back({gi, s});

  std::vector<RunRecord> records(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < cells.size(); k = next++) {
      try {
        const auto& game = games[cells[k].game_index];
        records[k] =
            run_learner(cfg, game, run_seed(cfg.master_seed, game.id, cells[k].seed_index)).record;
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const std::size_t n_workers = std::min(cfg.parallelism, cells.size());
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  AggregateReport rep = aggregate(cfg.learner, records);
  rep.fingerprint = config_fingerprint(cfg);
  rep.warnings = std::move(warnings);

  if (!cfg.out.empty()) {
    const fs::path out(cfg.out);
    fs::create_directories(out / "runs");
    for (std::size_t k = 0; k < cells.size(); ++k)
      write_text_file(out / "runs" / run_file_name(records[k], cells[k].seed_index),
                      run_csv(records[k]));
    std::ostringstream agg;
    write_aggregate_csv(agg, rep);
    write_text_file(out / "aggregate.csv", agg.str());
    const auto& f = rep.final();
    json summary{{"fingerprint", rep.fingerprint},
                 {"config", canonical_json(cfg)},
                 {"final",
                  {{"step", f.step},
                   {"n", f.n},
                   {"mean_return", f.mean_return},
                   {"std_return", f.std_return},
                   {"mean_normalized", f.mean_normalized},
                   {"std_normalized", f.std_normalized}}},
                 {"warnings", rep.warnings}};
    write_text_file(out / "summary.json", summary.dump(2) + "\n");
  }
  return rep;
}

std::vector<SweepPoint> sweep(const ExperimentConfig& cfg, const std::string& parameter,
                              const std::vector<json>& values) {
  const auto params = sweepable_parameters();
  if (std::find(params.begin(), params.end(), parameter) == params.end())
    throw ConfigError(fmt::format("parameter '{}' is not sweepable", parameter));
  if (parameter != "eps_tol" && !learner_keys().at(cfg.learner).contains(parameter))
    throw ConfigError(fmt::format("learner '{}' has no parameter '{}'", cfg.learner, parameter));
  if (parameter == "eps_tol" && !kMdpKinds.contains(cfg.env.kind))
    throw ConfigError("eps_tol needs a JointMDP environment");
  if (values.empty()) throw ConfigError("sweep: no values");

  std::vector<SweepPoint> points;
  for (const auto& v : values) {
    json j = full_json(cfg);
    if (parameter == "eps_tol")
      j["env"]["eps_tol"] = v;
    else
      j["params"][parameter] = v;
    if (!cfg.out.empty()) j["out"] = (fs::path(cfg.out) / fmt::format("{}={}", parameter, v.dump())).string();
    points.push_back({v, run_experiment(experiment_config_from_json(j))});
  }

  if (!cfg.out.empty()) {
    std::ostringstream os;
    os << "parameter,value,step,n,mean_normalized,std_normalized,mean_return,std_return\n";
    for (const auto& p : points) {
      const auto& f = p.report.final();
      os << parameter << ',' << p.value.dump() << ',' << f.step << ',' << f.n << ','
         << format_double(f.mean_normalized) << ',' << format_double(f.std_normalized) << ','
         << format_double(f.mean_return) << ',' << format_double(f.std_return) << '\n';
    }
    fs::create_directories(cfg.out);
    write_text_file(fs::path(cfg.out) / fmt::format("sweep_{}.csv", parameter), os.str());
  }
  return points;
}

std::vector<AggregateReport> report(const std::vector<fs::path>& paths) {
  if (paths.empty()) throw std::invalid_argument("report: no input files");
  std::map<std::string, std::vector<std::pair<fs::path, RunRecord>>> by_learner;
  for (const auto& p : paths) {
    std::ifstream is(p, std::ios::binary);
    if (!is) throw std::invalid_argument("report: cannot open " + p.string());
    try {
      auto rec = read_run_csv(is);
      by_learner[rec.learner].emplace_back(p, std::move(rec));
    } catch (const std::exception& e) {
      throw std::invalid_argument(fmt::format("report: {}: {}", p.string(), e.what()));
    }
  }
  std::vector<AggregateReport> out;
  for (auto& [learner, files] : by_learner) {
    auto steps = [](const RunRecord& r) {
      std::vector<std::size_t> s;
      for (const auto& pt : r.points) s.push_back(pt.step);
      return s;
    };
    const auto grid = steps(files.front().second);
    std::vector<std::string> bad;
    for (const auto& [path, rec] : files)
      if (steps(rec) != grid) bad.push_back(path.string());
    if (!bad.empty()) {
      std::string list;
      for (const auto& b : bad) list += (list.empty() ? "" : ", ") + b;
      throw std::invalid_argument(fmt::format(
          "report: step grid of learner '{}' differs from {} in: {}", learner,
          files.front().first.string(), list));
    }
    std::vector<RunRecord> runs;
    for (auto& f : files) runs.push_back(std::move(f.second));
    out.push_back(aggregate(learner, std::move(runs)));
  }
  return out;
}

void write_report_csv(std::ostream& os, const std::vector<AggregateReport>& reports) {
  os << "learner,step,n,mean_return,std_return,mean_normalized,std_normalized\n";
  for (const auto& rep : reports)
    for (const auto& r : rep.rows)
      os << rep.learner << ',' << r.step << ',' << r.n << ',' << format_double(r.mean_return)
         << ',' << format_double(r.std_return) << ',' << format_double(r.mean_normalized) << ','
         << format_double(r.std_normalized) << '\n';
}

void write_report_text(std::ostream& os, const std::vector<AggregateReport>& reports) {
  for (const auto& rep : reports) {
    os << fmt::format("{} ({} runs)\n", rep.learner, rep.rows.empty() ? 0 : rep.rows.front().n);
    os << fmt::format("  {:>10}  {:>22}  {:>22}\n", "step", "return", "normalized");
    for (const auto& r : rep.rows)
      os << fmt::format("  {:>10}  {:>10.4f} +- {:<8.4f}  {:>10.4f} +- {:<8.4f}\n", r.step,
                        r.mean_return, r.std_return, r.mean_normalized, r.std_normalized);
  }
}

}  // namespace bql
