#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "bql/mdp.hpp"
#include "bql/oracle.hpp"
#include "bql/rng.hpp"
#include "bql/run_record.hpp"

namespace bql {

/// State x own-action value table.
struct QTable {
  std::size_t n_states = 0;
  std::size_t n_actions = 0;
  double init_value = 0.0;
  std::vector<double> values;

  QTable() = default;
  QTable(std::size_t states, std::size_t actions, double init)
      : n_states(states), n_actions(actions), init_value(init), values(states * actions, init) {}

  double operator()(std::size_t s, std::size_t a) const { return values[s * n_actions + a]; }
  double& operator()(std::size_t s, std::size_t a) { return values[s * n_actions + a]; }
  double state_max(std::size_t s) const;
  /// Ties toward the smallest action index.
  std::size_t greedy(std::size_t s) const;

  friend bool operator==(const QTable&, const QTable&) = default;
};

DeterministicPolicyProfile greedy_profile(std::span<const QTable> tables);
nlohmann::json to_json(const QTable& q);

/// Linear decay from `start` to `end` over the first `decay_fraction` of
/// training, constant afterwards.
struct EpsilonSchedule {
  double start = 1.0;
  double end = 0.05;
  double decay_fraction = 0.5;

  double at(std::size_t step, std::size_t total_steps) const;
};

/// Greedy-profile scoring through the oracle.
class PolicyEvaluator {
 public:
  explicit PolicyEvaluator(const JointMDP& mdp);
  PolicyEvaluator(const JointMDP& mdp, double optimal);

  double optimal() const { return optimal_; }
  /// (return, return / optimal); the ratio falls back to the raw return when
  /// the optimum is not positive.
  std::pair<double, double> score(const DeterministicPolicyProfile& profile) const;

 private:
  const JointMDP* mdp_;
  double optimal_;
};

/// Steps the game with truncation at `horizon`, restarting from the initial
/// distribution. Every learner drives the environment through this.
class InteractionLoop {
 public:
  InteractionLoop(const JointMDP& mdp, std::size_t horizon, std::uint64_t seed);

  std::size_t state() const { return state_; }
  std::size_t steps() const { return steps_; }
  std::size_t episodes_completed() const { return episodes_; }
  /// Forces a new episode.
  void reset();
  /// Executes one joint step and returns (next_state, reward). Starts a new
  /// episode afterwards when the horizon is reached.
  StepOutcome step(std::span<const std::size_t> actions);

 private:
  const JointMDP* mdp_;
  std::size_t horizon_;
  Rng rng_;
  std::size_t state_ = 0;
  std::size_t t_ = 0;
  std::size_t steps_ = 0;
  std::size_t episodes_ = 0;
};

// ---------------------------------------------------------------------------
// Simplified best possible operator building blocks.

/// Transitions gathered in one epoch under one fixed deterministic behaviour.
class EpochBuffer {
 public:
  EpochBuffer(std::size_t epoch, std::size_t capacity, std::size_t n_states,
              std::size_t n_actions);

  std::size_t epoch() const { return epoch_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return transitions_.size(); }
  /// Appends until full; later transitions are dropped.
  bool push(const Transition& t);
  const std::vector<Transition>& transitions() const { return transitions_; }

  /// Per-pair sufficient statistics for the empirical expectation.
  struct PairStats {
    std::size_t count = 0;
    double reward_sum = 0.0;
    std::vector<std::pair<std::size_t, std::size_t>> next_counts;  // (s', n)
  };
  const PairStats& stats(std::size_t s, std::size_t a) const { return stats_[s * n_actions_ + a]; }
  std::size_t n_states() const { return n_states_; }
  std::size_t n_actions() const { return n_actions_; }

 private:
  std::size_t epoch_;
  std::size_t capacity_;
  std::size_t n_states_;
  std::size_t n_actions_;
  std::vector<Transition> transitions_;
  std::vector<PairStats> stats_;
};

/// Ordered D_i^1..D_i^m.
class BufferSeries {
 public:
  void append(EpochBuffer buffer);
  std::size_t size() const { return buffers_.size(); }
  const EpochBuffer& operator[](std::size_t j) const { return buffers_[j]; }

 private:
  std::vector<EpochBuffer> buffers_;
};

/// Q^e(s,a_i) for the pairs where it is defined.
struct ExpectedBackup {
  std::vector<double> value;
  std::vector<char> valid;
};

/// Empirical mean of r + gamma * max_a' Q(s', a') over the buffer's samples
/// of each pair with at least `min_count` samples.
ExpectedBackup buffer_expectation(const EpochBuffer& buffer, const QTable& q, double gamma,
                                  std::size_t min_count);

/// Exact expectation under the transition slice chosen per (s, a_i):
/// slice[s * A_i + a_i] is a flat index over the other agents' actions.
ExpectedBackup model_expectation(const JointMDP& mdp, std::size_t agent, const QTable& q,
                                 std::span<const std::size_t> slice);

/// Q(s,a) <- max(Q(s,a), Q^e(s,a)) on valid pairs. Returns the number of
/// entries that increased.
std::size_t apply_monotone_max(QTable& q, const ExpectedBackup& e);

// ---------------------------------------------------------------------------
// Learners.

struct BqlTabularConfig {
  std::size_t epochs = 100;           // M
  std::size_t steps_per_epoch = 2000;
  std::size_t buffer_capacity = 2000; // |D_i^m|
  double subset_fraction = 1.0;       // |S_i^m| / |S|
  std::size_t n_sweeps = 500;         // buffer draws per epoch
  std::size_t min_count = 3;
  std::size_t eval_every = 1;         // in epochs
  std::size_t horizon = 100;

  /// Fixed environment-step budget: epoch length follows the buffer size.
  static BqlTabularConfig with_budget(std::size_t total_steps, std::size_t buffer_capacity);
};

struct BqlSingleBufferConfig {
  std::size_t total_steps = 200000;
  std::size_t buffer_capacity = 50000;
  EpsilonSchedule epsilon{};
  double alpha = 0.03;
  double lambda = 0.01;
  std::size_t sync_every = 1;
  std::size_t updates_per_step = 1;
  std::size_t eval_every = 5000;
  std::size_t horizon = 100;
};

struct IqlConfig {
  std::size_t total_steps = 200000;
  EpsilonSchedule epsilon{};
  double alpha = 0.1;
  /// alpha = max(alpha, 1 / n(s,a)) when set: sample averages early on.
  bool visit_count_alpha = false;
  /// Hysteretic weight on negative errors; 1 is plain IQL, 0 is Distributed IQL.
  double lambda_h = 1.0;
  std::size_t eval_every = 5000;
  std::size_t horizon = 100;
};

struct Ma2qlConfig {
  std::size_t total_steps = 200000;
  std::size_t round_length = 10;  // episodes per agent turn
  double alpha = 0.1;
  double epsilon = 0.1;
  std::size_t eval_every = 5000;
  std::size_t horizon = 100;
  /// Optional initially preferred action per agent (-1: none).
  std::vector<int> initial_preference;
  double preference_bonus = 1.0;
};

struct JqlConfig {
  std::size_t total_steps = 200000;
  EpsilonSchedule epsilon{};
  double alpha = 0.1;
  bool visit_count_alpha = false;
  std::size_t eval_every = 5000;
  std::size_t horizon = 100;
};

struct TabularRun {
  RunRecord record;
  /// Per-agent tables; JQL returns a single table over joint actions.
  std::vector<QTable> tables;
};

// Each trainer scores greedy profiles with `eval` when given, otherwise it
// solves the game itself first.
TabularRun bql_tabular_train(const JointMDP& mdp, const BqlTabularConfig& cfg,
                             std::uint64_t seed, const PolicyEvaluator* eval = nullptr);
TabularRun bql_single_buffer_train(const JointMDP& mdp, const BqlSingleBufferConfig& cfg,
                                   std::uint64_t seed, const PolicyEvaluator* eval = nullptr);
TabularRun iql_train(const JointMDP& mdp, const IqlConfig& cfg, std::uint64_t seed,
                     const PolicyEvaluator* eval = nullptr);
TabularRun hysteretic_iql_train(const JointMDP& mdp, const IqlConfig& cfg, std::uint64_t seed,
                                const PolicyEvaluator* eval = nullptr);
TabularRun ma2ql_train(const JointMDP& mdp, const Ma2qlConfig& cfg, std::uint64_t seed,
                       const PolicyEvaluator* eval = nullptr);
TabularRun jql_train(const JointMDP& mdp, const JqlConfig& cfg, std::uint64_t seed,
                     const PolicyEvaluator* eval = nullptr);

/// Greedy joint profile of a JQL table.
DeterministicPolicyProfile jql_profile(const JointMDP& mdp, const QTable& joint_table);

/// Per-sample update rules, exposed so identical experience streams can be
/// replayed through different learners.
class HystereticAgent {
 public:
  HystereticAgent(std::size_t n_states, std::size_t n_actions, double init, double gamma,
                  double alpha, double lambda_h, bool visit_count_alpha = false);

  void update(const Transition& t);
  const QTable& q() const { return q_; }
  QTable& q() { return q_; }

 private:
  QTable q_;
  std::vector<std::size_t> visits_;
  double gamma_;
  double alpha_;
  double lambda_h_;
  bool visit_count_alpha_;
};

/// Tabular analogue of the two-network update: Q^e tracks the bootstrapped
/// target with rate alpha, and every `sync_every` samples Q moves toward Q^e
/// with weight 1 when Q^e > Q and lambda otherwise.
class SingleBufferBqlAgent {
 public:
  SingleBufferBqlAgent(std::size_t n_states, std::size_t n_actions, double init, double gamma,
                       double alpha, double lambda, std::size_t sync_every);

  void update(const Transition& t);
  const QTable& q() const { return q_; }
  const QTable& qe() const { return qe_; }

 private:
  void sync();

  QTable q_;
  QTable qe_;
  std::vector<char> touched_;
  std::vector<std::size_t> touched_list_;
  double gamma_;
  double alpha_;
  double lambda_;
  std::size_t sync_every_;
  std::size_t since_sync_ = 0;
};

void from_json(const nlohmann::json& j, EpsilonSchedule& e);
void from_json(const nlohmann::json& j, BqlTabularConfig& c);
void from_json(const nlohmann::json& j, BqlSingleBufferConfig& c);
void from_json(const nlohmann::json& j, IqlConfig& c);
void from_json(const nlohmann::json& j, Ma2qlConfig& c);
void from_json(const nlohmann::json& j, JqlConfig& c);

}  // namespace bql
