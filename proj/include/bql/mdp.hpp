#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "bql/rng.hpp"

namespace bql {

/// Mixed-radix encoding of joint actions, agent 0 is the most significant
/// digit. Also enumerates the joint actions of "all agents except i".
class JointActionCodec {
 public:
  JointActionCodec() = default;
  explicit JointActionCodec(std::vector<std::size_t> actions_per_agent);

  std::size_t n_agents() const { return radix_.size(); }
  std::size_t n_joint() const { return n_joint_; }
  std::size_t n_actions(std::size_t agent) const { return radix_.at(agent); }
  const std::vector<std::size_t>& actions_per_agent() const { return radix_; }

  std::size_t encode(std::span<const std::size_t> actions) const;
  std::vector<std::size_t> decode(std::size_t joint) const;
  /// Action of one agent inside a flat joint index.
  std::size_t action_of(std::size_t joint, std::size_t agent) const;

  /// Number of joint actions of the other agents, |A_{-i}|.
  std::size_t n_others(std::size_t agent) const;
  /// Flat joint index built from agent's own action and the flat index of the
  /// remaining agents' actions (mixed radix in agent order, skipping `agent`).
  std::size_t compose(std::size_t agent, std::size_t own_action,
                      std::size_t others) const;

  friend bool operator==(const JointActionCodec&, const JointActionCodec&) = default;

 private:
  std::vector<std::size_t> radix_;
  std::vector<std::size_t> stride_;
  std::size_t n_joint_ = 0;
};

/// One independent experience (s, a_i, s', r) as seen by a single agent.
struct Transition {
  std::size_t state = 0;
  std::size_t action = 0;
  std::size_t next_state = 0;
  double reward = 0.0;

  friend bool operator==(const Transition&, const Transition&) = default;
};

/// Per-agent deterministic policies, actions[agent][state].
struct DeterministicPolicyProfile {
  std::vector<std::vector<std::size_t>> actions;

  std::size_t joint_action(const JointActionCodec& codec, std::size_t state) const;
};

/// Fully cooperative stochastic game with a shared reward R(s, s').
/// Immutable once built; the constructor checks every invariant.
class JointMDP {
 public:
  JointMDP(std::size_t n_states, std::vector<std::size_t> actions_per_agent,
           std::vector<double> transition, std::vector<double> reward,
           double gamma, std::vector<double> initial_distribution,
           double r_min, double r_max);

  std::size_t n_states() const { return n_states_; }
  std::size_t n_agents() const { return codec_.n_agents(); }
  std::size_t n_joint_actions() const { return codec_.n_joint(); }
  std::size_t n_actions(std::size_t agent) const { return codec_.n_actions(agent); }
  const std::vector<std::size_t>& actions_per_agent() const {
    return codec_.actions_per_agent();
  }
  const JointActionCodec& codec() const { return codec_; }
  double gamma() const { return gamma_; }
  double r_min() const { return r_min_; }
  double r_max() const { return r_max_; }

  /// P(. | s, a) over next states.
  std::span<const double> transition_row(std::size_t state, std::size_t joint) const;
  double transition(std::size_t state, std::size_t joint, std::size_t next) const {
    return transition_[(state * codec_.n_joint() + joint) * n_states_ + next];
  }
  double reward(std::size_t state, std::size_t next) const {
    return reward_[state * n_states_ + next];
  }
  /// E_{s'}[R(s, s')] under joint action `joint`.
  double expected_reward(std::size_t state, std::size_t joint) const;

  const std::vector<double>& transition_tensor() const { return transition_; }
  const std::vector<double>& reward_table() const { return reward_; }
  const std::vector<double>& initial_distribution() const { return initial_; }

  /// True when every transition row puts all mass on one next state.
  bool is_deterministic() const;

  /// Copy with the reward table replaced (same dynamics). r_min / r_max are
  /// taken from the arguments.
  JointMDP with_reward(std::vector<double> reward, double r_min, double r_max) const;

  friend bool operator==(const JointMDP&, const JointMDP&) = default;

 private:
  std::size_t n_states_;
  JointActionCodec codec_;
  std::vector<double> transition_;
  std::vector<double> reward_;
  double gamma_;
  std::vector<double> initial_;
  double r_min_;
  double r_max_;
};

/// Transition tensor of one agent's induced MDP, indexed (s, a_i, s').
struct AgentTransition {
  std::size_t n_states = 0;
  std::size_t n_actions = 0;
  std::vector<double> prob;

  std::span<const double> row(std::size_t state, std::size_t action) const {
    return {prob.data() + (state * n_actions + action) * n_states, n_states};
  }
};

/// Random game: rows are normalized i.i.d. uniform(0,1) weights, rewards
/// uniform in [0,1], uniform initial distribution.
JointMDP generate_random_game(std::size_t n_agents, std::size_t n_states,
                              std::size_t actions_per_agent, double gamma,
                              std::uint64_t seed);

/// Same generator with every transition row collapsed onto one next state.
JointMDP generate_deterministic_game(std::size_t n_agents, std::size_t n_states,
                                     std::size_t actions_per_agent, double gamma,
                                     std::uint64_t seed);

/// P_i(s'|s,a_i) when the other agents follow deterministic policies.
/// The profile's entry for `agent` itself is ignored.
AgentTransition induced_transition(const JointMDP& mdp, std::size_t agent,
                                   const DeterministicPolicyProfile& others);

/// P_i(s'|s,a_i) for stochastic other-agent behaviour given as weights over
/// the flat others-index, others_weights[state][others].
AgentTransition induced_transition(
    const JointMDP& mdp, std::size_t agent,
    const std::vector<std::vector<double>>& others_weights);

struct StepOutcome {
  std::size_t next_state;
  double reward;
};

StepOutcome sample_step(const JointMDP& mdp, std::size_t state, std::size_t joint,
                        Rng& rng);
StepOutcome sample_step(const JointMDP& mdp, std::size_t state,
                        std::span<const std::size_t> actions, Rng& rng);
std::size_t sample_initial_state(const JointMDP& mdp, Rng& rng);

void validate_profile(const JointMDP& mdp, const DeterministicPolicyProfile& profile);

nlohmann::json to_json(const JointMDP& mdp);
JointMDP game_from_json(const nlohmann::json& j);

}  // namespace bql
