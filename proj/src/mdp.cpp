#include "bql/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bql {

namespace {

constexpr double kSumTolerance = 1e-9;

void check_distribution(std::span<const double> p, const char* what) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument(std::string(what) + ": negative or non-finite entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSumTolerance)
    throw std::invalid_argument(std::string(what) + ": does not sum to 1");
}

}  // namespace

JointActionCodec::JointActionCodec(std::vector<std::size_t> actions_per_agent)
    : radix_(std::move(actions_per_agent)), stride_(radix_.size()) {
  if (radix_.empty()) throw std::invalid_argument("codec: no agents");
  n_joint_ = 1;
  for (std::size_t i = radix_.size(); i-- > 0;) {
    if (radix_[i] == 0) throw std::invalid_argument("codec: agent with zero actions");
    stride_[i] = n_joint_;
    n_joint_ *= radix_[i];
  }
}

std::size_t JointActionCodec::encode(std::span<const std::size_t> actions) const {
  if (actions.size() != radix_.size())
    throw std::invalid_argument("codec: wrong number of agent actions");
  std::size_t joint = 0;
  for (std::size_t i = 0; i < radix_.size(); ++i) {
    if (actions[i] >= radix_[i]) throw std::out_of_range("codec: action out of range");
    joint += actions[i] * stride_[i];
  }
  return joint;
}

std::vector<std::size_t> JointActionCodec::decode(std::size_t joint) const {
  if (joint >= n_joint_) throw std::out_of_range("codec: joint index out of range");
  std::vector<std::size_t> actions(radix_.size());
  for (std::size_t i = 0; i < radix_.size(); ++i) actions[i] = (joint / stride_[i]) % radix_[i];
  return actions;
}

std::size_t JointActionCodec::action_of(std::size_t joint, std::size_t agent) const {
  return (joint / stride_.at(agent)) % radix_[agent];
}

std::size_t JointActionCodec::n_others(std::size_t agent) const {
  return n_joint_ / radix_.at(agent);
}

std::size_t JointActionCodec::compose(std::size_t agent, std::size_t own_action,
                                      std::size_t others) const {
  // Peel the others-index from its least significant digit (last agent first).
  std::size_t joint = own_action * stride_.at(agent);
  for (std::size_t j = radix_.size(); j-- > 0;) {
    if (j == agent) continue;
    joint += (others % radix_[j]) * stride_[j];
    others /= radix_[j];
  }
  return joint;
}

std::size_t DeterministicPolicyProfile::joint_action(const JointActionCodec& codec,
                                                     std::size_t state) const {
  std::vector<std::size_t> a(actions.size());
  for (std::size_t i = 0; i < actions.size(); ++i) a[i] = actions[i].at(state);
  return codec.encode(a);
}

JointMDP::JointMDP(std::size_t n_states, std::vector<std::size_t> actions_per_agent,
                   std::vector<double> transition, std::vector<double> reward,
                   double gamma, std::vector<double> initial_distribution,
                   double r_min, double r_max)
    : n_states_(n_states),
      codec_(std::move(actions_per_agent)),
      transition_(std::move(transition)),
      reward_(std::move(reward)),
      gamma_(gamma),
      initial_(std::move(initial_distribution)),
      r_min_(r_min),
      r_max_(r_max) {
  if (n_states_ == 0) throw std::invalid_argument("JointMDP: no states");
  if (!(gamma_ >= 0.0 && gamma_ < 1.0))
    throw std::invalid_argument("JointMDP: gamma must lie in [0, 1)");
  const std::size_t n_joint = codec_.n_joint();
  if (transition_.size() != n_states_ * n_joint * n_states_)
    throw std::invalid_argument("JointMDP: transition tensor has wrong size");
  if (reward_.size() != n_states_ * n_states_)
    throw std::invalid_argument("JointMDP: reward table has wrong size");
  if (initial_.size() != n_states_)
    throw std::invalid_argument("JointMDP: initial distribution has wrong size");
  if (!(r_min_ <= r_max_)) throw std::invalid_argument("JointMDP: r_min > r_max");
  for (std::size_t s = 0; s < n_states_; ++s)
    for (std::size_t a = 0; a < n_joint; ++a) check_distribution(transition_row(s, a), "transition row");
  check_distribution(initial_, "initial distribution");
  for (double r : reward_)
    if (!(r >= r_min_ && r <= r_max_))
      throw std::invalid_argument("JointMDP: reward outside [r_min, r_max]");
}

std::span<const double> JointMDP::transition_row(std::size_t state,
                                                 std::size_t joint) const {
  return {transition_.data() + (state * codec_.n_joint() + joint) * n_states_, n_states_};
}

double JointMDP::expected_reward(std::size_t state, std::size_t joint) const {
  auto row = transition_row(state, joint);
  double r = 0.0;
  for (std::size_t n = 0; n < n_states_; ++n) r += row[n] * reward(state, n);
  return r;
}

bool JointMDP::is_deterministic() const {
  return std::all_of(transition_.begin(), transition_.end(),
                     [](double p) { return p == 0.0 || p == 1.0; });
}

JointMDP JointMDP::with_reward(std::vector<double> reward, double r_min,
                               double r_max) const {
  return JointMDP(n_states_, codec_.actions_per_agent(), transition_, std::move(reward),
                  gamma_, initial_, r_min, r_max);
}

namespace {

void check_generator_args(std::size_t n_agents, std::size_t n_states,
                          std::size_t actions_per_agent, double gamma) {
  if (n_agents == 0 || n_states == 0 || actions_per_agent == 0)
    throw std::invalid_argument("generate_random_game: counts must be >= 1");
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw std::invalid_argument("generate_random_game: gamma must lie in [0, 1)");
}

}  // namespace

JointMDP generate_random_game(std::size_t n_agents, std::size_t n_states,
                              std::size_t actions_per_agent, double gamma,
                              std::uint64_t seed) {
  check_generator_args(n_agents, n_states, actions_per_agent, gamma);
  Rng rng(seed);
  std::vector<std::size_t> actions(n_agents, actions_per_agent);
  std::size_t n_joint = 1;
  for (auto a : actions) n_joint *= a;

  std::vector<double> transition(n_states * n_joint * n_states);
  for (std::size_t row = 0; row < n_states * n_joint; ++row) {
    double* p = transition.data() + row * n_states;
    double sum = 0.0;
    for (std::size_t n = 0; n < n_states; ++n) {
      p[n] = rng.uniform_open_closed();
      sum += p[n];
    }
    for (std::size_t n = 0; n < n_states; ++n) p[n] /= sum;
  }
  std::vector<double> reward(n_states * n_states);
  for (auto& r : reward) r = rng.uniform();
  std::vector<double> initial(n_states, 1.0 / static_cast<double>(n_states));
  return JointMDP(n_states, std::move(actions), std::move(transition), std::move(reward),
                  gamma, std::move(initial), 0.0, 1.0);
}

JointMDP generate_deterministic_game(std::size_t n_agents, std::size_t n_states,
                                     std::size_t actions_per_agent, double gamma,
                                     std::uint64_t seed) {
  check_generator_args(n_agents, n_states, actions_per_agent, gamma);
  Rng rng(seed);
  std::vector<std::size_t> actions(n_agents, actions_per_agent);
  std::size_t n_joint = 1;
  for (auto a : actions) n_joint *= a;

  std::vector<double> transition(n_states * n_joint * n_states, 0.0);
  for (std::size_t row = 0; row < n_states * n_joint; ++row)
    transition[row * n_states + rng.index(n_states)] = 1.0;
  std::vector<double> reward(n_states * n_states);
  for (auto& r : reward) r = rng.uniform();
  std::vector<double> initial(n_states, 1.0 / static_cast<double>(n_states));
  return JointMDP(n_states, std::move(actions), std::move(transition), std::move(reward),
                  gamma, std::move(initial), 0.0, 1.0);
}

void validate_profile(const JointMDP& mdp, const DeterministicPolicyProfile& profile) {
  if (profile.actions.size() != mdp.n_agents())
    throw std::invalid_argument("profile: wrong number of agents");
  for (std::size_t i = 0; i < mdp.n_agents(); ++i) {
    if (profile.actions[i].size() != mdp.n_states())
      throw std::invalid_argument("profile: wrong number of states");
    for (auto a : profile.actions[i])
      if (a >= mdp.n_actions(i)) throw std::out_of_range("profile: action out of range");
  }
}

AgentTransition induced_transition(const JointMDP& mdp, std::size_t agent,
                                   const DeterministicPolicyProfile& others) {
  if (agent >= mdp.n_agents()) throw std::out_of_range("induced_transition: agent");
  const auto& codec = mdp.codec();
  const std::size_t S = mdp.n_states();
  const std::size_t A = mdp.n_actions(agent);
  AgentTransition out{S, A, std::vector<double>(S * A * S)};
  std::vector<std::size_t> joint(mdp.n_agents());
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t j = 0; j < mdp.n_agents(); ++j)
      if (j != agent) {
        const auto a = others.actions.at(j).at(s);
        if (a >= mdp.n_actions(j)) throw std::out_of_range("induced_transition: action");
        joint[j] = a;
      }
    for (std::size_t a = 0; a < A; ++a) {
      joint[agent] = a;
      auto row = mdp.transition_row(s, codec.encode(joint));
      std::copy(row.begin(), row.end(), out.prob.begin() + (s * A + a) * S);
    }
  }
  return out;
}

AgentTransition induced_transition(
    const JointMDP& mdp, std::size_t agent,
    const std::vector<std::vector<double>>& others_weights) {
  if (agent >= mdp.n_agents()) throw std::out_of_range("induced_transition: agent");
  const auto& codec = mdp.codec();
  const std::size_t S = mdp.n_states();
  const std::size_t A = mdp.n_actions(agent);
  const std::size_t n_others = codec.n_others(agent);
  if (others_weights.size() != S)
    throw std::invalid_argument("induced_transition: weights need one row per state");
  AgentTransition out{S, A, std::vector<double>(S * A * S, 0.0)};
  for (std::size_t s = 0; s < S; ++s) {
    if (others_weights[s].size() != n_others)
      throw std::invalid_argument("induced_transition: weight row has wrong size");
    check_distribution(others_weights[s], "others policy");
    for (std::size_t a = 0; a < A; ++a) {
      double* dst = out.prob.data() + (s * A + a) * S;
      for (std::size_t o = 0; o < n_others; ++o) {
        const double w = others_weights[s][o];
        if (w == 0.0) continue;
        auto row = mdp.transition_row(s, codec.compose(agent, a, o));
        for (std::size_t n = 0; n < S; ++n) dst[n] += w * row[n];
      }
    }
  }
  return out;
}

StepOutcome sample_step(const JointMDP& mdp, std::size_t state, std::size_t joint,
                        Rng& rng) {
  const std::size_t next = rng.categorical(mdp.transition_row(state, joint));
  return {next, mdp.reward(state, next)};
}

StepOutcome sample_step(const JointMDP& mdp, std::size_t state,
                        std::span<const std::size_t> actions, Rng& rng) {
  return sample_step(mdp, state, mdp.codec().encode(actions), rng);
}

std::size_t sample_initial_state(const JointMDP& mdp, Rng& rng) {
  return rng.categorical(mdp.initial_distribution());
}

nlohmann::json to_json(const JointMDP& mdp) {
  const std::size_t S = mdp.n_states();
  const std::size_t A = mdp.n_joint_actions();
  nlohmann::json transition = nlohmann::json::array();
  for (std::size_t s = 0; s < S; ++s) {
    nlohmann::json per_action = nlohmann::json::array();
    for (std::size_t a = 0; a < A; ++a) {
      auto row = mdp.transition_row(s, a);
      per_action.push_back(std::vector<double>(row.begin(), row.end()));
    }
    transition.push_back(std::move(per_action));
  }
  nlohmann::json reward = nlohmann::json::array();
  for (std::size_t s = 0; s < S; ++s) {
    std::vector<double> row(S);
    for (std::size_t n = 0; n < S; ++n) row[n] = mdp.reward(s, n);
    reward.push_back(std::move(row));
  }
  return {
      {"n_states", S},
      {"n_agents", mdp.n_agents()},
      {"actions_per_agent", mdp.actions_per_agent()},
      {"gamma", mdp.gamma()},
      {"transition", std::move(transition)},
      {"reward", std::move(reward)},
      {"initial_distribution", mdp.initial_distribution()},
      {"r_min", mdp.r_min()},
      {"r_max", mdp.r_max()},
  };
}

JointMDP game_from_json(const nlohmann::json& j) {
  try {
    const auto S = j.at("n_states").get<std::size_t>();
    auto actions = j.at("actions_per_agent").get<std::vector<std::size_t>>();
    if (j.at("n_agents").get<std::size_t>() != actions.size())
      throw std::invalid_argument("game json: n_agents disagrees with actions_per_agent");
    std::size_t n_joint = 1;
    for (auto a : actions) n_joint *= a;

    std::vector<double> transition;
    transition.reserve(S * n_joint * S);
    const auto& t = j.at("transition");
    if (t.size() != S) throw std::invalid_argument("game json: transition has wrong shape");
    for (const auto& per_action : t) {
      if (per_action.size() != n_joint)
        throw std::invalid_argument("game json: transition has wrong shape");
      for (const auto& row : per_action) {
        if (row.size() != S) throw std::invalid_argument("game json: transition has wrong shape");
        for (const auto& p : row) transition.push_back(p.get<double>());
      }
    }
    std::vector<double> reward;
    const auto& r = j.at("reward");
    if (r.size() != S) throw std::invalid_argument("game json: reward has wrong shape");
    for (const auto& row : r) {
      if (row.size() != S) throw std::invalid_argument("game json: reward has wrong shape");
      for (const auto& v : row) reward.push_back(v.get<double>());
    }
    return JointMDP(S, std::move(actions), std::move(transition), std::move(reward),
                    j.at("gamma").get<double>(),
                    j.at("initial_distribution").get<std::vector<double>>(),
                    j.at("r_min").get<double>(), j.at("r_max").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("game json: ") + e.what());
  }
}

}  // namespace bql
