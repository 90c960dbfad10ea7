#include "bql/envs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

namespace bql {

MatrixGame make_matrix_game(std::vector<std::size_t> actions, std::vector<double> payoff) {
  if (actions.size() != 2) throw std::invalid_argument("matrix game: two agents expected");
  const std::size_t n_joint = actions[0] * actions[1];
  if (n_joint == 0 || payoff.size() != n_joint)
    throw std::invalid_argument("matrix game: payoff table is not rectangular");
  const std::size_t S = 1 + n_joint;
  const double lo = *std::min_element(payoff.begin(), payoff.end());
  const double hi = *std::max_element(payoff.begin(), payoff.end());

  std::vector<double> transition(S * n_joint * S, 0.0);
  std::vector<double> reward(S * S, lo);
  for (std::size_t a = 0; a < n_joint; ++a) {
    transition[(0 * n_joint + a) * S + (1 + a)] = 1.0;
    reward[0 * S + (1 + a)] = payoff[a];
  }
  for (std::size_t s = 1; s < S; ++s)
    for (std::size_t a = 0; a < n_joint; ++a) transition[(s * n_joint + a) * S + s] = 1.0;
  std::vector<double> initial(S, 0.0);
  initial[MatrixGame::kStartState] = 1.0;

  JointMDP mdp(S, actions, std::move(transition), std::move(reward), 0.0, std::move(initial),
               lo, hi);
  return MatrixGame{std::move(actions), std::move(payoff), std::move(mdp)};
}

MatrixGame make_one_stage_game() {
  // clang-format off
  return make_matrix_game({3, 3}, {
        8, -12, -12,
      -12,   0,   0,
      -12,   0,   0});
  // clang-format on
}

MatrixGame make_coordination_game(double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("coordination game: delta must be > 0");
  return make_matrix_game({2, 2}, {1.0 - delta, 1.0, 1.0, 1.0 - delta});
}

double differential_reward(double l) {
  if (!(l >= 0.0)) throw std::invalid_argument("differential_reward: negative radius");
  constexpr double pi = std::numbers::pi;
  if (l <= 0.25) return 0.5 * std::cos(4.0 * l * pi) + 0.5;
  if (l <= 0.6) return 0.0;
  if (l <= 1.0) return 0.15 * std::cos(5.0 * pi * (l - 0.8)) + 0.15;
  return 0.0;
}

double differential_action_value(const DifferentialGameConfig& cfg, std::size_t k) {
  if (k >= cfg.n_actions) throw std::out_of_range("differential game: action index");
  if (cfg.n_actions == 1) return 0.0;
  return -1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(cfg.n_actions - 1);
}

double differential_radius(const Positions& x) {
  return std::sqrt((2.0 / 3.0) * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
}

Positions differential_reset(Rng& rng) {
  Positions x;
  for (auto& xi : x) xi = rng.uniform(-1.0, 1.0);
  return x;
}

DifferentialStep differential_step(const DifferentialGameConfig& cfg, const Positions& x,
                                   std::span<const std::size_t> actions, Rng& rng) {
  if (!(cfg.beta >= 0.0 && cfg.beta <= 1.0))
    throw std::invalid_argument("differential game: beta must lie in [0, 1]");
  if (actions.size() != 3) throw std::invalid_argument("differential game: three actions expected");
  DifferentialStep out{};
  for (std::size_t i = 0; i < 3; ++i) {
    const double a = differential_action_value(cfg, actions[i]);
    if (rng.bernoulli(cfg.beta))
      out.positions[i] = -x[i];
    else
      out.positions[i] = std::clamp(x[i] + 0.1 * a, -1.0, 1.0);
  }
  out.reward = differential_reward(differential_radius(out.positions));
  return out;
}

std::vector<double> shaping_bonus(const JointMDP& mdp, double eps_tol, std::uint64_t seed) {
  if (!(eps_tol > 0.0)) throw std::invalid_argument("shaping: eps_tol must be > 0");
  const double scale = (1.0 - mdp.gamma()) * eps_tol;
  Rng rng(seed);
  std::vector<double> bonus(mdp.n_states() * mdp.n_states());
  for (auto& b : bonus) b = scale * rng.uniform_open_closed();
  return bonus;
}

JointMDP wrap_shaped_reward(const JointMDP& mdp, double eps_tol, std::uint64_t seed) {
  auto bonus = shaping_bonus(mdp, eps_tol, seed);
  std::vector<double> reward = mdp.reward_table();
  for (std::size_t k = 0; k < reward.size(); ++k) reward[k] += bonus[k];
  const double hi = *std::max_element(reward.begin(), reward.end());
  return mdp.with_reward(std::move(reward), mdp.r_min(), std::max(hi, mdp.r_max()));
}

MdpEnv::MdpEnv(std::shared_ptr<const JointMDP> mdp, std::size_t horizon)
    : mdp_(std::move(mdp)), horizon_(horizon) {
  if (!mdp_) throw std::invalid_argument("MdpEnv: null game");
  if (horizon_ == 0) throw std::invalid_argument("MdpEnv: horizon must be >= 1");
}

std::vector<double> MdpEnv::features(std::size_t state) const {
  std::vector<double> f(mdp_->n_states(), 0.0);
  f.at(state) = 1.0;
  return f;
}

std::vector<double> MdpEnv::reset(Rng& rng) {
  state_ = sample_initial_state(*mdp_, rng);
  return features(state_);
}

DiscreteEnv::Step MdpEnv::step(std::span<const std::size_t> actions, Rng& rng) {
  auto out = sample_step(*mdp_, state_, actions, rng);
  state_ = out.next_state;
  return {features(state_), out.reward};
}

std::vector<double> DifferentialGameEnv::reset(Rng& rng) {
  x_ = differential_reset(rng);
  return {x_.begin(), x_.end()};
}

DiscreteEnv::Step DifferentialGameEnv::step(std::span<const std::size_t> actions, Rng& rng) {
  auto out = differential_step(cfg_, x_, actions, rng);
  x_ = out.positions;
  return {{x_.begin(), x_.end()}, out.reward};
}

void write_differential_trace(std::ostream& os, std::span<const DifferentialTraceRow> rows) {
  os << "t,x1,x2,x3,a1,a2,a3,r\n";
  for (const auto& row : rows)
    os << fmt::format("{},{:.10g},{:.10g},{:.10g},{},{},{},{:.10g}\n", row.t, row.x[0],
                      row.x[1], row.x[2], row.a[0], row.a[1], row.a[2], row.r);
}

}  // namespace bql
