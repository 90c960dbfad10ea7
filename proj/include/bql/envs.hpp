#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <ostream>
#include <span>
#include <vector>

#include "bql/mdp.hpp"
#include "bql/rng.hpp"

namespace bql {

/// Two-player one-shot cooperative game.
///
/// The JointMDP view has a start state 0 and one outcome state per joint
/// action: joint action a moves deterministically to state 1 + a and pays
/// payoff(a) as R(0, 1 + a). Outcome states self-loop. The initial
/// distribution is a point mass on the start state and episodes last one
/// step, so gamma is 0. Keeping the outcome in s' is what lets a reward of
/// the form R(s, s') carry a joint-action payoff.
struct MatrixGame {
  std::vector<std::size_t> actions;  // per agent
  std::vector<double> payoff;        // flat joint index, agent 0 most significant
  JointMDP mdp;

  double operator()(std::size_t a0, std::size_t a1) const {
    return payoff[a0 * actions[1] + a1];
  }
  static constexpr std::size_t kStartState = 0;
  static constexpr std::size_t kHorizon = 1;
};

MatrixGame make_matrix_game(std::vector<std::size_t> actions, std::vector<double> payoff);

/// 3x3 game with the 8 / -12 / 0 payoffs; (A1, A1) is the global optimum and
/// the A2/A3 block is a zero-payoff Nash equilibrium.
MatrixGame make_one_stage_game();

/// 2x2 game with two optimal joint actions: payoff 1 on the off-diagonal,
/// 1 - delta on the diagonal.
MatrixGame make_coordination_game(double delta);

/// Piecewise radial reward of the differential game.
double differential_reward(double l);

struct DifferentialGameConfig {
  double beta = 0.4;            // per-agent flip probability
  std::size_t n_actions = 9;    // discretization of [-1, 1]
  std::size_t horizon = 100;
  double gamma = 0.99;
};

using Positions = std::array<double, 3>;

struct DifferentialStep {
  Positions positions;
  double reward;
};

/// Action value for discrete index k: evenly spaced over [-1, 1].
double differential_action_value(const DifferentialGameConfig& cfg, std::size_t k);
double differential_radius(const Positions& x);
Positions differential_reset(Rng& rng);
/// Each agent independently flips its position with probability beta,
/// otherwise moves by 0.1 * a_i and is clipped to [-1, 1]. The reward is
/// computed on the post-transition positions.
DifferentialStep differential_step(const DifferentialGameConfig& cfg, const Positions& x,
                                   std::span<const std::size_t> actions, Rng& rng);

/// Positive bonus table rhat(s, s') uniform on (0, (1 - gamma) * eps_tol].
std::vector<double> shaping_bonus(const JointMDP& mdp, double eps_tol, std::uint64_t seed);
/// Copy of `mdp` with reward r + rhat.
JointMDP wrap_shaped_reward(const JointMDP& mdp, double eps_tol, std::uint64_t seed);

/// Environment interface for the function-approximation learners.
class DiscreteEnv {
 public:
  virtual ~DiscreteEnv() = default;
  virtual std::size_t n_agents() const = 0;
  virtual std::size_t n_actions(std::size_t agent) const = 0;
  virtual std::size_t feature_dim() const = 0;
  virtual std::size_t horizon() const = 0;
  virtual double gamma() const = 0;
  /// Starts an episode and returns the state features.
  virtual std::vector<double> reset(Rng& rng) = 0;
  struct Step {
    std::vector<double> features;
    double reward;
  };
  virtual Step step(std::span<const std::size_t> actions, Rng& rng) = 0;
  virtual std::unique_ptr<DiscreteEnv> clone() const = 0;
};

/// JointMDP with one-hot state features.
class MdpEnv final : public DiscreteEnv {
 public:
  MdpEnv(std::shared_ptr<const JointMDP> mdp, std::size_t horizon);

  std::size_t n_agents() const override { return mdp_->n_agents(); }
  std::size_t n_actions(std::size_t agent) const override { return mdp_->n_actions(agent); }
  std::size_t feature_dim() const override { return mdp_->n_states(); }
  std::size_t horizon() const override { return horizon_; }
  double gamma() const override { return mdp_->gamma(); }
  std::vector<double> reset(Rng& rng) override;
  Step step(std::span<const std::size_t> actions, Rng& rng) override;
  std::unique_ptr<DiscreteEnv> clone() const override {
    return std::make_unique<MdpEnv>(*this);
  }

  const JointMDP& mdp() const { return *mdp_; }
  std::size_t state() const { return state_; }
  std::vector<double> features(std::size_t state) const;

 private:
  std::shared_ptr<const JointMDP> mdp_;
  std::size_t horizon_;
  std::size_t state_ = 0;
};

/// Three-agent differential game; features are the raw positions.
class DifferentialGameEnv final : public DiscreteEnv {
 public:
  explicit DifferentialGameEnv(DifferentialGameConfig cfg) : cfg_(cfg) {}

  std::size_t n_agents() const override { return 3; }
  std::size_t n_actions(std::size_t) const override { return cfg_.n_actions; }
  std::size_t feature_dim() const override { return 3; }
  std::size_t horizon() const override { return cfg_.horizon; }
  double gamma() const override { return cfg_.gamma; }
  std::vector<double> reset(Rng& rng) override;
  Step step(std::span<const std::size_t> actions, Rng& rng) override;
  std::unique_ptr<DiscreteEnv> clone() const override {
    return std::make_unique<DifferentialGameEnv>(*this);
  }

  const DifferentialGameConfig& config() const { return cfg_; }
  const Positions& positions() const { return x_; }

 private:
  DifferentialGameConfig cfg_;
  Positions x_{};
};

/// Row of a differential-game trajectory dump.
struct DifferentialTraceRow {
  std::size_t t;
  Positions x;
  std::array<std::size_t, 3> a;
  double r;
};

/// CSV with header t,x1,x2,x3,a1,a2,a3,r.
void write_differential_trace(std::ostream& os, std::span<const DifferentialTraceRow> rows);

}  // namespace bql
