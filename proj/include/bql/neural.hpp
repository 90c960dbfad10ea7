#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "bql/envs.hpp"
#include "bql/rng.hpp"
#include "bql/run_record.hpp"
#include "bql/tabular.hpp"

namespace bql {

/// Feedforward state -> action-values map: ReLU hidden layers, linear output.
class MlpQNetwork {
 public:
  struct Layer {
    Eigen::MatrixXd weight;  // out x in
    Eigen::VectorXd bias;
  };

  MlpQNetwork() = default;
  /// Zero-initialized network with the given layer widths
  /// (input, hidden..., output).
  explicit MlpQNetwork(std::vector<std::size_t> widths);
  /// Weights and biases uniform in +-1/sqrt(fan_in).
  MlpQNetwork(std::vector<std::size_t> widths, Rng& rng);

  std::size_t input_dim() const { return widths_.front(); }
  std::size_t output_dim() const { return widths_.back(); }
  const std::vector<std::size_t>& widths() const { return widths_; }
  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }

  Eigen::VectorXd forward(std::span<const double> features) const;
  /// Column-per-sample batch forward.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& inputs) const;

  std::size_t parameter_count() const;
  std::vector<double> flat_parameters() const;
  void set_flat_parameters(std::span<const double> flat);
  bool all_finite() const;

 private:
  std::vector<std::size_t> widths_;
  std::vector<Layer> layers_;
};

/// Gradient with the network's parameter shapes.
struct MlpGradient {
  std::vector<Eigen::MatrixXd> weight;
  std::vector<Eigen::VectorXd> bias;

  std::vector<double> flat() const;
  double max_abs() const;
};

struct LossAndGrad {
  double loss = 0.0;
  MlpGradient grad;
};

/// Mini-batch of (s, a_i, r, s') with states stored column-wise.
struct Batch {
  Eigen::MatrixXd states;
  std::vector<std::size_t> actions;
  Eigen::VectorXd rewards;
  Eigen::MatrixXd next_states;

  std::size_t size() const { return actions.size(); }
};

/// mean_b (Q(s_b, a_b) - y_b)^2 and its gradient.
LossAndGrad regression_loss_and_grad(const MlpQNetwork& net, const Eigen::MatrixXd& states,
                                     std::span<const std::size_t> actions,
                                     const Eigen::VectorXd& targets);
/// mean_b w_b (Q(s_b, a_b) - y_b)^2 and its gradient; weights are constants.
LossAndGrad weighted_regression_loss_and_grad(const MlpQNetwork& net,
                                              const Eigen::MatrixXd& states,
                                              std::span<const std::size_t> actions,
                                              const Eigen::VectorXd& targets,
                                              const Eigen::VectorXd& weights);

/// Loss for Q^e: regression onto r + gamma * Q_i(s', argmax_a' Q_i(s', a')),
/// target held constant.
LossAndGrad qe_loss_and_grad(const MlpQNetwork& qe, const MlpQNetwork& q_frozen, double gamma,
                             const Batch& batch);

/// Loss for Q_i: regression onto the target Q^e with weight 1 where the target
/// exceeds Q_i(s, a_i) and lambda elsewhere.
LossAndGrad qi_weighted_loss_and_grad(const MlpQNetwork& q, const MlpQNetwork& qe_target,
                                      double lambda, const Batch& batch);

/// target <- (1 - tau) * target + tau * online.
void soft_update(MlpQNetwork& target, const MlpQNetwork& online, double tau);

/// Adaptive-moment gradient descent.
class AdamOptimizer {
 public:
  AdamOptimizer(const MlpQNetwork& net, double learning_rate, double beta1 = 0.9,
                double beta2 = 0.999, double epsilon = 1e-8);
  void step(MlpQNetwork& net, const MlpGradient& grad);
  std::size_t steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  std::size_t t_ = 0;
  MlpGradient m_, v_;
};

/// FIFO ring buffer of one agent's experiences.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, std::size_t feature_dim);

  void push(std::span<const double> state, std::size_t action, double reward,
            std::span<const double> next_state);
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  /// Uniform sample with replacement.
  Batch sample(std::size_t batch_size, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t dim_;
  std::size_t size_ = 0;
  std::size_t cursor_ = 0;
  Eigen::MatrixXd states_;
  Eigen::MatrixXd next_states_;
  std::vector<std::size_t> actions_;
  std::vector<double> rewards_;
};

struct NeuralConfig {
  std::size_t total_steps = 200000;
  double lambda = 0.01;
  double tau = 0.005;
  std::size_t batch_size = 64;
  std::size_t buffer_capacity = 200000;
  std::size_t warmup = 1000;
  EpsilonSchedule epsilon{};
  std::size_t hidden_width = 64;
  std::size_t hidden_layers = 2;
  double learning_rate = 1e-3;
  std::size_t update_every = 1;
  std::size_t eval_every = 10000;
  std::size_t eval_episodes = 10;
};

/// Scores the per-agent greedy networks: returns (return, normalized).
using NetworkEvaluator =
    std::function<std::pair<double, double>(const std::vector<MlpQNetwork>&)>;

/// Mean undiscounted episode return of the greedy networks over a fixed set of
/// evaluation episodes, normalized by `max_episode_return`.
NetworkEvaluator rollout_evaluator(const DiscreteEnv& env, std::size_t episodes,
                                   std::uint64_t seed, double max_episode_return);
/// Oracle score for a JointMDP with one-hot features.
NetworkEvaluator oracle_evaluator(const JointMDP& mdp, const PolicyEvaluator& eval);

struct NeuralRun {
  RunRecord record;
  std::vector<MlpQNetwork> q;   // Q_i per agent
  std::vector<MlpQNetwork> qe;  // Q^e_i per agent (empty for IQL)
  /// max over sampled states/actions of Q_i at each evaluation point.
  std::vector<double> max_q;
};

NeuralRun bql_neural_train(const DiscreteEnv& env, const NeuralConfig& cfg, std::uint64_t seed,
                           const NetworkEvaluator& evaluator);
/// Independent DQN-style learners with a soft-updated target network.
NeuralRun iql_neural_train(const DiscreteEnv& env, const NeuralConfig& cfg, std::uint64_t seed,
                           const NetworkEvaluator& evaluator);

/// Greedy per-agent table from networks evaluated on one-hot states.
std::vector<QTable> tabulate(const std::vector<MlpQNetwork>& nets, std::size_t n_states);

/// {"widths": [...], "parameters": [...]} with parameters flattened layer by
/// layer, weight (row-major) then bias.
nlohmann::json to_json(const MlpQNetwork& net);
MlpQNetwork network_from_json(const nlohmann::json& j);

void from_json(const nlohmann::json& j, NeuralConfig& c);

}  // namespace bql
