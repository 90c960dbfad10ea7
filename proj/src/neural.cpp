#include "bql/neural.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bql {

namespace {

void check_widths(const std::vector<std::size_t>& widths) {
  if (widths.size() < 2) throw std::invalid_argument("MlpQNetwork: need at least two widths");
  for (auto w : widths)
    if (w == 0) throw std::invalid_argument("MlpQNetwork: zero width");
}

// Activations per layer (inputs first) and hidden pre-activations.
struct ForwardCache {
  std::vector<Eigen::MatrixXd> act;
  std::vector<Eigen::MatrixXd> pre;
};

ForwardCache forward_cached(const MlpQNetwork& net, const Eigen::MatrixXd& inputs) {
  if (static_cast<std::size_t>(inputs.rows()) != net.input_dim())
    throw std::invalid_argument("MlpQNetwork: feature dimension mismatch");
  ForwardCache c;
  const auto& layers = net.layers();
  c.act.reserve(layers.size() + 1);
  c.act.push_back(inputs);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    Eigen::MatrixXd z = layers[l].weight * c.act.back();
    z.colwise() += layers[l].bias;
    if (l + 1 < layers.size()) {
      c.act.push_back(z.cwiseMax(0.0));
      c.pre.push_back(std::move(z));
    } else {
      c.act.push_back(std::move(z));
    }
  }
  return c;
}

MlpGradient backward(const MlpQNetwork& net, const ForwardCache& c, Eigen::MatrixXd d_out) {
  const auto& layers = net.layers();
  const std::size_t n = layers.size();
  MlpGradient g;
  g.weight.resize(n);
  g.bias.resize(n);
  Eigen::MatrixXd dz = std::move(d_out);
  for (std::size_t l = n; l-- > 0;) {
    g.weight[l] = dz * c.act[l].transpose();
    g.bias[l] = dz.rowwise().sum();
    if (l > 0) {
      Eigen::MatrixXd da = layers[l].weight.transpose() * dz;
      dz = da.array() * (c.pre[l - 1].array() > 0.0).cast<double>();
    }
  }
  return g;
}

void check_batch(const Eigen::MatrixXd& states, std::span<const std::size_t> actions,
                 const Eigen::VectorXd& targets, std::size_t n_out) {
  if (actions.empty()) throw std::invalid_argument("loss: empty batch");
  if (static_cast<std::size_t>(states.cols()) != actions.size() ||
      static_cast<std::size_t>(targets.size()) != actions.size())
    throw std::invalid_argument("loss: batch size mismatch");
  for (auto a : actions)
    if (a >= n_out) throw std::out_of_range("loss: action out of range");
}

Eigen::VectorXd picked(const Eigen::MatrixXd& out, const std::vector<std::size_t>& actions) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(actions.size()));
  for (std::size_t b = 0; b < actions.size(); ++b)
    v[static_cast<Eigen::Index>(b)] =
        out(static_cast<Eigen::Index>(actions[b]), static_cast<Eigen::Index>(b));
  return v;
}

std::size_t argmax(const Eigen::VectorXd& v) {
  std::size_t best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (v[i] > v[static_cast<Eigen::Index>(best)]) best = static_cast<std::size_t>(i);
  return best;
}

}  // namespace

MlpQNetwork::MlpQNetwork(std::vector<std::size_t> widths) : widths_(std::move(widths)) {
  check_widths(widths_);
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    const auto out = static_cast<Eigen::Index>(widths_[l + 1]);
    const auto in = static_cast<Eigen::Index>(widths_[l]);
    layers_.push_back({Eigen::MatrixXd::Zero(out, in), Eigen::VectorXd::Zero(out)});
  }
}

MlpQNetwork::MlpQNetwork(std::vector<std::size_t> widths, Rng& rng)
    : MlpQNetwork(std::move(widths)) {
  for (auto& layer : layers_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.weight.cols()));
    // Row-major fill so the draw order does not depend on Eigen's storage.
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c)
        layer.weight(r, c) = rng.uniform(-bound, bound);
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias[r] = rng.uniform(-bound, bound);
  }
}

Eigen::VectorXd MlpQNetwork::forward(std::span<const double> features) const {
  if (features.size() != input_dim())
    throw std::invalid_argument("MlpQNetwork: feature dimension mismatch");
  Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(features.data(),
                                                        static_cast<Eigen::Index>(features.size()));
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::VectorXd z = layers_[l].weight * a + layers_[l].bias;
    a = l + 1 < layers_.size() ? Eigen::VectorXd(z.cwiseMax(0.0)) : z;
  }
  return a;
}

Eigen::MatrixXd MlpQNetwork::forward(const Eigen::MatrixXd& inputs) const {
  return std::move(forward_cached(*this, inputs).act.back());
}

std::size_t MlpQNetwork::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

std::vector<double> MlpQNetwork::flat_parameters() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (const auto& l : layers_) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) flat.push_back(l.weight(r, c));
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) flat.push_back(l.bias[r]);
  }
  return flat;
}

void MlpQNetwork::set_flat_parameters(std::span<const double> flat) {
  if (flat.size() != parameter_count())
    throw std::invalid_argument("MlpQNetwork: parameter count mismatch");
  std::size_t k = 0;
  for (auto& l : layers_) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = flat[k++];
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias[r] = flat[k++];
  }
}

bool MlpQNetwork::all_finite() const {
  for (const auto& l : layers_)
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  return true;
}

std::vector<double> MlpGradient::flat() const {
  std::vector<double> out;
  for (std::size_t l = 0; l < weight.size(); ++l) {
    for (Eigen::Index r = 0; r < weight[l].rows(); ++r)
      for (Eigen::Index c = 0; c < weight[l].cols(); ++c) out.push_back(weight[l](r, c));
    for (Eigen::Index r = 0; r < bias[l].size(); ++r) out.push_back(bias[l][r]);
  }
  return out;
}

double MlpGradient::max_abs() const {
  double m = 0.0;
  for (const auto& w : weight)
    if (w.size()) m = std::max(m, w.cwiseAbs().maxCoeff());
  for (const auto& b : bias)
    if (b.size()) m = std::max(m, b.cwiseAbs().maxCoeff());
  return m;
}

LossAndGrad regression_loss_and_grad(const MlpQNetwork& net, const Eigen::MatrixXd& states,
                                     std::span<const std::size_t> actions,
                                     const Eigen::VectorXd& targets) {
  check_batch(states, actions, targets, net.output_dim());
  const auto cache = forward_cached(net, states);
  const auto& out = cache.act.back();
  const double n = static_cast<double>(actions.size());
  Eigen::MatrixXd d_out = Eigen::MatrixXd::Zero(out.rows(), out.cols());
  double sum = 0.0;
  for (std::size_t b = 0; b < actions.size(); ++b) {
    const auto bi = static_cast<Eigen::Index>(b);
    const auto ai = static_cast<Eigen::Index>(actions[b]);
    const double diff = out(ai, bi) - targets[bi];
    sum += diff * diff;
    d_out(ai, bi) = 2.0 * diff / n;
  }
  return {sum / n, backward(net, cache, std::move(d_out))};
}

LossAndGrad weighted_regression_loss_and_grad(const MlpQNetwork& net,
                                              const Eigen::MatrixXd& states,
                                              std::span<const std::size_t> actions,
                                              const Eigen::VectorXd& targets,
                                              const Eigen::VectorXd& weights) {
  check_batch(states, actions, targets, net.output_dim());
  if (weights.size() != targets.size()) throw std::invalid_argument("loss: weight size mismatch");
  const auto cache = forward_cached(net, states);
  const auto& out = cache.act.back();
  const double n = static_cast<double>(actions.size());
  Eigen::MatrixXd d_out = Eigen::MatrixXd::Zero(out.rows(), out.cols());
  double sum = 0.0;
  for (std::size_t b = 0; b < actions.size(); ++b) {
    const auto bi = static_cast<Eigen::Index>(b);
    const auto ai = static_cast<Eigen::Index>(actions[b]);
    const double w = weights[bi];
    const double diff = out(ai, bi) - targets[bi];
    sum += w * (diff * diff);
    d_out(ai, bi) = 2.0 * w * diff / n;
  }
  return {sum / n, backward(net, cache, std::move(d_out))};
}

LossAndGrad qe_loss_and_grad(const MlpQNetwork& qe, const MlpQNetwork& q_frozen, double gamma,
                             const Batch& batch) {
  const Eigen::MatrixXd next = q_frozen.forward(batch.next_states);
  Eigen::VectorXd y(static_cast<Eigen::Index>(batch.size()));
  for (Eigen::Index b = 0; b < y.size(); ++b) {
    const Eigen::VectorXd col = next.col(b);
    y[b] = batch.rewards[b] + gamma * col[static_cast<Eigen::Index>(argmax(col))];
  }
  return regression_loss_and_grad(qe, batch.states, batch.actions, y);
}

LossAndGrad qi_weighted_loss_and_grad(const MlpQNetwork& q, const MlpQNetwork& qe_target,
                                      double lambda, const Batch& batch) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda must be in [0,1]");
  const Eigen::VectorXd target = picked(qe_target.forward(batch.states), batch.actions);
  const Eigen::VectorXd current = picked(q.forward(batch.states), batch.actions);
  Eigen::VectorXd w(target.size());
  for (Eigen::Index b = 0; b < w.size(); ++b) w[b] = target[b] > current[b] ? 1.0 : lambda;
  return weighted_regression_loss_and_grad(q, batch.states, batch.actions, target, w);
}

void soft_update(MlpQNetwork& target, const MlpQNetwork& online, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("soft_update: tau must be in (0,1]");
  if (target.widths() != online.widths()) throw std::invalid_argument("soft_update: shape mismatch");
  for (std::size_t l = 0; l < target.layers().size(); ++l) {
    auto& t = target.layers()[l];
    const auto& o = online.layers()[l];
    t.weight = (1.0 - tau) * t.weight + tau * o.weight;
    t.bias = (1.0 - tau) * t.bias + tau * o.bias;
  }
}

AdamOptimizer::AdamOptimizer(const MlpQNetwork& net, double learning_rate, double beta1,
                             double beta2, double epsilon)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {
  for (const auto& l : net.layers()) {
    m_.weight.push_back(Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()));
    m_.bias.push_back(Eigen::VectorXd::Zero(l.bias.size()));
  }
  v_ = m_;
}

void AdamOptimizer::step(MlpQNetwork& net, const MlpGradient& grad) {
  if (grad.weight.size() != m_.weight.size()) throw std::invalid_argument("Adam: shape mismatch");
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  auto apply = [&](auto& param, auto& m, auto& v, const auto& g) {
    m = beta1_ * m + (1.0 - beta1_) * g;
    v = beta2_ * v + (1.0 - beta2_) * g.cwiseProduct(g);
    param.array() -= lr_ * (m.array() / c1) / ((v.array() / c2).sqrt() + eps_);
  };
  for (std::size_t l = 0; l < m_.weight.size(); ++l) {
    auto& layer = net.layers()[l];
    apply(layer.weight, m_.weight[l], v_.weight[l], grad.weight[l]);
    apply(layer.bias, m_.bias[l], v_.bias[l], grad.bias[l]);
  }
}

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::size_t feature_dim)
    : capacity_(capacity),
      dim_(feature_dim),
      states_(static_cast<Eigen::Index>(feature_dim), static_cast<Eigen::Index>(capacity)),
      next_states_(static_cast<Eigen::Index>(feature_dim), static_cast<Eigen::Index>(capacity)),
      actions_(capacity),
      rewards_(capacity) {
  if (capacity == 0) throw std::invalid_argument("ReplayBuffer: zero capacity");
}

void ReplayBuffer::push(std::span<const double> state, std::size_t action, double reward,
                        std::span<const double> next_state) {
  if (state.size() != dim_ || next_state.size() != dim_)
    throw std::invalid_argument("ReplayBuffer: feature dimension mismatch");
  const auto c = static_cast<Eigen::Index>(cursor_);
  for (std::size_t k = 0; k < dim_; ++k) {
    states_(static_cast<Eigen::Index>(k), c) = state[k];
    next_states_(static_cast<Eigen::Index>(k), c) = next_state[k];
  }
  actions_[cursor_] = action;
  rewards_[cursor_] = reward;
  cursor_ = (cursor_ + 1) % capacity_;
  size_ = std::min(size_ + 1, capacity_);
}

Batch ReplayBuffer::sample(std::size_t batch_size, Rng& rng) const {
  if (size_ == 0) throw std::logic_error("ReplayBuffer: sample from empty buffer");
  Batch b;
  const auto n = static_cast<Eigen::Index>(batch_size);
  b.states.resize(static_cast<Eigen::Index>(dim_), n);
  b.next_states.resize(static_cast<Eigen::Index>(dim_), n);
  b.rewards.resize(n);
  b.actions.resize(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) {
    const auto j = rng.index(size_);
    const auto ji = static_cast<Eigen::Index>(j);
    const auto ii = static_cast<Eigen::Index>(i);
    b.states.col(ii) = states_.col(ji);
    b.next_states.col(ii) = next_states_.col(ji);
    b.rewards[ii] = rewards_[j];
    b.actions[i] = actions_[j];
  }
  return b;
}

NetworkEvaluator rollout_evaluator(const DiscreteEnv& env, std::size_t episodes,
                                   std::uint64_t seed, double max_episode_return) {
  std::shared_ptr<const DiscreteEnv> proto(env.clone());
  return [proto, episodes, seed, max_episode_return](const std::vector<MlpQNetwork>& nets) {
    auto e = proto->clone();
    std::vector<std::size_t> actions(nets.size());
    double total = 0.0;
    for (std::size_t ep = 0; ep < episodes; ++ep) {
      Rng rng(derive_seed(seed, {ep}));
      auto x = e->reset(rng);
      for (std::size_t t = 0; t < e->horizon(); ++t) {
        for (std::size_t i = 0; i < nets.size(); ++i) actions[i] = argmax(nets[i].forward(x));
        auto st = e->step(actions, rng);
        total += st.reward;
        x = std::move(st.features);
      }
    }
    const double ret = total / static_cast<double>(std::max<std::size_t>(episodes, 1));
    return std::pair{ret, max_episode_return > 0.0 ? ret / max_episode_return : ret};
  };
}

std::vector<QTable> tabulate(const std::vector<MlpQNetwork>& nets, std::size_t n_states) {
  std::vector<QTable> tables;
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n_states),
                                                  static_cast<Eigen::Index>(n_states));
  for (const auto& net : nets) {
    const Eigen::MatrixXd out = net.forward(eye);
    QTable t(n_states, net.output_dim(), 0.0);
    for (std::size_t s = 0; s < n_states; ++s)
      for (std::size_t a = 0; a < net.output_dim(); ++a)
        t(s, a) = out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(s));
    tables.push_back(std::move(t));
  }
  return tables;
}

NetworkEvaluator oracle_evaluator(const JointMDP& mdp, const PolicyEvaluator& eval) {
  return [&mdp, &eval](const std::vector<MlpQNetwork>& nets) {
    const auto tables = tabulate(nets, mdp.n_states());
    return eval.score(greedy_profile(tables));
  };
}

namespace {

struct NeuralAgent {
  MlpQNetwork q, q_bar;  // q_bar: target network (Q̄^e for BQL, Q̄ for IQL)
  MlpQNetwork qe;
  std::unique_ptr<AdamOptimizer> opt_q, opt_e;
  ReplayBuffer buffer;
  Rng rng;
};

enum class Variant { kBql, kIql };

void validate(const DiscreteEnv& env, const NeuralConfig& cfg) {
  if (cfg.total_steps == 0 || cfg.batch_size == 0 || cfg.update_every == 0 ||
      cfg.hidden_layers == 0 || cfg.hidden_width == 0 || cfg.eval_every == 0)
    throw std::invalid_argument("neural config: zero-valued size");
  if (!(cfg.tau > 0.0 && cfg.tau <= 1.0)) throw std::invalid_argument("neural config: tau");
  if (!(cfg.lambda >= 0.0 && cfg.lambda <= 1.0)) throw std::invalid_argument("neural config: lambda");
  if (env.n_agents() == 0) throw std::invalid_argument("neural: env has no agents");
}

double max_recent_q(const std::vector<NeuralAgent>& agents,
                    const std::vector<std::vector<double>>& recent) {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& x : recent)
    for (const auto& a : agents) m = std::max(m, a.q.forward(x).maxCoeff());
  return m;
}

NeuralRun neural_train(const DiscreteEnv& proto, const NeuralConfig& cfg, std::uint64_t seed,
                       const NetworkEvaluator& evaluator, Variant variant) {
  validate(proto, cfg);
  auto env = proto.clone();
  const std::size_t n = env->n_agents();
  const double gamma = env->gamma();

  std::vector<NeuralAgent> agents;
  agents.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed, {1, i}));
    std::vector<std::size_t> widths{env->feature_dim()};
    for (std::size_t l = 0; l < cfg.hidden_layers; ++l) widths.push_back(cfg.hidden_width);
    widths.push_back(env->n_actions(i));
    MlpQNetwork q(widths, rng);
    MlpQNetwork qe = variant == Variant::kBql ? MlpQNetwork(widths, rng) : MlpQNetwork{};
    MlpQNetwork q_bar = variant == Variant::kBql ? qe : q;
    NeuralAgent a{std::move(q), std::move(q_bar), std::move(qe), nullptr, nullptr,
                  ReplayBuffer(cfg.buffer_capacity, env->feature_dim()), std::move(rng)};
    a.opt_q = std::make_unique<AdamOptimizer>(a.q, cfg.learning_rate);
    if (variant == Variant::kBql) a.opt_e = std::make_unique<AdamOptimizer>(a.qe, cfg.learning_rate);
    agents.push_back(std::move(a));
  }

  NeuralRun run;
  run.record.learner = variant == Variant::kBql ? "bql_neural" : "iql_neural";
  run.record.seed = seed;

  auto collect = [&] {
    std::vector<MlpQNetwork> nets;
    for (const auto& a : agents) nets.push_back(a.q);
    return nets;
  };

  // Most recent distinct-in-time states, for the overestimation probe.
  constexpr std::size_t kRecent = 256;
  std::vector<std::vector<double>> recent;

  Rng env_rng(derive_seed(seed, {0}));
  auto x = env->reset(env_rng);
  std::size_t t_episode = 0;
  std::vector<std::size_t> actions(n);

  for (std::size_t step = 1; step <= cfg.total_steps; ++step) {
    const double eps = cfg.epsilon.at(step - 1, cfg.total_steps);
    for (std::size_t i = 0; i < n; ++i) {
      auto& a = agents[i];
      if (a.rng.bernoulli(eps))
        actions[i] = a.rng.index(env->n_actions(i));
      else
        actions[i] = argmax(a.q.forward(x));
    }
    auto st = env->step(actions, env_rng);
    for (std::size_t i = 0; i < n; ++i) agents[i].buffer.push(x, actions[i], st.reward, st.features);
    if (recent.size() < kRecent)
      recent.push_back(st.features);
    else
      recent[step % kRecent] = st.features;

    if (++t_episode >= env->horizon()) {
      x = env->reset(env_rng);
      t_episode = 0;
    } else {
      x = std::move(st.features);
    }

    if (step % cfg.update_every == 0 && agents.front().buffer.size() >= cfg.warmup) {
      for (auto& a : agents) {
        const Batch batch = a.buffer.sample(cfg.batch_size, a.rng);
        if (variant == Variant::kBql) {
          const auto le = qe_loss_and_grad(a.qe, a.q, gamma, batch);
          a.opt_e->step(a.qe, le.grad);
          const auto lq = qi_weighted_loss_and_grad(a.q, a.q_bar, cfg.lambda, batch);
          a.opt_q->step(a.q, lq.grad);
          soft_update(a.q_bar, a.qe, cfg.tau);
        } else {
          const Eigen::MatrixXd next = a.q_bar.forward(batch.next_states);
          Eigen::VectorXd y = batch.rewards + gamma * next.colwise().maxCoeff().transpose();
          const auto l = regression_loss_and_grad(a.q, batch.states, batch.actions, y);
          a.opt_q->step(a.q, l.grad);
          soft_update(a.q_bar, a.q, cfg.tau);
        }
      }
    }

    if (step % cfg.eval_every == 0 || step == cfg.total_steps) {
      const auto [ret, norm] = evaluator(collect());
      run.record.add(step, ret, norm);
      run.max_q.push_back(max_recent_q(agents, recent));
    }
  }

  for (auto& a : agents) {
    if (!a.q.all_finite()) throw std::runtime_error("neural: non-finite parameters");
    run.q.push_back(std::move(a.q));
    if (variant == Variant::kBql) run.qe.push_back(std::move(a.qe));
  }
  return run;
}

}  // namespace

NeuralRun bql_neural_train(const DiscreteEnv& env, const NeuralConfig& cfg, std::uint64_t seed,
                           const NetworkEvaluator& evaluator) {
  return neural_train(env, cfg, seed, evaluator, Variant::kBql);
}

NeuralRun iql_neural_train(const DiscreteEnv& env, const NeuralConfig& cfg, std::uint64_t seed,
                           const NetworkEvaluator& evaluator) {
  return neural_train(env, cfg, seed, evaluator, Variant::kIql);
}

nlohmann::json to_json(const MlpQNetwork& net) {
  return {{"widths", net.widths()}, {"parameters", net.flat_parameters()}};
}

MlpQNetwork network_from_json(const nlohmann::json& j) {
  try {
    MlpQNetwork net(j.at("widths").get<std::vector<std::size_t>>());
    net.set_flat_parameters(j.at("parameters").get<std::vector<double>>());
    return net;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("network json: ") + e.what());
  }
}

void from_json(const nlohmann::json& j, NeuralConfig& c) {
  c.total_steps = j.value("total_steps", c.total_steps);
  c.lambda = j.value("lambda", c.lambda);
  c.tau = j.value("tau", c.tau);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.buffer_capacity = j.value("buffer_capacity", c.buffer_capacity);
  c.warmup = j.value("warmup", c.warmup);
  if (j.contains("epsilon")) from_json(j.at("epsilon"), c.epsilon);
  c.hidden_width = j.value("hidden_width", c.hidden_width);
  c.hidden_layers = j.value("hidden_layers", c.hidden_layers);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.update_every = j.value("update_every", c.update_every);
  c.eval_every = j.value("eval_every", c.eval_every);
  c.eval_episodes = j.value("eval_episodes", c.eval_episodes);
}

}  // namespace bql
