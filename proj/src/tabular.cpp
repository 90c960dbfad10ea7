#include "bql/tabular.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bql {

double QTable::state_max(std::size_t s) const {
  const double* row = values.data() + s * n_actions;
  return *std::max_element(row, row + n_actions);
}

std::size_t QTable::greedy(std::size_t s) const {
  const double* row = values.data() + s * n_actions;
  return static_cast<std::size_t>(std::max_element(row, row + n_actions) - row);
}

DeterministicPolicyProfile greedy_profile(std::span<const QTable> tables) {
  DeterministicPolicyProfile p;
  for (const auto& t : tables) {
    std::vector<std::size_t> a(t.n_states);
    for (std::size_t s = 0; s < t.n_states; ++s) a[s] = t.greedy(s);
    p.actions.push_back(std::move(a));
  }
  return p;
}

nlohmann::json to_json(const QTable& q) {
  return {{"n_states", q.n_states},
          {"n_actions", q.n_actions},
          {"init_value", q.init_value},
          {"values", q.values}};
}

double EpsilonSchedule::at(std::size_t step, std::size_t total_steps) const {
  const double horizon = decay_fraction * static_cast<double>(total_steps);
  if (horizon <= 0.0) return end;
  const double frac = std::min(1.0, static_cast<double>(step) / horizon);
  return start + (end - start) * frac;
}

PolicyEvaluator::PolicyEvaluator(const JointMDP& mdp)
    : PolicyEvaluator(mdp, optimal_return(mdp)) {}

PolicyEvaluator::PolicyEvaluator(const JointMDP& mdp, double optimal)
    : mdp_(&mdp), optimal_(optimal) {}

std::pair<double, double> PolicyEvaluator::score(const DeterministicPolicyProfile& profile) const {
  const double ret = evaluate_joint_policy(*mdp_, profile);
  return {ret, optimal_ > 0.0 ? ret / optimal_ : ret};
}

InteractionLoop::InteractionLoop(const JointMDP& mdp, std::size_t horizon, std::uint64_t seed)
    : mdp_(&mdp), horizon_(horizon), rng_(seed) {
  if (horizon_ == 0) throw std::invalid_argument("InteractionLoop: horizon must be >= 1");
  reset();
}

void InteractionLoop::reset() {
  state_ = sample_initial_state(*mdp_, rng_);
  t_ = 0;
}

StepOutcome InteractionLoop::step(std::span<const std::size_t> actions) {
  auto out = sample_step(*mdp_, state_, actions, rng_);
  ++steps_;
  if (++t_ >= horizon_) {
    ++episodes_;
    reset();
  } else {
    state_ = out.next_state;
  }
  return out;
}

EpochBuffer::EpochBuffer(std::size_t epoch, std::size_t capacity, std::size_t n_states,
                         std::size_t n_actions)
    : epoch_(epoch),
      capacity_(capacity),
      n_states_(n_states),
      n_actions_(n_actions),
      stats_(n_states * n_actions) {
  if (capacity_ == 0) throw std::invalid_argument("EpochBuffer: capacity must be >= 1");
  transitions_.reserve(capacity_);
}

bool EpochBuffer::push(const Transition& t) {
  if (transitions_.size() >= capacity_) return false;
  if (t.state >= n_states_ || t.next_state >= n_states_ || t.action >= n_actions_)
    throw std::out_of_range("EpochBuffer: transition index out of range");
  transitions_.push_back(t);
  auto& st = stats_[t.state * n_actions_ + t.action];
  ++st.count;
  st.reward_sum += t.reward;
  auto it = std::find_if(st.next_counts.begin(), st.next_counts.end(),
                         [&](const auto& p) { return p.first == t.next_state; });
  if (it == st.next_counts.end())
    st.next_counts.emplace_back(t.next_state, 1);
  else
    ++it->second;
  return true;
}

void BufferSeries::append(EpochBuffer buffer) {
  if (!buffers_.empty() && buffer.epoch() <= buffers_.back().epoch())
    throw std::invalid_argument("BufferSeries: epochs must be strictly increasing");
  buffers_.push_back(std::move(buffer));
}

ExpectedBackup buffer_expectation(const EpochBuffer& buffer, const QTable& q, double gamma,
                                  std::size_t min_count) {
  const std::size_t S = q.n_states;
  const std::size_t A = q.n_actions;
  std::vector<double> v(S);
  for (std::size_t s = 0; s < S; ++s) v[s] = q.state_max(s);
  ExpectedBackup e{std::vector<double>(S * A, 0.0), std::vector<char>(S * A, 0)};
  const std::size_t need = std::max<std::size_t>(min_count, 1);
  for (std::size_t s = 0; s < S; ++s)
    for (std::size_t a = 0; a < A; ++a) {
      const auto& st = buffer.stats(s, a);
      if (st.count < need) continue;
      double acc = st.reward_sum;
      for (const auto& [next, n] : st.next_counts) acc += gamma * static_cast<double>(n) * v[next];
      e.value[s * A + a] = acc / static_cast<double>(st.count);
      e.valid[s * A + a] = 1;
    }
  return e;
}

ExpectedBackup model_expectation(const JointMDP& mdp, std::size_t agent, const QTable& q,
                                 std::span<const std::size_t> slice) {
  const std::size_t S = q.n_states;
  const std::size_t A = q.n_actions;
  if (slice.size() != S * A) throw std::invalid_argument("model_expectation: slice size");
  std::vector<double> v(S);
  for (std::size_t s = 0; s < S; ++s) v[s] = q.state_max(s);
  ExpectedBackup e{std::vector<double>(S * A, 0.0), std::vector<char>(S * A, 1)};
  for (std::size_t s = 0; s < S; ++s)
    for (std::size_t a = 0; a < A; ++a) {
      auto row = mdp.transition_row(s, mdp.codec().compose(agent, a, slice[s * A + a]));
      double acc = 0.0;
      for (std::size_t n = 0; n < S; ++n) acc += row[n] * (mdp.reward(s, n) + mdp.gamma() * v[n]);
      e.value[s * A + a] = acc;
    }
  return e;
}

std::size_t apply_monotone_max(QTable& q, const ExpectedBackup& e) {
  std::size_t raised = 0;
  for (std::size_t k = 0; k < q.values.size(); ++k) {
    if (!e.valid[k]) continue;
    if (e.value[k] > q.values[k]) {
      q.values[k] = e.value[k];
      ++raised;
    }
  }
  return raised;
}

// ---------------------------------------------------------------------------

HystereticAgent::HystereticAgent(std::size_t n_states, std::size_t n_actions, double init,
                                 double gamma, double alpha, double lambda_h,
                                 bool visit_count_alpha)
    : q_(n_states, n_actions, init),
      visits_(visit_count_alpha ? n_states * n_actions : 0, 0),
      gamma_(gamma),
      alpha_(alpha),
      lambda_h_(lambda_h),
      visit_count_alpha_(visit_count_alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("hysteretic: alpha in (0,1]");
  if (!(lambda_h >= 0.0 && lambda_h <= 1.0))
    throw std::invalid_argument("hysteretic: lambda_h in [0,1]");
}

void HystereticAgent::update(const Transition& t) {
  const double target = t.reward + gamma_ * q_.state_max(t.next_state);
  double& q = q_(t.state, t.action);
  double rate = alpha_;
  if (visit_count_alpha_) {
    const auto n = ++visits_[t.state * q_.n_actions + t.action];
    rate = std::max(alpha_, 1.0 / static_cast<double>(n));
  }
  const double w = target > q ? 1.0 : lambda_h_;
  // lerp(q, target, 1) == target exactly, which keeps alpha = 1 runs bit-exact
  // against the monotone max.
  q = std::lerp(q, target, rate * w);
}

SingleBufferBqlAgent::SingleBufferBqlAgent(std::size_t n_states, std::size_t n_actions,
                                           double init, double gamma, double alpha,
                                           double lambda, std::size_t sync_every)
    : q_(n_states, n_actions, init),
      qe_(n_states, n_actions, init),
      touched_(n_states * n_actions, 0),
      gamma_(gamma),
      alpha_(alpha),
      lambda_(lambda),
      sync_every_(sync_every) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("bql-: alpha in (0,1]");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("bql-: lambda in [0,1]");
  if (sync_every == 0) throw std::invalid_argument("bql-: sync_every must be >= 1");
}

void SingleBufferBqlAgent::update(const Transition& t) {
  const double target = t.reward + gamma_ * q_.state_max(t.next_state);
  double& qe = qe_(t.state, t.action);
  qe = std::lerp(qe, target, alpha_);
  const std::size_t k = t.state * q_.n_actions + t.action;
  if (!touched_[k]) {
    touched_[k] = 1;
    touched_list_.push_back(k);
  }
  if (++since_sync_ >= sync_every_) sync();
}

void SingleBufferBqlAgent::sync() {
  for (auto k : touched_list_) {
    const double w = qe_.values[k] > q_.values[k] ? 1.0 : lambda_;
    q_.values[k] = std::lerp(q_.values[k], qe_.values[k], w);
    touched_[k] = 0;
  }
  touched_list_.clear();
  since_sync_ = 0;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::uint64_t kEnvStream = 0;
constexpr std::uint64_t kAgentStream = 1;

double min_return(const JointMDP& mdp) { return mdp.r_min() / (1.0 - mdp.gamma()); }

std::vector<Rng> agent_rngs(std::uint64_t seed, std::size_t n) {
  std::vector<Rng> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(derive_seed(seed, {kAgentStream, i}));
  return out;
}

// Owns the evaluator when the caller did not pass one.
struct EvalHandle {
  std::optional<PolicyEvaluator> owned;
  const PolicyEvaluator* ptr;

  EvalHandle(const JointMDP& mdp, const PolicyEvaluator* given) : ptr(given) {
    if (!ptr) {
      owned.emplace(mdp);
      ptr = &*owned;
    }
  }
  const PolicyEvaluator& operator*() const { return *ptr; }
};

bool is_eval_point(std::size_t done, std::size_t total, std::size_t every) {
  return done == total || (every > 0 && done % every == 0);
}

std::size_t epsilon_greedy(const QTable& q, std::size_t s, double eps, Rng& rng) {
  const bool explore = rng.bernoulli(eps);
  return explore ? rng.index(q.n_actions) : q.greedy(s);
}

void check_steps(std::size_t total_steps, std::size_t horizon) {
  if (total_steps == 0) throw std::invalid_argument("trainer: total_steps must be >= 1");
  if (horizon == 0) throw std::invalid_argument("trainer: horizon must be >= 1");
}

// Shared epsilon-greedy loop for the independent learners that consume every
// fresh transition once (IQL family).
template <typename Agent>
void run_independent(const JointMDP& mdp, std::vector<Agent>& agents, std::size_t total_steps,
                     const EpsilonSchedule& eps, std::size_t horizon, std::size_t eval_every,
                     std::uint64_t seed, const PolicyEvaluator& eval, RunRecord& rec) {
  const std::size_t N = mdp.n_agents();
  InteractionLoop loop(mdp, horizon, derive_seed(seed, {kEnvStream}));
  auto rngs = agent_rngs(seed, N);
  std::vector<std::size_t> actions(N);
  std::vector<QTable> snapshot(N);
  for (std::size_t step = 0; step < total_steps; ++step) {
    const double e = eps.at(step, total_steps);
    const std::size_t s = loop.state();
    for (std::size_t i = 0; i < N; ++i) actions[i] = epsilon_greedy(agents[i].q(), s, e, rngs[i]);
    const auto out = loop.step(actions);
    for (std::size_t i = 0; i < N; ++i)
      agents[i].update(Transition{s, actions[i], out.next_state, out.reward});
    if (is_eval_point(step + 1, total_steps, eval_every)) {
      for (std::size_t i = 0; i < N; ++i) snapshot[i] = agents[i].q();
      const auto [ret, norm] = eval.score(greedy_profile(snapshot));
      rec.add(step + 1, ret, norm);
    }
  }
}

}  // namespace

BqlTabularConfig BqlTabularConfig::with_budget(std::size_t total_steps,
                                               std::size_t buffer_capacity) {
  BqlTabularConfig c;
  c.buffer_capacity = buffer_capacity;
  c.steps_per_epoch = buffer_capacity;
  c.epochs = std::max<std::size_t>(1, total_steps / buffer_capacity);
  return c;
}

TabularRun bql_tabular_train(const JointMDP& mdp, const BqlTabularConfig& cfg,
                             std::uint64_t seed, const PolicyEvaluator* eval_in) {
  if (cfg.epochs == 0 || cfg.steps_per_epoch == 0 || cfg.buffer_capacity == 0 ||
      cfg.n_sweeps == 0 || cfg.horizon == 0)
    throw std::invalid_argument("bql: config counts must be positive");
  if (!(cfg.subset_fraction >= 0.0 && cfg.subset_fraction <= 1.0))
    throw std::invalid_argument("bql: subset_fraction must lie in [0, 1]");
  EvalHandle eval(mdp, eval_in);

  const std::size_t N = mdp.n_agents();
  const std::size_t S = mdp.n_states();
  const auto subset_size =
      static_cast<std::size_t>(std::lround(cfg.subset_fraction * static_cast<double>(S)));

  TabularRun run;
  run.record.learner = "bql";
  run.record.seed = seed;
  for (std::size_t i = 0; i < N; ++i) run.tables.emplace_back(S, mdp.n_actions(i), min_return(mdp));
  std::vector<BufferSeries> series(N);
  InteractionLoop loop(mdp, cfg.horizon, derive_seed(seed, {kEnvStream}));
  auto rngs = agent_rngs(seed, N);

  std::vector<std::vector<std::size_t>> behaviour(N, std::vector<std::size_t>(S));
  std::vector<std::size_t> order(S);
  std::vector<std::size_t> actions(N);

  for (std::size_t m = 1; m <= cfg.epochs; ++m) {
    // Exploration plan: a random deterministic policy on a random subset of
    // states, greedy elsewhere. Fixed for the whole epoch.
    for (std::size_t i = 0; i < N; ++i) {
      auto& rng = rngs[i];
      std::iota(order.begin(), order.end(), std::size_t{0});
      for (std::size_t k = 0; k < subset_size; ++k)
        std::swap(order[k], order[k + rng.index(S - k)]);
      std::vector<char> in_subset(S, 0);
      for (std::size_t k = 0; k < subset_size; ++k) in_subset[order[k]] = 1;
      for (std::size_t s = 0; s < S; ++s) {
        const std::size_t random_action = rng.index(mdp.n_actions(i));
        behaviour[i][s] = in_subset[s] ? random_action : run.tables[i].greedy(s);
      }
    }

    std::vector<EpochBuffer> fresh;
    for (std::size_t i = 0; i < N; ++i)
      fresh.emplace_back(m, cfg.buffer_capacity, S, mdp.n_actions(i));
    loop.reset();
    for (std::size_t t = 0; t < cfg.steps_per_epoch; ++t) {
      const std::size_t s = loop.state();
      for (std::size_t i = 0; i < N; ++i) actions[i] = behaviour[i][s];
      const auto out = loop.step(actions);
      for (std::size_t i = 0; i < N; ++i)
        fresh[i].push(Transition{s, actions[i], out.next_state, out.reward});
    }
    for (std::size_t i = 0; i < N; ++i) series[i].append(std::move(fresh[i]));

    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t sweep = 0; sweep < cfg.n_sweeps; ++sweep) {
        const auto& buffer = series[i][rngs[i].index(series[i].size())];
        apply_monotone_max(run.tables[i],
                           buffer_expectation(buffer, run.tables[i], mdp.gamma(), cfg.min_count));
      }

    if (is_eval_point(m, cfg.epochs, cfg.eval_every)) {
      const auto [ret, norm] = (*eval).score(greedy_profile(run.tables));
      run.record.add(m * cfg.steps_per_epoch, ret, norm);
    }
  }
  return run;
}

TabularRun bql_single_buffer_train(const JointMDP& mdp, const BqlSingleBufferConfig& cfg,
                                   std::uint64_t seed, const PolicyEvaluator* eval_in) {
  check_steps(cfg.total_steps, cfg.horizon);
  if (cfg.buffer_capacity == 0 || cfg.updates_per_step == 0)
    throw std::invalid_argument("bql-: buffer_capacity and updates_per_step must be >= 1");
  EvalHandle eval(mdp, eval_in);
  const std::size_t N = mdp.n_agents();
  const std::size_t S = mdp.n_states();

  std::vector<SingleBufferBqlAgent> agents;
  for (std::size_t i = 0; i < N; ++i)
    agents.emplace_back(S, mdp.n_actions(i), min_return(mdp), mdp.gamma(), cfg.alpha, cfg.lambda,
                        cfg.sync_every);
  std::vector<std::vector<Transition>> buffers(N);
  std::size_t cursor = 0;  // shared: all agents push in lockstep

  InteractionLoop loop(mdp, cfg.horizon, derive_seed(seed, {kEnvStream}));
  auto rngs = agent_rngs(seed, N);
  std::vector<std::size_t> actions(N);
  TabularRun run;
  run.record.learner = "bql_single";
  run.record.seed = seed;
  std::vector<QTable> snapshot(N);

  for (std::size_t step = 0; step < cfg.total_steps; ++step) {
    const double e = cfg.epsilon.at(step, cfg.total_steps);
    const std::size_t s = loop.state();
    for (std::size_t i = 0; i < N; ++i) actions[i] = epsilon_greedy(agents[i].q(), s, e, rngs[i]);
    const auto out = loop.step(actions);
    for (std::size_t i = 0; i < N; ++i) {
      const Transition t{s, actions[i], out.next_state, out.reward};
      if (buffers[i].size() < cfg.buffer_capacity)
        buffers[i].push_back(t);
      else
        buffers[i][cursor] = t;
    }
    cursor = (cursor + 1) % cfg.buffer_capacity;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t u = 0; u < cfg.updates_per_step; ++u)
        agents[i].update(buffers[i][rngs[i].index(buffers[i].size())]);

    if (is_eval_point(step + 1, cfg.total_steps, cfg.eval_every)) {
      for (std::size_t i = 0; i < N; ++i) snapshot[i] = agents[i].q();
      const auto [ret, norm] = (*eval).score(greedy_profile(snapshot));
      run.record.add(step + 1, ret, norm);
    }
  }
  for (auto& a : agents) run.tables.push_back(a.q());
  return run;
}

TabularRun hysteretic_iql_train(const JointMDP& mdp, const IqlConfig& cfg, std::uint64_t seed,
                                const PolicyEvaluator* eval_in) {
  check_steps(cfg.total_steps, cfg.horizon);
  EvalHandle eval(mdp, eval_in);
  std::vector<HystereticAgent> agents;
  for (std::size_t i = 0; i < mdp.n_agents(); ++i)
    agents.emplace_back(mdp.n_states(), mdp.n_actions(i), min_return(mdp), mdp.gamma(), cfg.alpha,
                        cfg.lambda_h, cfg.visit_count_alpha);
  TabularRun run;
  run.record.learner = "hysteretic_iql";
  run.record.seed = seed;
  run_independent(mdp, agents, cfg.total_steps, cfg.epsilon, cfg.horizon, cfg.eval_every, seed,
                  *eval, run.record);
  for (auto& a : agents) run.tables.push_back(a.q());
  return run;
}

TabularRun iql_train(const JointMDP& mdp, const IqlConfig& cfg, std::uint64_t seed,
                     const PolicyEvaluator* eval) {
  IqlConfig plain = cfg;
  plain.lambda_h = 1.0;
  auto run = hysteretic_iql_train(mdp, plain, seed, eval);
  run.record.learner = "iql";
  return run;
}

TabularRun ma2ql_train(const JointMDP& mdp, const Ma2qlConfig& cfg, std::uint64_t seed,
                       const PolicyEvaluator* eval_in) {
  check_steps(cfg.total_steps, cfg.horizon);
  if (cfg.round_length == 0) throw std::invalid_argument("ma2ql: round_length must be >= 1");
  const std::size_t N = mdp.n_agents();
  if (!cfg.initial_preference.empty() && cfg.initial_preference.size() != N)
    throw std::invalid_argument("ma2ql: initial_preference needs one entry per agent");
  EvalHandle eval(mdp, eval_in);

  std::vector<HystereticAgent> agents;
  for (std::size_t i = 0; i < N; ++i) {
    agents.emplace_back(mdp.n_states(), mdp.n_actions(i), min_return(mdp), mdp.gamma(), cfg.alpha,
                        1.0);
    if (!cfg.initial_preference.empty() && cfg.initial_preference[i] >= 0) {
      const auto pref = static_cast<std::size_t>(cfg.initial_preference[i]);
      if (pref >= mdp.n_actions(i)) throw std::out_of_range("ma2ql: preferred action");
      for (std::size_t s = 0; s < mdp.n_states(); ++s) agents[i].q()(s, pref) += cfg.preference_bonus;
    }
  }

  InteractionLoop loop(mdp, cfg.horizon, derive_seed(seed, {kEnvStream}));
  auto rngs = agent_rngs(seed, N);
  std::vector<std::size_t> actions(N);
  std::vector<QTable> snapshot(N);
  TabularRun run;
  run.record.learner = "ma2ql";
  run.record.seed = seed;

  for (std::size_t step = 0; step < cfg.total_steps; ++step) {
    const std::size_t learner = (loop.episodes_completed() / cfg.round_length) % N;
    const std::size_t s = loop.state();
    for (std::size_t i = 0; i < N; ++i)
      actions[i] = i == learner ? epsilon_greedy(agents[i].q(), s, cfg.epsilon, rngs[i])
                                : agents[i].q().greedy(s);
    const auto out = loop.step(actions);
    agents[learner].update(Transition{s, actions[learner], out.next_state, out.reward});
    if (is_eval_point(step + 1, cfg.total_steps, cfg.eval_every)) {
      for (std::size_t i = 0; i < N; ++i) snapshot[i] = agents[i].q();
      const auto [ret, norm] = (*eval).score(greedy_profile(snapshot));
      run.record.add(step + 1, ret, norm);
    }
  }
  for (auto& a : agents) run.tables.push_back(a.q());
  return run;
}

DeterministicPolicyProfile jql_profile(const JointMDP& mdp, const QTable& joint_table) {
  DeterministicPolicyProfile p;
  p.actions.assign(mdp.n_agents(), std::vector<std::size_t>(mdp.n_states()));
  for (std::size_t s = 0; s < mdp.n_states(); ++s) {
    const auto a = mdp.codec().decode(joint_table.greedy(s));
    for (std::size_t i = 0; i < a.size(); ++i) p.actions[i][s] = a[i];
  }
  return p;
}

TabularRun jql_train(const JointMDP& mdp, const JqlConfig& cfg, std::uint64_t seed,
                     const PolicyEvaluator* eval_in) {
  check_steps(cfg.total_steps, cfg.horizon);
  EvalHandle eval(mdp, eval_in);
  HystereticAgent central(mdp.n_states(), mdp.n_joint_actions(), min_return(mdp), mdp.gamma(),
                          cfg.alpha, 1.0, cfg.visit_count_alpha);
  InteractionLoop loop(mdp, cfg.horizon, derive_seed(seed, {kEnvStream}));
  Rng rng(derive_seed(seed, {kAgentStream, 0}));
  TabularRun run;
  run.record.learner = "jql";
  run.record.seed = seed;

  for (std::size_t step = 0; step < cfg.total_steps; ++step) {
    const double e = cfg.epsilon.at(step, cfg.total_steps);
    const std::size_t s = loop.state();
    const std::size_t joint = epsilon_greedy(central.q(), s, e, rng);
    const auto actions = mdp.codec().decode(joint);
    const auto out = loop.step(actions);
    central.update(Transition{s, joint, out.next_state, out.reward});
    if (is_eval_point(step + 1, cfg.total_steps, cfg.eval_every)) {
      const auto [ret, norm] = (*eval).score(jql_profile(mdp, central.q()));
      run.record.add(step + 1, ret, norm);
    }
  }
  run.tables.push_back(central.q());
  return run;
}

// ---------------------------------------------------------------------------

namespace {

template <typename T>
void maybe(const nlohmann::json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

}  // namespace

void from_json(const nlohmann::json& j, EpsilonSchedule& e) {
  maybe(j, "start", e.start);
  maybe(j, "end", e.end);
  maybe(j, "decay_fraction", e.decay_fraction);
}

void from_json(const nlohmann::json& j, BqlTabularConfig& c) {
  if (j.contains("total_steps")) {
    const auto capacity = j.value("buffer_capacity", c.buffer_capacity);
    c = BqlTabularConfig::with_budget(j.at("total_steps").get<std::size_t>(), capacity);
  }
  maybe(j, "epochs", c.epochs);
  maybe(j, "steps_per_epoch", c.steps_per_epoch);
  maybe(j, "buffer_capacity", c.buffer_capacity);
  maybe(j, "subset_fraction", c.subset_fraction);
  maybe(j, "n_sweeps", c.n_sweeps);
  maybe(j, "min_count", c.min_count);
  maybe(j, "eval_every", c.eval_every);
  maybe(j, "horizon", c.horizon);
}

void from_json(const nlohmann::json& j, BqlSingleBufferConfig& c) {
  maybe(j, "total_steps", c.total_steps);
  maybe(j, "buffer_capacity", c.buffer_capacity);
  maybe(j, "epsilon", c.epsilon);
  maybe(j, "alpha", c.alpha);
  maybe(j, "lambda", c.lambda);
  maybe(j, "sync_every", c.sync_every);
  maybe(j, "updates_per_step", c.updates_per_step);
  maybe(j, "eval_every", c.eval_every);
  maybe(j, "horizon", c.horizon);
}

void from_json(const nlohmann::json& j, IqlConfig& c) {
  maybe(j, "total_steps", c.total_steps);
  maybe(j, "epsilon", c.epsilon);
  maybe(j, "alpha", c.alpha);
  maybe(j, "visit_count_alpha", c.visit_count_alpha);
  maybe(j, "lambda_h", c.lambda_h);
  maybe(j, "eval_every", c.eval_every);
  maybe(j, "horizon", c.horizon);
}

void from_json(const nlohmann::json& j, Ma2qlConfig& c) {
  maybe(j, "total_steps", c.total_steps);
  maybe(j, "round_length", c.round_length);
  maybe(j, "alpha", c.alpha);
  maybe(j, "epsilon", c.epsilon);
  maybe(j, "eval_every", c.eval_every);
  maybe(j, "horizon", c.horizon);
  maybe(j, "initial_preference", c.initial_preference);
  maybe(j, "preference_bonus", c.preference_bonus);
}

void from_json(const nlohmann::json& j, JqlConfig& c) {
  maybe(j, "total_steps", c.total_steps);
  maybe(j, "epsilon", c.epsilon);
  maybe(j, "alpha", c.alpha);
  maybe(j, "visit_count_alpha", c.visit_count_alpha);
  maybe(j, "eval_every", c.eval_every);
  maybe(j, "horizon", c.horizon);
}

}  // namespace bql
