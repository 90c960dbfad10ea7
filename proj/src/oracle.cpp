#include "bql/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bql {

double ProjectedQ::state_max(std::size_t s) const {
  const double* row = values.data() + s * n_actions;
  return *std::max_element(row, row + n_actions);
}

std::size_t ProjectedQ::greedy(std::size_t s) const {
  const double* row = values.data() + s * n_actions;
  // max_element returns the first maximum.
  return static_cast<std::size_t>(std::max_element(row, row + n_actions) - row);
}

double sup_distance(const ProjectedQ& a, const ProjectedQ& b) {
  if (a.values.size() != b.values.size())
    throw std::invalid_argument("sup_distance: shape mismatch");
  double d = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k)
    d = std::max(d, std::abs(a.values[k] - b.values[k]));
  return d;
}

namespace {

// Backup r + gamma * V(s') in expectation under one joint action's row.
double expected_backup(const JointMDP& mdp, std::size_t s, std::size_t joint,
                       const std::vector<double>& v) {
  auto row = mdp.transition_row(s, joint);
  double acc = 0.0;
  for (std::size_t n = 0; n < mdp.n_states(); ++n)
    acc += row[n] * (mdp.reward(s, n) + mdp.gamma() * v[n]);
  return acc;
}

}  // namespace

JointSolution joint_value_iteration(const JointMDP& mdp, double tolerance,
                                    std::size_t max_iters) {
  if (!(tolerance > 0.0)) throw std::invalid_argument("joint_value_iteration: tolerance must be > 0");
  const std::size_t S = mdp.n_states();
  const std::size_t A = mdp.n_joint_actions();
  JointSolution out;
  out.q = JointQ{S, A, std::vector<double>(S * A, 0.0)};
  std::vector<double> v(S, 0.0);
  std::vector<double> next(S * A);

  for (std::size_t it = 1; it <= max_iters; ++it) {
    double residual = 0.0;
    for (std::size_t s = 0; s < S; ++s)
      for (std::size_t a = 0; a < A; ++a) {
        next[s * A + a] = expected_backup(mdp, s, a, v);
        residual = std::max(residual, std::abs(next[s * A + a] - out.q.values[s * A + a]));
      }
    out.q.values.swap(next);
    for (std::size_t s = 0; s < S; ++s) {
      const double* row = out.q.values.data() + s * A;
      v[s] = *std::max_element(row, row + A);
    }
    out.residuals.push_back(residual);
    out.status.iterations = it;
    out.status.residual = residual;
    if (residual <= tolerance) {
      out.status.converged = true;
      break;
    }
  }
  return out;
}

ProjectedQ project_max(const JointMDP& mdp, const JointQ& q, std::size_t agent) {
  if (agent >= mdp.n_agents()) throw std::out_of_range("project_max: agent");
  const auto& codec = mdp.codec();
  const std::size_t S = mdp.n_states();
  const std::size_t A = mdp.n_actions(agent);
  const std::size_t n_others = codec.n_others(agent);
  ProjectedQ out(S, A, 0.0);
  out.argmax_joint.assign(S * A, 0);
  for (std::size_t s = 0; s < S; ++s)
    for (std::size_t a = 0; a < A; ++a) {
      // compose() is increasing in the others index, so a strict comparison
      // keeps the smallest flat joint index on ties.
      double best = -std::numeric_limits<double>::infinity();
      std::size_t best_joint = 0;
      for (std::size_t o = 0; o < n_others; ++o) {
        const std::size_t joint = codec.compose(agent, a, o);
        if (q(s, joint) > best) {
          best = q(s, joint);
          best_joint = joint;
        }
      }
      out(s, a) = best;
      out.argmax_joint[s * A + a] = best_joint;
    }
  return out;
}

ProjectedQ best_possible_backup(const JointMDP& mdp, std::size_t agent, const ProjectedQ& q) {
  const auto& codec = mdp.codec();
  const std::size_t S = mdp.n_states();
  const std::size_t A = mdp.n_actions(agent);
  const std::size_t n_others = codec.n_others(agent);
  std::vector<double> v(S);
  for (std::size_t s = 0; s < S; ++s) v[s] = q.state_max(s);
  ProjectedQ out(S, A, 0.0);
  for (std::size_t s = 0; s < S; ++s)
    for (std::size_t a = 0; a < A; ++a) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t o = 0; o < n_others; ++o)
        best = std::max(best, expected_backup(mdp, s, codec.compose(agent, a, o), v));
      out(s, a) = best;
    }
  return out;
}

BestPossibleSolution exact_best_possible_iteration(const JointMDP& mdp, std::size_t agent,
                                                   double tolerance, std::size_t max_iters,
                                                   const ProjectedQ* reference) {
  if (agent >= mdp.n_agents()) throw std::out_of_range("exact_best_possible_iteration: agent");
  if (!(tolerance > 0.0))
    throw std::invalid_argument("exact_best_possible_iteration: tolerance must be > 0");
  const double q_min = mdp.r_min() / (1.0 - mdp.gamma());
  BestPossibleSolution out;
  out.q = ProjectedQ(mdp.n_states(), mdp.n_actions(agent), q_min);

  auto record = [&](const ProjectedQ& q) {
    if (!reference) return;
    out.distance_to_ref.push_back(sup_distance(q, *reference));
    double excess = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < q.values.size(); ++k)
      excess = std::max(excess, q.values[k] - reference->values[k]);
    out.excess_over_ref.push_back(excess);
  };
  record(out.q);

  for (std::size_t it = 1; it <= max_iters; ++it) {
    ProjectedQ next = best_possible_backup(mdp, agent, out.q);
    const double change = sup_distance(next, out.q);
    out.q = std::move(next);
    record(out.q);
    out.status.iterations = it;
    out.status.residual = change;
    if (change <= tolerance) {
      out.status.converged = true;
      break;
    }
  }
  return out;
}

double optimal_return(const JointMDP& mdp, const JointQ& q) {
  const auto& init = mdp.initial_distribution();
  double total = 0.0;
  for (std::size_t s = 0; s < mdp.n_states(); ++s) {
    if (init[s] == 0.0) continue;
    const double* row = q.values.data() + s * q.n_joint;
    total += init[s] * *std::max_element(row, row + q.n_joint);
  }
  return total;
}

double optimal_return(const JointMDP& mdp) {
  auto sol = joint_value_iteration(mdp);
  if (!sol.status.converged)
    throw std::runtime_error("optimal_return: joint value iteration did not converge");
  return optimal_return(mdp, sol.q);
}

std::vector<double> policy_state_values(const JointMDP& mdp,
                                        const DeterministicPolicyProfile& profile,
                                        double tolerance) {
  validate_profile(mdp, profile);
  const std::size_t S = mdp.n_states();
  const double gamma = mdp.gamma();
  std::vector<std::size_t> joint(S);
  std::vector<double> r(S);
  for (std::size_t s = 0; s < S; ++s) {
    joint[s] = profile.joint_action(mdp.codec(), s);
    r[s] = mdp.expected_reward(s, joint[s]);
  }
  std::vector<double> v(S, 0.0), next(S);
  // ||v_k - v*|| <= gamma/(1-gamma) * ||v_k - v_{k-1}||.
  const double stop = gamma > 0.0 ? tolerance * (1.0 - gamma) / gamma : 0.0;
  for (std::size_t it = 0; it < 1000000; ++it) {
    double change = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
      auto row = mdp.transition_row(s, joint[s]);
      double acc = 0.0;
      for (std::size_t n = 0; n < S; ++n) acc += row[n] * v[n];
      next[s] = r[s] + gamma * acc;
      change = std::max(change, std::abs(next[s] - v[s]));
    }
    v.swap(next);
    if (change <= stop) break;
  }
  return v;
}

double evaluate_joint_policy(const JointMDP& mdp, const DeterministicPolicyProfile& profile,
                             double tolerance) {
  const auto v = policy_state_values(mdp, profile, tolerance);
  const auto& init = mdp.initial_distribution();
  double total = 0.0;
  for (std::size_t s = 0; s < v.size(); ++s) total += init[s] * v[s];
  return total;
}

DeterministicPolicyProfile greedy_joint_profile(const JointMDP& mdp, const JointQ& q) {
  DeterministicPolicyProfile p;
  p.actions.assign(mdp.n_agents(), std::vector<std::size_t>(mdp.n_states()));
  for (std::size_t s = 0; s < mdp.n_states(); ++s) {
    const double* row = q.values.data() + s * q.n_joint;
    const auto best = static_cast<std::size_t>(std::max_element(row, row + q.n_joint) - row);
    const auto actions = mdp.codec().decode(best);
    for (std::size_t i = 0; i < actions.size(); ++i) p.actions[i][s] = actions[i];
  }
  return p;
}

DeterministicPolicyProfile greedy_profile(const std::vector<ProjectedQ>& tables) {
  DeterministicPolicyProfile p;
  for (const auto& t : tables) {
    std::vector<std::size_t> a(t.n_states);
    for (std::size_t s = 0; s < t.n_states; ++s) a[s] = t.greedy(s);
    p.actions.push_back(std::move(a));
  }
  return p;
}

bool has_unique_optimum(const JointQ& q, double gap) {
  for (std::size_t s = 0; s < q.n_states; ++s) {
    const double* row = q.values.data() + s * q.n_joint;
    double first = -std::numeric_limits<double>::infinity();
    double second = first;
    for (std::size_t a = 0; a < q.n_joint; ++a) {
      if (row[a] > first) {
        second = first;
        first = row[a];
      } else if (row[a] > second) {
        second = row[a];
      }
    }
    if (q.n_joint > 1 && !(first - second > gap)) return false;
  }
  return true;
}

nlohmann::json to_json(const JointQ& q) {
  return {{"n_states", q.n_states}, {"n_joint", q.n_joint}, {"values", q.values}};
}

nlohmann::json to_json(const ProjectedQ& q) {
  nlohmann::json j{{"n_states", q.n_states}, {"n_actions", q.n_actions}, {"values", q.values}};
  if (!q.argmax_joint.empty()) j["argmax_joint"] = q.argmax_joint;
  return j;
}

}  // namespace bql
