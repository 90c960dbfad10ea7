#pragma once

#include <cstddef>
#include <vector>

#include <json.hpp>

#include "bql/mdp.hpp"

namespace bql {

/// Optimal joint action values Q(s, a), indexed (state, flat joint action).
struct JointQ {
  std::size_t n_states = 0;
  std::size_t n_joint = 0;
  std::vector<double> values;

  double operator()(std::size_t s, std::size_t a) const { return values[s * n_joint + a]; }
  double& operator()(std::size_t s, std::size_t a) { return values[s * n_joint + a]; }
};

/// Per-agent values Q_i(s, a_i). When produced by project_max, `argmax_joint`
/// holds the flat joint index attaining the max over a_{-i}; it is empty
/// otherwise.
struct ProjectedQ {
  std::size_t n_states = 0;
  std::size_t n_actions = 0;
  std::vector<double> values;
  std::vector<std::size_t> argmax_joint;

  ProjectedQ() = default;
  ProjectedQ(std::size_t states, std::size_t actions, double init)
      : n_states(states), n_actions(actions), values(states * actions, init) {}

  double operator()(std::size_t s, std::size_t a) const { return values[s * n_actions + a]; }
  double& operator()(std::size_t s, std::size_t a) { return values[s * n_actions + a]; }
  double state_max(std::size_t s) const;
  /// Greedy action, ties toward the smallest index.
  std::size_t greedy(std::size_t s) const;
};

double sup_distance(const ProjectedQ& a, const ProjectedQ& b);

struct SolveStatus {
  bool converged = false;
  std::size_t iterations = 0;
  double residual = 0.0;
};

struct JointSolution {
  JointQ q;
  SolveStatus status;
  /// Sup-norm Bellman residual after each sweep.
  std::vector<double> residuals;
};

/// Synchronous value iteration on the joint Bellman optimality operator from
/// Q = 0. Stops once the sup-norm residual is <= tolerance.
JointSolution joint_value_iteration(const JointMDP& mdp, double tolerance = 1e-11,
                                    std::size_t max_iters = 100000);

/// max over a_{-i} of Q(s, a_i, a_{-i}), with the conditional argmax.
/// Ties go to the smallest flat joint index.
ProjectedQ project_max(const JointMDP& mdp, const JointQ& q, std::size_t agent);

struct BestPossibleSolution {
  ProjectedQ q;
  SolveStatus status;
  /// ||Q^k - ref||_inf for k = 0..iterations (only when a reference is given).
  std::vector<double> distance_to_ref;
  /// max_{s,a}(Q^k - ref)(s,a) for k = 0..iterations (only with a reference).
  std::vector<double> excess_over_ref;
};

/// Exact best possible operator for one agent, iterated from the minimal
/// return r_min / (1 - gamma). The maximum over deterministic other-agent
/// policies is taken per (s, a_i) over the |A_{-i}| transition slices.
BestPossibleSolution exact_best_possible_iteration(const JointMDP& mdp, std::size_t agent,
                                                   double tolerance = 1e-11,
                                                   std::size_t max_iters = 100000,
                                                   const ProjectedQ* reference = nullptr);

/// One application of the exact best possible operator to `q`.
ProjectedQ best_possible_backup(const JointMDP& mdp, std::size_t agent, const ProjectedQ& q);

/// E_{s0}[max_a Q(s0, a)] for the converged joint values.
double optimal_return(const JointMDP& mdp, const JointQ& q);
double optimal_return(const JointMDP& mdp);

/// Per-state discounted values of a deterministic joint profile, by
/// iterating the policy evaluation equation until the error bound is below
/// `tolerance`.
std::vector<double> policy_state_values(const JointMDP& mdp,
                                        const DeterministicPolicyProfile& profile,
                                        double tolerance = 1e-10);
double evaluate_joint_policy(const JointMDP& mdp, const DeterministicPolicyProfile& profile,
                             double tolerance = 1e-10);

/// Greedy joint profile from JointQ (ties toward the smallest joint index).
DeterministicPolicyProfile greedy_joint_profile(const JointMDP& mdp, const JointQ& q);
/// Each agent acting greedily on its own table.
DeterministicPolicyProfile greedy_profile(const std::vector<ProjectedQ>& tables);

/// True when every state has one optimal joint action ahead of the runner-up
/// by more than `gap`.
bool has_unique_optimum(const JointQ& q, double gap = 1e-6);

nlohmann::json to_json(const JointQ& q);
nlohmann::json to_json(const ProjectedQ& q);

}  // namespace bql
