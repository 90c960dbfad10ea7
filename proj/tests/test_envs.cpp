#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "bql/envs.hpp"
#include "bql/oracle.hpp"

using namespace bql;

TEST_CASE("one-stage game payoffs") {
  const auto g = make_one_stage_game();
  CHECK(g(0, 0) == 8.0);
  CHECK(g(1, 2) == 0.0);
  CHECK(g(2, 1) == 0.0);
  CHECK(g(1, 1) == 0.0);
  for (std::size_t k = 1; k < 3; ++k) {
    CHECK(g(0, k) == -12.0);
    CHECK(g(k, 0) == -12.0);
  }
  CHECK(optimal_return(g.mdp) == doctest::Approx(8.0));
}

TEST_CASE("matrix game view reproduces the payoff table under value iteration") {
  for (const auto& g : {make_one_stage_game(), make_coordination_game(0.01)}) {
    CHECK(g.mdp.gamma() == 0.0);
    CHECK(g.mdp.initial_distribution()[MatrixGame::kStartState] == 1.0);
    const auto sol = joint_value_iteration(g.mdp);
    for (std::size_t a = 0; a < g.payoff.size(); ++a)
      CHECK(sol.q(MatrixGame::kStartState, a) == doctest::Approx(g.payoff[a]).epsilon(1e-14));
  }
}

TEST_CASE("matrix game rejects non-rectangular tables") {
  CHECK_THROWS_AS(make_matrix_game({2, 2}, {1, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(make_matrix_game({2}, {1, 2}), std::invalid_argument);
}

TEST_CASE("coordination game has exactly two maximal joint actions") {
  const auto g = make_coordination_game(0.01);
  const double best = *std::max_element(g.payoff.begin(), g.payoff.end());
  CHECK(best == 1.0);
  CHECK(std::count(g.payoff.begin(), g.payoff.end(), best) == 2);
  CHECK(g(0, 1) == 1.0);
  CHECK(g(1, 0) == 1.0);
  CHECK(g(0, 0) == doctest::Approx(0.99));
  CHECK(optimal_return(g.mdp) == doctest::Approx(1.0));
  CHECK_THROWS_AS(make_coordination_game(0.0), std::invalid_argument);
}

TEST_CASE("differential reward at the landmark radii") {
  CHECK(differential_reward(0.0) == doctest::Approx(1.0));
  CHECK(differential_reward(0.8) == doctest::Approx(0.3));
  CHECK(std::abs(differential_reward(0.25)) <= 1e-15);
  CHECK(differential_reward(0.4) == 0.0);
  CHECK(differential_reward(1.5) == 0.0);
  CHECK_THROWS_AS(differential_reward(-0.1), std::invalid_argument);
}

TEST_CASE("differential reward follows the piecewise formula") {
  const double pi = std::numbers::pi;
  for (double l = 0.0; l <= 1.2; l += 0.01) {
    double expected = 0.0;
    if (l <= 0.25)
      expected = 0.5 * std::cos(4 * l * pi) + 0.5;
    else if (l > 0.6 && l <= 1.0)
      expected = 0.15 * std::cos(5 * pi * (l - 0.8)) + 0.15;
    CHECK(differential_reward(l) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("differential reward is continuous on a fine grid") {
  // Steepest slope is 2*pi near l = 0.125, so steps of 1e-4 move r by < 1e-3.
  double prev = differential_reward(0.0);
  for (int k = 1; k <= 15000; ++k) {
    const double r = differential_reward(k * 1e-4);
    CHECK(std::abs(r - prev) < 1e-3);
    prev = r;
  }
}

TEST_CASE("kinematics without flips move by 0.1 a") {
  DifferentialGameConfig cfg;
  cfg.beta = 0.0;
  Rng rng(1);
  const std::vector<std::size_t> plus{8, 8, 8};
  auto out = differential_step(cfg, {0.0, 0.0, 0.0}, plus, rng);
  for (double x : out.positions) CHECK(x == doctest::Approx(0.1));
  CHECK(out.reward == doctest::Approx(differential_reward(differential_radius(out.positions))));

  const std::vector<std::size_t> minus{0, 4, 8};
  out = differential_step(cfg, {-0.95, 0.3, 0.95}, minus, rng);
  CHECK(out.positions[0] == -1.0);
  CHECK(out.positions[1] == doctest::Approx(0.3));
  CHECK(out.positions[2] == 1.0);
}

TEST_CASE("certain flips negate the positions") {
  DifferentialGameConfig cfg;
  cfg.beta = 1.0;
  Rng rng(2);
  Positions x{0.3, -0.7, 0.1};
  const std::vector<std::size_t> a{8, 0, 3};
  for (int t = 0; t < 5; ++t) {
    const auto out = differential_step(cfg, x, a, rng);
    for (std::size_t i = 0; i < 3; ++i) CHECK(out.positions[i] == -x[i]);
    x = out.positions;
  }
}

TEST_CASE("flip frequency matches beta per agent") {
  DifferentialGameConfig cfg;
  cfg.beta = 0.5;
  Rng rng(3);
  const Positions x{0.5, 0.5, 0.5};
  const std::vector<std::size_t> still{4, 4, 4};  // action value 0
  const int n = 100000;
  std::array<int, 3> flips{};
  for (int k = 0; k < n; ++k) {
    const auto out = differential_step(cfg, x, still, rng);
    for (std::size_t i = 0; i < 3; ++i) flips[i] += out.positions[i] < 0.0;
  }
  for (int f : flips) CHECK(std::abs(f / static_cast<double>(n) - 0.5) <= 0.01);
}

TEST_CASE("positions stay in [-1, 1] under random play") {
  DifferentialGameConfig cfg;
  DifferentialGameEnv env(cfg);
  Rng rng(4);
  env.reset(rng);
  for (int t = 0; t < 5000; ++t) {
    const std::vector<std::size_t> a{rng.index(9), rng.index(9), rng.index(9)};
    const auto step = env.step(a, rng);
    REQUIRE(step.features.size() == 3);
    for (double x : step.features) {
      CHECK(x >= -1.0);
      CHECK(x <= 1.0);
    }
    CHECK(step.reward >= 0.0);
    CHECK(step.reward <= 1.0);
  }
}

TEST_CASE("discrete actions are evenly spaced over [-1, 1]") {
  DifferentialGameConfig cfg;
  CHECK(differential_action_value(cfg, 0) == -1.0);
  CHECK(differential_action_value(cfg, 4) == 0.0);
  CHECK(differential_action_value(cfg, 8) == 1.0);
  CHECK(differential_action_value(cfg, 6) == doctest::Approx(0.5));
  CHECK_THROWS(differential_action_value(cfg, 9));
}

TEST_CASE("shaping bonus is positive, bounded and seeded") {
  const auto g = generate_random_game(2, 6, 2, 0.9, 3);
  const double eps = 0.01;
  const auto b = shaping_bonus(g, eps, 42);
  CHECK(b.size() == 36);
  for (double v : b) {
    CHECK(v > 0.0);
    CHECK(v <= (1.0 - 0.9) * eps);
  }
  CHECK(b == shaping_bonus(g, eps, 42));
  CHECK(b != shaping_bonus(g, eps, 43));
  CHECK_THROWS_AS(shaping_bonus(g, 0.0, 1), std::invalid_argument);

  const auto shaped = wrap_shaped_reward(g, eps, 42);
  for (std::size_t k = 0; k < b.size(); ++k)
    CHECK(shaped.reward_table()[k] == g.reward_table()[k] + b[k]);
  CHECK(shaped.transition_tensor() == g.transition_tensor());
}

TEST_CASE("the shaped-optimal policy loses at most eps on the original reward") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto g = generate_random_game(2, 5, 2, 0.9, 500 + seed);
    for (double eps : {0.01, 0.5, 5.0}) {
      const auto shaped = wrap_shaped_reward(g, eps, seed);
      const auto prof = greedy_joint_profile(shaped, joint_value_iteration(shaped).q);
      CHECK(evaluate_joint_policy(g, prof) >= optimal_return(g) - eps - 1e-9);
    }
  }
}

TEST_CASE("tiny shaping keeps the argmax of games with a clear unique optimum") {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 40 && checked < 5; ++seed) {
    const auto g = generate_random_game(2, 4, 2, 0.9, 700 + seed);
    const auto q = joint_value_iteration(g).q;
    const double eps = 1e-4;
    if (!has_unique_optimum(q, 2 * eps)) continue;
    ++checked;
    const auto shaped = wrap_shaped_reward(g, eps, seed);
    CHECK(greedy_joint_profile(shaped, joint_value_iteration(shaped).q).actions ==
          greedy_joint_profile(g, q).actions);
  }
  CHECK(checked == 5);
}

TEST_CASE("shaping breaks the tie of the coordination game") {
  const auto g = make_coordination_game(0.01);
  int off_diagonal = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto shaped = wrap_shaped_reward(g.mdp, 0.01, seed);
    const auto p0 = exact_best_possible_iteration(shaped, 0).q;
    const auto p1 = exact_best_possible_iteration(shaped, 1).q;
    const std::size_t a0 = p0.greedy(0), a1 = p1.greedy(0);
    off_diagonal += a0 != a1;
  }
  CHECK(off_diagonal == 20);
}

TEST_CASE("environments expose their features") {
  auto mdp = std::make_shared<const JointMDP>(generate_random_game(2, 4, 3, 0.9, 1));
  MdpEnv env(mdp, 10);
  Rng rng(5);
  const auto f = env.reset(rng);
  CHECK(f.size() == 4);
  CHECK(std::count(f.begin(), f.end(), 1.0) == 1);
  CHECK(f[env.state()] == 1.0);
  const std::vector<std::size_t> a{0, 2};
  const auto step = env.step(a, rng);
  CHECK(step.features[env.state()] == 1.0);
  CHECK(env.n_actions(1) == 3);
  CHECK_THROWS(MdpEnv(mdp, 0));
  CHECK(env.clone()->feature_dim() == 4);
}

TEST_CASE("trace CSV has one row per step") {
  std::vector<DifferentialTraceRow> rows{{0, {0.1, 0.2, 0.3}, {1, 2, 3}, 0.5},
                                         {1, {-0.1, 0.0, 1.0}, {0, 0, 8}, 0.0}};
  std::ostringstream os;
  write_differential_trace(os, rows);
  CHECK(os.str() == "t,x1,x2,x3,a1,a2,a3,r\n0,0.1,0.2,0.3,1,2,3,0.5\n1,-0.1,0,1,0,0,8,0\n");
}
