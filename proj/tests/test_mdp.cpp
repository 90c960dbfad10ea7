#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>
#include <vector>

#include "bql/mdp.hpp"

using namespace bql;

namespace {

// 2 states, two agents with two actions each; every joint action has its own
// row so slice selection is observable.
JointMDP hand_game() {
  // clang-format off
  std::vector<double> t = {
    // state 0: joint (0,0) (0,1) (1,0) (1,1)
    0.9, 0.1,  0.2, 0.8,  0.5, 0.5,  0.0, 1.0,
    // state 1
    0.3, 0.7,  1.0, 0.0,  0.6, 0.4,  0.25, 0.75,
  };
  // clang-format on
  return JointMDP(2, {2, 2}, t, {0.0, 1.0, 0.5, 0.25}, 0.9, {0.5, 0.5}, 0.0, 1.0);
}

double row_sum(std::span<const double> row) {
  double s = 0.0;
  for (double p : row) s += p;
  return s;
}

}  // namespace

TEST_CASE("codec round-trips every joint action up to 4 agents x 4 actions") {
  for (std::size_t n = 1; n <= 4; ++n)
    for (std::size_t k = 1; k <= 4; ++k) {
      JointActionCodec codec(std::vector<std::size_t>(n, k));
      std::size_t expected = 1;
      for (std::size_t i = 0; i < n; ++i) expected *= k;
      REQUIRE(codec.n_joint() == expected);
      for (std::size_t a = 0; a < codec.n_joint(); ++a) {
        const auto d = codec.decode(a);
        REQUIRE(codec.encode(d) == a);
        for (std::size_t i = 0; i < n; ++i) REQUIRE(codec.action_of(a, i) == d[i]);
      }
    }
}

TEST_CASE("codec puts agent 0 in the most significant digit") {
  JointActionCodec codec({2, 3, 4});
  const std::vector<std::size_t> a{1, 2, 3};
  CHECK(codec.encode(a) == 1 * 12 + 2 * 4 + 3);
  CHECK(codec.n_others(1) == 8);
}

TEST_CASE("compose rebuilds the joint index from own action and the others' index") {
  JointActionCodec codec({2, 3, 2});
  for (std::size_t agent = 0; agent < 3; ++agent)
    for (std::size_t own = 0; own < codec.n_actions(agent); ++own) {
      std::set<std::size_t> seen;
      for (std::size_t o = 0; o < codec.n_others(agent); ++o) {
        const std::size_t j = codec.compose(agent, own, o);
        CHECK(codec.action_of(j, agent) == own);
        seen.insert(j);
      }
      CHECK(seen.size() == codec.n_others(agent));
    }
}

TEST_CASE("codec rejects out-of-range actions") {
  JointActionCodec codec({2, 2});
  const std::vector<std::size_t> bad{0, 2};
  CHECK_THROWS(codec.encode(bad));
  CHECK_THROWS(codec.decode(4));
}

TEST_CASE("4-agent 4-action generator has 256 joint actions") {
  const auto g = generate_random_game(4, 30, 4, 0.99, 7);
  CHECK(g.n_joint_actions() == 256);
  CHECK(g.n_states() == 30);
}

TEST_CASE("single-state single-action game has the row [1.0]") {
  const auto g = generate_random_game(1, 1, 1, 0.0, 0);
  REQUIRE(g.transition_row(0, 0).size() == 1);
  CHECK(g.transition_row(0, 0)[0] == 1.0);
}

TEST_CASE("generator is a deterministic function of the seed") {
  CHECK(generate_random_game(3, 5, 2, 0.9, 11) == generate_random_game(3, 5, 2, 0.9, 11));
  CHECK_FALSE(generate_random_game(3, 5, 2, 0.9, 11) == generate_random_game(3, 5, 2, 0.9, 12));
}

TEST_CASE("generated games satisfy the model invariants") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = generate_random_game(1 + seed % 3, 1 + seed % 7, 1 + seed % 3, 0.9, seed);
    for (std::size_t s = 0; s < g.n_states(); ++s)
      for (std::size_t a = 0; a < g.n_joint_actions(); ++a) {
        const auto row = g.transition_row(s, a);
        CHECK(std::abs(row_sum(row) - 1.0) <= 1e-9);
        for (double p : row) CHECK(p >= 0.0);
      }
    for (double r : g.reward_table()) {
      CHECK(r >= g.r_min());
      CHECK(r <= g.r_max());
      CHECK(r >= 0.0);
      CHECK(r <= 1.0);
    }
    for (double p : g.initial_distribution())
      CHECK(p == doctest::Approx(1.0 / static_cast<double>(g.n_states())));
  }
}

TEST_CASE("deterministic generator collapses every row") {
  const auto g = generate_deterministic_game(2, 6, 3, 0.9, 5);
  CHECK(g.is_deterministic());
  CHECK_FALSE(generate_random_game(2, 6, 3, 0.9, 5).is_deterministic());
}

TEST_CASE("generator rejects invalid arguments") {
  CHECK_THROWS_AS(generate_random_game(0, 3, 2, 0.9, 0), std::invalid_argument);
  CHECK_THROWS_AS(generate_random_game(2, 0, 2, 0.9, 0), std::invalid_argument);
  CHECK_THROWS_AS(generate_random_game(2, 3, 0, 0.9, 0), std::invalid_argument);
  CHECK_THROWS_AS(generate_random_game(2, 3, 2, 1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(generate_random_game(2, 3, 2, -0.1, 0), std::invalid_argument);
}

TEST_CASE("constructor rejects broken tables") {
  CHECK_THROWS_AS(JointMDP(1, {1}, {0.5}, {0.0}, 0.5, {1.0}, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(JointMDP(1, {1}, {1.0}, {2.0}, 0.5, {1.0}, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(JointMDP(1, {1}, {1.0}, {0.0}, 0.5, {0.9}, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(JointMDP(2, {1}, {1.0, 0.0, -0.5, 1.5}, {0.0, 0.0, 0.0, 0.0}, 0.5, {1.0, 0.0},
                           0.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("induced transition with a one-action partner is the environment slice") {
  // A single-agent tensor reinterpreted with a one-action second agent.
  const auto h = generate_random_game(1, 4, 3, 0.9, 3);
  const JointMDP g2(4, {3, 1}, h.transition_tensor(), h.reward_table(), 0.9,
                    h.initial_distribution(), h.r_min(), h.r_max());
  DeterministicPolicyProfile prof{{std::vector<std::size_t>(4, 0), std::vector<std::size_t>(4, 0)}};
  const auto p = induced_transition(g2, 0, prof);
  for (std::size_t s = 0; s < 4; ++s)
    for (std::size_t a = 0; a < 3; ++a) {
      const auto row = p.row(s, a);
      const auto env = g2.transition_row(s, a);
      for (std::size_t k = 0; k < 4; ++k) CHECK(row[k] == env[k]);
    }
}

TEST_CASE("induced transition matches a brute-force sum over the partner's actions") {
  const auto g = hand_game();
  for (std::size_t a2_s0 = 0; a2_s0 < 2; ++a2_s0)
    for (std::size_t a2_s1 = 0; a2_s1 < 2; ++a2_s1) {
      const std::vector<std::size_t> pi2{a2_s0, a2_s1};
      DeterministicPolicyProfile prof{{{0, 0}, pi2}};
      const auto p = induced_transition(g, 0, prof);
      for (std::size_t s = 0; s < 2; ++s)
        for (std::size_t a1 = 0; a1 < 2; ++a1)
          for (std::size_t sn = 0; sn < 2; ++sn) {
            double expected = 0.0;
            for (std::size_t a2 = 0; a2 < 2; ++a2) {
              const double indicator = a2 == pi2[s] ? 1.0 : 0.0;
              expected += indicator * g.transition(s, a1 * 2 + a2, sn);
            }
            CHECK(p.row(s, a1)[sn] == doctest::Approx(expected).epsilon(1e-15));
          }
    }
  // Agent 1's view selects along the other digit.
  DeterministicPolicyProfile prof{{{1, 0}, {0, 0}}};
  const auto p = induced_transition(g, 1, prof);
  CHECK(p.row(0, 1)[1] == doctest::Approx(1.0));   // joint (1,1) in state 0
  CHECK(p.row(1, 0)[0] == doctest::Approx(0.3));   // joint (0,0) in state 1
}

TEST_CASE("mixture weights give the convex combination of slices") {
  const auto g = hand_game();
  const std::vector<std::vector<double>> w{{0.25, 0.75}, {0.6, 0.4}};
  const auto p = induced_transition(g, 0, w);
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t a1 = 0; a1 < 2; ++a1) {
      double total = 0.0;
      for (std::size_t sn = 0; sn < 2; ++sn) {
        const double expected =
            w[s][0] * g.transition(s, a1 * 2, sn) + w[s][1] * g.transition(s, a1 * 2 + 1, sn);
        CHECK(p.row(s, a1)[sn] == doctest::Approx(expected).epsilon(1e-15));
        total += p.row(s, a1)[sn];
      }
      CHECK(std::abs(total - 1.0) <= 1e-9);
    }
}

TEST_CASE("deterministic partners induce at most |A_-i| distinct rows per pair") {
  const auto g = generate_random_game(3, 2, 2, 0.9, 21);
  const std::size_t agent = 1;
  // Every deterministic profile of agents 0 and 2 over two states: 2^2 * 2^2.
  std::vector<std::set<std::vector<double>>> rows(g.n_states() * 2);
  for (std::size_t m0 = 0; m0 < 4; ++m0)
    for (std::size_t m2 = 0; m2 < 4; ++m2) {
      DeterministicPolicyProfile prof{{{m0 & 1, (m0 >> 1) & 1}, {0, 0}, {m2 & 1, (m2 >> 1) & 1}}};
      const auto p = induced_transition(g, agent, prof);
      for (std::size_t s = 0; s < g.n_states(); ++s)
        for (std::size_t a = 0; a < 2; ++a) {
          const auto r = p.row(s, a);
          rows[s * 2 + a].insert(std::vector<double>(r.begin(), r.end()));
          CHECK(std::abs(row_sum(r) - 1.0) <= 1e-9);
        }
    }
  for (const auto& distinct : rows) CHECK(distinct.size() <= g.codec().n_others(agent));
}

TEST_CASE("sample_step follows a deterministic row") {
  const JointMDP g(3, {1}, {0, 1, 0, 0, 0, 1, 1, 0, 0}, {0, 0.5, 0, 0, 0, 1, 0.25, 0, 0}, 0.5,
                   {1.0, 0.0, 0.0}, 0.0, 1.0);
  Rng rng(1);
  for (int k = 0; k < 100; ++k) {
    const auto out = sample_step(g, 0, 0, rng);
    CHECK(out.next_state == 1);
    CHECK(out.reward == 0.5);
  }
}

TEST_CASE("sample_step frequencies follow the row") {
  const JointMDP g(2, {1}, {0.5, 0.5, 0.5, 0.5}, {0, 1, 0, 1}, 0.5, {0.5, 0.5}, 0.0, 1.0);
  Rng rng(2);
  const int n = 100000;
  int ones = 0;
  for (int k = 0; k < n; ++k) ones += sample_step(g, 0, 0, rng).next_state == 1;
  CHECK(std::abs(ones / static_cast<double>(n) - 0.5) <= 0.01);
}

TEST_CASE("single-state game always stays put") {
  const auto g = generate_random_game(2, 1, 3, 0.5, 4);
  Rng rng(3);
  for (int k = 0; k < 200; ++k) CHECK(sample_step(g, 0, k % 9, rng).next_state == 0);
}

TEST_CASE("per-agent action form agrees with the flat form") {
  const auto g = generate_random_game(3, 4, 2, 0.9, 8);
  const std::vector<std::size_t> acts{1, 0, 1};
  Rng r1(9), r2(9);
  for (int k = 0; k < 50; ++k) {
    const auto a = sample_step(g, 2, acts, r1);
    const auto b = sample_step(g, 2, g.codec().encode(acts), r2);
    CHECK(a.next_state == b.next_state);
    CHECK(a.reward == b.reward);
  }
}

TEST_CASE("validate_profile rejects invalid actions") {
  const auto g = hand_game();
  CHECK_NOTHROW(validate_profile(g, {{{0, 1}, {1, 0}}}));
  CHECK_THROWS(validate_profile(g, {{{0, 2}, {1, 0}}}));
  CHECK_THROWS(validate_profile(g, {{{0, 1}}}));
}

TEST_CASE("game JSON round-trips exactly") {
  const auto g = generate_random_game(2, 5, 3, 0.95, 99);
  const auto j = to_json(g);
  CHECK(j.contains("transition"));
  CHECK(j.contains("actions_per_agent"));
  const auto back = game_from_json(nlohmann::json::parse(j.dump()));
  CHECK(back == g);
}

TEST_CASE("malformed game JSON is rejected") {
  auto j = to_json(hand_game());
  j["gamma"] = 1.5;
  CHECK_THROWS_AS(game_from_json(j), std::invalid_argument);
  auto k = to_json(hand_game());
  k.erase("reward");
  CHECK_THROWS_AS(game_from_json(k), std::invalid_argument);
}
