import math

import pytest

import bql


def test_one_stage_game_optimum_is_eight():
    sol = bql.solve(bql.one_stage_game())
    assert sol["converged"]
    assert sol["optimal_return"] == pytest.approx(8.0)


def test_best_possible_iteration_reaches_the_projection():
    game = bql.random_game(2, 4, 2, 0.9, 5)
    for agent in range(2):
        out = bql.best_possible(game, agent)
        assert out["converged"]
        q, ref = out["q"]["values"], out["reference"]["values"]
        assert max(abs(a - b) for a, b in zip(q, ref)) <= 1e-6
        d = out["distance_to_ref"]
        assert all(d[k] <= 0.9 * d[k - 1] + 1e-9 for k in range(1, len(d)))


def test_random_games_are_seeded():
    assert bql.random_game(2, 3, 2, 0.9, 1) == bql.random_game(2, 3, 2, 0.9, 1)
    assert bql.random_game(2, 3, 2, 0.9, 1) != bql.random_game(2, 3, 2, 0.9, 2)


def test_derive_seed_separates_streams():
    assert bql.derive_seed(0, [1, 2]) == bql.derive_seed(0, [1, 2])
    assert bql.derive_seed(0, [1, 2]) != bql.derive_seed(0, [2, 1])


def test_differential_reward_landmarks():
    assert bql.differential_reward(0.0) == pytest.approx(1.0)
    assert bql.differential_reward(0.8) == pytest.approx(0.3)
    assert bql.differential_reward(0.5) == 0.0


def test_small_experiment_and_config_errors():
    cfg = {
        "learner": "iql",
        "env": {"kind": "random", "n_agents": 2, "n_states": 3, "n_actions": 2, "gamma": 0.9},
        "n_games": 1,
        "n_seeds": 2,
        "params": {"total_steps": 2000},
        "eval_every": 500,
    }
    rep = bql.run_experiment(cfg)
    assert rep["learner"] == "iql"
    assert [r["step"] for r in rep["rows"]] == [500, 1000, 1500, 2000]
    assert all(r["mean_normalized"] <= 1.0 + 1e-9 for r in rep["rows"])
    assert rep == bql.run_experiment(cfg)
    assert "bql" in bql.registered_learners()
    assert bql.preset("desk")["n_games"] == 10
    with pytest.raises(bql.ConfigError):
        bql.run_experiment({**cfg, "learner": "vdn"})
    with pytest.raises(ValueError):
        bql.preset("huge")
    assert math.isfinite(rep["rows"][-1]["mean_return"])
