"""Python access to the best possible Q-learning core."""

import json

from . import _core
from ._core import ConfigError, OracleError, derive_seed, differential_reward, registered_learners

__all__ = [
    "ConfigError",
    "OracleError",
    "best_possible",
    "derive_seed",
    "differential_reward",
    "one_stage_game",
    "preset",
    "random_game",
    "registered_learners",
    "run_experiment",
    "solve",
]


def random_game(n_agents, n_states, n_actions, gamma, seed):
    """Random joint MDP as a JSON-compatible dict."""
    return json.loads(_core.random_game(n_agents, n_states, n_actions, gamma, seed))


def one_stage_game():
    return json.loads(_core.one_stage_game())


def solve(game):
    """Joint value iteration: optimal Q table and optimal return."""
    return json.loads(_core.solve(json.dumps(game)))


def best_possible(game, agent):
    """Exact best possible iteration for one agent, with its projected reference."""
    return json.loads(_core.best_possible(json.dumps(game), agent))


def preset(name):
    return json.loads(_core.preset(name))


def run_experiment(config):
    """Runs every (game, seed) cell and returns the aggregate curve."""
    return json.loads(_core.run_experiment(json.dumps(config)))
