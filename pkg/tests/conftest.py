"""Shared fixtures: bundled games, small random games and a brute-force Prokhorov oracle."""

import itertools
from fractions import Fraction

import numpy as np
import pytest

from teamgame.metrics import DISTANCE_SLACK
from teamgame.model import GameSpec, mechanism_from_kernels
from teamgame.scenarios import contest_scenario, myerson_scenario, preset_profile
from teamgame.settings import (
    CELL_CAP_ENV,
    DEFAULT_CELL_CAP,
    DEFAULT_GENERATOR_CAP,
    GENERATOR_CAP_ENV,
    LEDGER_ENV,
)
from teamgame.spaces import FiniteDistribution, FiniteSpace

DENOMINATOR = 64


@pytest.fixture(autouse=True)
def _default_limits(monkeypatch):
    """CLI runs write the caps into os.environ; restore them after each test."""
    monkeypatch.setenv(GENERATOR_CAP_ENV, str(DEFAULT_GENERATOR_CAP))
    monkeypatch.setenv(CELL_CAP_ENV, str(DEFAULT_CELL_CAP))
    monkeypatch.setenv(LEDGER_ENV, "")


@pytest.fixture(scope="session")
def myerson():
    return myerson_scenario()


@pytest.fixture(scope="session")
def contest():
    return contest_scenario()


def named(spec, first, second):
    return preset_profile(spec, f"{first}_{second}")


# -- random games ----------------------------------------------------------------


def random_game(rng, n_types=2, n_actions=2, obedience=False, name="random", team_size=1):
    """Two teams of ``team_size`` members with categorical spaces and random tables.

    Winnings and rewards have two labels each; under w0 only the all-r0
    reward profile is feasible.
    """
    types = FiniteSpace.categorical('types', [f"t{k}" for k in range(n_types)])
    actions = FiniteSpace.categorical('actions', [f"a{k}" for k in range(n_actions)])
    winnings = FiniteSpace.categorical('winnings', ['w0', 'w1'])
    rewards = FiniteSpace.categorical('rewards', ['r0', 'r1'])
    k = 2 * team_size
    n_t, n_a, n_w, n_r = n_types ** k, n_actions ** k, 4, 2 ** team_size
    feasible = np.zeros((2, n_r), dtype=bool)
    feasible[0, 0] = True
    feasible[1, :] = True
    return GameSpec(
        name=name,
        n_teams=2,
        team_size=team_size,
        types=types,
        actions=actions,
        winnings=winnings,
        rewards=rewards,
        prior=rng.dirichlet(np.ones(n_t)),
        winnings_kernel=rng.dirichlet(np.ones(n_w), size=n_t * n_a),
        feasible_rewards=feasible,
        member_utility=rng.normal(size=(k, n_t, n_a, n_w, n_r)),
        principal_utility=rng.normal(size=(2, n_t, n_a, n_w)),
        obedience_enforced=obedience,
    )


def point_game(n_teams=1):
    """Single-member teams whose type, action, winnings and reward spaces are one point each."""
    return GameSpec(
        name="point",
        n_teams=n_teams,
        team_size=1,
        types=FiniteSpace.categorical('types', ['t']),
        actions=FiniteSpace.categorical('actions', ['a']),
        winnings=FiniteSpace.categorical('winnings', ['none']),
        rewards=FiniteSpace.categorical('rewards', ['r']),
        prior=np.ones(1),
        winnings_kernel=np.ones((1, 1)),
        feasible_rewards=np.ones((1, 1), dtype=bool),
        member_utility=np.ones((n_teams, 1, 1, 1, 1)),
        principal_utility=np.full((n_teams, 1, 1, 1), 2.0),
    )


def random_mechanism(rng, spec, team):
    """alpha and kappa with full support on the feasible rewards."""
    n_t, n_a = len(spec.team_type_index), len(spec.team_action_index)
    n_w, n_r = len(spec.winnings), len(spec.team_reward_index)
    alpha = rng.dirichlet(np.ones(n_a), size=n_t)
    kappa = np.zeros((n_t, n_a, n_w, n_r))
    for w in range(n_w):
        feasible = np.flatnonzero(spec.feasible_rewards[w])
        kappa[:, :, w, feasible] = rng.dirichlet(np.ones(len(feasible)), size=(n_t, n_a))
    return mechanism_from_kernels(spec, team, alpha, kappa)


def random_profile(rng, spec):
    return [random_mechanism(rng, spec, team) for team in range(spec.n_teams)]


# -- Prokhorov oracle ------------------------------------------------------------


def dyadic_distribution(rng, index, max_support=8):
    """Random distribution whose masses are multiples of 1/64, plus its integer counts."""
    size = int(rng.integers(1, min(max_support, len(index)) + 1))
    support = rng.choice(len(index), size=size, replace=False)
    counts = np.zeros(len(index), dtype=np.int64)
    counts[support] = rng.multinomial(DENOMINATOR - size, np.full(size, 1.0 / size)) + 1
    return FiniteDistribution(index=index, mass=counts / DENOMINATOR), counts


def prokhorov_oracle(mu_counts, nu_counts, metric):
    """min over breakpoints d of max(d, max_A [mu(A) - nu(N_d(A))]), exactly.

    A ranges over every subset of the support of mu; masses are counts over 64.
    """
    mu_support = np.flatnonzero(mu_counts)
    nu_support = np.flatnonzero(nu_counts)
    shape = metric.index.shape
    mu_points = np.array(np.unravel_index(mu_support, shape)).T
    nu_points = np.array(np.unravel_index(nu_support, shape)).T
    distances = metric.pairwise(mu_points, nu_points)

    subsets = np.array(list(itertools.product((0, 1), repeat=len(mu_support))), dtype=np.int64)
    mu_mass = subsets @ mu_counts[mu_support]
    best = None
    for d in np.unique(np.concatenate([[0.0], distances.ravel()])):
        admissible = (distances <= d + DISTANCE_SLACK).astype(np.int64)
        reached = (subsets @ admissible) > 0
        deficit = int((mu_mass - reached.astype(np.int64) @ nu_counts[nu_support]).max())
        candidate = max(Fraction(float(d)), Fraction(deficit, DENOMINATOR))
        best = candidate if best is None else min(best, candidate)
    return float(best)


# -- scenario documents ----------------------------------------------------------


def explicit_document(**overrides):
    """A one-team explicit game: two types, two actions, lose/win winnings."""
    document = {
        'name': 'tiny',
        'model': 'explicit',
        'teams': 1,
        'members': 1,
        'spaces': {
            'types': {'labels': ['lo', 'hi']},
            'actions': {'labels': ['x', 'y']},
            'winnings': {'labels': ['lose', 'win']},
            'rewards': {'grid': [0.0, 1.0]},
        },
        'winnings': {'table': [[1.0, 0.0], [0.5, 0.5], [0.5, 0.5], [0.0, 1.0]]},
        'rewards': {'sets': {'lose': [['0']], 'win': [['0'], ['1']]}},
        'utilities': {
            'member': np.zeros(2 * 2 * 2 * 2).tolist(),
            'principal': np.arange(8, dtype=float).tolist(),
        },
    }
    document.update(overrides)
    return document
