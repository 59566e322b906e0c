"""Builders for the bundled games: the two-team Myerson example and the Tullock team contest."""

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy import integrate

from .errors import ConfigError
from .model import GameSpec, MechanismZ, mechanism_from_kernels, uniform_mechanism
from .spaces import FiniteSpace, Kernel, ProductIndex

MYERSON = "myerson"
TULLOCK_CONTEST = "tullock_contest"

THETA_A, THETA_B = "theta_A", "theta_B"

# alpha(a' | t') rows for reports (theta_A, theta_B) over actions (A, B, C)
MYERSON_MECHANISMS: Dict[str, List[List[float]]] = {
    'C': [[0.0, 0.0, 1.0], [0.0, 0.0, 1.0]],
    'match': [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
    'mismatch': [[0.0, 1.0, 0.0], [1.0, 0.0, 0.0]],
    'A': [[1.0, 0.0, 0.0], [1.0, 0.0, 0.0]],
    'B': [[0.0, 1.0, 0.0], [0.0, 1.0, 0.0]],
}


@dataclass(frozen=True)
class MyersonParams:
    """Payoff constants of the Myerson example (fixed defaults)."""
    theta_a_probability: float = 0.5
    matched_payoff: float = 6.0
    safe_payoff: float = 5.0
    boosted_payoff: float = 2.0


def myerson_scenario(params: Optional[MyersonParams] = None) -> GameSpec:
    """Two single-member teams whose principals choose the action after the report.

    A member of true type theta_A earns 1 from A, z_j from B and 0 from C
    (theta_B mirrors this with A and B swapped). z_1 is boosted when team 2
    plays A or B; z_2 is boosted when team 1 plays C. Principals earn the
    matched payoff for the action matching the member's type, 0 for the
    other one, and the safe payoff for C.
    """
    params = params or MyersonParams()
    types = FiniteSpace.categorical('types', [THETA_A, THETA_B])
    actions = FiniteSpace.categorical('actions', ['A', 'B', 'C'])
    winnings = FiniteSpace.categorical('winnings', ['none'])
    rewards = FiniteSpace.categorical('rewards', ['none'])

    p = params.theta_a_probability
    marginal = np.array([p, 1.0 - p])
    prior = np.outer(marginal, marginal)

    matched = {0: 0, 1: 1}
    member = np.zeros((2, 2, 2, 3, 3))
    principal = np.zeros((2, 2, 2, 3, 3))
    for t1, t2, a1, a2 in itertools.product(range(2), range(2), range(3), range(3)):
        boost = (
            params.boosted_payoff if a2 in (0, 1) else 1.0,
            params.boosted_payoff if a1 == 2 else 1.0,
        )
        for team, (t, a) in enumerate(((t1, a1), (t2, a2))):
            if a == 2:
                member[team, t1, t2, a1, a2] = 0.0
                principal[team, t1, t2, a1, a2] = params.safe_payoff
            elif a == matched[t]:
                member[team, t1, t2, a1, a2] = 1.0
                principal[team, t1, t2, a1, a2] = params.matched_payoff
            else:
                member[team, t1, t2, a1, a2] = boost[team]
                principal[team, t1, t2, a1, a2] = 0.0

    return GameSpec(
        name=MYERSON,
        n_teams=2,
        team_size=1,
        types=types,
        actions=actions,
        winnings=winnings,
        rewards=rewards,
        prior=prior,
        winnings_kernel=np.ones(4 * 9),
        feasible_rewards=np.ones((1, 1), dtype=bool),
        member_utility=member,
        principal_utility=principal,
        obedience_enforced=True,
        notes={'model': MYERSON},
    )


def myerson_mechanism(spec: GameSpec, team: int, name: str) -> MechanismZ:
    """One of the named Myerson mechanisms (C, match, mismatch, A, B)."""
    if name not in MYERSON_MECHANISMS:
        raise ConfigError('init', f"unknown Myerson mechanism {name!r}; "
                                  f"expected one of {sorted(MYERSON_MECHANISMS)}")
    return mechanism_from_kernels(spec, team, MYERSON_MECHANISMS[name])


def mechanism_name(spec: GameSpec, mechanism: MechanismZ, tol: float = 1e-9) -> Optional[str]:
    """Name of a bundled mechanism whose recommendations match, if any."""
    if spec.notes.get('model') != MYERSON:
        return None
    alpha = mechanism.action_marginal(spec)
    for name, table in MYERSON_MECHANISMS.items():
        if np.abs(alpha - np.asarray(table)).max() <= tol:
            return name
    return None


def preset_profile(spec: GameSpec, preset: str) -> List[MechanismZ]:
    """Profile from a preset such as ``C_C``, ``match_C`` or ``uniform``.

    Names are joined by underscores, one per team; ``uniform`` alone applies
    to every team.
    """
    names = [preset] * spec.n_teams if preset == 'uniform' else preset.split('_')
    if len(names) != spec.n_teams:
        raise ConfigError('init', f"preset {preset!r} names {len(names)} mechanisms "
                                  f"for {spec.n_teams} teams")
    profile = []
    for team, name in enumerate(names):
        if name == 'uniform':
            profile.append(uniform_mechanism(spec, team))
        elif spec.notes.get('model') == MYERSON:
            profile.append(myerson_mechanism(spec, team, name))
        else:
            raise ConfigError('init', f"unknown preset mechanism {name!r} for game {spec.name!r}")
    return profile


# -- Tullock contest ------------------------------------------------------------


@dataclass(frozen=True)
class ContestParams:
    """Grids and costs of the team contest.

    Team j's score is s_j = sum_i t_ij * a_ij; member utility is
    r - cost * a / t and each principal values winning at 1.
    """
    n_teams: int = 2
    team_size: int = 1
    type_low: float = 1.0
    type_high: float = 2.0
    type_points: int = 2
    action_low: float = 0.5
    action_high: float = 1.0
    action_points: int = 2
    cost: float = 0.5
    reward_steps: int = 4
    type_weights: Optional[Sequence[float]] = None

    def __post_init__(self):
        if self.n_teams < 1 or self.team_size < 1:
            raise ValueError("A contest needs at least one team with one member")
        if not 0 < self.type_low < self.type_high:
            raise ValueError(f"Type grid needs 0 < low < high, got [{self.type_low}, {self.type_high}]")
        if not 0 < self.action_low < self.action_high:
            raise ValueError(
                f"Action grid needs 0 < low < high, got [{self.action_low}, {self.action_high}]")
        if self.type_points < 2 or self.action_points < 2:
            raise ValueError("Type and action grids need at least two points")
        if self.cost <= 0:
            raise ValueError(f"Cost coefficient must be positive, got {self.cost}")
        if self.reward_steps < 1:
            raise ValueError(f"Reward grid needs at least one step, got {self.reward_steps}")
        if self.type_weights is not None:
            weights = np.asarray(self.type_weights, dtype=float)
            if weights.shape != (self.type_points,) or np.any(weights < 0) or weights.sum() <= 0:
                raise ValueError(
                    f"type_weights must be {self.type_points} nonnegative numbers with positive sum")
            object.__setattr__(self, 'type_weights', tuple(float(w) for w in weights))

    @property
    def type_values(self) -> np.ndarray:
        return np.linspace(self.type_low, self.type_high, self.type_points)

    @property
    def action_values(self) -> np.ndarray:
        return np.linspace(self.action_low, self.action_high, self.action_points)

    @property
    def reward_values(self) -> np.ndarray:
        return np.arange(self.reward_steps + 1) / self.reward_steps

    @property
    def n_agents(self) -> int:
        return self.n_teams * self.team_size


def tullock_probabilities(scores: Sequence[float]) -> List[Fraction]:
    """Ratio-form contest success function s_j / sum(s), in exact arithmetic.

    Raises:
        ValueError: If a score is negative or all scores are zero
    """
    exact = [Fraction(float(s)) for s in scores]
    if any(s < 0 for s in exact):
        raise ValueError(f"Scores must be nonnegative, got {list(scores)}")
    total = sum(exact, Fraction(0))
    if total == 0:
        raise ValueError("Total score is zero; the contest success function is undefined")
    return [s / total for s in exact]


def winner_probability_integral(params: Optional[ContestParams], scores: Sequence[float],
                                epsabs: float = 1e-10) -> np.ndarray:
    """Win probabilities from the power-function output model by quadrature.

    With F_j(x) = x^{s_j}, team j wins with probability
    int_0^1 prod_{k != j} x^{s_k} d(x^{s_j}); substituting u = x^{s_j}
    gives int_0^1 u^{S_{-j} / s_j} du.
    """
    del params
    scores = np.asarray(scores, dtype=float)
    if np.any(scores <= 0):
        raise ValueError(f"Scores must be positive, got {scores.tolist()}")
    total = scores.sum()
    results = []
    for score in scores:
        exponent = (total - score) / score
        value, _ = integrate.quad(lambda u: u ** exponent, 0.0, 1.0, epsabs=epsabs)
        results.append(value)
    return np.array(results)


def _team_scores(params: ContestParams, types: Sequence[float], actions: Sequence[float]) -> List[float]:
    n = params.team_size
    return [
        sum(types[j * n + i] * actions[j * n + i] for i in range(n))
        for j in range(params.n_teams)
    ]


def tullock_winnings(params: ContestParams) -> Kernel:
    """Winnings kernel: exactly one team wins, team j with probability s_j / sum(s)."""
    k, teams = params.n_agents, params.n_teams
    type_space = FiniteSpace.grid('types', params.type_values)
    action_space = FiniteSpace.grid('actions', params.action_values)
    win_space = FiniteSpace.grid('winnings', [0.0, 1.0])
    tensor = np.zeros((params.type_points,) * k + (params.action_points,) * k + (2,) * teams)
    for t_idx in itertools.product(range(params.type_points), repeat=k):
        types = [params.type_values[t] for t in t_idx]
        for a_idx in itertools.product(range(params.action_points), repeat=k):
            actions = [params.action_values[a] for a in a_idx]
            for winner, probability in enumerate(tullock_probabilities(_team_scores(params, types, actions))):
                one_hot = tuple(1 if j == winner else 0 for j in range(teams))
                tensor[t_idx + a_idx + one_hot] = float(probability)
    return Kernel(
        source=ProductIndex([type_space] * k + [action_space] * k),
        target=ProductIndex([win_space] * teams),
        rows=tensor.reshape(-1, 2 ** teams),
    )


def _axis_values(values: np.ndarray, axis: int, ndim: int) -> np.ndarray:
    shape = [1] * ndim
    shape[axis] = len(values)
    return np.asarray(values, dtype=float).reshape(shape)


def contest_scenario(params: Optional[ContestParams] = None) -> GameSpec:
    """Team contest with ratio-form winner selection and budget-balanced prizes.

    Rewards are only paid to the winning team: feasible_rewards(w) is the
    set of reward profiles on the grid with sum_i r_i <= w.
    """
    params = params or ContestParams()
    k, n, teams = params.n_agents, params.team_size, params.n_teams
    types = FiniteSpace.grid('types', params.type_values)
    actions = FiniteSpace.grid('actions', params.action_values)
    winnings = FiniteSpace.grid('winnings', [0.0, 1.0])
    rewards = FiniteSpace.grid('rewards', params.reward_values)

    weights = np.asarray(params.type_weights or np.ones(params.type_points), dtype=float)
    weights = weights / weights.sum()
    prior = weights
    for _ in range(k - 1):
        prior = np.multiply.outer(prior, weights)

    ndim = 2 * k + teams + n
    member = np.empty((k,) + (len(types),) * k + (len(actions),) * k + (2,) * teams + (len(rewards),) * n)
    for position in range(k):
        own = position % n
        t = _axis_values(params.type_values, position, ndim)
        a = _axis_values(params.action_values, k + position, ndim)
        r = _axis_values(params.reward_values, 2 * k + teams + own, ndim)
        member[position] = np.broadcast_to(r - params.cost * a / t, member.shape[1:])

    principal = np.empty((teams,) + (len(types),) * k + (len(actions),) * k + (2,) * teams)
    for team in range(teams):
        w = _axis_values(winnings.values, 2 * k + team, 2 * k + teams)
        principal[team] = np.broadcast_to(w, principal.shape[1:])

    reward_profiles = np.array(list(itertools.product(params.reward_values, repeat=n)))
    totals = reward_profiles.sum(axis=1)
    feasible = np.array([totals <= w + 1e-12 for w in winnings.values])

    return GameSpec(
        name=TULLOCK_CONTEST,
        n_teams=teams,
        team_size=n,
        types=types,
        actions=actions,
        winnings=winnings,
        rewards=rewards,
        prior=prior,
        winnings_kernel=tullock_winnings(params).rows,
        feasible_rewards=feasible,
        member_utility=member,
        principal_utility=principal,
        obedience_enforced=False,
        notes={
            'model': TULLOCK_CONTEST,
            'defaults': 'grids, cost and prior are configuration, not calibrated values',
        },
    )
