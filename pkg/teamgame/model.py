"""Game specification, mechanism coordinates and their factorization.

Array layout
------------
Agents are ordered team-major: agent ``k = team * n + member``. The baseline
outcome space X has one array axis per coordinate, in this order::

    types (one axis per agent) | actions (per agent) | winnings (per team) | rewards (per agent)

A team's mechanism table ``z`` has axes::

    reported types (per member) | recommended actions (per member) | own winnings | rewards (per member)

so ``z[t', a', w, r] = alpha(a'|t') * kappa(r|t', a', w)``.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .errors import SpecViolation
from .settings import FEASIBILITY_TOL, MASS_TOL
from .spaces import (
    FiniteDistribution,
    FiniteSpace,
    Kernel,
    ProductIndex,
    validate_kernel,
)

FINITENESS_NOTE = "satisfied by finiteness"


class Agent(NamedTuple):
    """Member ``member`` of team ``team`` (both 0-based)."""
    team: int
    member: int

    def label(self) -> str:
        return f"member {self.member + 1} of team {self.team + 1}"


@dataclass(frozen=True, eq=False)
class GameSpec:
    """The full finite game.

    Table arguments may be given flat or with one axis per coordinate; they
    are stored in the flat canonical shapes documented on each property.
    Structural mistakes (wrong sizes) raise SpecViolation here; semantic
    problems (normalization, empty reward sets, non-finite utilities) are
    reported by check_spec.
    """
    name: str
    n_teams: int
    team_size: int
    types: FiniteSpace
    actions: FiniteSpace
    winnings: FiniteSpace
    rewards: FiniteSpace
    prior: np.ndarray
    winnings_kernel: Kernel
    feasible_rewards: np.ndarray
    member_utility: np.ndarray
    principal_utility: np.ndarray
    obedience_enforced: bool = False
    notes: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.n_teams < 1 or self.team_size < 1:
            raise SpecViolation(
                f"Game {self.name!r} needs at least one team and one member per team"
            )
        n_agents = self.n_teams * self.team_size
        n_t, n_a = len(self.types) ** n_agents, len(self.actions) ** n_agents
        n_w = len(self.winnings) ** self.n_teams
        n_r = len(self.rewards) ** self.team_size

        def canonical(name, value, shape, dtype=float):
            array = np.asarray(value, dtype=dtype)
            if array.size != int(np.prod(shape)):
                raise SpecViolation(
                    f"Game {self.name!r}: {name} has {array.size} entries, expected "
                    f"{int(np.prod(shape))} for shape {shape}"
                )
            array = array.reshape(shape).copy()
            array.setflags(write=False)
            object.__setattr__(self, name, array)

        canonical('prior', self.prior, (n_t,))
        canonical('feasible_rewards', self.feasible_rewards, (len(self.winnings), n_r), dtype=bool)
        canonical('member_utility', self.member_utility, (n_agents, n_t, n_a, n_w, n_r))
        canonical('principal_utility', self.principal_utility, (self.n_teams, n_t, n_a, n_w))

        kernel = self.winnings_kernel
        if not isinstance(kernel, Kernel):
            kernel = Kernel(
                source=ProductIndex([self.types] * n_agents + [self.actions] * n_agents),
                target=ProductIndex([self.winnings] * self.n_teams),
                rows=np.asarray(kernel, dtype=float).reshape(n_t * n_a, n_w),
            )
            object.__setattr__(self, 'winnings_kernel', kernel)
        elif kernel.rows.shape != (n_t * n_a, n_w):
            raise SpecViolation(
                f"Game {self.name!r}: winnings kernel has shape {kernel.rows.shape}, "
                f"expected {(n_t * n_a, n_w)}"
            )
        object.__setattr__(self, 'notes', dict(self.notes))

    # -- sizes and indices -------------------------------------------------

    @property
    def n_agents(self) -> int:
        return self.n_teams * self.team_size

    @property
    def agents(self) -> List[Agent]:
        return [Agent(j, i) for j in range(self.n_teams) for i in range(self.team_size)]

    def agent_position(self, agent: Agent) -> int:
        team, member = agent
        if not (0 <= team < self.n_teams and 0 <= member < self.team_size):
            raise SpecViolation(f"{Agent(team, member).label()} is not part of game {self.name!r}")
        return team * self.team_size + member

    def check_team(self, team: int) -> int:
        if not 0 <= team < self.n_teams:
            raise SpecViolation(f"Team {team + 1} is not part of game {self.name!r}")
        return team

    @cached_property
    def z_shape(self) -> Tuple[int, ...]:
        n = self.team_size
        return ((len(self.types),) * n + (len(self.actions),) * n
                + (len(self.winnings),) + (len(self.rewards),) * n)

    @cached_property
    def z_index(self) -> ProductIndex:
        """Variable index of one team's mechanism, lexicographic over (t', a', w, r)."""
        n = self.team_size
        return ProductIndex([self.types] * n + [self.actions] * n + [self.winnings]
                            + [self.rewards] * n)

    @cached_property
    def team_type_index(self) -> ProductIndex:
        return ProductIndex([self.types] * self.team_size)

    @cached_property
    def team_action_index(self) -> ProductIndex:
        return ProductIndex([self.actions] * self.team_size)

    @cached_property
    def team_reward_index(self) -> ProductIndex:
        return ProductIndex([self.rewards] * self.team_size)

    @cached_property
    def outcome_index(self) -> ProductIndex:
        """Index of X = T^{nN} x A^{nN} x W^N x R^{nN}."""
        k = self.n_agents
        return ProductIndex([self.types] * k + [self.actions] * k
                            + [self.winnings] * self.n_teams + [self.rewards] * k)

    @cached_property
    def extended_index(self) -> ProductIndex:
        """Index of X~ = X x (deviator's reported type, deviator's actual action)."""
        return ProductIndex(list(self.outcome_index.spaces) + [self.types, self.actions])

    @property
    def outcome_shape(self) -> Tuple[int, ...]:
        return self.outcome_index.shape

    # -- tensors with one axis per coordinate --------------------------------

    @cached_property
    def prior_tensor(self) -> np.ndarray:
        return self.prior.reshape((len(self.types),) * self.n_agents)

    @cached_property
    def winnings_tensor(self) -> np.ndarray:
        k = self.n_agents
        return self.winnings_kernel.rows.reshape(
            (len(self.types),) * k + (len(self.actions),) * k + (len(self.winnings),) * self.n_teams
        )

    @cached_property
    def feasible_tensor(self) -> np.ndarray:
        return self.feasible_rewards.reshape((len(self.winnings),) + (len(self.rewards),) * self.team_size)

    def member_tensor(self, agent: Agent) -> np.ndarray:
        """Utility of one agent over (types, actions, winnings, own-team rewards)."""
        k = self.n_agents
        return self.member_utility[self.agent_position(agent)].reshape(
            (len(self.types),) * k + (len(self.actions),) * k
            + (len(self.winnings),) * self.n_teams + (len(self.rewards),) * self.team_size
        )

    def principal_tensor(self, team: int) -> np.ndarray:
        """Utility of one principal over (types, actions, winnings)."""
        k = self.n_agents
        return self.principal_utility[self.check_team(team)].reshape(
            (len(self.types),) * k + (len(self.actions),) * k + (len(self.winnings),) * self.n_teams
        )

    def member_table(self, agent: Agent) -> np.ndarray:
        """Agent utility broadcast over the whole outcome space X."""
        tensor = self.member_tensor(agent)
        k, n = self.n_agents, self.team_size
        head = tensor.shape[: 2 * k + self.n_teams]
        rewards = tuple(
            len(self.rewards) if position // n == agent.team else 1 for position in range(k)
        )
        return np.broadcast_to(tensor.reshape(head + rewards), self.outcome_shape)

    def principal_table(self, team: int) -> np.ndarray:
        """Principal utility broadcast over the whole outcome space X."""
        tensor = self.principal_tensor(team)
        return np.broadcast_to(tensor.reshape(tensor.shape + (1,) * self.n_agents),
                               self.outcome_shape)

    def prior_distribution(self) -> FiniteDistribution:
        """The prior as a validated FiniteDistribution (raises when invalid)."""
        return FiniteDistribution(index=ProductIndex([self.types] * self.n_agents), mass=self.prior)

    def summary(self) -> Dict:
        return {
            'name': self.name,
            'teams': self.n_teams,
            'members_per_team': self.team_size,
            'types': list(self.types.labels),
            'actions': list(self.actions.labels),
            'winnings': list(self.winnings.labels),
            'rewards': list(self.rewards.labels),
            'obedience_enforced': self.obedience_enforced,
            'outcome_cells': len(self.outcome_index),
            'mechanism_coordinates': len(self.z_index),
            'notes': dict(self.notes),
        }


@dataclass
class AssumptionViolation:
    """One failed check of check_spec."""
    assumption: str
    message: str

    def to_dict(self):
        return {'assumption': self.assumption, 'message': self.message}


@dataclass
class SpecReport:
    """Result of check_spec."""
    ok: bool
    violations: List[AssumptionViolation] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    @property
    def assumptions(self) -> str:
        return FINITENESS_NOTE if self.ok else "violated"

    def to_dict(self):
        return {
            'ok': self.ok,
            'assumptions': self.assumptions,
            'violations': [v.to_dict() for v in self.violations],
            'notes': list(self.notes),
        }


def check_spec(spec: GameSpec, tol: float = MASS_TOL) -> SpecReport:
    """Check a game against the model assumptions.

    Continuity and compactness assumptions are automatic on finite grids and
    are reported as satisfied by finiteness.

    Returns:
        SpecReport listing every violation, each naming its assumption
    """
    violations = []
    notes = [
        f"Assumption 1 (compact Polish ambient spaces): {FINITENESS_NOTE}",
        f"Assumption 2 (narrow continuity of the winnings kernel): {FINITENESS_NOTE}",
        f"Assumption 3 (continuity of the feasible-reward correspondence): {FINITENESS_NOTE}",
        f"Assumption 4 (continuity of utilities): {FINITENESS_NOTE}",
    ]

    prior = spec.prior
    if not np.all(np.isfinite(prior)) or np.any(prior < 0):
        violations.append(AssumptionViolation(
            'Assumption 1', "prior has negative or non-finite mass"))
    elif abs(prior.sum() - 1.0) > tol:
        violations.append(AssumptionViolation(
            'Assumption 1', f"prior not normalized (sums to {prior.sum():.12g})"))

    kernel_check = validate_kernel(spec.winnings_kernel, tol=tol)
    if not kernel_check.ok:
        violations.append(AssumptionViolation(
            'Assumption 2', f"winnings kernel {kernel_check.defect}: {kernel_check.detail}"))
    else:
        winners = _winner_take_all(spec)
        if winners:
            notes.append("winnings kernel has winner-take-all support (one winner per positive-mass w)")

    for w, label in enumerate(spec.winnings.labels):
        if not spec.feasible_rewards[w].any():
            violations.append(AssumptionViolation(
                'Assumption 3', f"feasible_rewards({label}) is empty"))

    if not np.all(np.isfinite(spec.member_utility)):
        violations.append(AssumptionViolation(
            'Assumption 4', "member utility table has non-finite entries"))
    if not np.all(np.isfinite(spec.principal_utility)):
        violations.append(AssumptionViolation(
            'Assumption 4', "principal utility table has non-finite entries"))

    return SpecReport(ok=not violations, violations=violations, notes=notes)


def _winner_take_all(spec: GameSpec) -> bool:
    if len(spec.winnings) != 2 or spec.n_teams < 2:
        return False
    profiles = np.array(list(np.ndindex(*(2,) * spec.n_teams)))
    one_winner = profiles.sum(axis=1) == 1
    mass_elsewhere = spec.winnings_kernel.rows[:, ~one_winner]
    return bool(np.all(mass_elsewhere == 0))


# -- mechanisms --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MechanismZ:
    """One team's mechanism in joint coordinates z(t', a', w, r)."""
    team: int
    z: np.ndarray

    def __post_init__(self):
        z = np.array(self.z, dtype=float)
        z.setflags(write=False)
        object.__setattr__(self, 'z', z)

    @classmethod
    def validated(cls, spec: GameSpec, team: int, z, tol: float = FEASIBILITY_TOL) -> 'MechanismZ':
        """Build a mechanism and check every invariant.

        Raises:
            SpecViolation: If any invariant fails
        """
        spec.check_team(team)
        table = np.asarray(z, dtype=float)
        if table.size != len(spec.z_index):
            raise SpecViolation(
                f"Team {team + 1} mechanism has {table.size} coordinates, "
                f"expected {len(spec.z_index)}"
            )
        mechanism = cls(team=team, z=table.reshape(spec.z_shape))
        problems = mechanism_violations(spec, mechanism, tol)
        if problems:
            raise SpecViolation(f"Team {team + 1} mechanism invalid: " + "; ".join(problems))
        return mechanism

    def blocks(self, spec: GameSpec) -> np.ndarray:
        """z as a (|T^n|, |A^n|, |W|, |R^n|) array."""
        return self.z.reshape(len(spec.team_type_index), len(spec.team_action_index),
                              len(spec.winnings), len(spec.team_reward_index))

    def action_marginal(self, spec: GameSpec) -> np.ndarray:
        """alpha(a'|t') as a (|T^n|, |A^n|) array, read at the first winnings value."""
        return self.blocks(spec)[:, :, 0, :].sum(axis=2)

    def reward_kernel(self, spec: GameSpec) -> Kernel:
        """kappa(r|t', a', w); see factor_mechanism for zero-probability rows."""
        return factor_mechanism(self, spec).kappa

    def flat(self) -> np.ndarray:
        return self.z.reshape(-1)


def mechanism_violations(spec: GameSpec, mechanism: MechanismZ,
                         tol: float = FEASIBILITY_TOL) -> List[str]:
    """List every violated MechanismZ invariant (empty when valid)."""
    if mechanism.z.shape != spec.z_shape:
        return [f"shape {mechanism.z.shape} does not match {spec.z_shape}"]
    problems = []
    blocks = mechanism.blocks(spec)
    if np.any(blocks < -tol):
        problems.append(f"negative coordinate {blocks.min():.3g}")
    if not np.all(np.isfinite(blocks)):
        problems.append("non-finite coordinates")
        return problems

    totals = blocks.sum(axis=(1, 3))
    worst = np.abs(totals - 1.0).max()
    if worst > tol:
        problems.append(f"rows over (a', r) do not sum to 1 (off by {worst:.3g})")

    marginals = blocks.sum(axis=3)
    spread = (marginals.max(axis=2) - marginals.min(axis=2)).max()
    if spread > tol:
        problems.append(f"action marginal depends on w (spread {spread:.3g})")

    infeasible = ~spec.feasible_rewards
    outside = np.abs(blocks[:, :, infeasible]).max() if infeasible.any() else 0.0
    if outside > tol:
        problems.append(f"mass {outside:.3g} on rewards outside feasible_rewards(w)")
    return problems


@dataclass(frozen=True, eq=False)
class MechanismFactored:
    """A mechanism as the pair (alpha, kappa) of transition kernels."""
    team: int
    alpha: Kernel
    kappa: Kernel


def compose_mechanism(mechanism: MechanismFactored, spec: GameSpec,
                      tol: float = MASS_TOL) -> MechanismZ:
    """z(t', a', w, r) = alpha(a'|t') * kappa(r|t', a', w).

    Raises:
        SpecViolation: If a kernel is invalid or kappa puts mass outside
            feasible_rewards(w)
    """
    spec.check_team(mechanism.team)
    n_t, n_a = len(spec.team_type_index), len(spec.team_action_index)
    n_w, n_r = len(spec.winnings), len(spec.team_reward_index)
    for name, kernel, shape in (('alpha', mechanism.alpha, (n_t, n_a)),
                                ('kappa', mechanism.kappa, (n_t * n_a * n_w, n_r))):
        if kernel.rows.shape != shape:
            raise SpecViolation(f"{name} has shape {kernel.rows.shape}, expected {shape}")
        check = validate_kernel(kernel, tol=tol)
        if not check.ok:
            raise SpecViolation(f"{name} {check.defect}: {check.detail}")

    alpha = mechanism.alpha.rows
    kappa = mechanism.kappa.rows.reshape(n_t, n_a, n_w, n_r)
    outside = kappa * ~spec.feasible_rewards[None, None, :, :]
    if np.any(outside > 0):
        t, a, w, r = np.argwhere(outside > 0)[0]
        raise SpecViolation(
            f"kappa puts mass on reward {spec.team_reward_index.labels_at(r)} outside "
            f"feasible_rewards({spec.winnings.labels[w]})"
        )
    z = alpha[:, :, None, None] * kappa
    return MechanismZ(team=mechanism.team, z=z.reshape(spec.z_shape))


def _uniform_on_feasible(spec: GameSpec) -> np.ndarray:
    feasible = spec.feasible_rewards.astype(float)
    counts = feasible.sum(axis=1, keepdims=True)
    counts[counts == 0] = 1.0
    return feasible / counts


def factor_mechanism(mechanism: MechanismZ, spec: GameSpec,
                     threshold: float = MASS_TOL) -> MechanismFactored:
    """Recover (alpha, kappa) from z.

    alpha(a'|t') is read at the first winnings value; kappa rows whose alpha
    is at most ``threshold`` default to the uniform distribution over
    feasible_rewards(w).
    """
    blocks = mechanism.blocks(spec)
    alpha = blocks[:, :, 0, :].sum(axis=2)
    default = _uniform_on_feasible(spec)
    positive = alpha > threshold
    safe = np.where(positive, alpha, 1.0)
    kappa = np.where(positive[:, :, None, None], blocks / safe[:, :, None, None],
                     default[None, None, :, :])

    team_types, team_actions = spec.team_type_index, spec.team_action_index
    return MechanismFactored(
        team=mechanism.team,
        alpha=Kernel(source=team_types, target=team_actions, rows=alpha),
        kappa=Kernel(
            source=ProductIndex(list(team_types.spaces) + list(team_actions.spaces) + [spec.winnings]),
            target=spec.team_reward_index,
            rows=kappa.reshape(-1, len(spec.team_reward_index)),
        ),
    )


def mechanism_from_kernels(spec: GameSpec, team: int, alpha, kappa=None) -> MechanismZ:
    """Compose a mechanism from raw alpha (|T^n|, |A^n|) and kappa arrays.

    When ``kappa`` is omitted rewards are uniform over feasible_rewards(w).
    """
    team_types, team_actions = spec.team_type_index, spec.team_action_index
    if kappa is None:
        kappa = np.broadcast_to(
            _uniform_on_feasible(spec)[None, None, :, :],
            (len(team_types), len(team_actions), len(spec.winnings), len(spec.team_reward_index)),
        )
    factored = MechanismFactored(
        team=team,
        alpha=Kernel(source=team_types, target=team_actions, rows=np.asarray(alpha, dtype=float)),
        kappa=Kernel(
            source=ProductIndex(list(team_types.spaces) + list(team_actions.spaces) + [spec.winnings]),
            target=spec.team_reward_index,
            rows=np.asarray(kappa, dtype=float).reshape(-1, len(spec.team_reward_index)),
        ),
    )
    return compose_mechanism(factored, spec)


def uniform_mechanism(spec: GameSpec, team: int) -> MechanismZ:
    """alpha uniform over A^n, kappa uniform over feasible_rewards(w)."""
    n_t, n_a = len(spec.team_type_index), len(spec.team_action_index)
    return mechanism_from_kernels(spec, team, np.full((n_t, n_a), 1.0 / n_a))


def mixture(first: MechanismZ, second: MechanismZ, weight: float) -> MechanismZ:
    """weight * first + (1 - weight) * second."""
    if first.team != second.team:
        raise SpecViolation(
            f"Cannot mix mechanisms of teams {first.team + 1} and {second.team + 1}"
        )
    if not 0.0 <= weight <= 1.0:
        raise ValueError(f"Mixture weight must lie in [0, 1], got {weight}")
    return MechanismZ(team=first.team, z=weight * first.z + (1.0 - weight) * second.z)


Profile = Sequence[MechanismZ]


def check_profile(spec: GameSpec, profile: Profile) -> None:
    """Raise SpecViolation unless ``profile`` has one mechanism per team, in order."""
    if len(profile) != spec.n_teams:
        raise SpecViolation(
            f"Profile has {len(profile)} mechanisms for {spec.n_teams} teams"
        )
    for team, mechanism in enumerate(profile):
        if mechanism.team != team:
            raise SpecViolation(
                f"Profile position {team + 1} holds the mechanism of team {mechanism.team + 1}"
            )
        if mechanism.z.shape != spec.z_shape:
            raise SpecViolation(
                f"Team {team + 1} mechanism has shape {mechanism.z.shape}, expected {spec.z_shape}"
            )


def replace_team(profile: Profile, mechanism: MechanismZ) -> List[MechanismZ]:
    """Copy of ``profile`` with one team's mechanism swapped."""
    updated = list(profile)
    updated[mechanism.team] = mechanism
    return updated


def profile_distance(first: Profile, second: Profile) -> float:
    """Max-abs difference of z coordinates across teams."""
    return max(float(np.abs(a.z - b.z).max()) for a, b in zip(first, second))
