"""Outcome laws induced by mechanism profiles and unilateral deviations.

Every law is a dense tensor over a product index and is produced by a single
``numpy.einsum`` composing the prior, the mechanism tables and the winnings
kernel in causal order.
"""

import itertools
import string
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import GeneratorCapExceeded, LawTooLarge, SpecViolation
from .model import Agent, GameSpec, MechanismZ, Profile, check_profile
from .settings import MASS_TOL, cell_cap, generator_cap
from .spaces import FiniteDistribution, ProductIndex


class Subscripts:
    """Assigns one einsum letter per coordinate of the outcome space.

    Extra letters (reported type, actual action, ...) are handed out on
    request so callers can substitute coordinates of single operands.
    """

    def __init__(self, spec: GameSpec):
        self.spec = spec
        k, teams = spec.n_agents, spec.n_teams
        needed = 4 * k + teams
        if needed + 8 > len(string.ascii_letters):
            raise SpecViolation(
                f"Game {spec.name!r} has {needed} outcome coordinates; at most "
                f"{len(string.ascii_letters) - 8} are supported"
            )
        letters = iter(string.ascii_letters)
        self.types = [next(letters) for _ in range(k)]
        self.actions = [next(letters) for _ in range(k)]
        self.winnings = [next(letters) for _ in range(teams)]
        self.rewards = [next(letters) for _ in range(k)]
        self._spare = letters

    def fresh(self) -> str:
        return next(self._spare)

    @property
    def outcome(self) -> str:
        return "".join(self.types + self.actions + self.winnings + self.rewards)

    def prior(self) -> str:
        return "".join(self.types)

    def winnings_kernel(self, actions: Optional[Sequence[str]] = None) -> str:
        return "".join(self.types + list(actions or self.actions) + self.winnings)

    def team_slice(self, letters: Sequence[str], team: int) -> List[str]:
        n = self.spec.team_size
        return list(letters[team * n:(team + 1) * n])

    def mechanism(self, team: int, types: Optional[Sequence[str]] = None) -> str:
        """Letters of z_team, optionally with substituted reported types."""
        reported = list(types) if types is not None else self.team_slice(self.types, team)
        return "".join(reported + self.team_slice(self.actions, team)
                       + [self.winnings[team]] + self.team_slice(self.rewards, team))

    def member_utility(self, agent: Agent, actions: Optional[Sequence[str]] = None) -> str:
        return "".join(self.types + list(actions or self.actions) + self.winnings
                       + self.team_slice(self.rewards, agent.team))

    def principal_utility(self) -> str:
        return "".join(self.types + self.actions + self.winnings)


def contract(subscripts: Sequence[str], operands: Sequence[np.ndarray], output: str) -> np.ndarray:
    """einsum over the given operand subscripts."""
    expression = ",".join(subscripts) + "->" + output
    return np.einsum(expression, *operands, optimize=True)


def _check_cells(cells: int) -> None:
    cap = cell_cap()
    if cells > cap:
        raise LawTooLarge(cells, cap)


@dataclass(frozen=True, eq=False)
class OutcomeLaw:
    """Distribution over X with one tensor axis per coordinate."""
    index: ProductIndex
    tensor: np.ndarray

    @property
    def mass(self) -> np.ndarray:
        return self.tensor.reshape(-1)

    def total(self) -> float:
        return float(self.tensor.sum())

    def distribution(self, tol: float = MASS_TOL) -> FiniteDistribution:
        return FiniteDistribution(index=self.index, mass=np.clip(self.mass, 0.0, None), tol=tol)

    def marginal(self, axes: Sequence[int]) -> np.ndarray:
        """Marginal over the listed axes, in the listed order."""
        keep = list(axes)
        dropped = tuple(axis for axis in range(self.tensor.ndim) if axis not in keep)
        marginal = self.tensor.sum(axis=dropped)
        ordered = sorted(keep)
        return marginal.transpose([ordered.index(axis) for axis in keep])


@dataclass(frozen=True, eq=False)
class ExtendedLaw(OutcomeLaw):
    """Distribution over X~ = X x (reported type, actual action) of one deviator."""
    agent: Agent = None


@dataclass(frozen=True, eq=False)
class DeviationStrategy:
    """A unilateral deviation of one agent.

    ``report_kernel[t, t']`` is the probability of reporting t' with true
    type t; ``action_kernel[t, a', a]`` the probability of taking a after
    recommendation a'. A missing action kernel means obedience. Pure
    strategies also keep their maps (``report_map``, ``decision_rule``).
    """
    agent: Agent
    report_kernel: np.ndarray
    action_kernel: Optional[np.ndarray] = None
    report_map: Optional[Tuple[int, ...]] = None
    decision_rule: Optional[Tuple[Tuple[int, ...], ...]] = None

    @classmethod
    def pure(cls, spec: GameSpec, agent: Agent, report_map: Sequence[int],
             decision_rule: Optional[Sequence[Sequence[int]]] = None) -> 'DeviationStrategy':
        """Strategy from a report map rho(t) and a decision rule delta(t, a')."""
        n_t, n_a = len(spec.types), len(spec.actions)
        report_map = tuple(int(v) for v in report_map)
        if len(report_map) != n_t or any(not 0 <= v < n_t for v in report_map):
            raise SpecViolation(f"Report map {report_map} is not a map on {n_t} types")
        report_kernel = np.zeros((n_t, n_t))
        report_kernel[np.arange(n_t), report_map] = 1.0

        action_kernel = None
        if decision_rule is not None:
            decision_rule = tuple(tuple(int(v) for v in row) for row in decision_rule)
            if len(decision_rule) != n_t or any(
                len(row) != n_a or any(not 0 <= v < n_a for v in row) for row in decision_rule
            ):
                raise SpecViolation(f"Decision rule {decision_rule} is not a map on types x actions")
            action_kernel = np.zeros((n_t, n_a, n_a))
            for t, row in enumerate(decision_rule):
                action_kernel[t, np.arange(n_a), row] = 1.0
        return cls(agent=agent, report_kernel=report_kernel, action_kernel=action_kernel,
                   report_map=report_map, decision_rule=decision_rule)

    @classmethod
    def truthful(cls, spec: GameSpec, agent: Agent) -> 'DeviationStrategy':
        n_t, n_a = len(spec.types), len(spec.actions)
        rule = None if spec.obedience_enforced else [list(range(n_a))] * n_t
        return cls.pure(spec, agent, list(range(n_t)), rule)

    def resolved_action_kernel(self, spec: GameSpec) -> np.ndarray:
        """Action kernel with obedience filled in."""
        if self.action_kernel is not None:
            return self.action_kernel
        n_t, n_a = len(spec.types), len(spec.actions)
        return np.broadcast_to(np.eye(n_a), (n_t, n_a, n_a))

    def is_obedient(self) -> bool:
        if self.action_kernel is None:
            return True
        n_a = self.action_kernel.shape[-1]
        return bool(np.array_equal(self.action_kernel,
                                   np.broadcast_to(np.eye(n_a), self.action_kernel.shape)))

    def describe(self, spec: GameSpec) -> Dict:
        """Labels of a pure strategy (report per type, action per recommendation)."""
        result = {'agent': [self.agent.team + 1, self.agent.member + 1]}
        if self.report_map is None:
            result['mixed'] = True
            return result
        result['report'] = {
            spec.types.labels[t]: spec.types.labels[v] for t, v in enumerate(self.report_map)
        }
        if self.decision_rule is not None:
            result['rule'] = {
                spec.types.labels[t]: {
                    spec.actions.labels[a]: spec.actions.labels[v] for a, v in enumerate(row)
                }
                for t, row in enumerate(self.decision_rule)
            }
        return result


def mix_strategies(first: DeviationStrategy, second: DeviationStrategy, weight: float,
                   spec: GameSpec) -> DeviationStrategy:
    """Behavioural mixture weight * first + (1 - weight) * second.

    Report and action randomizations are mixed independently; the induced
    law is the same mixture only when both strategies share one component.
    """
    if first.agent != second.agent:
        raise SpecViolation("Cannot mix deviations of different agents")
    action_kernel = None
    if first.action_kernel is not None or second.action_kernel is not None:
        action_kernel = (weight * first.resolved_action_kernel(spec)
                         + (1.0 - weight) * second.resolved_action_kernel(spec))
    return DeviationStrategy(
        agent=first.agent,
        report_kernel=weight * first.report_kernel + (1.0 - weight) * second.report_kernel,
        action_kernel=action_kernel,
    )


def truthful_law(spec: GameSpec, profile: Profile) -> OutcomeLaw:
    """Law of the outcome when every agent reports truthfully and obeys.

    Composes H(t) * Lambda(w | t, a') * prod_j z_j(t_j, a'_j, w_j, r_j).
    """
    check_profile(spec, profile)
    _check_cells(len(spec.outcome_index))
    letters = Subscripts(spec)
    subscripts = [letters.prior(), letters.winnings_kernel()]
    operands = [spec.prior_tensor, spec.winnings_tensor]
    for team, mechanism in enumerate(profile):
        subscripts.append(letters.mechanism(team))
        operands.append(mechanism.z)
    tensor = contract(subscripts, operands, letters.outcome)
    return OutcomeLaw(index=spec.outcome_index, tensor=tensor)


def _check_strategy(spec: GameSpec, strategy: DeviationStrategy) -> int:
    position = spec.agent_position(strategy.agent)
    n_t, n_a = len(spec.types), len(spec.actions)
    if strategy.report_kernel.shape != (n_t, n_t):
        raise SpecViolation(f"Report kernel has shape {strategy.report_kernel.shape}, "
                            f"expected {(n_t, n_t)}")
    if strategy.action_kernel is not None:
        if strategy.action_kernel.shape != (n_t, n_a, n_a):
            raise SpecViolation(f"Action kernel has shape {strategy.action_kernel.shape}, "
                                f"expected {(n_t, n_a, n_a)}")
        if spec.obedience_enforced and not strategy.is_obedient():
            raise SpecViolation(
                f"Game {spec.name!r} enforces obedience; {strategy.agent.label()} "
                f"cannot deviate in actions"
            )
    return position


def deviation_law(spec: GameSpec, profile: Profile, strategy: DeviationStrategy) -> ExtendedLaw:
    """Extended law when one agent plays ``strategy`` and everyone else is truthful.

    Causal order: true types from the prior, the deviator's report, joint
    recommendations at the reported profile, the deviator's action given
    (true type, recommendation), winnings at true types and implemented
    actions, rewards at reported types and recommendations.

    Raises:
        SpecViolation: On profile mismatch or an action deviation while
            obedience is enforced
    """
    check_profile(spec, profile)
    position = _check_strategy(spec, strategy)
    agent = strategy.agent
    _check_cells(len(spec.extended_index))

    letters = Subscripts(spec)
    reported, actual = letters.fresh(), letters.fresh()
    true_type, recommended = letters.types[position], letters.actions[position]

    implemented = list(letters.actions)
    implemented[position] = actual
    team_types = letters.team_slice(letters.types, agent.team)
    team_types[agent.member] = reported

    subscripts = [
        letters.prior(),
        true_type + reported,
        true_type + recommended + actual,
        letters.winnings_kernel(implemented),
    ]
    operands = [
        spec.prior_tensor,
        strategy.report_kernel,
        strategy.resolved_action_kernel(spec),
        spec.winnings_tensor,
    ]
    for team, mechanism in enumerate(profile):
        types = team_types if team == agent.team else None
        subscripts.append(letters.mechanism(team, types))
        operands.append(mechanism.z)

    tensor = contract(subscripts, operands, letters.outcome + reported + actual)
    return ExtendedLaw(index=spec.extended_index, tensor=tensor, agent=agent)


def project(spec: GameSpec, law: ExtendedLaw) -> OutcomeLaw:
    """Pushforward of an extended law to X.

    Drops the report coordinate and writes the deviator's actual action into
    their action coordinate.
    """
    position = spec.agent_position(law.agent)
    action_axis = spec.n_agents + position
    tensor = law.tensor.sum(axis=-2)
    tensor = tensor.sum(axis=action_axis)
    tensor = np.moveaxis(tensor, -1, action_axis)
    return OutcomeLaw(index=spec.outcome_index, tensor=tensor)


def generator_count(spec: GameSpec) -> int:
    n_t, n_a = len(spec.types), len(spec.actions)
    count = n_t ** n_t
    if not spec.obedience_enforced:
        count *= n_a ** (n_t * n_a)
    return count


def deviation_generators(spec: GameSpec, profile: Profile, agent: Agent,
                         cap: Optional[int] = None) -> List[DeviationStrategy]:
    """All pure (report map, decision rule) deviations of one agent.

    Report maps vary slowest; both maps are enumerated lexicographically.

    Raises:
        GeneratorCapExceeded: If the count is above ``cap`` (default from
            TEAMGAME_GENERATOR_CAP)
    """
    check_profile(spec, profile)
    spec.agent_position(agent)
    cap = generator_cap() if cap is None else cap
    count = generator_count(spec)
    if count > cap:
        raise GeneratorCapExceeded(count, cap)

    n_t, n_a = len(spec.types), len(spec.actions)
    report_maps = list(itertools.product(range(n_t), repeat=n_t))
    if spec.obedience_enforced:
        return [DeviationStrategy.pure(spec, agent, rho) for rho in report_maps]

    rules = [
        [flat[t * n_a:(t + 1) * n_a] for t in range(n_t)]
        for flat in itertools.product(range(n_a), repeat=n_t * n_a)
    ]
    return [DeviationStrategy.pure(spec, agent, rho, rule) for rho in report_maps for rule in rules]


Law = Union[OutcomeLaw, ExtendedLaw]


def expected_value(spec: GameSpec, law: Law, table: np.ndarray) -> float:
    """Linear functional sum_x law(x) * table(x); extended laws are projected first.

    Raises:
        ValueError: If the table does not match the law's index
    """
    if isinstance(law, ExtendedLaw):
        law = project(spec, law)
    table = np.asarray(table, dtype=float)
    if table.size == law.tensor.size and table.shape != law.tensor.shape:
        table = table.reshape(law.tensor.shape)
    if table.shape != law.tensor.shape:
        raise ValueError(
            f"Utility table shape {table.shape} does not match law shape {law.tensor.shape}"
        )
    return float(np.sum(law.tensor * table))


def principal_value(spec: GameSpec, profile: Profile, team: int) -> float:
    """Expected utility of one principal under truthful-obedient play."""
    return expected_value(spec, truthful_law(spec, profile), spec.principal_table(team))


def member_value(spec: GameSpec, profile: Profile, agent: Agent) -> float:
    """Expected utility of one agent under truthful-obedient play."""
    return expected_value(spec, truthful_law(spec, profile), spec.member_table(agent))


def win_probabilities(spec: GameSpec, profile: Profile) -> List[float]:
    """Expected winnings per team; win probabilities for {0, 1} winnings.

    Raises:
        SpecViolation: If the winnings space is not numeric
    """
    if spec.winnings.values is None:
        raise SpecViolation(f"Winnings of game {spec.name!r} are categorical")
    law = truthful_law(spec, profile)
    first = 2 * spec.n_agents
    results = []
    for team in range(spec.n_teams):
        marginal = law.marginal([first + team])
        results.append(float(marginal @ spec.winnings.values))
    return results


def law_violations(spec: GameSpec, law: Law, tol: float = MASS_TOL) -> List[str]:
    """Invariant failures of a law: mass, sign, and reward support."""
    problems = []
    total = law.total()
    if abs(total - 1.0) > tol:
        problems.append(f"total mass {total:.15g}")
    if np.any(law.tensor < -tol):
        problems.append(f"negative mass {law.tensor.min():.3g}")

    infeasible = ~spec.feasible_rewards
    if not infeasible.any():
        return problems
    k, n, teams = spec.n_agents, spec.team_size, spec.n_teams
    for team in range(teams):
        # (w_j, r_j) marginal
        keep = [2 * k + team] + [2 * k + teams + team * n + i for i in range(n)]
        marginal = law.marginal(keep).reshape(len(spec.winnings), -1)
        outside = np.abs(marginal[infeasible]).max()
        if outside > tol:
            problems.append(f"team {team + 1} reward mass {outside:.3g} outside feasible_rewards(w)")
    return problems
