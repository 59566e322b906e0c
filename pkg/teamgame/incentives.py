"""Incentive-compatibility slack and the linear IC constraint system of one team."""

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import GeneratorCapExceeded, SpecViolation
from .laws import Subscripts, contract, generator_count
from .model import Agent, GameSpec, MechanismZ, Profile, check_profile
from .settings import IC_TOL, SIGNIFICANT_DIGITS, generator_cap


def _deviation_values(spec: GameSpec, profile: Profile, agent: Agent) -> np.ndarray:
    """Ex-ante weighted utility V[t, t', a', a] of one agent.

    Entry (t, t', a', a) is the agent's expected utility restricted to true
    type t, report t', recommendation a' and actual action a, with everyone
    else truthful and obedient.
    """
    position = spec.agent_position(agent)
    letters = Subscripts(spec)
    reported, actual = letters.fresh(), letters.fresh()
    implemented = list(letters.actions)
    implemented[position] = actual
    team_types = letters.team_slice(letters.types, agent.team)
    team_types[agent.member] = reported

    subscripts = [letters.prior(), letters.winnings_kernel(implemented),
                  letters.member_utility(agent, implemented)]
    operands = [spec.prior_tensor, spec.winnings_tensor, spec.member_tensor(agent)]
    for team, mechanism in enumerate(profile):
        subscripts.append(letters.mechanism(team, team_types if team == agent.team else None))
        operands.append(mechanism.z)
    output = letters.types[position] + reported + letters.actions[position] + actual
    return contract(subscripts, operands, output)


@dataclass
class TypeSlack:
    """Best deviation of one agent at one true type."""
    true_type: int
    truthful: float
    deviation: float
    report: int
    rule: Optional[Tuple[int, ...]]

    @property
    def slack(self) -> float:
        return self.truthful - self.deviation

    def to_dict(self, spec: GameSpec) -> Dict:
        result = {
            'true_type': spec.types.labels[self.true_type],
            'truthful': self.truthful,
            'deviation': self.deviation,
            'slack': self.slack,
            'report': spec.types.labels[self.report],
        }
        if self.rule is not None:
            result['rule'] = {spec.actions.labels[a]: spec.actions.labels[v]
                              for a, v in enumerate(self.rule)}
        return result


@dataclass
class ICSlackDetail:
    """Per-type decomposition of an agent's IC slack."""
    agent: Agent
    per_type: List[TypeSlack] = field(default_factory=list)

    @property
    def slack(self) -> float:
        return float(sum(item.slack for item in self.per_type))

    @property
    def binding(self) -> Optional[TypeSlack]:
        """Type whose best deviation gains the most, if any."""
        if not self.per_type:
            return None
        return min(self.per_type, key=lambda item: item.slack)

    def to_dict(self, spec: GameSpec) -> Dict:
        return {
            'agent': [self.agent.team + 1, self.agent.member + 1],
            'slack': self.slack,
            'per_type': [item.to_dict(spec) for item in self.per_type],
        }


def ic_slack_detail(spec: GameSpec, profile: Profile, agent: Agent) -> ICSlackDetail:
    """Truthful value minus best pure deviation value, type by type.

    The ex-ante maximum over strategy functions separates across true types
    because the prior weights are fixed, so each type picks its own best
    report and decision rule.
    """
    check_profile(spec, profile)
    values = _deviation_values(spec, profile, agent)
    n_t, n_a = len(spec.types), len(spec.actions)
    diagonal = np.arange(n_a)
    detail = ICSlackDetail(agent=agent)
    for t in range(n_t):
        truthful = float(values[t, t, diagonal, diagonal].sum())
        if spec.obedience_enforced:
            by_report = values[t][:, diagonal, diagonal].sum(axis=1)
            rules = [None] * n_t
        else:
            by_report = values[t].max(axis=2).sum(axis=1)
            rules = [tuple(int(v) for v in values[t, report].argmax(axis=1)) for report in range(n_t)]
        report = int(np.argmax(by_report))
        deviation = float(by_report[report])
        detail.per_type.append(TypeSlack(
            true_type=t, truthful=truthful, deviation=max(deviation, truthful),
            report=report, rule=rules[report],
        ))
    return detail


def ic_slack(spec: GameSpec, profile: Profile, agent: Agent) -> float:
    """Truthful expected utility minus the best unilateral deviation's.

    Always at most zero; the agent is IC iff the slack is (numerically) zero.
    """
    generators = generator_count(spec)
    cap = generator_cap()
    if generators > cap:
        raise GeneratorCapExceeded(generators, cap)
    return ic_slack_detail(spec, profile, agent).slack


@dataclass
class ICReport:
    """Result of is_incentive_compatible."""
    ok: bool
    min_slack: float
    worst_agent: Optional[Agent] = None
    worst_deviation: Optional[Dict] = None
    slacks: Dict[Agent, float] = field(default_factory=dict)

    def to_dict(self) -> Dict:
        return {
            'ok': self.ok,
            'min_slack': self.min_slack,
            'worst_agent': None if self.worst_agent is None
            else [self.worst_agent.team + 1, self.worst_agent.member + 1],
            'worst_deviation': self.worst_deviation,
            'slacks': [
                {'agent': [agent.team + 1, agent.member + 1], 'slack': slack}
                for agent, slack in self.slacks.items()
            ],
        }


def is_incentive_compatible(spec: GameSpec, profile: Profile, tol: float = IC_TOL) -> ICReport:
    """Check every agent's slack against -tol and report the binding deviation."""
    slacks = {}
    worst_agent, worst_detail = None, None
    for agent in spec.agents:
        detail = ic_slack_detail(spec, profile, agent)
        slacks[agent] = detail.slack
        if worst_detail is None or detail.slack < worst_detail.slack:
            worst_agent, worst_detail = agent, detail
    if worst_detail is None:
        return ICReport(ok=True, min_slack=0.0)
    binding = worst_detail.binding
    return ICReport(
        ok=worst_detail.slack >= -tol,
        min_slack=worst_detail.slack,
        worst_agent=worst_agent,
        worst_deviation=binding.to_dict(spec) if binding is not None else None,
        slacks=slacks,
    )


# -- constraint system --------------------------------------------------------


@dataclass(frozen=True)
class ICRowKey:
    """Provenance of one IC inequality."""
    agent: Agent
    true_type: int
    report: int
    rule: Optional[Tuple[int, ...]]
    zero_probability: bool = False


@dataclass
class ConstraintSystem:
    """Linear constraints on one team's z: ``eq_matrix @ z = eq_rhs`` and ``ineq_matrix @ z >= ineq_rhs``."""
    team: int
    n_variables: int
    eq_matrix: np.ndarray
    eq_rhs: np.ndarray
    eq_tags: List[str]
    ineq_matrix: np.ndarray
    ineq_rhs: np.ndarray
    ineq_tags: List[str]
    ic_keys: List[Optional[ICRowKey]] = field(default_factory=list)

    def __post_init__(self):
        for name in ('eq_matrix', 'ineq_matrix'):
            matrix = np.asarray(getattr(self, name), dtype=float).reshape(-1, self.n_variables)
            setattr(self, name, matrix)
        self.eq_rhs = np.asarray(self.eq_rhs, dtype=float).reshape(-1)
        self.ineq_rhs = np.asarray(self.ineq_rhs, dtype=float).reshape(-1)
        if len(self.eq_tags) != self.eq_matrix.shape[0] or len(self.ineq_tags) != self.ineq_matrix.shape[0]:
            raise SpecViolation("Every constraint row needs a provenance tag")
        if not self.ic_keys:
            self.ic_keys = [None] * self.ineq_matrix.shape[0]

    @property
    def n_ic_rows(self) -> int:
        return sum(1 for key in self.ic_keys if key is not None)

    def ic_rows_for(self, agent: Agent) -> int:
        return sum(1 for key in self.ic_keys if key is not None and key.agent == agent)

    def with_row(self, coefficients: Sequence[float], rhs: float, tag: str) -> 'ConstraintSystem':
        """Copy with one extra ``>=`` row."""
        return ConstraintSystem(
            team=self.team,
            n_variables=self.n_variables,
            eq_matrix=self.eq_matrix,
            eq_rhs=self.eq_rhs,
            eq_tags=list(self.eq_tags),
            ineq_matrix=np.vstack([self.ineq_matrix, np.asarray(coefficients, dtype=float)]),
            ineq_rhs=np.append(self.ineq_rhs, rhs),
            ineq_tags=list(self.ineq_tags) + [tag],
            ic_keys=list(self.ic_keys) + [None],
        )

    def is_satisfied(self, z: np.ndarray, tol: float = IC_TOL) -> bool:
        z = np.asarray(z, dtype=float).reshape(-1)
        if self.eq_matrix.size and np.abs(self.eq_matrix @ z - self.eq_rhs).max() > tol:
            return False
        if self.ineq_matrix.size and (self.ineq_matrix @ z - self.ineq_rhs).min() < -tol:
            return False
        return True

    def agent_slacks(self, z: np.ndarray) -> Dict[Agent, float]:
        """IC slack of each team member, recomputed from the IC rows.

        For each true type the slack is the most violated row (never above
        zero); the agent's slack sums these over types.
        """
        z = np.asarray(z, dtype=float).reshape(-1)
        values = self.ineq_matrix @ z - self.ineq_rhs
        worst: Dict[Agent, Dict[int, float]] = {}
        for key, value in zip(self.ic_keys, values):
            if key is None:
                continue
            per_type = worst.setdefault(key.agent, {})
            per_type[key.true_type] = min(per_type.get(key.true_type, 0.0), float(value))
        return {agent: float(sum(per_type.values())) for agent, per_type in worst.items()}

    def to_tableau(self, digits: int = SIGNIFICANT_DIGITS) -> str:
        """Plain-text export, one row per line: coefficients, sense, rhs, tag."""
        lines = [
            f"# team {self.team + 1}: {self.n_variables} variables z[0..{self.n_variables - 1}] "
            f"in lexicographic (t', a', w, r) order",
            f"# {self.eq_matrix.shape[0]} equality rows, {self.ineq_matrix.shape[0]} inequality rows",
            "# columns: coefficients... sense rhs # tag",
        ]

        def render(row, sense, rhs, tag):
            coefficients = " ".join(f"{value:.{digits}g}" for value in row)
            return f"{coefficients} {sense} {rhs:.{digits}g} # {tag}"

        for row, rhs, tag in zip(self.eq_matrix, self.eq_rhs, self.eq_tags):
            lines.append(render(row, "=", rhs, tag))
        for row, rhs, tag in zip(self.ineq_matrix, self.ineq_rhs, self.ineq_tags):
            lines.append(render(row, ">=", rhs, tag))
        return "\n".join(lines) + "\n"


def _others_by_team(spec: GameSpec, others: Sequence[MechanismZ], team: int) -> Dict[int, MechanismZ]:
    spec.check_team(team)
    by_team = {}
    for mechanism in others:
        if mechanism.team == team:
            continue
        if mechanism.z.shape != spec.z_shape:
            raise SpecViolation(f"Team {mechanism.team + 1} mechanism has shape {mechanism.z.shape}")
        by_team[mechanism.team] = mechanism
    missing = [j + 1 for j in range(spec.n_teams) if j != team and j not in by_team]
    if missing:
        raise SpecViolation(f"Missing mechanisms for teams {missing}")
    return by_team


def _consistency_rows(spec: GameSpec):
    n_t, n_a = len(spec.team_type_index), len(spec.team_action_index)
    n_w, n_r = len(spec.winnings), len(spec.team_reward_index)
    size = n_t * n_a * n_w * n_r
    shape = (n_t, n_a, n_w, n_r)
    rows, rhs, tags = [], [], []

    def blank():
        return np.zeros(shape)

    for t in range(n_t):
        t_label = ",".join(spec.team_type_index.labels_at(t))
        for w in range(n_w):
            row = blank()
            row[t, :, w, :] = 1.0
            rows.append(row.reshape(size))
            rhs.append(1.0)
            tags.append(f"normalization(t'={t_label}, w={spec.winnings.labels[w]})")
    for t in range(n_t):
        t_label = ",".join(spec.team_type_index.labels_at(t))
        for a in range(n_a):
            a_label = ",".join(spec.team_action_index.labels_at(a))
            for w in range(1, n_w):
                row = blank()
                row[t, a, w, :] = 1.0
                row[t, a, 0, :] = -1.0
                rows.append(row.reshape(size))
                rhs.append(0.0)
                tags.append(f"marginal-consistency(t'={t_label}, a'={a_label}, "
                            f"w={spec.winnings.labels[w]})")
    for w, r in zip(*np.nonzero(~spec.feasible_rewards)):
        r_label = ",".join(spec.team_reward_index.labels_at(r))
        for t in range(n_t):
            for a in range(n_a):
                row = blank()
                row[t, a, w, r] = 1.0
                rows.append(row.reshape(size))
                rhs.append(0.0)
                tags.append(f"support-zero(t'={','.join(spec.team_type_index.labels_at(t))}, "
                            f"a'={','.join(spec.team_action_index.labels_at(a))}, "
                            f"w={spec.winnings.labels[w]}, r={r_label})")
    return rows, rhs, tags


def _utility_coefficients(spec: GameSpec, others: Dict[int, MechanismZ], agent: Agent) -> np.ndarray:
    """Weights of z_j in the agent's utility with the actual action kept free.

    Axes: (member's true type, teammates' true types, actual action,
    teammates' recommendations, own winnings, team rewards).
    """
    position = spec.agent_position(agent)
    letters = Subscripts(spec)
    actual = letters.fresh()
    implemented = list(letters.actions)
    implemented[position] = actual

    subscripts = [letters.prior(), letters.winnings_kernel(implemented),
                  letters.member_utility(agent, implemented)]
    operands = [spec.prior_tensor, spec.winnings_tensor, spec.member_tensor(agent)]
    for team, mechanism in others.items():
        subscripts.append(letters.mechanism(team))
        operands.append(mechanism.z)

    team_types = letters.team_slice(letters.types, agent.team)
    teammate_actions = [letter for m, letter in enumerate(letters.team_slice(letters.actions, agent.team))
                        if m != agent.member]
    output = ("".join(team_types) + actual + "".join(teammate_actions)
              + letters.winnings[agent.team] + "".join(letters.team_slice(letters.rewards, agent.team)))
    coefficients = contract(subscripts, operands, output)
    return np.moveaxis(coefficients, agent.member, 0)


def ic_constraints(spec: GameSpec, others: Sequence[MechanismZ], team: int) -> ConstraintSystem:
    """Linear constraint system on team ``team``'s z with the other teams fixed.

    Emits normalization, marginal-consistency and support-zero equalities,
    then one IC inequality per (member, true type, report, decision rule)
    other than truthful obedience. Each IC row holds the exact weights of
    truthful minus deviation utility, so ``row @ z >= 0``.

    Raises:
        GeneratorCapExceeded: If a member has more pure deviations than the cap
    """
    by_team = _others_by_team(spec, others, team)
    n, n_t, n_a = spec.team_size, len(spec.types), len(spec.actions)
    generators = generator_count(spec)
    cap = generator_cap()
    if generators > cap:
        raise GeneratorCapExceeded(generators, cap)

    eq_rows, eq_rhs, eq_tags = _consistency_rows(spec)
    size = len(spec.z_index)
    identity = tuple(range(n_a))
    rules = [identity] if spec.obedience_enforced else list(itertools.product(range(n_a), repeat=n_a))
    prior_marginals = spec.prior_tensor

    ineq_rows, ineq_tags, keys = [], [], []
    for member in range(n):
        agent = Agent(team, member)
        position = spec.agent_position(agent)
        marginal = prior_marginals.sum(axis=tuple(a for a in range(spec.n_agents) if a != position))
        coefficients = _utility_coefficients(spec, by_team, agent)
        action_axis = (n - 1) + member

        def slab(t, rule):
            pieces = [np.take(coefficients[t], rule[v], axis=n - 1) for v in range(n_a)]
            return np.stack(pieces, axis=action_axis)

        for t in range(n_t):
            truthful = slab(t, identity)
            for report in range(n_t):
                for rule in rules:
                    if report == t and rule == identity:
                        continue
                    row = np.zeros((n_t,) + truthful.shape)
                    row[t] += truthful
                    row[report] -= slab(t, rule)
                    ineq_rows.append(np.moveaxis(row, 0, member).reshape(size))
                    zero = bool(marginal[t] == 0)
                    key = ICRowKey(agent=agent, true_type=t, report=report,
                                   rule=None if spec.obedience_enforced else rule,
                                   zero_probability=zero)
                    keys.append(key)
                    tag = (f"IC({agent.label()}, t={spec.types.labels[t]}, "
                           f"report={spec.types.labels[report]}")
                    if not spec.obedience_enforced:
                        tag += ", rule=" + "/".join(spec.actions.labels[v] for v in rule)
                    ineq_tags.append(tag + (", zero-probability type)" if zero else ")"))

    return ConstraintSystem(
        team=team,
        n_variables=size,
        eq_matrix=np.array(eq_rows).reshape(-1, size),
        eq_rhs=np.array(eq_rhs),
        eq_tags=eq_tags,
        ineq_matrix=np.array(ineq_rows).reshape(-1, size),
        ineq_rhs=np.zeros(len(ineq_rows)),
        ineq_tags=ineq_tags,
        ic_keys=keys,
    )


def profile_slacks(spec: GameSpec, profile: Profile,
                   systems: Optional[Dict[int, ConstraintSystem]] = None) -> Dict[Agent, float]:
    """IC slack of every agent, via each team's constraint system."""
    check_profile(spec, profile)
    slacks = {}
    for team in range(spec.n_teams):
        system = (systems or {}).get(team)
        if system is None:
            system = ic_constraints(spec, profile, team)
        team_slacks = system.agent_slacks(profile[team].flat())
        for member in range(spec.team_size):
            agent = Agent(team, member)
            slacks[agent] = team_slacks.get(agent, 0.0)
    return slacks
