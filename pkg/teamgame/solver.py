"""Best responses over the IC polytope, best-response dynamics and equilibrium checks."""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import InfeasibleICSet, SolverError
from .incentives import ConstraintSystem, ic_constraints
from .laws import Subscripts, contract
from .model import (
    Agent,
    GameSpec,
    MechanismZ,
    Profile,
    check_profile,
    mechanism_violations,
    mixture,
    profile_distance,
)
from .settings import FEASIBILITY_TOL, HASH_RESOLUTION, IC_TOL, PIVOT_TOL
from .simplex import INFEASIBLE, OPTIMAL, LinearProgram, solve_lp

ALTERNATING = "alternating"
SIMULTANEOUS = "simultaneous"

VERIFIED = "verified_bnpe"
NOT_EQUILIBRIUM = "not_equilibrium"
BUDGET_EXHAUSTED = "budget_exhausted"


def _others(profile: Sequence[MechanismZ], team: int) -> List[MechanismZ]:
    return [mechanism for mechanism in profile if mechanism.team != team]


def principal_objective(spec: GameSpec, others: Sequence[MechanismZ], team: int) -> np.ndarray:
    """Exact linear weights of principal ``team``'s expected utility in its z.

    Returns:
        Vector of length len(spec.z_index)
    """
    spec.check_team(team)
    letters = Subscripts(spec)
    subscripts = [letters.prior(), letters.winnings_kernel(), letters.principal_utility()]
    operands = [spec.prior_tensor, spec.winnings_tensor, spec.principal_tensor(team)]
    for mechanism in others:
        if mechanism.team == team:
            continue
        subscripts.append(letters.mechanism(mechanism.team))
        operands.append(mechanism.z)
    output = ("".join(letters.team_slice(letters.types, team))
              + "".join(letters.team_slice(letters.actions, team))
              + letters.winnings[team])
    weights = contract(subscripts, operands, output)
    weights = weights.reshape(weights.shape + (1,) * spec.team_size)
    return np.broadcast_to(weights, spec.z_shape).reshape(-1).copy()


@dataclass
class BestResponse:
    """An optimal vertex of a principal's best-response LP."""
    mechanism: MechanismZ
    value: float
    iterations: int = 0


class BestResponseCache:
    """Memoizes constraint systems, objectives and best responses per (team, opponents)."""

    def __init__(self, spec: GameSpec, feasibility_tol: float = FEASIBILITY_TOL,
                 pivot_tol: float = PIVOT_TOL):
        self.spec = spec
        self.feasibility_tol = feasibility_tol
        self.pivot_tol = pivot_tol
        self._systems: Dict[Tuple, ConstraintSystem] = {}
        self._objectives: Dict[Tuple, np.ndarray] = {}
        self._responses: Dict[Tuple, BestResponse] = {}
        self.hits = 0
        self.misses = 0

    @staticmethod
    def key(others: Sequence[MechanismZ], team: int) -> Tuple:
        return (team,) + tuple(
            (mechanism.team, mechanism.z.tobytes())
            for mechanism in sorted(others, key=lambda m: m.team) if mechanism.team != team
        )

    def system(self, others: Sequence[MechanismZ], team: int) -> ConstraintSystem:
        key = self.key(others, team)
        if key not in self._systems:
            self._systems[key] = ic_constraints(self.spec, others, team)
        return self._systems[key]

    def objective(self, others: Sequence[MechanismZ], team: int) -> np.ndarray:
        key = self.key(others, team)
        if key not in self._objectives:
            self._objectives[key] = principal_objective(self.spec, others, team)
        return self._objectives[key]

    def best_response(self, others: Sequence[MechanismZ], team: int) -> BestResponse:
        key = self.key(others, team)
        cached = self._responses.get(key)
        if cached is not None:
            self.hits += 1
            return cached
        self.misses += 1
        response = best_response(self.spec, others, team, cache=self)
        self._responses[key] = response
        return response


def ic_feasible(spec: GameSpec, others: Sequence[MechanismZ], team: int,
                system: Optional[ConstraintSystem] = None,
                feasibility_tol: float = FEASIBILITY_TOL, pivot_tol: float = PIVOT_TOL) -> bool:
    """True iff the team's IC constraint system has a feasible point (phase-1 LP)."""
    if system is None:
        system = ic_constraints(spec, others, team)
    lp = LinearProgram.from_system(np.zeros(system.n_variables), system)
    return solve_lp(lp, feasibility_tol, pivot_tol).status != INFEASIBLE


def best_response(spec: GameSpec, others: Sequence[MechanismZ], team: int,
                  cache: Optional[BestResponseCache] = None,
                  feasibility_tol: float = FEASIBILITY_TOL,
                  pivot_tol: float = PIVOT_TOL) -> BestResponse:
    """Maximize the principal's expected payoff over the team's IC polytope.

    A cache overrides ``feasibility_tol`` and ``pivot_tol`` with its own.

    Raises:
        InfeasibleICSet: If no IC mechanism exists against ``others``
        SolverError: If the LP is unbounded or the pivot budget runs out
    """
    if cache is not None:
        system = cache.system(others, team)
        objective = cache.objective(others, team)
        feasibility_tol, pivot_tol = cache.feasibility_tol, cache.pivot_tol
    else:
        system = ic_constraints(spec, others, team)
        objective = principal_objective(spec, others, team)
    result = solve_lp(LinearProgram.from_system(objective, system), feasibility_tol, pivot_tol)
    if result.status == INFEASIBLE:
        raise InfeasibleICSet(team)
    if result.status != OPTIMAL:
        raise SolverError(f"Best-response LP of team {team + 1} is {result.status}")
    mechanism = MechanismZ(team=team, z=result.x.reshape(spec.z_shape))
    return BestResponse(mechanism=mechanism, value=result.value, iterations=result.iterations)


def ic_set_contains(spec: GameSpec, others: Sequence[MechanismZ], team: int, z: np.ndarray,
                    tol: float = FEASIBILITY_TOL) -> bool:
    """Membership of ``z`` in the team's IC set against ``others``."""
    mechanism = MechanismZ(team=team, z=np.asarray(z, dtype=float).reshape(spec.z_shape))
    if mechanism_violations(spec, mechanism, tol):
        return False
    return ic_constraints(spec, others, team).is_satisfied(mechanism.flat(), tol)


# -- verification ---------------------------------------------------------------


@dataclass
class BNPEReport:
    """Clause-by-clause equilibrium verification."""
    ok: bool
    feasibility: bool
    incentive_compatibility: bool
    best_responding: bool
    values: List[float] = field(default_factory=list)
    best_response_values: List[float] = field(default_factory=list)
    slacks: Dict[Agent, float] = field(default_factory=dict)
    problems: List[str] = field(default_factory=list)

    @property
    def gains(self) -> List[float]:
        return [br - v for br, v in zip(self.best_response_values, self.values)]

    @property
    def margin(self) -> float:
        """Largest violation: best payoff gain or worst negative slack."""
        candidates = [0.0] + self.gains + [-slack for slack in self.slacks.values()]
        if not self.feasibility:
            candidates.append(float('inf'))
        return max(candidates)

    def to_dict(self) -> Dict:
        return {
            'ok': self.ok,
            'clauses': {
                'feasibility': self.feasibility,
                'incentive_compatibility': self.incentive_compatibility,
                'principals_best_respond': self.best_responding,
            },
            'values': list(self.values),
            'best_response_values': list(self.best_response_values),
            'gains': self.gains,
            'slacks': [
                {'agent': [agent.team + 1, agent.member + 1], 'slack': slack}
                for agent, slack in self.slacks.items()
            ],
            'margin': self.margin,
            'problems': list(self.problems),
        }


def verify_bnpe(spec: GameSpec, profile: Profile, tol: float = IC_TOL,
                cache: Optional[BestResponseCache] = None) -> BNPEReport:
    """Check feasibility, incentive compatibility and principal best responses.

    Args:
        spec: Game specification
        profile: One mechanism per team
        tol: Absolute tolerance for every clause
        cache: Optional cache shared across calls

    Returns:
        BNPEReport; ``ok`` iff all three clauses pass
    """
    check_profile(spec, profile)
    cache = cache if cache is not None and cache.spec is spec else BestResponseCache(spec)
    problems = []

    feasible = True
    for mechanism in profile:
        violations = mechanism_violations(spec, mechanism, max(tol, cache.feasibility_tol))
        if violations:
            feasible = False
            problems.extend(f"team {mechanism.team + 1}: {item}" for item in violations)

    slacks: Dict[Agent, float] = {}
    values, br_values = [], []
    for team in range(spec.n_teams):
        others = _others(profile, team)
        system = cache.system(others, team)
        team_slacks = system.agent_slacks(profile[team].flat())
        for member in range(spec.team_size):
            slacks[Agent(team, member)] = team_slacks.get(Agent(team, member), 0.0)
        values.append(float(cache.objective(others, team) @ profile[team].flat()))
        br_values.append(cache.best_response(others, team).value)

    incentive_compatible = all(slack >= -tol for slack in slacks.values())
    if not incentive_compatible:
        worst = min(slacks, key=slacks.get)
        problems.append(f"{worst.label()} has IC slack {slacks[worst]:.6g}")
    best_responding = True
    for team, (value, br_value) in enumerate(zip(values, br_values)):
        if br_value > value + tol:
            best_responding = False
            problems.append(f"principal {team + 1} gains {br_value - value:.6g} "
                            f"({br_value:.6g} vs {value:.6g})")

    return BNPEReport(
        ok=feasible and incentive_compatible and best_responding,
        feasibility=feasible,
        incentive_compatibility=incentive_compatible,
        best_responding=best_responding,
        values=values,
        best_response_values=br_values,
        slacks=slacks,
        problems=problems,
    )


# -- dynamics -------------------------------------------------------------------


@dataclass
class EquilibriumReport:
    """Outcome of dynamics that did not end in a cycle."""
    status: str
    profile: List[MechanismZ]
    values: List[float]
    slacks: Dict[Agent, float]
    iterations: int
    verification: Optional[BNPEReport] = None


@dataclass
class CycleStep:
    """A profile on a cycle, the team(s) moving from it and their best-response values."""
    profile: List[MechanismZ]
    teams: Tuple[int, ...]
    values: Tuple[float, ...]


@dataclass
class CycleCertificate:
    """A closed orbit of the best-response map."""
    steps: List[CycleStep]
    damping: float
    tol: float
    iterations: int = 0

    @property
    def period(self) -> int:
        return len(self.steps)

    @property
    def profiles(self) -> List[List[MechanismZ]]:
        return [step.profile for step in self.steps]

    @property
    def values(self) -> List[float]:
        return [value for step in self.steps for value in step.values]

    def verify(self, spec: GameSpec, cache: Optional[BestResponseCache] = None) -> bool:
        """Re-run each step and check it lands on its successor within tol."""
        cache = cache if cache is not None else BestResponseCache(spec)
        for k, step in enumerate(self.steps):
            successor = self.steps[(k + 1) % self.period].profile
            updated, values = _advance(spec, step.profile, step.teams, self.damping, cache)
            if profile_distance(updated, successor) > self.tol:
                return False
            if any(abs(a - b) > self.tol for a, b in zip(values, step.values)):
                return False
        return True


DynamicsResult = Union[EquilibriumReport, CycleCertificate]


def _advance(spec: GameSpec, profile: Sequence[MechanismZ], teams: Sequence[int], damping: float,
             cache: BestResponseCache) -> Tuple[List[MechanismZ], List[float]]:
    updated, values = list(profile), []
    for team in teams:
        response = cache.best_response(_others(profile, team), team)
        values.append(response.value)
        updated[team] = mixture(response.mechanism, profile[team], damping) if damping < 1.0 \
            else response.mechanism
    return updated, values


def _profile_key(profile: Sequence[MechanismZ], resolution: float) -> bytes:
    rounded = np.concatenate([np.round(m.flat() / resolution) for m in profile])
    return (rounded + 0.0).astype(np.int64).tobytes()


def best_response_dynamics(spec: GameSpec, init: Profile, schedule: str = ALTERNATING,
                           damping: float = 1.0, max_iter: int = 200, tol: float = 1e-9,
                           hash_resolution: float = HASH_RESOLUTION,
                           verify_tol: Optional[float] = None,
                           cache: Optional[BestResponseCache] = None) -> DynamicsResult:
    """Iterate best responses until a verified fixed point, a cycle or the budget.

    One iteration updates one team (alternating) or every team at once
    (simultaneous) with ``z <- damping * BR + (1 - damping) * z``. The state
    is converged once a full round leaves every z within ``tol`` and
    verify_bnpe passes. Cycles are detected by hashing the profile rounded to
    ``hash_resolution`` together with the team due to move next.

    Returns:
        CycleCertificate, or an EquilibriumReport with status verified_bnpe,
        not_equilibrium (stationary but failing verification) or
        budget_exhausted
    """
    if schedule not in (ALTERNATING, SIMULTANEOUS):
        raise ValueError(f"Unknown schedule: {schedule}")
    if not 0.0 < damping <= 1.0:
        raise ValueError(f"Damping must lie in (0, 1], got {damping}")
    check_profile(spec, init)
    cache = cache if cache is not None and cache.spec is spec else BestResponseCache(spec)
    verify_tol = verify_tol if verify_tol is not None else max(tol, IC_TOL)

    profile = list(init)
    seen: Dict[Tuple[bytes, int], int] = {}
    history: List[CycleStep] = []
    next_team, quiet = 0, 0
    round_length = spec.n_teams if schedule == ALTERNATING else 1

    for iteration in range(1, max_iter + 1):
        key = (_profile_key(profile, hash_resolution), next_team)
        if key in seen:
            orbit = history[seen[key]:]
            moving = any(
                profile_distance(step.profile, orbit[0].profile) > hash_resolution for step in orbit
            )
            if moving:
                return CycleCertificate(steps=orbit, damping=damping,
                                        tol=max(tol, hash_resolution), iterations=iteration - 1)
        seen[key] = len(history)

        teams = (next_team,) if schedule == ALTERNATING else tuple(range(spec.n_teams))
        updated, values = _advance(spec, profile, teams, damping, cache)
        history.append(CycleStep(profile=list(profile), teams=teams, values=tuple(values)))
        change = profile_distance(updated, profile)
        profile = updated
        quiet = quiet + 1 if change < tol else 0
        if schedule == ALTERNATING:
            next_team = (next_team + 1) % spec.n_teams

        if quiet >= round_length:
            report = verify_bnpe(spec, profile, verify_tol, cache)
            status = VERIFIED if report.ok else NOT_EQUILIBRIUM
            return EquilibriumReport(status=status, profile=profile, values=report.values,
                                     slacks=report.slacks, iterations=iteration,
                                     verification=report)

    report = verify_bnpe(spec, profile, verify_tol, cache)
    return EquilibriumReport(
        status=BUDGET_EXHAUSTED,
        profile=profile, values=report.values, slacks=report.slacks,
        iterations=max_iter, verification=report,
    )
