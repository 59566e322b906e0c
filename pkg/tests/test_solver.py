"""Best responses, equilibrium verification and best-response dynamics."""

import numpy as np
import pytest

import teamgame.solver as solver
from conftest import named, point_game, random_game, random_profile
from teamgame.errors import InfeasibleICSet, SolverError
from teamgame.incentives import ic_slack, is_incentive_compatible
from teamgame.laws import principal_value
from teamgame.model import Agent, MechanismZ, mechanism_from_kernels
from teamgame.scenarios import mechanism_name, myerson_mechanism, preset_profile
from teamgame.simplex import INFEASIBLE, UNBOUNDED, LPResult
from teamgame.solver import (
    BUDGET_EXHAUSTED,
    SIMULTANEOUS,
    VERIFIED,
    BestResponseCache,
    CycleCertificate,
    EquilibriumReport,
    best_response,
    best_response_dynamics,
    ic_feasible,
    ic_set_contains,
    principal_objective,
    verify_bnpe,
)


def test_objective_matches_principal_value():
    rng = np.random.default_rng(2)
    spec = random_game(rng)
    for _ in range(3):
        profile = random_profile(rng, spec)
        for team in range(spec.n_teams):
            weights = principal_objective(spec, profile, team)
            assert weights @ profile[team].flat() == pytest.approx(
                principal_value(spec, profile, team), abs=1e-12)


@pytest.mark.parametrize("opponent, expected, value", [
    ('C', 'match', 6.0),
    ('match', 'C', 5.0),
    ('mismatch', 'C', 5.0),
    ('A', 'C', 5.0),
])
def test_myerson_best_response_of_team_one(myerson, opponent, expected, value):
    others = [myerson_mechanism(myerson, 1, opponent)]
    response = best_response(myerson, others, 0)
    assert response.value == pytest.approx(value, abs=1e-9)
    assert mechanism_name(myerson, response.mechanism) == expected


def test_myerson_best_response_of_team_two(myerson):
    assert mechanism_name(myerson, best_response(myerson, [myerson_mechanism(myerson, 0, 'C')], 1)
                          .mechanism) == 'C'
    response = best_response(myerson, [myerson_mechanism(myerson, 0, 'match')], 1)
    assert mechanism_name(myerson, response.mechanism) == 'match'
    assert response.value == pytest.approx(6.0, abs=1e-9)


def test_cache_memoizes(myerson):
    cache = BestResponseCache(myerson)
    others = [myerson_mechanism(myerson, 1, 'C')]
    first = cache.best_response(others, 0)
    second = cache.best_response(others, 0)
    assert first is second
    assert (cache.hits, cache.misses) == (1, 1)
    assert cache.system(others, 0) is cache.system(others, 0)


def test_ic_set_contains_is_sensitive_to_opponents(myerson):
    match = myerson_mechanism(myerson, 0, 'match')
    assert ic_set_contains(myerson, [myerson_mechanism(myerson, 1, 'C')], 0, match.z)

    eps = 1e-3
    leaning = mechanism_from_kernels(myerson, 1, [[eps, 0.0, 1.0 - eps], [0.0, 0.0, 1.0]])
    assert not ic_set_contains(myerson, [leaning], 0, match.z)
    assert not ic_set_contains(myerson, [myerson_mechanism(myerson, 1, 'C')], 0, 2 * match.z)
    assert ic_feasible(myerson, [leaning], 0)


def test_lp_failures_surface_as_solver_errors(monkeypatch, myerson):
    others = [myerson_mechanism(myerson, 1, 'C')]
    monkeypatch.setattr(solver, 'solve_lp', lambda lp, *tolerances: LPResult(status=INFEASIBLE))
    with pytest.raises(InfeasibleICSet) as info:
        best_response(myerson, others, 0)
    assert info.value.team == 0
    assert not ic_feasible(myerson, others, 0)

    monkeypatch.setattr(solver, 'solve_lp', lambda lp, *tolerances: LPResult(status=UNBOUNDED))
    with pytest.raises(SolverError, match="unbounded"):
        best_response(myerson, others, 0)


def test_pivot_tolerance_reaches_the_simplex(myerson):
    others = [myerson_mechanism(myerson, 1, 'C')]
    assert BestResponseCache(myerson).best_response(others, 0).value == pytest.approx(6.0, abs=1e-9)

    # no tableau entry reaches 100, so phase one cannot pivot
    strict = BestResponseCache(myerson, pivot_tol=100.0)
    with pytest.raises(InfeasibleICSet):
        strict.best_response(others, 0)
    with pytest.raises(InfeasibleICSet):
        best_response(myerson, others, 0, pivot_tol=100.0)
    assert not ic_feasible(myerson, others, 0, pivot_tol=100.0)
    assert ic_feasible(myerson, others, 0)


def test_point_game_equilibrium():
    for n_teams in (1, 2):
        spec = point_game(n_teams)
        profile = preset_profile(spec, 'uniform')
        assert ic_slack(spec, profile, Agent(0, 0)) == pytest.approx(0.0, abs=1e-12)
        assert is_incentive_compatible(spec, profile).ok

        response = best_response(spec, profile, n_teams - 1)
        assert np.allclose(response.mechanism.z, profile[n_teams - 1].z)
        assert response.value == pytest.approx(2.0)

        result = best_response_dynamics(spec, profile)
        assert isinstance(result, EquilibriumReport)
        assert result.status == VERIFIED
        assert result.iterations == n_teams
        assert verify_bnpe(spec, result.profile).ok


def test_verify_reports_each_clause(myerson):
    report = verify_bnpe(myerson, named(myerson, 'match', 'C'))
    assert not report.ok
    assert report.feasibility and report.incentive_compatibility
    assert not report.best_responding
    assert report.gains == pytest.approx([0.0, 1.0], abs=1e-9)
    assert report.margin == pytest.approx(1.0, abs=1e-9)
    assert any(problem.startswith("principal 2 gains 1") for problem in report.problems)

    rendered = report.to_dict()
    assert rendered['clauses'] == {'feasibility': True, 'incentive_compatibility': True,
                                   'principals_best_respond': False}
    assert rendered['values'] == pytest.approx([6.0, 5.0])


def test_verify_flags_infeasible_mechanism(myerson):
    c = myerson_mechanism(myerson, 0, 'C')
    profile = [MechanismZ(team=0, z=2 * c.z), myerson_mechanism(myerson, 1, 'C')]
    report = verify_bnpe(myerson, profile)
    assert not report.feasibility
    assert report.margin == float('inf')
    assert report.problems[0].startswith("team 1:")


def test_alternating_dynamics_cycle(myerson):
    result = best_response_dynamics(myerson, named(myerson, 'C', 'C'))
    assert isinstance(result, CycleCertificate)
    assert result.period == 4
    assert result.iterations == 4
    assert [step.teams for step in result.steps] == [(0,), (1,), (0,), (1,)]
    assert result.values == pytest.approx([6.0, 6.0, 5.0, 5.0], abs=1e-9)
    assert result.verify(myerson)


def test_simultaneous_dynamics_cycle(myerson):
    result = best_response_dynamics(myerson, named(myerson, 'C', 'C'), schedule=SIMULTANEOUS)
    assert isinstance(result, CycleCertificate)
    assert result.period == 4
    assert all(step.teams == (0, 1) for step in result.steps)
    assert [[mechanism_name(myerson, m) for m in profile] for profile in result.profiles] == [
        ['C', 'C'], ['match', 'C'], ['match', 'match'], ['C', 'match'],
    ]
    assert result.values == pytest.approx([6, 5, 6, 6, 5, 6, 5, 5], abs=1e-9)
    assert result.verify(myerson)


def test_budget_exhausted(myerson):
    result = best_response_dynamics(myerson, named(myerson, 'C', 'C'), max_iter=2)
    assert isinstance(result, EquilibriumReport)
    assert result.status == BUDGET_EXHAUSTED
    assert result.iterations == 2
    assert not result.verification.ok


def test_dynamics_argument_checks(myerson):
    profile = named(myerson, 'C', 'C')
    with pytest.raises(ValueError):
        best_response_dynamics(myerson, profile, schedule='random')
    with pytest.raises(ValueError):
        best_response_dynamics(myerson, profile, damping=0.0)
