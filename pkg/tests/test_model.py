"""Game specs, check_spec and mechanism representations."""

import dataclasses

import numpy as np
import pytest

from conftest import random_game, random_mechanism
from teamgame.errors import SpecViolation
from teamgame.model import (
    FINITENESS_NOTE,
    Agent,
    MechanismZ,
    check_profile,
    check_spec,
    compose_mechanism,
    factor_mechanism,
    mechanism_from_kernels,
    mechanism_violations,
    mixture,
    profile_distance,
    replace_team,
    uniform_mechanism,
)
from teamgame.scenarios import myerson_mechanism


def test_bundled_games_pass_check_spec(myerson, contest):
    for spec in (myerson, contest):
        report = check_spec(spec)
        assert report.ok
        assert report.assumptions == FINITENESS_NOTE
        assert report.violations == []
    assert any("winner-take-all" in note for note in check_spec(contest).notes)


def test_shapes(myerson, contest):
    assert myerson.z_shape == (2, 3, 1, 1)
    assert contest.z_shape == (2, 2, 2, 5)
    assert contest.agents == [Agent(0, 0), Agent(1, 0)]
    assert len(contest.outcome_index) == 2 * 2 * 2 * 2 * 2 * 2 * 5 * 5
    assert len(contest.extended_index) == len(contest.outcome_index) * 4


def test_check_spec_names_violated_assumption(myerson):
    unnormalized = dataclasses.replace(myerson, prior=myerson.prior * 2)
    report = check_spec(unnormalized)
    assert not report.ok
    assert report.assumptions == "violated"
    assert report.violations[0].assumption == 'Assumption 1'

    empty = dataclasses.replace(myerson, feasible_rewards=np.zeros((1, 1), dtype=bool))
    assert [v.assumption for v in check_spec(empty).violations] == ['Assumption 3']

    utilities = np.array(myerson.member_utility)
    utilities[0, 0, 0, 0, 0] = np.nan
    broken = dataclasses.replace(myerson, member_utility=utilities)
    assert [v.assumption for v in check_spec(broken).violations] == ['Assumption 4']


def test_check_spec_catches_bad_winnings_kernel(myerson):
    rows = np.ones(36)
    rows[5] = 0.5
    broken = dataclasses.replace(myerson, winnings_kernel=rows)
    report = check_spec(broken)
    assert report.violations[0].assumption == 'Assumption 2'
    assert "normalization" in report.violations[0].message


def test_structural_mismatch_raises(myerson):
    with pytest.raises(SpecViolation):
        dataclasses.replace(myerson, prior=np.full(3, 1.0 / 3.0))
    with pytest.raises(SpecViolation):
        myerson.agent_position(Agent(2, 0))


def test_validated_rejects_each_invariant(contest):
    good = uniform_mechanism(contest, 0)
    assert mechanism_violations(contest, good) == []

    z = np.array(good.z)
    z[0, 0, 1, 0] += 0.1
    z[0, 0, 1, 1] -= 0.1
    assert MechanismZ.validated(contest, 0, z)  # reward shift within w=1 keeps every invariant

    z = np.array(good.z)
    z[0, 0, 0, 0] *= 2
    with pytest.raises(SpecViolation, match="sum to 1"):
        MechanismZ.validated(contest, 0, z)

    z = np.array(good.z)
    z[0, 0, 1, :] *= 0.5
    z[0, 1, 1, :] *= 1.5
    with pytest.raises(SpecViolation, match="depends on w"):
        MechanismZ.validated(contest, 0, z)

    z = np.array(good.z)
    z[0, 0, 0, 0] -= 0.1
    z[0, 0, 0, 4] += 0.1
    with pytest.raises(SpecViolation, match="outside feasible_rewards"):
        MechanismZ.validated(contest, 0, z)

    z = np.array(good.z)
    z[1, 0, 1, 0] = -0.2
    z[1, 0, 1, 1] += 0.3
    with pytest.raises(SpecViolation, match="negative"):
        MechanismZ.validated(contest, 0, z)

    with pytest.raises(SpecViolation):
        MechanismZ.validated(contest, 0, np.zeros(7))


def test_factor_then_compose_is_identity():
    rng = np.random.default_rng(3)
    spec = random_game(rng)
    mechanism = random_mechanism(rng, spec, 1)
    factored = factor_mechanism(mechanism, spec)
    assert np.allclose(compose_mechanism(factored, spec).z, mechanism.z, atol=1e-14)
    assert np.allclose(mechanism.reward_kernel(spec).rows, factored.kappa.rows)


def test_zero_probability_rows_default_to_uniform_feasible(contest):
    alpha = [[1.0, 0.0], [0.0, 1.0]]
    mechanism = mechanism_from_kernels(contest, 0, alpha)
    kappa = mechanism.reward_kernel(contest).rows.reshape(2, 2, 2, 5)
    # t'=0 never recommends a'=1
    assert np.allclose(kappa[0, 1, 0], [1, 0, 0, 0, 0])
    assert np.allclose(kappa[0, 1, 1], np.full(5, 0.2))


def test_compose_rejects_infeasible_rewards(contest):
    kappa = np.zeros((2, 2, 2, 5))
    kappa[..., 4] = 1.0
    with pytest.raises(SpecViolation, match="outside"):
        mechanism_from_kernels(contest, 0, np.full((2, 2), 0.5), kappa)


def test_mixture_stays_valid(myerson):
    mixed = mixture(myerson_mechanism(myerson, 0, 'C'), myerson_mechanism(myerson, 0, 'match'), 0.25)
    assert mechanism_violations(myerson, mixed) == []
    assert np.allclose(mixed.action_marginal(myerson), [[0.75, 0, 0.25], [0, 0.75, 0.25]])
    with pytest.raises(ValueError):
        mixture(mixed, mixed, 1.5)
    with pytest.raises(SpecViolation):
        mixture(mixed, myerson_mechanism(myerson, 1, 'C'), 0.5)


def test_profile_helpers(myerson):
    c = [myerson_mechanism(myerson, 0, 'C'), myerson_mechanism(myerson, 1, 'C')]
    check_profile(myerson, c)
    with pytest.raises(SpecViolation):
        check_profile(myerson, list(reversed(c)))
    with pytest.raises(SpecViolation):
        check_profile(myerson, c[:1])

    updated = replace_team(c, myerson_mechanism(myerson, 1, 'match'))
    assert updated[0] is c[0]
    assert profile_distance(c, updated) == 1.0
    assert profile_distance(c, c) == 0.0
