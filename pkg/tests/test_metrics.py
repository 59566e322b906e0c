"""Transport, Prokhorov, Hausdorff and the robust narrow distance."""

import numpy as np
import pytest

from conftest import named
from teamgame.metrics import (
    TransportInstance,
    hausdorff,
    max_transport_within,
    prokhorov,
    robust_narrow_components,
    robust_narrow_distance,
)
from teamgame.spaces import DISCRETE, FiniteDistribution, FiniteSpace, GroundMetric, product_index


@pytest.fixture
def line():
    return product_index([FiniteSpace.grid('x', [0.0, 0.25, 1.0])])


def test_point_masses(line):
    first, second = FiniteDistribution.point(line, 0), FiniteDistribution.point(line, 1)
    assert prokhorov(first, second) == pytest.approx(0.25)
    assert prokhorov(first, FiniteDistribution.point(line, 2)) == pytest.approx(1.0)
    assert prokhorov(first, first) == 0.0


def test_transport_within_radius(line):
    first, second = FiniteDistribution.point(line, 0), FiniteDistribution.point(line, 1)
    assert max_transport_within(TransportInstance(first, second, 0.2)) == 0.0
    assert max_transport_within(TransportInstance(first, second, 0.25)) == 1.0


def test_partial_overlap(line):
    mu = FiniteDistribution(index=line, mass=[0.5, 0.5, 0.0])
    nu = FiniteDistribution(index=line, mass=[0.5, 0.0, 0.5])
    # 0.5 moves for free; the rest needs radius 0.75 (from 0.25) or gives deficit 0.5
    assert max_transport_within(TransportInstance(mu, nu, 0.0)) == 0.5
    assert prokhorov(mu, nu) == pytest.approx(0.5)


def test_prokhorov_is_symmetric_on_random_pairs():
    rng = np.random.default_rng(4)
    index = product_index([FiniteSpace.grid('x', [0.0, 0.3, 0.5, 1.0]),
                           FiniteSpace.grid('y', [0.0, 1.0, 3.0])])
    for _ in range(20):
        mu = FiniteDistribution(index=index, mass=rng.dirichlet(np.ones(len(index))))
        nu = FiniteDistribution(index=index, mass=rng.dirichlet(np.ones(len(index))))
        assert prokhorov(mu, nu) == pytest.approx(prokhorov(nu, mu), abs=1e-12)
        assert 0.0 <= prokhorov(mu, nu) <= 1.0


def test_discrete_metric_gives_total_variation(line):
    mu = FiniteDistribution(index=line, mass=[0.5, 0.25, 0.25])
    nu = FiniteDistribution(index=line, mass=[0.25, 0.25, 0.5])
    assert prokhorov(mu, nu, GroundMetric.on(line, DISCRETE)) == pytest.approx(0.25)


def test_mismatched_spaces_raise(line):
    other = product_index([FiniteSpace.grid('y', [0.0, 1.0])])
    with pytest.raises(ValueError):
        prokhorov(FiniteDistribution.point(line, 0), FiniteDistribution.point(other, 0))


def test_hausdorff(line):
    a, b = FiniteDistribution.point(line, 0), FiniteDistribution.point(line, 1)
    c = FiniteDistribution.point(line, 2)
    assert hausdorff([a], [a, b]) == pytest.approx(0.25)
    assert hausdorff([a, b], [b, a, a]) == 0.0
    assert hausdorff([a], [c]) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        hausdorff([], [a])


def test_robust_distance_on_myerson(myerson):
    same = robust_narrow_components(myerson, named(myerson, 'C', 'C'), named(myerson, 'C', 'C'))
    assert same.value == 0.0
    assert same.per_agent and all(value == 0.0 for value in same.per_agent.values())

    apart = robust_narrow_components(myerson, named(myerson, 'C', 'C'), named(myerson, 'match', 'C'))
    assert apart.truthful == pytest.approx(1.0)
    assert apart.value == pytest.approx(1.0)
    rendered = apart.to_dict()
    assert set(rendered) == {'distance', 'truthful_prokhorov', 'deviation_hausdorff',
                             'deviation_set', 'per_agent'}
    assert [entry['agent'] for entry in rendered['per_agent']] == [[1, 1], [2, 1]]
    assert robust_narrow_distance(myerson, named(myerson, 'C', 'C'),
                                  named(myerson, 'match', 'C')) == apart.value
