"""Prokhorov, Hausdorff and robust narrow distances on finite laws."""

from bisect import bisect_left
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from networkx.algorithms.flow import edmonds_karp

from .laws import deviation_generators, deviation_law, truthful_law
from .model import Agent, GameSpec, Profile
from .spaces import FiniteDistribution, GroundMetric

# admissibility slack on float distances; grid distances are exact multiples
DISTANCE_SLACK = 1e-12

SOURCE = "source"
SINK = "sink"


@dataclass
class TransportInstance:
    """Strassen subproblem: how much mass moves from mu to nu within epsilon."""
    mu: FiniteDistribution
    nu: FiniteDistribution
    epsilon: float
    metric: Optional[GroundMetric] = None

    def __post_init__(self):
        if self.mu.index != self.nu.index:
            raise ValueError("Transport needs both distributions on one space")
        if self.metric is None:
            self.metric = GroundMetric.on(self.mu.index)


def _support(distribution: FiniteDistribution) -> Tuple[np.ndarray, List[Fraction]]:
    positions = distribution.support()
    points = np.array(np.unravel_index(positions, distribution.index.shape)).T
    masses = [Fraction(float(distribution.mass[p])) for p in positions]
    return points.reshape(len(positions), -1), masses


def _transport_mass(mu: Sequence[Fraction], nu: Sequence[Fraction], distances: np.ndarray,
                    epsilon: float) -> Fraction:
    admissible = distances <= epsilon + DISTANCE_SLACK
    if admissible.all():
        return min(sum(mu, Fraction(0)), sum(nu, Fraction(0)))
    rows, columns = np.nonzero(admissible)
    if admissible.sum(axis=1).max(initial=0) <= 1 and admissible.sum(axis=0).max(initial=0) <= 1:
        return sum((min(mu[i], nu[j]) for i, j in zip(rows, columns)), Fraction(0))

    graph = nx.DiGraph()
    for i, mass in enumerate(mu):
        graph.add_edge(SOURCE, ('mu', i), capacity=mass)
    for j, mass in enumerate(nu):
        graph.add_edge(('nu', j), SINK, capacity=mass)
    for i, j in zip(rows, columns):
        graph.add_edge(('mu', int(i)), ('nu', int(j)), capacity=min(mu[i], nu[j]))
    if not graph.has_node(SOURCE) or not graph.has_node(SINK):
        return Fraction(0)
    return Fraction(nx.maximum_flow_value(graph, SOURCE, SINK, flow_func=edmonds_karp))


def max_transport_within(instance: TransportInstance) -> float:
    """Largest mass movable from mu to nu along pairs at distance at most epsilon.

    Solved as max-flow on the bipartite support graph with rational
    capacities, so the value is exact for the float masses given.
    """
    mu_points, mu_mass = _support(instance.mu)
    nu_points, nu_mass = _support(instance.nu)
    distances = instance.metric.pairwise(mu_points, nu_points)
    return float(_transport_mass(mu_mass, nu_mass, distances, instance.epsilon))


def prokhorov(mu: FiniteDistribution, nu: FiniteDistribution,
              metric: Optional[GroundMetric] = None) -> float:
    """Prokhorov distance under the closed-neighbourhood convention.

    For each breakpoint d_k of the pairwise distances the candidate is
    max(d_k, 1 - M(d_k)) with M the transportable mass; the minimum over
    breakpoints is located by bisection since d_k increases and 1 - M(d_k)
    does not.
    """
    if mu.index != nu.index:
        raise ValueError("Prokhorov distance needs both distributions on one space")
    if np.array_equal(mu.mass, nu.mass):
        return 0.0
    metric = metric if metric is not None else GroundMetric.on(mu.index)
    mu_points, mu_mass = _support(mu)
    nu_points, nu_mass = _support(nu)
    distances = metric.pairwise(mu_points, nu_points)
    breaks = np.unique(np.concatenate([[0.0], distances.ravel()]))

    deficits: Dict[int, Fraction] = {}

    def deficit(k: int) -> Fraction:
        if k not in deficits:
            deficits[k] = 1 - _transport_mass(mu_mass, nu_mass, distances, float(breaks[k]))
        return deficits[k]

    class _Crossing:
        def __len__(self):
            return len(breaks)

        def __getitem__(self, k):
            return Fraction(float(breaks[k])) >= deficit(k)

    k = bisect_left(_Crossing(), True)
    k = min(k, len(breaks) - 1)
    best = max(float(breaks[k]), float(deficit(k)))
    if k > 0:
        best = min(best, float(deficit(k - 1)))
    return best


def _unique(laws: Sequence[FiniteDistribution]) -> List[FiniteDistribution]:
    seen, result = set(), []
    for law in laws:
        key = law.mass.tobytes()
        if key not in seen:
            seen.add(key)
            result.append(law)
    return result


def hausdorff(set_a: Sequence[FiniteDistribution], set_b: Sequence[FiniteDistribution],
              metric: Optional[GroundMetric] = None) -> float:
    """Hausdorff distance between two finite sets of laws under prokhorov.

    Raises:
        ValueError: If either set is empty
    """
    if not set_a or not set_b:
        raise ValueError("Hausdorff distance needs two nonempty sets of laws")
    set_a, set_b = _unique(set_a), _unique(set_b)
    pairwise = np.array([[prokhorov(a, b, metric) for b in set_b] for a in set_a])
    return float(max(pairwise.min(axis=1).max(), pairwise.min(axis=0).max()))


@dataclass
class RobustDistance:
    """Both components of the robust narrow distance."""
    truthful: float
    deviation: float
    per_agent: Dict[Agent, float] = field(default_factory=dict)

    @property
    def value(self) -> float:
        return max(self.truthful, self.deviation)

    def to_dict(self) -> Dict:
        return {
            'distance': self.value,
            'truthful_prokhorov': self.truthful,
            'deviation_hausdorff': self.deviation,
            'deviation_set': 'pure-deviation generator laws',
            'per_agent': [
                {'agent': [agent.team + 1, agent.member + 1], 'hausdorff': value}
                for agent, value in self.per_agent.items()
            ],
        }


def _generator_laws(spec: GameSpec, profile: Profile, agent: Agent) -> List[FiniteDistribution]:
    return [deviation_law(spec, profile, strategy).distribution(tol=1e-9)
            for strategy in deviation_generators(spec, profile, agent)]


def robust_narrow_components(spec: GameSpec, first: Profile, second: Profile) -> RobustDistance:
    """Truthful Prokhorov part and per-agent deviation Hausdorff parts of d*.

    Deviation laws stay on the extended space so the deviator's report and
    actual action are compared; the deviation part is the max over agents.
    """
    outcome_metric = GroundMetric.on(spec.outcome_index)
    truthful = prokhorov(truthful_law(spec, first).distribution(tol=1e-9),
                         truthful_law(spec, second).distribution(tol=1e-9), outcome_metric)
    extended_metric = GroundMetric.on(spec.extended_index)
    per_agent = {
        agent: hausdorff(_generator_laws(spec, first, agent), _generator_laws(spec, second, agent),
                         extended_metric)
        for agent in spec.agents
    }
    return RobustDistance(truthful=truthful, deviation=max(per_agent.values(), default=0.0),
                          per_agent=per_agent)


def robust_narrow_distance(spec: GameSpec, first: Profile, second: Profile) -> float:
    """max(prokhorov of truthful laws, hausdorff of deviation-law sets)."""
    return robust_narrow_components(spec, first, second).value
