"""Finite ambient spaces, ground metrics, distributions and transition kernels.

Everything in the package is built on lexicographically ordered product
indices: position ``k`` of a product of spaces with sizes ``(s_1, ..., s_m)``
is the C-order ravel of the per-component positions, so reshaping a flat
mass vector to ``index.shape`` gives one array axis per component.
"""

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial.distance import cdist

from .settings import MASS_TOL

EUCLIDEAN_MAX = "euclidean_max"
DISCRETE = "discrete"
COMPONENT_MAX = "component_max"


def _format_value(value: float) -> str:
    return f"{float(value):.12g}"


@dataclass(frozen=True, eq=False)
class FiniteSpace:
    """A finite grid with a normalized ground metric.

    Numeric spaces carry one coordinate vector per point; coordinates are
    span-normalized to [0, 1] per axis at construction. Categorical spaces
    carry no coordinates and use the discrete metric.
    """
    name: str
    labels: Tuple[str, ...]
    coords: Optional[np.ndarray] = None
    metric_kind: str = DISCRETE
    values: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        labels = tuple(str(label) for label in self.labels)
        if not labels:
            raise ValueError(f"Space {self.name!r} has no points")
        if len(set(labels)) != len(labels):
            raise ValueError(f"Space {self.name!r} has duplicate labels: {labels}")
        object.__setattr__(self, 'labels', labels)

        if self.metric_kind not in (EUCLIDEAN_MAX, DISCRETE):
            raise ValueError(f"Unknown metric kind for space {self.name!r}: {self.metric_kind}")

        if self.metric_kind == EUCLIDEAN_MAX:
            if self.coords is None:
                raise ValueError(f"Space {self.name!r}: euclidean_max needs coordinates")
            raw = np.asarray(self.coords, dtype=float)
            if raw.ndim == 1:
                raw = raw.reshape(-1, 1)
            if raw.ndim != 2 or raw.shape[0] != len(labels):
                raise ValueError(
                    f"Space {self.name!r}: expected one coordinate vector per point, "
                    f"got shape {raw.shape} for {len(labels)} points"
                )
            if not np.all(np.isfinite(raw)):
                raise ValueError(f"Space {self.name!r}: coordinates must be finite")
            if self.values is None:
                object.__setattr__(self, 'values', raw[:, 0].copy())
            low = raw.min(axis=0)
            span = raw.max(axis=0) - low
            span[span == 0] = 1.0
            normalized = (raw - low) / span
            normalized.setflags(write=False)
            object.__setattr__(self, 'coords', normalized)
        elif self.coords is not None:
            raise ValueError(f"Space {self.name!r}: discrete spaces carry no coordinates")

        if self.values is not None:
            values = np.asarray(self.values, dtype=float)
            values.setflags(write=False)
            object.__setattr__(self, 'values', values)

    @classmethod
    def grid(cls, name: str, values: Sequence[float]) -> 'FiniteSpace':
        """Numeric one-dimensional grid labelled by its values."""
        values = np.asarray(values, dtype=float)
        labels = tuple(_format_value(v) for v in values)
        return cls(name=name, labels=labels, coords=values, metric_kind=EUCLIDEAN_MAX,
                   values=values)

    @classmethod
    def categorical(cls, name: str, labels: Sequence[str]) -> 'FiniteSpace':
        """Categorical space under the discrete metric."""
        return cls(name=name, labels=tuple(labels), metric_kind=DISCRETE)

    def __len__(self) -> int:
        return len(self.labels)

    def position(self, label: str) -> int:
        """Position of a label, raising ValueError for unknown labels."""
        try:
            return self.labels.index(str(label))
        except ValueError:
            raise ValueError(f"{label!r} is not a point of space {self.name!r}")

    @cached_property
    def distance_matrix(self) -> np.ndarray:
        """Pairwise normalized distances, values in [0, 1]."""
        if self.metric_kind == DISCRETE:
            matrix = 1.0 - np.eye(len(self))
        else:
            matrix = cdist(self.coords, self.coords, metric='chebyshev')
        matrix.setflags(write=False)
        return matrix


class ProductIndex:
    """Lexicographic enumeration of a Cartesian product of finite spaces."""

    def __init__(self, spaces: Sequence[FiniteSpace]):
        self.spaces: Tuple[FiniteSpace, ...] = tuple(spaces)
        self.shape: Tuple[int, ...] = tuple(len(space) for space in self.spaces)
        self.size = int(np.prod(self.shape, dtype=np.int64)) if self.shape else 1

    def __len__(self) -> int:
        return self.size

    def __iter__(self) -> Iterator[Tuple[str, ...]]:
        return itertools.product(*(space.labels for space in self.spaces))

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProductIndex):
            return NotImplemented
        return self.shape == other.shape and all(
            a is b or (a.name == b.name and a.labels == b.labels)
            for a, b in zip(self.spaces, other.spaces)
        )

    def __hash__(self):
        return hash((self.shape, tuple(space.labels for space in self.spaces)))

    def tuple_at(self, position: int) -> Tuple[int, ...]:
        """Per-component positions of a flat position."""
        if not 0 <= position < self.size:
            raise IndexError(f"Position {position} outside product of size {self.size}")
        return tuple(int(k) for k in np.unravel_index(position, self.shape))

    def position(self, components: Sequence[int]) -> int:
        """Flat position of a tuple of per-component positions."""
        if len(components) != len(self.shape):
            raise ValueError(
                f"Expected a {len(self.shape)}-tuple, got {len(components)} components"
            )
        return int(np.ravel_multi_index(tuple(components), self.shape))

    def labels_at(self, position: int) -> Tuple[str, ...]:
        """Labels of the tuple at a flat position."""
        return tuple(space.labels[k] for space, k in zip(self.spaces, self.tuple_at(position)))

    def position_of_labels(self, labels: Sequence[str]) -> int:
        """Flat position of a tuple of labels."""
        if len(labels) != len(self.spaces):
            raise ValueError(
                f"Expected {len(self.spaces)} labels, got {len(labels)}"
            )
        return self.position([space.position(label) for space, label in zip(self.spaces, labels)])


def product_index(spaces: Sequence[FiniteSpace]) -> ProductIndex:
    """Lexicographic index of the Cartesian product of ``spaces``.

    Raises:
        ValueError: If ``spaces`` is empty
    """
    if not spaces:
        raise ValueError("product_index needs at least one space")
    return ProductIndex(spaces)


@dataclass(frozen=True, eq=False)
class GroundMetric:
    """Metric on a product of finite spaces."""
    components: Tuple[FiniteSpace, ...]
    kind: str = COMPONENT_MAX

    def __post_init__(self):
        object.__setattr__(self, 'components', tuple(self.components))
        if not self.components:
            raise ValueError("A ground metric needs at least one component space")
        if self.kind not in (COMPONENT_MAX, DISCRETE):
            raise ValueError(f"Unknown ground metric kind: {self.kind}")

    @classmethod
    def on(cls, index: ProductIndex, kind: str = COMPONENT_MAX) -> 'GroundMetric':
        return cls(components=index.spaces, kind=kind)

    @property
    def index(self) -> ProductIndex:
        return ProductIndex(self.components)

    def pairwise(self, left: np.ndarray, right: np.ndarray) -> np.ndarray:
        """Distance matrix between two arrays of points.

        Args:
            left: Integer array (k, d) of per-component positions
            right: Integer array (l, d) of per-component positions

        Returns:
            Array (k, l) of distances in [0, 1]
        """
        left = np.asarray(left, dtype=np.int64).reshape(-1, len(self.components))
        right = np.asarray(right, dtype=np.int64).reshape(-1, len(self.components))
        if self.kind == DISCRETE:
            same = np.all(left[:, None, :] == right[None, :, :], axis=2)
            return np.where(same, 0.0, 1.0)
        result = np.zeros((left.shape[0], right.shape[0]))
        for c, space in enumerate(self.components):
            matrix = space.distance_matrix
            np.maximum(result, matrix[np.ix_(left[:, c], right[:, c])], out=result)
        return result


def ground_distance(metric: GroundMetric, p: Sequence[int], q: Sequence[int]) -> float:
    """Distance between two points given as per-component positions.

    Raises:
        ValueError: If either point has the wrong number of components
    """
    d = len(metric.components)
    if len(p) != d or len(q) != d:
        raise ValueError(
            f"Dimension mismatch: metric has {d} components, got points of "
            f"length {len(p)} and {len(q)}"
        )
    return float(metric.pairwise([p], [q])[0, 0])


@dataclass(frozen=True, eq=False)
class FiniteDistribution:
    """Probability vector over a product index."""
    index: ProductIndex
    mass: np.ndarray
    tol: float = MASS_TOL

    def __post_init__(self):
        mass = np.asarray(self.mass, dtype=float).reshape(-1)
        if mass.shape[0] != len(self.index):
            raise ValueError(
                f"Distribution has {mass.shape[0]} masses for an index of size {len(self.index)}"
            )
        if np.any(mass < 0):
            raise ValueError(f"Distribution has negative mass {mass.min():.3g}")
        total = mass.sum()
        if abs(total - 1.0) > self.tol:
            raise ValueError(f"Distribution masses sum to {total!r}, not 1")
        mass.setflags(write=False)
        object.__setattr__(self, 'mass', mass)

    @classmethod
    def uniform(cls, index: ProductIndex) -> 'FiniteDistribution':
        return cls(index=index, mass=np.full(len(index), 1.0 / len(index)))

    @classmethod
    def point(cls, index: ProductIndex, position: int) -> 'FiniteDistribution':
        mass = np.zeros(len(index))
        mass[position] = 1.0
        return cls(index=index, mass=mass)

    def as_array(self) -> np.ndarray:
        """Masses reshaped to one axis per component."""
        return self.mass.reshape(self.index.shape)

    def support(self) -> np.ndarray:
        """Flat positions with positive mass."""
        return np.flatnonzero(self.mass > 0)


@dataclass(frozen=True, eq=False)
class Kernel:
    """Transition probability: one row distribution per source tuple."""
    source: ProductIndex
    target: ProductIndex
    rows: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=float)
        expected = (len(self.source), len(self.target))
        if rows.shape != expected:
            rows = rows.reshape(expected)
        rows.setflags(write=False)
        object.__setattr__(self, 'rows', rows)

    def tensor(self) -> np.ndarray:
        """Rows reshaped to source axes followed by target axes."""
        return self.rows.reshape(self.source.shape + self.target.shape)

    def row(self, position: int) -> FiniteDistribution:
        return FiniteDistribution(index=self.target, mass=self.rows[position])


@dataclass
class KernelCheck:
    """Result of validate_kernel."""
    ok: bool
    row: Optional[int] = None
    defect: Optional[str] = None
    detail: str = ""

    def to_dict(self):
        return {'ok': self.ok, 'row': self.row, 'defect': self.defect, 'detail': self.detail}


def validate_kernel(kernel: Kernel, tol: float = MASS_TOL) -> KernelCheck:
    """Check every row of a kernel is a probability vector.

    Returns:
        KernelCheck with the first violating row, its defect
        ('negativity' or 'normalization') and a description
    """
    for position, row in enumerate(kernel.rows):
        if np.any(row < 0):
            return KernelCheck(
                ok=False, row=position, defect='negativity',
                detail=f"row {kernel.source.labels_at(position)} has entry {row.min():.6g} < 0",
            )
        total = row.sum()
        if not np.isfinite(total) or abs(total - 1.0) > tol:
            return KernelCheck(
                ok=False, row=position, defect='normalization',
                detail=f"row {kernel.source.labels_at(position)} sums to {total:.12g}",
            )
    return KernelCheck(ok=True)


def flat_labels(labels: Sequence[str]) -> str:
    """Join member labels of a profile into one label."""
    return ",".join(labels)


def profile_labels(index: ProductIndex) -> List[str]:
    """Joined labels for every tuple of an index, in index order."""
    return [flat_labels(labels) for labels in index]
