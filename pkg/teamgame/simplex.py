"""Dense two-phase simplex with Bland's rule.

Deterministic by construction: the entering column is the lowest-index
improving column and ratio ties go to the lowest basic index, so reruns
visit the same vertices and return bit-identical solutions.
"""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .errors import SolverError
from .incentives import ConstraintSystem
from .settings import FEASIBILITY_TOL, PIVOT_TOL

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class LinearProgram:
    """maximize ``objective @ x`` s.t. equality rows, ``>=`` rows and ``0 <= x <= upper``.

    ``upper=None`` drops the upper bounds.
    """
    objective: np.ndarray
    eq_matrix: np.ndarray
    eq_rhs: np.ndarray
    ineq_matrix: np.ndarray
    ineq_rhs: np.ndarray
    upper: Optional[float] = 1.0

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float).reshape(-1)
        n = self.objective.shape[0]
        self.eq_matrix = np.asarray(self.eq_matrix, dtype=float).reshape(-1, n)
        self.ineq_matrix = np.asarray(self.ineq_matrix, dtype=float).reshape(-1, n)
        self.eq_rhs = np.asarray(self.eq_rhs, dtype=float).reshape(-1)
        self.ineq_rhs = np.asarray(self.ineq_rhs, dtype=float).reshape(-1)
        if self.eq_matrix.shape[0] != self.eq_rhs.shape[0]:
            raise ValueError("Equality rows and right-hand sides differ in count")
        if self.ineq_matrix.shape[0] != self.ineq_rhs.shape[0]:
            raise ValueError("Inequality rows and right-hand sides differ in count")

    @classmethod
    def from_system(cls, objective: np.ndarray, system: ConstraintSystem,
                    upper: Optional[float] = 1.0) -> 'LinearProgram':
        return cls(objective=objective, eq_matrix=system.eq_matrix, eq_rhs=system.eq_rhs,
                   ineq_matrix=system.ineq_matrix, ineq_rhs=system.ineq_rhs, upper=upper)

    @property
    def n_variables(self) -> int:
        return self.objective.shape[0]


@dataclass
class LPResult:
    """Outcome of solve_lp."""
    status: str
    value: Optional[float] = None
    x: Optional[np.ndarray] = None
    iterations: int = 0
    dropped_rows: List[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status == OPTIMAL


class _Tableau:
    def __init__(self, matrix: np.ndarray, rhs: np.ndarray, basis: List[int], pivot_tol: float):
        self.matrix = matrix
        self.rhs = rhs
        self.basis = basis
        self.pivot_tol = pivot_tol
        self.iterations = 0

    def pivot(self, row: int, column: int):
        pivot = self.matrix[row, column]
        self.matrix[row] /= pivot
        self.rhs[row] /= pivot
        for other in range(self.matrix.shape[0]):
            if other == row:
                continue
            factor = self.matrix[other, column]
            if factor != 0.0:
                self.matrix[other] -= factor * self.matrix[row]
                self.rhs[other] -= factor * self.rhs[row]
        self.matrix[:, column] = 0.0
        self.matrix[row, column] = 1.0
        self.basis[row] = column
        self.iterations += 1

    def value(self, cost: np.ndarray) -> float:
        return float(cost[self.basis] @ self.rhs)

    def run(self, cost: np.ndarray, allowed: np.ndarray, tol: float, max_iter: int) -> str:
        """Maximize ``cost @ x`` over the current basis, Bland's rule."""
        while True:
            if self.iterations > max_iter:
                raise SolverError(f"Simplex did not terminate within {max_iter} pivots")
            reduced = cost - cost[self.basis] @ self.matrix
            candidates = np.flatnonzero(allowed & (reduced > tol))
            if candidates.size == 0:
                return OPTIMAL
            column = int(candidates[0])
            entries = self.matrix[:, column]
            best_row, best_ratio = None, None
            for row in np.flatnonzero(entries > self.pivot_tol):
                ratio = self.rhs[row] / entries[row]
                if (best_row is None or ratio < best_ratio - 1e-15
                        or (abs(ratio - best_ratio) <= 1e-15 and self.basis[row] < self.basis[best_row])):
                    best_row, best_ratio = int(row), ratio
            if best_row is None:
                return UNBOUNDED
            self.pivot(best_row, column)


def solve_lp(lp: LinearProgram, feasibility_tol: float = FEASIBILITY_TOL,
             pivot_tol: float = PIVOT_TOL, max_iter: Optional[int] = None) -> LPResult:
    """Solve a LinearProgram.

    Returns:
        LPResult with status 'optimal' (value and solution), 'infeasible' or
        'unbounded'

    Raises:
        SolverError: If the pivot budget runs out
    """
    n = lp.n_variables
    blocks, rhs = [], []
    n_ge = lp.ineq_matrix.shape[0]
    n_upper = n if lp.upper is not None else 0
    n_slack = n_ge + n_upper

    # columns: x | surplus of >= rows | slack of upper bounds
    if lp.eq_matrix.shape[0]:
        blocks.append(np.hstack([lp.eq_matrix, np.zeros((lp.eq_matrix.shape[0], n_slack))]))
        rhs.append(lp.eq_rhs)
    if n_ge:
        surplus = np.zeros((n_ge, n_slack))
        surplus[:, :n_ge] = -np.eye(n_ge)
        blocks.append(np.hstack([lp.ineq_matrix, surplus]))
        rhs.append(lp.ineq_rhs)
    if n_upper:
        bound = np.zeros((n, n_slack))
        bound[:, n_ge:] = np.eye(n)
        blocks.append(np.hstack([np.eye(n), bound]))
        rhs.append(np.full(n, float(lp.upper)))

    if not blocks:
        if np.any(lp.objective > 0):
            return LPResult(status=UNBOUNDED)
        return LPResult(status=OPTIMAL, value=0.0, x=np.zeros(n))

    matrix = np.vstack(blocks)
    b = np.concatenate(rhs).astype(float)
    flip = b < 0
    matrix[flip] *= -1.0
    b[flip] *= -1.0

    m, structural = matrix.shape
    tableau = _Tableau(
        matrix=np.hstack([matrix, np.eye(m)]),
        rhs=b.copy(),
        basis=list(range(structural, structural + m)),
        pivot_tol=pivot_tol,
    )
    total = structural + m
    max_iter = max_iter if max_iter is not None else 50 * (m + total) + 1000
    artificial = np.zeros(total, dtype=bool)
    artificial[structural:] = True

    phase_one = np.where(artificial, -1.0, 0.0)
    tableau.run(phase_one, np.ones(total, dtype=bool), feasibility_tol * 1e-3, max_iter)
    if tableau.value(phase_one) < -feasibility_tol:
        return LPResult(status=INFEASIBLE, iterations=tableau.iterations)

    # drive artificials out of the basis; rows with no structural entry are redundant
    dropped = []
    row = 0
    while row < tableau.matrix.shape[0]:
        if tableau.basis[row] >= structural:
            entries = np.flatnonzero(np.abs(tableau.matrix[row, :structural]) > pivot_tol)
            if entries.size:
                tableau.pivot(row, int(entries[0]))
            else:
                dropped.append(row)
                keep = np.arange(tableau.matrix.shape[0]) != row
                tableau.matrix = tableau.matrix[keep]
                tableau.rhs = tableau.rhs[keep]
                del tableau.basis[row]
                continue
        row += 1

    cost = np.zeros(total)
    cost[:n] = lp.objective
    status = tableau.run(cost, ~artificial, feasibility_tol * 1e-3, max_iter)
    if status == UNBOUNDED:
        return LPResult(status=UNBOUNDED, iterations=tableau.iterations, dropped_rows=dropped)

    solution = np.zeros(total)
    solution[tableau.basis] = tableau.rhs
    x = solution[:n]
    x[np.abs(x) < pivot_tol] = 0.0
    return LPResult(status=OPTIMAL, value=float(lp.objective @ x), x=x,
                    iterations=tableau.iterations, dropped_rows=dropped)
