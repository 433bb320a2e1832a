from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterator, Optional, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .cell_pde import HomogResult
from .errors import InfeasibleError, NonConvergenceError, SolverError, ValidationError
from .grids import ControlGrid, PeriodicGrid
from .operators import OperatorKind, OperatorSpec, SampledOperator, SymMat

logger = logging.getLogger(__name__)

CLIP_SLACK = 1e-12


@dataclass(frozen=True)
class LpProblem:
    """max c.rho subject to a normalization row and the discrete adjoint rows.

    Columns are ordered control-major: column j * grid.size + i holds rho(y_i, alpha_j).
    The last adjoint row is dropped because the block annihilates constants.
    """

    objective: np.ndarray
    adjoint: sp.csr_matrix
    grid: PeriodicGrid
    controls: ControlGrid

    @property
    def a_eq(self) -> sp.csr_matrix:
        ones = sp.csr_matrix(np.ones((1, self.objective.size)))
        return sp.vstack([ones, self.adjoint[:-1]], format="csr")

    @property
    def b_eq(self) -> np.ndarray:
        rhs = np.zeros(self.adjoint.shape[0])
        rhs[0] = 1.0
        return rhs


@dataclass(frozen=True)
class DiscreteMeasure:
    """Optimal discrete invariant measure; weights[i, j] sits at (y_i, alpha_j)."""

    weights: np.ndarray
    grid: PeriodicGrid
    controls: ControlGrid
    objective: float
    adjoint_residual: float

    def y_marginal(self) -> np.ndarray:
        return self.weights.sum(axis=1)

    def control_marginal(self) -> np.ndarray:
        return self.weights.sum(axis=0)

    def y1_density(self) -> np.ndarray:
        """Marginal density in y1 at the grid's y1 axis points."""
        marginal = self.y_marginal()
        if self.grid.dim == 2:
            marginal = marginal.reshape(self.grid.n, self.grid.n).sum(axis=1)
        return marginal * self.grid.n

    def rows(self) -> Iterator[Tuple]:
        """(node, y1[, y2], alpha, orientation, weight) for every support point."""
        for i, coords in enumerate(self.grid.coords):
            for j, control in enumerate(self.controls.points):
                yield (i, *[float(c) for c in coords], control.value, control.orientation, float(self.weights[i, j]))


def default_control_count(op: OperatorSpec, n_alpha: Optional[int]) -> int:
    if n_alpha is not None:
        return n_alpha
    # the objective is affine in alpha, so the endpoints are exact
    return 2 if op.kind is OperatorKind.MAX_TWO_LINEAR else 41


def assemble_lp(op: OperatorSpec, Q: SymMat, grid: PeriodicGrid, controls: ControlGrid) -> LpProblem:
    if Q.dim != op.dim or grid.dim != op.dim:
        raise ValidationError(f"operator is {op.dim}D, Q is {Q.dim}D, grid is {grid.dim}D")
    sampled = SampledOperator(op, grid.y1)
    d11, d12, d22 = grid.stencils
    # row k of a block is sum_i A(y_i, alpha_j) : (D2 phi_k)(y_i), i.e. the transposed stencil
    d11t, d12t, d22t = d11.T.tocsr(), d12.T.tocsr(), d22.T.tocsr()
    blocks, objective = [], []
    for control in controls.points:
        A = sampled.diffusion(control)
        block = d11t @ sp.diags(A.q11)
        if grid.dim == 2:
            block = block + d12t @ sp.diags(2.0 * A.q12) + d22t @ sp.diags(A.q22)
        blocks.append(block)
        objective.append(sampled.linearized(Q, control))
    adjoint = sp.hstack(blocks, format="csr")
    logger.debug("assembled LP: %d variables, %d adjoint rows", adjoint.shape[1], adjoint.shape[0])
    return LpProblem(np.concatenate(objective), adjoint, grid, controls)


def solve_lp(lp: LpProblem, tol: float = 1e-9) -> DiscreteMeasure:
    res = linprog(
        -lp.objective,
        A_eq=lp.a_eq,
        b_eq=lp.b_eq,
        bounds=(0.0, None),
        method="highs",
        options={"primal_feasibility_tolerance": tol, "dual_feasibility_tolerance": tol},
    )
    if res.status == 1:
        raise NonConvergenceError("LP hit its iteration limit", float("nan"), int(getattr(res, "nit", 0)))
    if res.status == 2:
        raise InfeasibleError(f"LP infeasible, discretization is inconsistent: {res.message}")
    if res.status != 0:
        raise SolverError(f"LP solver failed (status {res.status}): {res.message}")

    x = np.asarray(res.x, dtype=float)
    worst = float(x.min())
    if worst < -CLIP_SLACK:
        logger.warning("LP returned weight %.3e below the clipping slack", worst)
    x = np.clip(x, 0.0, None)
    x /= x.sum()
    residual = float(np.abs(lp.adjoint @ x).max())
    weights = x.reshape(len(lp.controls), lp.grid.size).T
    return DiscreteMeasure(weights, lp.grid, lp.controls, float(lp.objective @ x), residual)


class InvariantMeasureLP:
    """H̄ as the optimal value of the invariant-measure linear program."""

    def __init__(self, n_alpha: Optional[int] = None, tol: float = 1e-9) -> None:
        if not tol > 0.0:
            raise ValidationError(f"tolerance must be positive, got {tol}")
        self.n_alpha = n_alpha
        self.tol = tol

    def solve(self, op: OperatorSpec, Q: SymMat, grid: PeriodicGrid) -> Tuple[HomogResult, DiscreteMeasure]:
        controls = ControlGrid.uniform(op, default_control_count(op, self.n_alpha))
        measure = solve_lp(assemble_lp(op, Q, grid, controls), self.tol)
        logger.info("lp %s Q=%s n=%d controls=%d: hbar=%.12g", op.kind.value, Q.as_list(), grid.n,
                    len(controls), measure.objective)
        result = HomogResult(measure.objective, measure.adjoint_residual, 0, "lp", grid.n,
                             {"n_alpha": controls.count, "controls": len(controls), "tol": self.tol})
        return result, measure


def hbar_lp(op: OperatorSpec, Q: SymMat, n: int, n_alpha: Optional[int] = None, tol: float = 1e-9) -> HomogResult:
    result, _ = InvariantMeasureLP(n_alpha, tol).solve(op, Q, PeriodicGrid(op.dim, n))
    return result
