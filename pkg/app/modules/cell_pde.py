from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np

from .errors import InstabilityError, NonConvergenceError, ValidationError
from .grids import PeriodicGrid, second_differences
from .operators import OperatorSpec, SampledOperator, SymMat, slope_bound

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HomogResult:
    """H̄(Q) from one route plus its diagnostics."""

    hbar: float
    residual: float
    iterations: int
    method: str
    grid_n: Optional[int] = None
    meta: Dict[str, Any] = field(default_factory=dict, compare=False)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class CorrectorField:
    """Discrete corrector u^Q, kept at zero mean."""

    values: np.ndarray
    grid: PeriodicGrid

    @property
    def mean(self) -> float:
        return float(self.values.mean())

    def normalize(self) -> None:
        self.values -= self.values.mean()

    def rows(self, op: OperatorSpec, Q: SymMat):
        """(y1[, y2], u, H(Q + D2u, y)) per node."""
        residual_field = SampledOperator(op, self.grid.y1).evaluate(second_differences(self.values, self.grid).shifted(Q))
        for coords, u, h_val in zip(self.grid.coords, self.values, residual_field):
            yield (*[float(c) for c in coords], float(u), float(h_val))


class CellSolver:
    """Explicit pseudo-time (Euler) iteration for the periodic cell problem H(Q + D2u, y) = H̄(Q).

    Each step reads only the previous iterate:
    u <- u + dt * relaxation * (H(Q + D2u, y) - mean_y H(Q + D2u, y)), then re-centred.
    """

    def __init__(
        self,
        tol: Optional[float] = None,
        max_iter: int = 10_000_000,
        cfl: float = 0.9,
        dt: Optional[float] = None,
        relaxation: float = 1.0,
        log_every: int = 10_000,
    ) -> None:
        if tol is not None and not tol > 0.0:
            raise ValidationError(f"tolerance must be positive, got {tol}")
        if not 0.0 < relaxation < 2.0:
            raise ValidationError(f"relaxation must lie in (0, 2), got {relaxation}")
        self.tol = tol
        self.max_iter = max_iter
        self.cfl = cfl
        self.dt = dt
        self.relaxation = relaxation
        self.log_every = log_every

    def time_step(self, op: OperatorSpec, grid: PeriodicGrid, Q: SymMat) -> float:
        upper = slope_bound(op, Q)
        stable = grid.spacing ** 2 / (2.0 * grid.dim * upper)
        if self.dt is None:
            return self.cfl * stable
        if self.dt > stable:
            raise ValidationError(f"dt={self.dt} exceeds the explicit stability bound {stable:.3e}")
        return self.dt

    def solve(
        self,
        op: OperatorSpec,
        Q: SymMat,
        grid: PeriodicGrid,
        u0: Optional[np.ndarray] = None,
    ) -> Tuple[HomogResult, CorrectorField]:
        if Q.dim != op.dim or grid.dim != op.dim:
            raise ValidationError(f"operator is {op.dim}D, Q is {Q.dim}D, grid is {grid.dim}D")
        tol = self.tol if self.tol is not None else (1e-9 if op.dim == 1 else 1e-7)
        dt = self.time_step(op, grid, Q) * self.relaxation
        sampled = SampledOperator(op, grid.y1)
        corrector = CorrectorField(np.zeros(grid.size) if u0 is None else np.array(u0, dtype=float), grid)
        if corrector.values.shape != (grid.size,):
            raise ValidationError(f"initial guess has shape {corrector.values.shape}, expected ({grid.size},)")
        corrector.normalize()
        u = corrector.values
        best = np.inf
        logger.debug("cell solve %s Q=%s n=%d dt=%.3e tol=%.1e", op.kind.value, Q.as_list(), grid.n, dt, tol)

        for iteration in range(self.max_iter + 1):
            h_field = sampled.evaluate(second_differences(u, grid).shifted(Q))
            mean_h = float(h_field.mean())
            residual = float(h_field.max() - h_field.min())
            if not np.isfinite(residual):
                raise InstabilityError("cell iterate blew up", iteration)
            best = min(best, residual)
            if residual <= tol:
                logger.info("cell %s Q=%s n=%d: hbar=%.12g after %d steps", op.kind.value, Q.as_list(), grid.n,
                            mean_h, iteration)
                result = HomogResult(mean_h, residual, iteration, "pde", grid.n, {"dt": dt, "tol": tol})
                return result, corrector
            if iteration == self.max_iter:
                break
            if self.log_every and iteration % self.log_every == 0:
                logger.debug("step %d residual %.3e hbar %.12g", iteration, residual, mean_h)
            u += dt * (h_field - mean_h)
            u -= u.mean()
        raise NonConvergenceError("cell problem did not converge", best, self.max_iter)

    def hbar(self, op: OperatorSpec, Q: SymMat, n: int) -> float:
        result, _ = self.solve(op, Q, PeriodicGrid(op.dim, n))
        return result.hbar


def solve_cell(op: OperatorSpec, Q: SymMat, grid: PeriodicGrid, **cfg: Any) -> Tuple[HomogResult, CorrectorField]:
    return CellSolver(**cfg).solve(op, Q, grid)


def hbar_pde(op: OperatorSpec, Q: SymMat, n: int, **cfg: Any) -> float:
    return CellSolver(**cfg).hbar(op, Q, n)
