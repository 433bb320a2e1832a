from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Iterator, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import bisect

try:  # optional dependency
    from numba import njit
except Exception:  # noqa: BLE001
    njit = None  # type: ignore[assignment]

from .analytic import hbar_formula
from .errors import InstabilityError, NonConvergenceError, ValidationError
from .grids import IntervalGrid, cells_for
from .operators import OperatorKind, OperatorSpec, SymMat, constituents

logger = logging.getLogger(__name__)

# kernel exit codes
CONVERGED, EXHAUSTED, BLEW_UP = 0, 1, 2


class Arrangement(str, Enum):
    PERIODIC = "periodic"
    RANDOM = "random"

    @classmethod
    def parse(cls, raw: Union[str, "Arrangement"]) -> "Arrangement":
        if isinstance(raw, cls):
            return raw
        try:
            return cls(str(raw).strip().lower())
        except ValueError as exc:
            raise ValidationError(f"unknown arrangement {raw!r}; expected periodic or random") from exc


@dataclass(frozen=True)
class Medium:
    """Per-cell choice between the two constituent operators; labels are 1 or 2."""

    eps: float
    arrangement: Arrangement
    labels: np.ndarray
    seed: Optional[int] = None

    @property
    def cells(self) -> int:
        return int(self.labels.size)

    def to_dict(self) -> Dict[str, object]:
        return {"eps": self.eps, "arrangement": self.arrangement.value, "seed": self.seed,
                "labels": self.labels.tolist()}


def build_medium(eps: float, arrangement: Arrangement = Arrangement.PERIODIC, seed: Optional[int] = None) -> Medium:
    cells = cells_for(eps)
    arrangement = Arrangement.parse(arrangement)
    if arrangement is Arrangement.PERIODIC:
        labels = 1 + np.arange(cells) % 2
        return Medium(1.0 / cells, arrangement, labels.astype(np.int8), None)
    if seed is None:
        raise ValidationError("a random medium needs a seed")
    rng = np.random.default_rng(seed)
    labels = 1 + rng.integers(0, 2, size=cells)
    return Medium(1.0 / cells, arrangement, labels.astype(np.int8), int(seed))


def node_form(op: OperatorSpec) -> Tuple[float, float, float, float]:
    """(p, q, w, k) with H(Q) = p Q + q Q+ + w (Q+)^2 + k for a constant-coefficient 1D operator."""
    if op.dim != 1:
        raise ValidationError("the Dirichlet problem is solved for 1D operators only")
    if any(len(coeff.values) != 1 for coeff in op.coefficients()):
        raise ValidationError("constituent operators must have constant coefficients")
    if op.kind is OperatorKind.MAX_TWO_LINEAR:
        scale = op.A.q11
        return (op.a0.values[0] * scale, op.a1.values[0] * scale, 0.0, op.h)
    if op.kind is OperatorKind.QUAD_1D:
        return (op.quad_a, 0.0, op.b.values[0], -op.c)
    raise ValidationError(f"{op.kind.value} has no 1D Dirichlet form")


def _relax_numpy(u, left, right, p, q, w, k, rhs, cfl, tol, max_iter):
    padded = np.zeros(u.size + 2)
    diag = left + right
    worst = np.inf
    for iteration in range(max_iter + 1):
        padded[1:-1] = u
        Q = left * padded[:-2] + right * padded[2:] - diag * u
        q_plus = np.maximum(Q, 0.0)
        residual = p * Q + q * q_plus + w * q_plus * q_plus + k - rhs
        worst = float(np.abs(residual).max())
        if not np.isfinite(worst):
            return iteration, worst, BLEW_UP
        if worst <= tol:
            return iteration, worst, CONVERGED
        if iteration == max_iter:
            break
        u += cfl * residual / ((p + q + 2.0 * w * q_plus) * diag)
    return max_iter, worst, EXHAUSTED


def _relax_loops(u, left, right, p, q, w, k, rhs, cfl, tol, max_iter):
    n = u.size
    residual = np.empty(n)
    step = np.empty(n)
    worst = np.inf
    for iteration in range(max_iter + 1):
        worst = 0.0
        finite = True
        for i in range(n):
            lo = u[i - 1] if i > 0 else 0.0
            hi = u[i + 1] if i < n - 1 else 0.0
            diag = left[i] + right[i]
            Q = left[i] * lo + right[i] * hi - diag * u[i]
            q_plus = Q if Q > 0.0 else 0.0
            r = p[i] * Q + q[i] * q_plus + w[i] * q_plus * q_plus + k[i] - rhs
            residual[i] = r
            step[i] = cfl / ((p[i] + q[i] + 2.0 * w[i] * q_plus) * diag)
            if r != r or abs(r) == np.inf:
                finite = False
            elif abs(r) > worst:
                worst = abs(r)
        if not finite:
            return iteration, worst, BLEW_UP
        if worst <= tol:
            return iteration, worst, CONVERGED
        if iteration == max_iter:
            break
        for i in range(n):
            u[i] += step[i] * residual[i]
    return max_iter, worst, EXHAUSTED


_relax = njit(cache=True)(_relax_loops) if njit is not None else _relax_numpy


@dataclass(frozen=True)
class DirichletSolution:
    """u at the cell midpoints; the boundary values are 0."""

    nodes: np.ndarray
    values: np.ndarray
    residual: float
    iterations: int
    meta: Dict[str, object] = field(default_factory=dict, compare=False)

    def with_boundary(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.concatenate(([0.0], self.nodes, [1.0])), np.concatenate(([0.0], self.values, [0.0]))

    def rows(self, reference: HomogenizedSolution) -> Iterator[Tuple[float, float, float]]:
        """(x, u^eps, ubar) including both boundary points."""
        x, u = self.with_boundary()
        for xi, ui, ri in zip(x, u, reference(x)):
            yield float(xi), float(ui), float(ri)


@dataclass(frozen=True)
class HomogenizedSolution:
    """u(x) = (r / 2) x (x - 1), the solution of H̄(u'') = rhs with zero boundary values."""

    r: float
    rhs: float

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return 0.5 * self.r * x * (x - 1.0)

    def sample(self, grid: IntervalGrid) -> np.ndarray:
        return self(grid.nodes)


class DirichletSolver:
    """Pseudo-time relaxation of H^eps(D2u, x) = rhs on [0, 1] with u = 0 at both ends.

    Every node takes a local step cfl / (slope * diag) where slope is dH/dQ at the
    current iterate bounded over the linear branches.
    """

    def __init__(self, tol: float = 1e-10, max_iter: int = 10_000_000, cfl: float = 0.9, use_numba: bool = True) -> None:
        if not tol > 0.0:
            raise ValidationError(f"tolerance must be positive, got {tol}")
        if not 0.0 < cfl <= 1.0:
            raise ValidationError(f"cfl must lie in (0, 1], got {cfl}")
        self.tol = tol
        self.max_iter = max_iter
        self.cfl = cfl
        self.kernel = _relax if use_numba else _relax_numpy

    def solve(
        self,
        op_pair: Sequence[OperatorSpec],
        medium: Medium,
        rhs: float = 1.0,
        u0: Optional[np.ndarray] = None,
    ) -> DirichletSolution:
        if len(op_pair) != 2:
            raise ValidationError("expected exactly two constituent operators")
        if not np.isfinite(rhs):
            raise ValidationError(f"rhs must be finite, got {rhs}")
        grid = IntervalGrid(medium.cells)
        forms = np.array([node_form(op) for op in op_pair])
        p, q, w, k = (np.ascontiguousarray(col) for col in forms[medium.labels - 1].T)
        left, right = grid.weights
        u = np.zeros(grid.cells) if u0 is None else np.array(u0, dtype=float)
        if u.shape != (grid.cells,):
            raise ValidationError(f"initial guess has shape {u.shape}, expected ({grid.cells},)")

        iterations, residual, status = self.kernel(u, left, right, p, q, w, k, float(rhs), self.cfl, self.tol,
                                                   self.max_iter)
        if status == BLEW_UP:
            raise InstabilityError("Dirichlet iterate blew up", int(iterations))
        if status == EXHAUSTED:
            raise NonConvergenceError("Dirichlet problem did not converge", float(residual), int(iterations))
        logger.debug("dirichlet eps=%g %s: residual %.2e after %d steps", medium.eps, medium.arrangement.value,
                     residual, iterations)
        return DirichletSolution(grid.nodes, u, float(residual), int(iterations),
                                 {"eps": medium.eps, "arrangement": medium.arrangement.value, "rhs": rhs})


def solve_eps(op_pair: Sequence[OperatorSpec], medium: Medium, rhs: float = 1.0, **cfg) -> DirichletSolution:
    return DirichletSolver(**cfg).solve(op_pair, medium, rhs)


def solve_homogenized(
    hbar_fn: Callable[[float], float],
    rhs: float = 1.0,
    bracket: Tuple[float, float] = (-1.0, 1.0),
    max_expansions: int = 60,
) -> HomogenizedSolution:
    def gap(r: float) -> float:
        return hbar_fn(r) - rhs

    lo, hi = bracket
    for _ in range(max_expansions):
        f_lo, f_hi = gap(lo), gap(hi)
        if f_lo == 0.0:
            return HomogenizedSolution(lo, rhs)
        if f_hi == 0.0:
            return HomogenizedSolution(hi, rhs)
        if f_lo < 0.0 < f_hi:
            break
        if f_lo > 0.0:
            lo *= 2.0
        if f_hi < 0.0:
            hi *= 2.0
    else:
        raise ValidationError(f"rhs={rhs} is outside the range of the homogenized operator on [{lo}, {hi}]")
    root = bisect(gap, lo, hi, xtol=1e-13, maxiter=500)
    logger.debug("homogenized root r=%.15g for rhs=%g", root, rhs)
    return HomogenizedSolution(float(root), rhs)


def homogenized_for(op: OperatorSpec, rhs: float = 1.0) -> HomogenizedSolution:
    """ū for a two-piece 1D operator, inverting its closed-form H̄."""
    if op.dim != 1:
        raise ValidationError("homogenized Dirichlet solutions are built for 1D operators only")
    return solve_homogenized(lambda r: hbar_formula(op, SymMat.scalar(r)), rhs)

