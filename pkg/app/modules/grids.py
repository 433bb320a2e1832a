from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import List, Tuple

import numpy as np
import scipy.sparse as sp

from .errors import ValidationError
from .operators import ControlPoint, NULL_DIRECTION, OperatorKind, OperatorSpec, SymField, control_interval


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform grid on the torus with nodes at cell midpoints (i + 1/2) / n.

    In 2D the flat node index is i * n + j, with i along y1.
    """

    dim: int
    n: int

    def __post_init__(self) -> None:
        if self.dim not in (1, 2):
            raise ValidationError(f"grid dimension must be 1 or 2, got {self.dim}")
        if self.n < 4:
            raise ValidationError(f"grid needs at least 4 points per dimension, got {self.n}")

    @property
    def spacing(self) -> float:
        return 1.0 / self.n

    @property
    def size(self) -> int:
        return self.n ** self.dim

    @cached_property
    def axis(self) -> np.ndarray:
        return (np.arange(self.n) + 0.5) / self.n

    @cached_property
    def coords(self) -> np.ndarray:
        """(size, dim) node coordinates."""
        if self.dim == 1:
            return self.axis[:, None]
        y1, y2 = np.meshgrid(self.axis, self.axis, indexing="ij")
        return np.column_stack([y1.ravel(), y2.ravel()])

    @property
    def y1(self) -> np.ndarray:
        return self.coords[:, 0]

    @cached_property
    def stencils(self) -> Tuple[sp.csr_matrix, sp.csr_matrix, sp.csr_matrix]:
        """Sparse (D11, D12, D22): centered second differences with periodic wraparound."""
        n, h = self.n, self.spacing
        shift = sp.eye(n, k=1, format="csr") + sp.eye(n, k=-(n - 1), format="csr")
        second = (shift + shift.T - 2.0 * sp.eye(n, format="csr")) / h ** 2
        if self.dim == 1:
            zero = sp.csr_matrix((n, n))
            return second.tocsr(), zero, zero
        first = (shift - shift.T) / (2.0 * h)
        eye = sp.eye(n, format="csr")
        return (sp.kron(second, eye, format="csr"), sp.kron(first, first, format="csr"),
                sp.kron(eye, second, format="csr"))


def second_differences(u: np.ndarray, grid: PeriodicGrid) -> SymField:
    u = np.asarray(u, dtype=float)
    if u.shape != (grid.size,):
        raise ValidationError(f"field has shape {u.shape}, grid expects ({grid.size},)")
    d11, d12, d22 = grid.stencils
    if grid.dim == 1:
        zeros = np.zeros_like(u)
        return SymField(d11 @ u, zeros, zeros, 1)
    return SymField(d11 @ u, d12 @ u, d22 @ u, 2)


@dataclass(frozen=True)
class IntervalGrid:
    """One node per cell of width eps on [0, 1]; boundary values pinned to 0.

    The outermost nodes sit eps/2 from the boundary and use the non-uniform
    three-point stencil, which is exact on quadratics.
    """

    cells: int

    def __post_init__(self) -> None:
        if self.cells < 2:
            raise ValidationError(f"need at least 2 cells, got {self.cells}")

    @classmethod
    def from_eps(cls, eps: float) -> "IntervalGrid":
        return cls(cells_for(eps))

    @property
    def eps(self) -> float:
        return 1.0 / self.cells

    @cached_property
    def nodes(self) -> np.ndarray:
        return (np.arange(self.cells) + 0.5) / self.cells

    @cached_property
    def weights(self) -> Tuple[np.ndarray, np.ndarray]:
        """(left, right) stencil weights so that D2u_i = left_i u_{i-1} + right_i u_{i+1} - (left_i + right_i) u_i."""
        h = self.eps
        h_left = np.full(self.cells, h)
        h_right = np.full(self.cells, h)
        h_left[0] = h_right[-1] = 0.5 * h
        scale = 2.0 / (h_left + h_right)
        return scale / h_left, scale / h_right

    def second_differences(self, u: np.ndarray) -> np.ndarray:
        left, right = self.weights
        padded = np.concatenate(([0.0], u, [0.0]))
        return left * padded[:-2] + right * padded[2:] - (left + right) * u


def cells_for(eps: float) -> int:
    if not eps > 0.0:
        raise ValidationError(f"eps must be positive, got {eps}")
    cells = int(round(1.0 / eps))
    if cells < 2 or abs(cells * eps - 1.0) > 1e-9:
        raise ValidationError(f"1/eps must be an integer >= 2, got eps={eps}")
    return cells


@dataclass(frozen=True)
class ControlGrid:
    """Uniform discretization of an operator's admissible control interval."""

    points: Tuple[ControlPoint, ...]
    count: int

    @classmethod
    def uniform(cls, op: OperatorSpec, count: int) -> "ControlGrid":
        if count < 2:
            raise ValidationError(f"control grid needs at least 2 points, got {count}")
        lo, hi = control_interval(op)
        values = np.linspace(lo, hi, count)
        points: List[ControlPoint] = [ControlPoint(float(v)) for v in values]
        if op.kind is OperatorKind.STRIPES_PUCCI:
            # endpoints have no off-diagonal, so only interior values need the mirrored direction
            points += [ControlPoint(float(v), -1) for v in values[1:-1]]
            points.append(NULL_DIRECTION)
        return cls(tuple(points), count)

    @property
    def values(self) -> np.ndarray:
        return np.array([p.value for p in self.points])

    def __len__(self) -> int:
        return len(self.points)
