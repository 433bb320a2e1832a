from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import ValidationError

ArrayLike = Union[float, np.ndarray]


class OperatorKind(str, Enum):
    STRIPES_PUCCI = "stripes_pucci"
    MAX_TWO_LINEAR = "max_two_linear"
    QUAD_1D = "quad_1d"

    @classmethod
    def parse(cls, raw: str) -> "OperatorKind":
        key = str(raw).replace("-", "_").lower()
        aliases = {"stripespucci": cls.STRIPES_PUCCI, "maxtwolinear": cls.MAX_TWO_LINEAR,
                   "max2lin": cls.MAX_TWO_LINEAR, "quad1d": cls.QUAD_1D}
        for kind in cls:
            if kind.value == key:
                return kind
        if key.replace("_", "") in aliases:
            return aliases[key.replace("_", "")]
        raise ValidationError(f"unknown operator kind {raw!r}")


@dataclass(frozen=True)
class SymMat:
    """Symmetric d x d matrix (d in {1, 2}) stored by its upper triangle."""

    q11: float
    q12: float = 0.0
    q22: float = 0.0
    dim: int = 2

    def __post_init__(self) -> None:
        if self.dim not in (1, 2):
            raise ValidationError(f"matrix dimension must be 1 or 2, got {self.dim}")
        if self.dim == 1 and (self.q12 != 0.0 or self.q22 != 0.0):
            raise ValidationError("1D matrix carries q11 only")
        if not all(math.isfinite(v) for v in (self.q11, self.q12, self.q22)):
            raise ValidationError(f"non-finite matrix entries {self.entries}")

    @classmethod
    def scalar(cls, q: float) -> "SymMat":
        return cls(float(q), dim=1)

    @classmethod
    def diag(cls, l1: float, l2: float) -> "SymMat":
        return cls(float(l1), 0.0, float(l2))

    @classmethod
    def from_eigs(cls, l1: float, l2: float, phi: float) -> "SymMat":
        """Q = R_phi^T diag(l1, l2) R_phi with R_phi the counter-clockwise rotation."""
        c, s = math.cos(phi), math.sin(phi)
        return cls(c * c * l1 + s * s * l2, s * c * (l2 - l1), s * s * l1 + c * c * l2)

    @classmethod
    def parse(cls, raw: Union[str, float, Sequence[float]]) -> "SymMat":
        if isinstance(raw, (int, float)):
            return cls.scalar(raw)
        if isinstance(raw, str):
            try:
                parts = [float(p) for p in raw.replace(" ", "").split(",") if p]
            except ValueError as exc:
                raise ValidationError(f"cannot parse matrix {raw!r}") from exc
        else:
            parts = [float(p) for p in np.ravel(np.asarray(raw, dtype=float))]
        if len(parts) == 1:
            return cls.scalar(parts[0])
        if len(parts) == 3:
            return cls(parts[0], parts[1], parts[2])
        if len(parts) == 4 and parts[1] == parts[2]:
            return cls(parts[0], parts[1], parts[3])
        raise ValidationError(f"expected q11 or q11,q12,q22, got {raw!r}")

    @property
    def entries(self) -> Tuple[float, float, float]:
        return (self.q11, self.q12, self.q22)

    def trace(self) -> float:
        return self.q11 if self.dim == 1 else self.q11 + self.q22

    def eigenvalues(self) -> Tuple[float, float]:
        """Return (lambda_min, lambda_max)."""
        if self.dim == 1:
            return (self.q11, self.q11)
        mean = 0.5 * (self.q11 + self.q22)
        radius = math.hypot(0.5 * (self.q11 - self.q22), self.q12)
        return (mean - radius, mean + radius)

    def lambda_max(self) -> float:
        return self.eigenvalues()[1]

    def lambda_min(self) -> float:
        return self.eigenvalues()[0]

    def is_nsd(self) -> bool:
        return self.lambda_max() <= 0.0

    def contract(self, other: "SymMat") -> float:
        """Frobenius product A:Q."""
        self._check_dim(other)
        if self.dim == 1:
            return self.q11 * other.q11
        return self.q11 * other.q11 + 2.0 * self.q12 * other.q12 + self.q22 * other.q22

    def scale(self, s: float) -> "SymMat":
        return SymMat(s * self.q11, s * self.q12, s * self.q22, self.dim)

    def __add__(self, other: "SymMat") -> "SymMat":
        self._check_dim(other)
        return SymMat(self.q11 + other.q11, self.q12 + other.q12, self.q22 + other.q22, self.dim)

    def __sub__(self, other: "SymMat") -> "SymMat":
        return self + other.scale(-1.0)

    def as_array(self) -> np.ndarray:
        if self.dim == 1:
            return np.array([[self.q11]])
        return np.array([[self.q11, self.q12], [self.q12, self.q22]])

    def as_list(self) -> List[float]:
        return [self.q11] if self.dim == 1 else [self.q11, self.q12, self.q22]

    def _check_dim(self, other: "SymMat") -> None:
        if other.dim != self.dim:
            raise ValidationError(f"dimension mismatch: {self.dim} vs {other.dim}")


@dataclass(frozen=True)
class SymField:
    """A SymMat per grid node, stored as flat component arrays."""

    q11: np.ndarray
    q12: np.ndarray
    q22: np.ndarray
    dim: int

    @classmethod
    def zeros(cls, size: int, dim: int) -> "SymField":
        return cls(np.zeros(size), np.zeros(size), np.zeros(size), dim)

    def shifted(self, Q: SymMat) -> "SymField":
        if Q.dim != self.dim:
            raise ValidationError(f"dimension mismatch: field is {self.dim}D, Q is {Q.dim}D")
        return SymField(self.q11 + Q.q11, self.q12 + Q.q12, self.q22 + Q.q22, self.dim)

    def trace(self) -> np.ndarray:
        return self.q11 if self.dim == 1 else self.q11 + self.q22

    def lambda_max(self) -> np.ndarray:
        if self.dim == 1:
            return self.q11
        return 0.5 * (self.q11 + self.q22) + np.hypot(0.5 * (self.q11 - self.q22), self.q12)

    def contract(self, Q: Union[SymMat, "SymField"]) -> np.ndarray:
        if self.dim == 1:
            return self.q11 * Q.q11
        return self.q11 * Q.q11 + 2.0 * self.q12 * Q.q12 + self.q22 * Q.q22


@dataclass(frozen=True)
class PiecewiseCoeff:
    """Period-1 piecewise-constant coefficient; right-continuous at breakpoints."""

    breakpoints: Tuple[float, ...]
    values: Tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "breakpoints", tuple(float(b) for b in self.breakpoints))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not self.values or len(self.values) != len(self.breakpoints):
            raise ValidationError("coefficient needs one value per breakpoint")
        bps = np.asarray(self.breakpoints)
        if bps[0] < 0.0 or bps[-1] >= 1.0 or np.any(np.diff(bps) <= 0.0):
            raise ValidationError(f"breakpoints must be strictly increasing in [0, 1): {self.breakpoints}")
        if not all(math.isfinite(v) for v in self.values):
            raise ValidationError(f"non-finite coefficient values {self.values}")

    @classmethod
    def constant(cls, value: float) -> "PiecewiseCoeff":
        return cls((0.0,), (value,))

    @classmethod
    def two_piece(cls, first: float, second: float) -> "PiecewiseCoeff":
        return cls((0.0, 0.5), (first, second))

    @classmethod
    def alternating(cls, values: Sequence[float], pieces: int) -> "PiecewiseCoeff":
        """`pieces` equal cells cycling through `values` (20 cells of {1, 1/2} and so on)."""
        if pieces < 1 or pieces % len(values):
            raise ValidationError(f"{pieces} pieces cannot cycle through {len(values)} values")
        return cls(tuple(i / pieces for i in range(pieces)), tuple(values[i % len(values)] for i in range(pieces)))

    @classmethod
    def from_raw(cls, raw: Any) -> "PiecewiseCoeff":
        if isinstance(raw, (int, float)):
            return cls.constant(float(raw))
        if not isinstance(raw, dict):
            raise ValidationError(f"coefficient must be a number or an object, got {raw!r}")
        keys = set(raw)
        if keys == {"breakpoints", "values"}:
            return cls(tuple(raw["breakpoints"]), tuple(raw["values"]))
        if keys == {"alternating", "pieces"}:
            return cls.alternating(list(raw["alternating"]), int(raw["pieces"]))
        raise ValidationError(f"unknown coefficient keys {sorted(keys)}")

    def to_dict(self) -> Dict[str, List[float]]:
        return {"breakpoints": list(self.breakpoints), "values": list(self.values)}

    def __call__(self, y: ArrayLike) -> ArrayLike:
        y_mod = np.mod(np.asarray(y, dtype=float), 1.0)
        idx = np.searchsorted(np.asarray(self.breakpoints), y_mod, side="right") - 1
        # points left of the first breakpoint belong to the last piece
        out = np.asarray(self.values)[np.where(idx < 0, len(self.values) - 1, idx)]
        return float(out) if out.ndim == 0 else out

    def widths(self) -> np.ndarray:
        bps = np.asarray(self.breakpoints)
        return np.diff(np.append(bps, bps[0] + 1.0))

    def min(self) -> float:
        return min(self.values)

    def max(self) -> float:
        return max(self.values)

    def combine(self, other: "PiecewiseCoeff", scale: float = 1.0) -> "PiecewiseCoeff":
        """Pointwise self + scale * other on the common refinement."""
        bps = sorted(set(self.breakpoints) | set(other.breakpoints))
        return PiecewiseCoeff(tuple(bps), tuple(self(b) + scale * other(b) for b in bps))

    def map(self, fn) -> "PiecewiseCoeff":
        return PiecewiseCoeff(self.breakpoints, tuple(fn(v) for v in self.values))


@dataclass(frozen=True)
class ControlPoint:
    """A control value. For stripes operators `orientation` picks the sign of the
    off-diagonal of B = v v^T (v = (sqrt(a), s*sqrt(1-a))); orientation 0 is the
    null direction v = 0."""

    value: float
    orientation: int = 1


NULL_DIRECTION = ControlPoint(0.0, 0)


@dataclass(frozen=True)
class OperatorSpec:
    kind: OperatorKind
    dim: int
    a: Optional[PiecewiseCoeff] = None
    b: Optional[PiecewiseCoeff] = None
    a0: Optional[PiecewiseCoeff] = None
    a1: Optional[PiecewiseCoeff] = None
    A: Optional[SymMat] = None
    h: float = 0.0
    c: float = 0.0
    alpha_cap: float = 10.0

    def __post_init__(self) -> None:
        if self.kind is OperatorKind.STRIPES_PUCCI:
            if self.dim != 2 or self.a is None or self.b is None:
                raise ValidationError("stripes operator is 2D with coefficients a and b")
            if self.a.min() <= 0.0 or self.b.min() < 0.0:
                raise ValidationError("stripes operator needs a > 0 and b >= 0")
        elif self.kind is OperatorKind.MAX_TWO_LINEAR:
            if self.a0 is None or self.a1 is None or self.A is None:
                raise ValidationError("max-of-two-linear operator needs a0, a1 and A")
            if self.A.dim != self.dim:
                raise ValidationError(f"A is {self.A.dim}D but operator is {self.dim}D")
            if self.a0.min() <= 0.0 or self.a1.min() < 0.0:
                raise ValidationError("max-of-two-linear operator needs a0 > 0 and a1 >= 0")
            if self.A.lambda_min() <= 0.0:
                raise ValidationError("A must be positive definite")
        elif self.kind is OperatorKind.QUAD_1D:
            if self.dim != 1 or self.a is None or self.b is None:
                raise ValidationError("quadratic operator is 1D with coefficients a and b")
            if len(self.a.values) != 1 or self.a.values[0] <= 0.0:
                raise ValidationError("quadratic operator needs a constant a > 0")
            if self.b.min() < 0.0:
                raise ValidationError("quadratic operator needs b >= 0")
            if not self.alpha_cap > 0.0:
                raise ValidationError("alpha_cap must be positive")
        if not (math.isfinite(self.h) and math.isfinite(self.c)):
            raise ValidationError("non-finite constant term")

    @classmethod
    def stripes_pucci(cls, a: PiecewiseCoeff, b: PiecewiseCoeff) -> "OperatorSpec":
        return cls(OperatorKind.STRIPES_PUCCI, 2, a=a, b=b)

    @classmethod
    def max_two_linear(cls, a0: PiecewiseCoeff, a1: PiecewiseCoeff, A: SymMat, h: float = 0.0) -> "OperatorSpec":
        return cls(OperatorKind.MAX_TWO_LINEAR, A.dim, a0=a0, a1=a1, A=A, h=float(h))

    @classmethod
    def quad_1d(cls, a: float, b: PiecewiseCoeff, c: float, alpha_cap: float = 10.0) -> "OperatorSpec":
        return cls(OperatorKind.QUAD_1D, 1, a=PiecewiseCoeff.constant(a), b=b, c=float(c), alpha_cap=float(alpha_cap))

    @classmethod
    def from_dict(cls, raw: Dict[str, Any], alpha_cap: float = 10.0) -> "OperatorSpec":
        """``alpha_cap`` applies to quadratic operators whose description leaves it out."""
        if not isinstance(raw, dict) or "kind" not in raw:
            raise ValidationError("operator description must be an object with a 'kind'")
        kind = OperatorKind.parse(raw["kind"])
        allowed = {
            OperatorKind.STRIPES_PUCCI: {"kind", "a", "b"},
            OperatorKind.MAX_TWO_LINEAR: {"kind", "dim", "a0", "a1", "A", "h"},
            OperatorKind.QUAD_1D: {"kind", "a", "b", "c", "alpha_cap"},
        }[kind]
        unknown = set(raw) - allowed
        if unknown:
            raise ValidationError(f"unknown keys for {kind.value}: {sorted(unknown)}")
        try:
            if kind is OperatorKind.STRIPES_PUCCI:
                return cls.stripes_pucci(PiecewiseCoeff.from_raw(raw.get("a", 1.0)), PiecewiseCoeff.from_raw(raw["b"]))
            if kind is OperatorKind.MAX_TWO_LINEAR:
                A = SymMat.parse(raw.get("A", 1.0))
                dim = int(raw.get("dim", A.dim))
                if dim == 2 and A.dim == 1:
                    A = SymMat.diag(A.q11, A.q11)
                elif dim != A.dim:
                    raise ValidationError(f"A is {A.dim}D but dim is {dim}")
                return cls.max_two_linear(PiecewiseCoeff.from_raw(raw["a0"]), PiecewiseCoeff.from_raw(raw["a1"]),
                                          A, float(raw.get("h", 0.0)))
            a = raw["a"]
            if not isinstance(a, (int, float)):
                raise ValidationError("quadratic operator 'a' must be a number")
            return cls.quad_1d(float(a), PiecewiseCoeff.from_raw(raw["b"]), float(raw.get("c", 0.0)),
                               float(raw.get("alpha_cap", alpha_cap)))
        except KeyError as exc:
            raise ValidationError(f"missing key {exc.args[0]!r} for {kind.value}") from exc
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"invalid value in {kind.value} description: {exc}") from exc

    def to_dict(self) -> Dict[str, Any]:
        if self.kind is OperatorKind.STRIPES_PUCCI:
            return {"kind": self.kind.value, "a": self.a.to_dict(), "b": self.b.to_dict()}
        if self.kind is OperatorKind.MAX_TWO_LINEAR:
            return {"kind": self.kind.value, "dim": self.dim, "a0": self.a0.to_dict(), "a1": self.a1.to_dict(),
                    "A": self.A.as_list(), "h": self.h}
        return {"kind": self.kind.value, "a": self.quad_a, "b": self.b.to_dict(), "c": self.c,
                "alpha_cap": self.alpha_cap}

    @property
    def quad_a(self) -> float:
        return self.a.values[0]

    @property
    def constant_term(self) -> float:
        """The additive constant carried by the operator (h, or -c for the quadratic)."""
        return -self.c if self.kind is OperatorKind.QUAD_1D else self.h

    def coefficients(self) -> List[PiecewiseCoeff]:
        return [coeff for coeff in (self.a, self.b, self.a0, self.a1) if coeff is not None]

    def piece_points(self) -> np.ndarray:
        """One representative y1 per piece of the common refinement of all coefficients."""
        bps = np.array(sorted({bp for coeff in self.coefficients() for bp in coeff.breakpoints}))
        widths = np.diff(np.append(bps, bps[0] + 1.0))
        return np.mod(bps + 0.5 * widths, 1.0)


def _first_coord(y: Union[float, Sequence[float], np.ndarray]) -> float:
    arr = np.ravel(np.asarray(y, dtype=float))
    if arr.size == 0 or not np.all(np.isfinite(arr)):
        raise ValidationError(f"invalid point {y!r}")
    return float(arr[0])


def _check(op: OperatorSpec, Q: SymMat) -> None:
    if Q.dim != op.dim:
        raise ValidationError(f"Q is {Q.dim}D but operator is {op.dim}D")


def control_interval(op: OperatorSpec) -> Tuple[float, float]:
    if op.kind is OperatorKind.QUAD_1D:
        return (0.0, op.alpha_cap)
    return (0.0, 1.0)


def check_control(op: OperatorSpec, control: ControlPoint) -> None:
    lo, hi = control_interval(op)
    if not (lo <= control.value <= hi) or not math.isfinite(control.value):
        raise ValidationError(f"control {control.value} outside [{lo}, {hi}]")
    allowed = (-1, 0, 1) if op.kind is OperatorKind.STRIPES_PUCCI else (1,)
    if control.orientation not in allowed:
        raise ValidationError(f"orientation {control.orientation} not admissible for {op.kind.value}")


class SampledOperator:
    """Operator coefficients sampled once on a fixed set of nodes."""

    def __init__(self, op: OperatorSpec, y1: np.ndarray) -> None:
        self.op = op
        self.y1 = np.asarray(y1, dtype=float)
        self.a = op.a(self.y1) if op.a is not None else None
        self.b = op.b(self.y1) if op.b is not None else None
        self.a0 = op.a0(self.y1) if op.a0 is not None else None
        self.a1 = op.a1(self.y1) if op.a1 is not None else None

    def evaluate(self, Q: SymField) -> np.ndarray:
        """H(Q_i, y_i) for every node i."""
        op = self.op
        if op.kind is OperatorKind.STRIPES_PUCCI:
            return self.a * Q.trace() + self.b * np.maximum(Q.lambda_max(), 0.0)
        if op.kind is OperatorKind.MAX_TWO_LINEAR:
            s = Q.contract(op.A)
            return np.maximum(self.a0 * s, (self.a0 + self.a1) * s) + op.h
        q_plus = np.maximum(Q.q11, 0.0)
        return op.quad_a * Q.q11 + self.b * q_plus * q_plus - op.c

    def diffusion(self, control: ControlPoint) -> SymField:
        """A(y_i, alpha) per node, so that L_alpha(Q, y) = A(y, alpha):Q + offset(y, alpha)."""
        op, alpha = self.op, control.value
        if op.kind is OperatorKind.STRIPES_PUCCI:
            if control.orientation == 0:
                return SymField(self.a, np.zeros_like(self.a), self.a, 2)
            off = control.orientation * math.sqrt(max(alpha * (1.0 - alpha), 0.0))
            return SymField(self.a + self.b * alpha, self.b * off, self.a + self.b * (1.0 - alpha), 2)
        if op.kind is OperatorKind.MAX_TWO_LINEAR:
            weight = self.a0 + alpha * self.a1
            return SymField(weight * op.A.q11, weight * op.A.q12, weight * op.A.q22, op.dim)
        weight = op.quad_a + 2.0 * self.b * alpha
        return SymField(weight, np.zeros_like(weight), np.zeros_like(weight), 1)

    def offset(self, control: ControlPoint) -> np.ndarray:
        if self.op.kind is OperatorKind.QUAD_1D:
            return -(self.b * control.value ** 2 + self.op.c)
        return np.full(self.y1.shape, self.op.h if self.op.kind is OperatorKind.MAX_TWO_LINEAR else 0.0)

    def linearized(self, Q: Union[SymMat, SymField], control: ControlPoint) -> np.ndarray:
        return self.diffusion(control).contract(Q) + self.offset(control)


def evaluate_field(op: OperatorSpec, Q: SymField, y1: np.ndarray) -> np.ndarray:
    return SampledOperator(op, y1).evaluate(Q)


def eval_hjb(op: OperatorSpec, Q: SymMat, y: Union[float, Sequence[float]]) -> float:
    _check(op, Q)
    y1 = np.array([_first_coord(y)])
    field_ = SymField(np.array([Q.q11]), np.array([Q.q12]), np.array([Q.q22]), Q.dim)
    return float(evaluate_field(op, field_, y1)[0])


def eval_linearized(op: OperatorSpec, Q: SymMat, y: Union[float, Sequence[float]], control: ControlPoint) -> float:
    _check(op, Q)
    check_control(op, control)
    y1 = np.array([_first_coord(y)])
    return float(SampledOperator(op, y1).linearized(Q, control)[0])


def argmax_control(op: OperatorSpec, Q: SymMat, y: Union[float, Sequence[float]] = 0.0) -> ControlPoint:
    _check(op, Q)
    _first_coord(y)
    if op.kind is OperatorKind.STRIPES_PUCCI:
        if Q.lambda_max() <= 0.0:
            return NULL_DIRECTION
        return top_eigen_control(Q)
    if op.kind is OperatorKind.MAX_TWO_LINEAR:
        return ControlPoint(1.0 if op.A.contract(Q) >= 0.0 else 0.0)
    return ControlPoint(min(max(Q.q11, 0.0), op.alpha_cap))


def top_eigen_control(Q: SymMat) -> ControlPoint:
    """alpha = cos^2(theta) for the top eigenvector (cos theta, sin theta) of Q."""
    diff = Q.q11 - Q.q22
    radius = math.hypot(diff, 2.0 * Q.q12)
    if radius == 0.0:
        # repeated eigenvalue: e1 has the smallest angle to itself
        return ControlPoint(1.0, 1)
    alpha = 0.5 * (1.0 + diff / radius)
    return ControlPoint(min(max(alpha, 0.0), 1.0), 1 if Q.q12 >= 0.0 else -1)


def ellipticity_bounds(op: OperatorSpec) -> Tuple[float, float]:
    if op.kind is OperatorKind.STRIPES_PUCCI:
        lower, upper = op.a.min(), op.a.combine(op.b).max()
    elif op.kind is OperatorKind.MAX_TWO_LINEAR:
        lo_A, hi_A = op.A.eigenvalues()
        lower, upper = op.a0.min() * lo_A, op.a0.combine(op.a1).max() * hi_A
    else:
        lower, upper = op.quad_a, op.quad_a + 2.0 * op.b.max() * op.alpha_cap
    if not lower > 0.0:
        raise ValidationError(f"operator is not uniformly elliptic (lower bound {lower})")
    return (lower, upper)


def slope_bound(op: OperatorSpec, Q: SymMat) -> float:
    """Upper bound on dH/dQ along a cell iteration started from D2u = 0.

    The quadratic operator's slope a + 2b(Q + D2u)+ is unbounded in Q, so its
    control cap is widened to 2|Q| when Q outgrows alpha_cap.
    """
    _, upper = ellipticity_bounds(op)
    if op.kind is OperatorKind.QUAD_1D:
        upper = max(upper, op.quad_a + 4.0 * op.b.max() * abs(Q.q11))
    return upper


def envelopes(op: OperatorSpec, Q: SymMat) -> Tuple[float, float]:
    """(min_y H(Q, y), max_y H(Q, y)) over the coefficient pieces."""
    values = [eval_hjb(op, Q, y) for y in op.piece_points()]
    return (min(values), max(values))


def constituents(op: OperatorSpec) -> Tuple[OperatorSpec, OperatorSpec]:
    """Split a 1D two-piece operator into its two constant-coefficient constituents."""
    if op.dim != 1:
        raise ValidationError("constituent operators are defined for 1D operators only")
    points = op.piece_points()
    if len(points) != 2:
        raise ValidationError(f"expected two coefficient pieces, found {len(points)}")
    return tuple(_frozen_at(op, y) for y in points)  # type: ignore[return-value]


def _frozen_at(op: OperatorSpec, y: float) -> OperatorSpec:
    if op.kind is OperatorKind.MAX_TWO_LINEAR:
        return OperatorSpec.max_two_linear(PiecewiseCoeff.constant(op.a0(y)), PiecewiseCoeff.constant(op.a1(y)), op.A, op.h)
    return OperatorSpec.quad_1d(op.quad_a, PiecewiseCoeff.constant(op.b(y)), op.c, op.alpha_cap)

