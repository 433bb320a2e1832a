from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Union

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ValidationError
from .operators import (
    ControlPoint,
    OperatorKind,
    OperatorSpec,
    PiecewiseCoeff,
    SampledOperator,
    SymMat,
    check_control,
    top_eigen_control,
)

logger = logging.getLogger(__name__)

QLike = Union[float, SymMat]


def harmonic_mean(coeff: PiecewiseCoeff) -> float:
    values = np.asarray(coeff.values)
    if np.any(values <= 0.0):
        raise ValidationError(f"harmonic mean needs positive values, got {coeff.values}")
    return float(1.0 / np.sum(coeff.widths() / values))


@dataclass(frozen=True)
class AnalyticMeasure:
    """Piecewise-constant invariant density on [0, 1)."""

    density: PiecewiseCoeff

    def __post_init__(self) -> None:
        if self.density.min() < 0.0:
            raise ValidationError("density must be nonnegative")

    def __call__(self, y):
        return self.density(y)

    def integral(self) -> float:
        return float(np.sum(self.density.widths() * np.asarray(self.density.values)))

    def to_dict(self) -> Dict[str, List[float]]:
        return self.density.to_dict()


def _scalar(Q: QLike) -> float:
    if isinstance(Q, SymMat):
        if Q.dim != 1:
            raise ValidationError("expected a 1D matrix")
        return Q.q11
    return float(Q)


def _require(op: OperatorSpec, kind: OperatorKind) -> None:
    if op.kind is not kind:
        raise ValidationError(f"expected a {kind.value} operator, got {op.kind.value}")


def _two_piece_height(coeff: PiecewiseCoeff, name: str) -> float:
    """b0 for a coefficient that is 0 on one half-period and b0 > 0 on the other."""
    if coeff.breakpoints != (0.0, 0.5) or sorted(coeff.values)[0] != 0.0 or max(coeff.values) <= 0.0:
        raise ValidationError(f"{name} must take the values {{0, b0}} on two equal halves, got {coeff.to_dict()}")
    return max(coeff.values)


def hbar_max_two_linear(op: OperatorSpec, Q: QLike) -> float:
    _require(op, OperatorKind.MAX_TWO_LINEAR)
    Q = SymMat.scalar(Q) if not isinstance(Q, SymMat) else Q
    s = op.A.contract(Q)
    return max(harmonic_mean(op.a0) * s, harmonic_mean(op.a0.combine(op.a1)) * s) + op.h


def hbar_quad1d(op: OperatorSpec, Q: QLike) -> float:
    _require(op, OperatorKind.QUAD_1D)
    a, c, b0 = op.quad_a, op.c, _two_piece_height(op.b, "b")
    q = _scalar(Q)
    q_plus = max(q, 0.0)
    return a * (q + q_plus) - c + a * a / b0 - math.sqrt(a ** 3 * (a + 2.0 * b0 * q_plus)) / b0


def quad1d_alpha_star(op: OperatorSpec, Q: QLike) -> float:
    _require(op, OperatorKind.QUAD_1D)
    a, b0 = op.quad_a, _two_piece_height(op.b, "b")
    q_plus = max(_scalar(Q), 0.0)
    return (-a + math.sqrt(a * (a + 2.0 * b0 * q_plus))) / b0


def quad1d_lbar(op: OperatorSpec, Q: QLike, alpha: float) -> float:
    """Homogenized linearization of the quadratic operator at the constant control alpha."""
    _require(op, OperatorKind.QUAD_1D)
    if alpha < 0.0:
        raise ValidationError(f"control must be nonnegative, got {alpha}")
    a, c, b0 = op.quad_a, op.c, _two_piece_height(op.b, "b")
    wide = a + 2.0 * b0 * alpha
    return a * wide / (a + b0 * alpha) * (_scalar(Q) - 0.5 * (c / a + (b0 * alpha ** 2 + c) / wide))


def _stripes_height(op: OperatorSpec) -> float:
    _require(op, OperatorKind.STRIPES_PUCCI)
    if op.a.values != (1.0,):
        raise ValidationError("stripes formula assumes a = 1")
    return _two_piece_height(op.b, "b")


def stripes_lbar_t(op: OperatorSpec, Q: SymMat, t: float, orientation: int = 1) -> float:
    b0 = _stripes_height(op)
    if not 0.0 <= t <= 1.0:
        raise ValidationError(f"t must lie in [0, 1], got {t}")
    root = math.sqrt(max(t - t * t, 0.0))
    return Q.trace() + b0 / (2.0 + b0 * t) * (Q.q22 + t * (Q.q11 - Q.q22) + 2.0 * orientation * Q.q12 * root)


def hbar_stripes_lower_bound(op: OperatorSpec, Q: SymMat) -> float:
    b0 = _stripes_height(op)
    if Q.is_nsd():
        return harmonic_mean(op.a) * Q.trace()
    # the mirrored direction only helps when q12 < 0
    orientation = 1 if Q.q12 >= 0.0 else -1

    def objective(t: float) -> float:
        return -stripes_lbar_t(op, Q, float(t), orientation)

    res = minimize_scalar(objective, bounds=(0.0, 1.0), method="bounded", options={"xatol": 1e-10})
    candidates = {0.0: -objective(0.0), 1.0: -objective(1.0), float(res.x): -float(res.fun)}
    t_best = max(candidates, key=candidates.get)
    logger.debug("stripes lower bound b0=%s Q=%s: t*=%.12f value=%.15g", b0, Q.as_list(), t_best, candidates[t_best])
    return candidates[t_best]


def hbar_stripes_linearized(op: OperatorSpec, Q: SymMat) -> float:
    """Homogenize the linear operator frozen at the argmax control of Q itself."""
    _stripes_height(op)
    if Q.is_nsd():
        return harmonic_mean(op.a) * Q.trace()
    control = top_eigen_control(Q)
    return stripes_lbar_t(op, Q, control.value, control.orientation)


def hbar_formula(op: OperatorSpec, Q: SymMat) -> float:
    """Closed-form route: exact for the max of two linear operators, lower bounds otherwise."""
    if op.kind is OperatorKind.MAX_TWO_LINEAR:
        return hbar_max_two_linear(op, Q)
    if op.kind is OperatorKind.QUAD_1D:
        return hbar_quad1d(op, Q)
    return hbar_stripes_lower_bound(op, Q)


def _linear_coefficient(op: OperatorSpec, control: ControlPoint) -> PiecewiseCoeff:
    """The y1-y1 diffusion entry of the frozen-control operator, as a piecewise coefficient."""
    check_control(op, control)
    bps = sorted({bp for coeff in op.coefficients() for bp in coeff.breakpoints})
    sampled = SampledOperator(op, op.piece_points()).diffusion(control).q11
    return PiecewiseCoeff(tuple(bps), tuple(float(v) for v in sampled))


def invariant_measure_for_control(op: OperatorSpec, control: ControlPoint) -> AnalyticMeasure:
    if op.kind is OperatorKind.MAX_TWO_LINEAR and op.dim == 2 and op.A.q12 != 0.0:
        raise ValidationError("y1-only invariant measure needs a diagonal A in 2D")
    coeff = _linear_coefficient(op, control)
    if coeff.min() <= 0.0:
        raise ValidationError(f"linearized coefficient must be positive, got {coeff.values}")
    hm = harmonic_mean(coeff)
    return AnalyticMeasure(coeff.map(lambda v: hm / v))


def lbar_constant_control(op: OperatorSpec, Q: SymMat, control: ControlPoint) -> float:
    """Average of L_alpha(Q, .) against the invariant measure of the constant control alpha."""
    measure = invariant_measure_for_control(op, control)
    density = measure.density
    midpoints = np.mod(np.asarray(density.breakpoints) + 0.5 * density.widths(), 1.0)
    values = SampledOperator(op, midpoints).linearized(Q, control)
    return float(np.sum(density.widths() * np.asarray(density.values) * values))
