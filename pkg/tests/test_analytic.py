import math

import numpy as np
import pytest

from app.modules.analytic import (
    harmonic_mean,
    hbar_formula,
    hbar_max_two_linear,
    hbar_quad1d,
    hbar_stripes_linearized,
    hbar_stripes_lower_bound,
    invariant_measure_for_control,
    lbar_constant_control,
    quad1d_alpha_star,
    quad1d_lbar,
    stripes_lbar_t,
)
from app.modules.errors import ValidationError
from app.modules.operators import ControlPoint, OperatorSpec, PiecewiseCoeff, SymMat, envelopes


def test_harmonic_mean_examples():
    assert harmonic_mean(PiecewiseCoeff.two_piece(1.0, 0.5)) == pytest.approx(2 / 3)
    assert harmonic_mean(PiecewiseCoeff.constant(1.7)) == pytest.approx(1.7)
    assert harmonic_mean(PiecewiseCoeff.two_piece(2.5, 3.0)) == pytest.approx(30 / 11)
    with pytest.raises(ValidationError):
        harmonic_mean(PiecewiseCoeff.two_piece(1.0, 0.0))


def test_harmonic_mean_monotone_and_below_arithmetic_mean(rng):
    for _ in range(100):
        low = rng.uniform(0.1, 3.0, size=2)
        high = low + rng.uniform(0.0, 2.0, size=2)
        c1, c2 = PiecewiseCoeff.two_piece(*low), PiecewiseCoeff.two_piece(*high)
        assert harmonic_mean(c1) <= harmonic_mean(c2) + 1e-15
        assert harmonic_mean(c1) <= low.mean() + 1e-15


@pytest.mark.parametrize("q, expected", [(1.0, 41 / 11), (-1.0, 1 / 3), (0.0, 1.0)])
def test_hbar_max_two_linear_examples(max2lin, q, expected):
    assert hbar_max_two_linear(max2lin, SymMat.scalar(q)) == pytest.approx(expected)


@pytest.mark.parametrize("q, expected", [(4.0, 5.0), (-2.0, -3.0), (0.0, -1.0)])
def test_hbar_quad1d_examples(quad, q, expected):
    assert hbar_quad1d(quad, q) == pytest.approx(expected)


def test_hbar_quad1d_rejects_other_layouts():
    op = OperatorSpec.quad_1d(1.0, PiecewiseCoeff.two_piece(0.5, 1.0), 1.0)
    with pytest.raises(ValidationError):
        hbar_quad1d(op, 1.0)


def test_quad1d_alpha_star_examples(quad):
    assert quad1d_alpha_star(quad, 4.0) == pytest.approx(2.0)
    assert quad1d_alpha_star(quad, -3.0) == 0.0
    op = OperatorSpec.quad_1d(1.0, PiecewiseCoeff.two_piece(0.0, 2.0), 1.0)
    assert quad1d_alpha_star(op, 1.5) == pytest.approx((-1 + math.sqrt(7)) / 2)


def test_quad1d_alpha_star_matches_grid_search(quad):
    alphas = np.linspace(0.0, 4.0, 40001)
    values = [quad1d_lbar(quad, 4.0, a) for a in alphas]
    assert alphas[int(np.argmax(values))] == pytest.approx(2.0, abs=1e-3)


def test_quad1d_lbar_examples(quad):
    assert quad1d_lbar(quad, 3.0, 0.0) == pytest.approx(2.0)
    assert quad1d_lbar(quad, 4.0, 2.0) == pytest.approx(5.0)
    assert quad1d_lbar(quad, 4.0, 1.0) == pytest.approx(4.75)


def test_quad1d_supporting_line_optimality(quad, rng):
    for q in rng.uniform(0.01, 6.0, size=100):
        best = hbar_quad1d(quad, q)
        assert quad1d_lbar(quad, q, quad1d_alpha_star(quad, q)) == pytest.approx(best, abs=1e-10)
        for alpha in rng.uniform(0.0, 10.0, size=50):
            assert quad1d_lbar(quad, q, alpha) <= best + 1e-10


def test_stripes_lbar_t_examples(stripes):
    assert stripes_lbar_t(stripes, SymMat.diag(1.0, 1.0), 0.0) == pytest.approx(3.0)
    assert stripes_lbar_t(stripes, SymMat.diag(1.0, 0.0), 1.0) == pytest.approx(1.5)
    assert stripes_lbar_t(stripes, SymMat.diag(0.0, 1.0), 0.0) == pytest.approx(2.0)
    with pytest.raises(ValidationError):
        stripes_lbar_t(stripes, SymMat.diag(1.0, 1.0), 1.2)


@pytest.mark.parametrize(
    "Q, expected",
    [(SymMat.diag(-1.0, -2.0), -3.0), (SymMat.diag(1.0, 1.0), 3.0), (SymMat.diag(1.0, 0.0), 1.5)],
)
def test_hbar_stripes_lower_bound_examples(stripes, Q, expected):
    assert hbar_stripes_lower_bound(stripes, Q) == pytest.approx(expected, abs=1e-10)


def test_stripes_lower_bound_dominates_grid_of_t(stripes, rng, random_q):
    ts = np.linspace(0.0, 1.0, 2001)
    for _ in range(50):
        Q = random_q(2)
        if Q.is_nsd():
            continue
        sign = 1 if Q.q12 >= 0 else -1
        grid_best = max(stripes_lbar_t(stripes, Q, t, sign) for t in ts)
        assert hbar_stripes_lower_bound(stripes, Q) >= grid_best - 1e-12


def test_stripes_symmetry_under_reflection(stripes, rng):
    checked = 0
    while checked < 10:
        l1, l2 = rng.uniform(-2.0, 2.0, size=2)
        if max(l1, l2) <= 0.0:
            continue
        checked += 1
        for gamma in (math.pi / 16, math.pi / 8, 3 * math.pi / 16):
            left = hbar_stripes_lower_bound(stripes, SymMat.from_eigs(l1, l2, math.pi / 4 - gamma))
            right = hbar_stripes_lower_bound(stripes, SymMat.from_eigs(l2, l1, math.pi / 4 + gamma))
            assert left == pytest.approx(right, abs=1e-10)


def test_continuity_across_boundaries(quad, stripes):
    for s in (1e-9, 1e-11):
        assert hbar_quad1d(quad, s) == pytest.approx(hbar_quad1d(quad, -s), abs=1e-8)
    base = SymMat.diag(0.0, -1.0)
    inside = hbar_stripes_lower_bound(stripes, base - SymMat.diag(1e-11, 0.0))
    outside = hbar_stripes_lower_bound(stripes, base + SymMat.diag(1e-11, 0.0))
    assert inside == pytest.approx(outside, abs=1e-10)


def test_linearized_is_below_lower_bound(stripes, random_q):
    assert hbar_stripes_linearized(stripes, SymMat.diag(1.0, 0.0)) == pytest.approx(1.5)
    assert hbar_stripes_linearized(stripes, SymMat.diag(0.0, 1.0)) == pytest.approx(2.0)
    for _ in range(50):
        Q = random_q(2)
        assert hbar_stripes_linearized(stripes, Q) <= hbar_stripes_lower_bound(stripes, Q) + 1e-12


def test_invariant_measure_examples(quad, max2lin):
    measure = invariant_measure_for_control(quad, ControlPoint(2.0))
    assert measure.density.values == pytest.approx((5 / 3, 1 / 3))
    assert measure.integral() == pytest.approx(1.0, abs=1e-12)

    measure = invariant_measure_for_control(max2lin, ControlPoint(1.0))
    assert measure.density.values == pytest.approx((12 / 11, 10 / 11))

    flat = OperatorSpec.quad_1d(2.0, PiecewiseCoeff.constant(1.0), 1.0)
    assert invariant_measure_for_control(flat, ControlPoint(0.7)).density.values == pytest.approx((1.0,))


def test_lbar_constant_control_matches_closed_form(quad, rng):
    for q in rng.uniform(-2.0, 5.0, size=20):
        for alpha in (0.0, 0.5, 2.0, 7.0):
            expected = quad1d_lbar(quad, q, alpha)
            assert lbar_constant_control(quad, SymMat.scalar(q), ControlPoint(alpha)) == pytest.approx(expected)


def test_lbar_constant_control_matches_stripes_closed_form(stripes, random_q):
    for _ in range(20):
        Q = random_q(2)
        for t in (0.0, 0.3, 1.0):
            assert lbar_constant_control(stripes, Q, ControlPoint(t)) == pytest.approx(stripes_lbar_t(stripes, Q, t))


@pytest.mark.parametrize("name", ["max2lin", "quad"])
def test_formula_lies_between_envelopes(name, request):
    op = request.getfixturevalue(name)
    for q in np.linspace(-3.0, 3.0, 25):
        Q = SymMat.scalar(q)
        lower, upper = envelopes(op, Q)
        assert lower - 1e-12 <= hbar_formula(op, Q) <= upper + 1e-12


def test_constant_controls_stay_below_max2lin_hbar(max2lin, rng, random_q):
    for _ in range(10):
        Q = random_q(1)
        best = hbar_max_two_linear(max2lin, Q)
        for alpha in rng.uniform(0.0, 1.0, size=50):
            assert lbar_constant_control(max2lin, Q, ControlPoint(float(alpha))) <= best + 1e-12
