from __future__ import annotations

import numpy as np
import pytest

from app.modules.operators import OperatorSpec, PiecewiseCoeff, SymMat


@pytest.fixture
def max2lin() -> OperatorSpec:
    """a0 alternating {1, 1/2}, a1 alternating {3/2, 5/2}, A = 1, h = 1."""
    return OperatorSpec.max_two_linear(
        PiecewiseCoeff.two_piece(1.0, 0.5), PiecewiseCoeff.two_piece(1.5, 2.5), SymMat.scalar(1.0), h=1.0
    )


@pytest.fixture
def max2lin_cells() -> OperatorSpec:
    """The max2lin coefficients on 20 alternating cells instead of two halves."""
    return OperatorSpec.max_two_linear(
        PiecewiseCoeff.alternating([1.0, 0.5], 20), PiecewiseCoeff.alternating([1.5, 2.5], 20), SymMat.scalar(1.0), h=1.0
    )


@pytest.fixture
def max2lin_2d() -> OperatorSpec:
    return OperatorSpec.max_two_linear(
        PiecewiseCoeff.two_piece(1.0, 0.5), PiecewiseCoeff.two_piece(1.5, 2.5), SymMat.diag(1.0, 2.0), h=1.0
    )


@pytest.fixture
def quad() -> OperatorSpec:
    """a = 1, b in {0, 1} on the two halves, c = 1."""
    return OperatorSpec.quad_1d(1.0, PiecewiseCoeff.two_piece(0.0, 1.0), 1.0)


@pytest.fixture
def stripes() -> OperatorSpec:
    """a = 1, b in {0, 2} on the two halves of y1."""
    return OperatorSpec.stripes_pucci(PiecewiseCoeff.constant(1.0), PiecewiseCoeff.two_piece(0.0, 2.0))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240917)


@pytest.fixture
def data_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("HJB_HOMOG_DATA_DIR", str(tmp_path / "data"))
    return tmp_path / "data"


@pytest.fixture
def random_q(rng):
    """Draw a random symmetric matrix with entries in [-scale, scale]."""

    def draw(dim: int, scale: float = 2.0) -> SymMat:
        if dim == 1:
            return SymMat.scalar(rng.uniform(-scale, scale))
        q11, q12, q22 = rng.uniform(-scale, scale, size=3)
        return SymMat(q11, q12, q22)

    return draw
