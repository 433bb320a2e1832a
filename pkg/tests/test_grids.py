import numpy as np
import pytest

from app.modules.errors import ValidationError
from app.modules.grids import ControlGrid, IntervalGrid, PeriodicGrid, cells_for, second_differences
from app.modules.operators import NULL_DIRECTION


def test_periodic_grid_nodes_sit_at_midpoints():
    grid = PeriodicGrid(2, 4)
    np.testing.assert_allclose(grid.axis, [0.125, 0.375, 0.625, 0.875])
    assert grid.size == 16
    # flat index i * n + j with i along y1
    np.testing.assert_allclose(grid.coords[5], [0.375, 0.375])
    np.testing.assert_allclose(grid.coords[6], [0.375, 0.625])


def test_periodic_grid_rejects_small_n():
    with pytest.raises(ValidationError):
        PeriodicGrid(1, 3)
    with pytest.raises(ValidationError):
        PeriodicGrid(3, 8)


def test_second_differences_of_zero_field():
    grid = PeriodicGrid(2, 8)
    field = second_differences(np.zeros(grid.size), grid)
    assert not np.any(field.q11) and not np.any(field.q12) and not np.any(field.q22)


def test_second_differences_cosine_accuracy():
    grid = PeriodicGrid(1, 256)
    y = grid.axis
    field = second_differences(np.cos(2 * np.pi * y), grid)
    bound = (2 * np.pi) ** 4 * grid.spacing ** 2 / 12 * 1.01
    assert np.abs(field.q11 + 4 * np.pi ** 2 * np.cos(2 * np.pi * y)).max() <= bound


def test_second_differences_cross_term_2d():
    grid = PeriodicGrid(2, 64)
    y1, y2 = grid.coords.T
    u = np.sin(2 * np.pi * y1) * np.sin(2 * np.pi * y2)
    field = second_differences(u, grid)
    exact = 4 * np.pi ** 2 * np.cos(2 * np.pi * y1) * np.cos(2 * np.pi * y2)
    assert np.abs(field.q12 - exact).max() < 0.05 * 4 * np.pi ** 2
    np.testing.assert_allclose(field.q11, field.q22, atol=1e-9)


def test_stencils_annihilate_constants():
    for dim in (1, 2):
        grid = PeriodicGrid(dim, 6)
        for stencil in grid.stencils:
            np.testing.assert_allclose(stencil @ np.ones(grid.size), 0.0, atol=1e-9)


def test_interval_grid_stencil_exact_on_quadratics():
    grid = IntervalGrid(10)
    x = grid.nodes
    u = 0.5 * 3.0 * x * (x - 1.0)
    np.testing.assert_allclose(grid.second_differences(u), 3.0, atol=1e-10)


def test_cells_for_requires_integer_reciprocal():
    assert cells_for(1 / 320) == 320
    with pytest.raises(ValidationError):
        cells_for(0.3)
    with pytest.raises(ValidationError):
        cells_for(1.0)


def test_control_grid_includes_endpoints(quad, stripes, max2lin):
    grid = ControlGrid.uniform(quad, 81)
    assert grid.values[0] == 0.0 and grid.values[-1] == 10.0
    assert len(ControlGrid.uniform(max2lin, 2)) == 2
    stripes_grid = ControlGrid.uniform(stripes, 5)
    assert len(stripes_grid) == 5 + 3 + 1
    assert NULL_DIRECTION in stripes_grid.points
    with pytest.raises(ValidationError):
        ControlGrid.uniform(quad, 1)
