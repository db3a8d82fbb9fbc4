import numpy as np
import pytest

from core.errors import BoundaryNotCollinear, GOutOfRange, NonFiniteValue, NonMonotoneAxis, ParseError, TooFewMaps
from ifs.grid import DataGrid, collinearity_deviations, validate_grid
from ifs.system import build_ifs
from tests.conftest import grid_from_corners


def _example1_kwargs(**changes):
    kwargs = dict(
        x=[0, 100, 200],
        y=[0, 100, 200],
        z=[[0, 10, 20], [-10, -30, 10], [-20, -10, 0]],
        g=[[0.7, 0.6], [0.5, 0.6]],
    )
    kwargs.update(changes)
    return kwargs


def test_example1_properties(example1_grid):
    assert (example1_grid.n, example1_grid.m) == (2, 2)
    assert example1_grid.map_count == 4
    assert example1_grid.box == (0.0, 200.0, 0.0, 200.0)
    assert example1_grid.delta == 200.0
    assert example1_grid.scale == 200.0
    assert example1_grid.z_range == 50.0


def test_example2_shapes(example2_grid):
    assert example2_grid.z.shape == (4, 4)
    assert example2_grid.g.shape == (3, 3)
    assert example2_grid.map_count == 9
    assert example2_grid.delta == 300.0


def test_arrays_are_read_only(example1_grid):
    with pytest.raises(ValueError):
        example1_grid.z[0, 0] = 1.0


def test_data_points_put_corners_first(example1_grid):
    points = example1_grid.data_points()
    assert points.shape == (9, 3)
    np.testing.assert_array_equal(
        points[:4], [[0, 0, 0], [200, 0, -20], [0, 200, 20], [200, 200, 0]]
    )
    assert {tuple(p) for p in points.tolist()} == {
        (example1_grid.x[k], example1_grid.y[l], example1_grid.z[k, l]) for k in range(3) for l in range(3)
    }


def test_shape_mismatch_is_a_parse_error():
    with pytest.raises(ParseError, match="z"):
        DataGrid(**_example1_kwargs(z=[[0, 10, 20], [-10, -30, 10]]))
    with pytest.raises(ParseError, match="g"):
        DataGrid(**_example1_kwargs(g=[[0.7, 0.6]]))


def test_valid_grid_passes(example1_grid, example2_grid):
    assert validate_grid(example1_grid) is example1_grid
    assert validate_grid(example2_grid) is example2_grid


def test_non_monotone_axis_reports_index():
    grid = DataGrid(**_example1_kwargs(x=[0, 100, 100]))
    with pytest.raises(NonMonotoneAxis) as info:
        validate_grid(grid)
    assert info.value.axis == "x"
    assert info.value.index == 2


@pytest.mark.parametrize("value", [0.0, 1.0, -0.2, 1.5])
def test_g_out_of_range(value):
    grid = DataGrid(**_example1_kwargs(g=[[0.7, 0.6], [value, 0.6]]))
    with pytest.raises(GOutOfRange) as info:
        validate_grid(grid)
    assert (info.value.k, info.value.l) == (2, 1)


def test_non_collinear_boundary_names_the_edge():
    # z_{1,0} moved off the bottom edge's line
    grid = DataGrid(**_example1_kwargs(z=[[0, 10, 20], [-5, -30, 10], [-20, -10, 0]]))
    with pytest.raises(BoundaryNotCollinear) as info:
        validate_grid(grid)
    assert info.value.edge == "bottom"
    assert info.value.deviation == pytest.approx(5.0)


def test_single_map_is_rejected():
    grid = DataGrid(x=[0, 1], y=[0, 1], z=[[0, 1], [1, 2]], g=[[0.5]])
    with pytest.raises(TooFewMaps):
        validate_grid(grid)


def test_collinearity_deviations_of_exact_grid(example2_grid):
    deviations = collinearity_deviations(example2_grid)
    assert set(deviations) == {"left", "right", "bottom", "top"}
    assert max(deviations.values()) == 0.0


def test_tolerance_is_relative_to_z_range():
    x = np.array([0.0, 1.0, 2.0])
    grid = grid_from_corners(x, x, (0.0, 1e6, 0.0, 1e6), [[3.0]], [[0.5, 0.5], [0.5, 0.5]])
    z = grid.z.copy()
    z[1, 0] += 1e-5
    nudged = DataGrid(x=x, y=x, z=z, g=grid.g)
    validate_grid(nudged, collinearity_tolerance=1e-9)
    with pytest.raises(BoundaryNotCollinear):
        validate_grid(nudged, collinearity_tolerance=1e-12)


def test_raising_a_left_edge_node_names_the_left_edge():
    # z_{0,1}: 10 -> 11 bends the x = x_0 boundary
    grid = DataGrid(**_example1_kwargs(z=[[0, 11, 20], [-10, -30, 10], [-20, -10, 0]]))
    with pytest.raises(BoundaryNotCollinear) as info:
        validate_grid(grid)
    assert info.value.edge == "left"
    assert info.value.deviation == pytest.approx(1.0)


def test_nan_interior_node_is_rejected():
    grid = DataGrid(**_example1_kwargs(z=[[0, 10, 20], [-10, np.nan, 10], [-20, -10, 0]]))
    with pytest.raises(NonFiniteValue) as info:
        validate_grid(grid)
    assert (info.value.key, info.value.index) == ("z", (1, 1))


def test_infinite_corner_is_rejected():
    grid = DataGrid(**_example1_kwargs(z=[[0, 10, 20], [-10, -30, 10], [-20, -10, np.inf]]))
    with pytest.raises(NonFiniteValue) as info:
        validate_grid(grid)
    assert info.value.index == (2, 2)
    assert "z[2,2]" in str(info.value)


@pytest.mark.parametrize("key, value", [("x", [0, np.nan, 200]), ("g", [[0.7, np.inf], [0.5, 0.6]])])
def test_non_finite_axes_and_scalings_are_rejected(key, value):
    with pytest.raises(NonFiniteValue) as info:
        validate_grid(DataGrid(**_example1_kwargs(**{key: value})))
    assert info.value.key == key


def test_build_ifs_reports_non_finite_data():
    grid = DataGrid(**_example1_kwargs(z=[[0, 10, 20], [-10, np.nan, 10], [-20, -10, 0]]))
    with pytest.raises(NonFiniteValue):
        build_ifs(grid)
