import numpy as np
import pytest
from hypothesis import given, settings

from core.errors import ContractionNotStrict
from ifs.grid import DataGrid
from ifs.maps import MapCoefficients
from ifs.metric import ScaledTaxicabMetric, compute_theta, contraction_constant, contraction_constants, rho
from ifs.system import build_ifs
from tests.conftest import admissible_grids


def random_domain_points(grid, count, rng):
    x0, xn, y0, ym = grid.box
    zmin, zmax = float(grid.z.min()), float(grid.z.max())
    pad = max(grid.z_range, 1.0)
    return np.column_stack([
        rng.uniform(x0, xn, count),
        rng.uniform(y0, ym, count),
        rng.uniform(zmin - pad, zmax + pad, count),
    ])


def assert_lipschitz(system, pairs: int, rng):
    grid = system.grid
    metric = system.metric
    tol = 1e-9 * grid.scale
    u = random_domain_points(grid, pairs, rng)
    v = random_domain_points(grid, pairs, rng)
    before = metric.distances(u, v)
    fu = system.apply(u)
    fv = system.apply(v)
    for i, constant in enumerate(system.contractions):
        after = metric.distances(fu[i], fv[i])
        assert np.all(after <= constant * before + tol), f"map {i} violates its constant"


def test_example1_theta_by_hand(example1_system):
    metric = example1_system.metric
    assert metric.theta1 == pytest.approx(0.5 / 0.62)
    assert metric.theta2 == pytest.approx(0.5 / 0.6)
    assert metric.theta == pytest.approx(0.5 / 0.62)
    assert metric.delta == 200.0
    assert 0.0 < metric.theta <= 1.0


def test_example2_theta_in_unit_interval(example2_system):
    assert 0.0 < example2_system.metric.theta <= 1.0
    assert example2_system.metric.theta == min(example2_system.metric.theta1, example2_system.metric.theta2)


def test_example1_constants_by_hand(example1_system):
    theta = 0.5 / 0.62
    expected = [0.7, 0.5 + theta * 0.29, 0.5 + theta * 0.3, 0.75]
    np.testing.assert_allclose(example1_system.contractions, expected, rtol=1e-12)


def test_every_constant_is_strict(example_system):
    assert np.all(example_system.contractions < 1.0)
    assert np.all(example_system.contractions >= example_system.coefficients[:, 6])


def test_lipschitz_bounds_hold(example_system):
    assert_lipschitz(example_system, pairs=1000, rng=np.random.default_rng(2024))


@settings(max_examples=25, deadline=None)
@given(admissible_grids(max_cells=3))
def test_lipschitz_bounds_random_grids(grid):
    assert_lipschitz(build_ifs(grid), pairs=200, rng=np.random.default_rng(11))


def test_flat_data_gives_unit_theta():
    grid = DataGrid(x=[0, 1, 2], y=[0, 1, 2], z=np.zeros((3, 3)), g=np.full((2, 2), 0.4))
    system = build_ifs(grid)
    assert system.metric.theta == 1.0
    np.testing.assert_allclose(system.contractions, [0.5] * 4)


def test_single_row_of_cells_does_not_contract():
    # m = 1 leaves c = 1, so no map shrinks the y-direction
    grid = DataGrid(x=[0, 1, 2], y=[0, 1], z=np.zeros((3, 2)), g=[[0.5], [0.5]])
    with pytest.raises(ContractionNotStrict):
        build_ifs(grid)
    bumpy = DataGrid(x=[0, 1, 2], y=[0, 1], z=[[0, 1], [1, 3], [2, 5]], g=[[0.5], [0.5]])
    with pytest.raises(ContractionNotStrict):
        build_ifs(bumpy)


def test_theta_accepts_nested_coefficient_lists():
    coeffs = MapCoefficients(0.5, 0.0, 0.5, 0.0, 0.1, 0.0, 0.5, 0.0, 0.0)
    other = MapCoefficients(0.5, 1.0, 0.5, 1.0, 0.0, 0.2, 0.5, 0.0, 0.0)
    metric = compute_theta([[coeffs], [other]], delta=2.0)
    assert metric.theta1 == pytest.approx(0.5 / 0.2)
    assert metric.theta2 == pytest.approx(0.5 / 0.4)
    # theta may exceed 1
    assert metric.theta == pytest.approx(1.25)


def test_rho_and_distances_agree():
    metric = ScaledTaxicabMetric(theta=0.25, delta=10.0)
    u, v = (1.0, -2.0, 8.0), (-1.0, 1.0, 0.0)
    assert rho(metric, u, v) == 2.0 + 3.0 + 2.0
    assert metric.distance(u, v) == rho(metric, u, v)
    assert float(metric.distances(np.array([u]), np.array([v]))[0]) == rho(metric, u, v)
    np.testing.assert_array_equal(metric.scaled([u]), [[1.0, -2.0, 2.0]])


def test_metric_rejects_non_positive_theta():
    with pytest.raises(ValueError):
        ScaledTaxicabMetric(theta=0.0, delta=1.0)


def test_contraction_constant_raises_when_not_strict():
    metric = ScaledTaxicabMetric(theta=1.0, delta=1.0)
    expanding = MapCoefficients(0.9, 0.0, 0.5, 0.0, 0.5, 0.0, 0.5, 0.0, 0.0)
    with pytest.raises(ContractionNotStrict):
        contraction_constant(expanding, metric)
    assert contraction_constants(expanding.as_array()[None, :], metric)[0] == pytest.approx(1.4)


def test_metric_axioms_on_random_triples(example_system):
    metric = example_system.metric
    rng = np.random.default_rng(31)
    u, v, w = (random_domain_points(example_system.grid, 1000, rng) for _ in range(3))
    uv, vu = metric.distances(u, v), metric.distances(v, u)
    np.testing.assert_array_equal(uv, vu)
    assert np.all(uv >= 0.0)
    assert np.all(metric.distances(u, u) == 0.0)
    assert np.all(uv > 0.0)
    uw, wv = metric.distances(u, w), metric.distances(w, v)
    assert np.all(uv <= uw + wv + 1e-12 * np.maximum(uv, 1.0))
    assert rho(metric, u[0], v[0]) == pytest.approx(uv[0], rel=1e-15)
