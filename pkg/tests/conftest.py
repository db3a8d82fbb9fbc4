"""Shared fixtures: the two bundled grids, their systems and a strategy for random admissible grids."""

from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

from attractor.sampler import AttractorSampler
from ifs.grid import DataGrid
from ifs.system import build_ifs
from tools.grid_files import parse_grid

DATA_DIR = Path(__file__).resolve().parent.parent / "data"
EXAMPLE1_PATH = DATA_DIR / "example1.grid"
EXAMPLE2_PATH = DATA_DIR / "example2.grid"


@pytest.fixture(scope="session")
def example1_grid() -> DataGrid:
    return parse_grid(EXAMPLE1_PATH)


@pytest.fixture(scope="session")
def example2_grid() -> DataGrid:
    return parse_grid(EXAMPLE2_PATH)


@pytest.fixture(scope="session")
def example1_system(example1_grid):
    return build_ifs(example1_grid)


@pytest.fixture(scope="session")
def example2_system(example2_grid):
    return build_ifs(example2_grid)


@pytest.fixture(scope="session", params=["example1", "example2"])
def example_system(request, example1_system, example2_system):
    return {"example1": example1_system, "example2": example2_system}[request.param]


def grid_from_corners(x, y, corners, interior, g) -> DataGrid:
    """
    Grid whose four boundary edges interpolate the corner heights linearly.

    Args:
        x, y: strictly increasing axes
        corners: heights at (0,0), (n,0), (0,m), (n,m)
        interior: (n-1, m-1) heights of the inner nodes
        g: (n, m) scaling factors
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z00, zn0, z0m, znm = corners
    sx = (x - x[0]) / (x[-1] - x[0])
    sy = (y - y[0]) / (y[-1] - y[0])
    z = np.zeros((len(x), len(y)))
    z[0, :] = z00 + (z0m - z00) * sy
    z[-1, :] = zn0 + (znm - zn0) * sy
    z[:, 0] = z00 + (zn0 - z00) * sx
    z[:, -1] = z0m + (znm - z0m) * sx
    z[1:-1, 1:-1] = interior
    return DataGrid(x=x, y=y, z=z, g=g)


@st.composite
def admissible_grids(draw, max_cells: int = 4):
    """Random grids satisfying every precondition, with n, m >= 2 so every map contracts."""
    n = draw(st.integers(min_value=2, max_value=max_cells))
    m = draw(st.integers(min_value=2, max_value=max_cells))
    seed = draw(st.integers(min_value=0, max_value=2**31 - 1))
    rng = np.random.default_rng(seed)

    x0 = draw(st.floats(min_value=-500.0, max_value=500.0, allow_nan=False))
    y0 = draw(st.floats(min_value=-500.0, max_value=500.0, allow_nan=False))
    x = x0 + np.concatenate([[0.0], np.cumsum(rng.uniform(1.0, 100.0, n))])
    y = y0 + np.concatenate([[0.0], np.cumsum(rng.uniform(1.0, 100.0, m))])
    corners = rng.uniform(-100.0, 100.0, 4)
    interior = rng.uniform(-100.0, 100.0, (n - 1, m - 1))
    g = rng.uniform(0.05, 0.95, (n, m))
    return grid_from_corners(x, y, corners, interior, g)


@pytest.fixture(scope="session")
def example1_sample(example1_system):
    """Eight Hutchinson steps from the data nodes (the full 257 x 257 node set)."""
    return AttractorSampler(example1_system).sample_attractor(8)


@pytest.fixture(scope="session")
def example2_sample(example2_system):
    """Eight Hutchinson steps from the data nodes, capped at the default point cap."""
    return AttractorSampler(example2_system).sample_attractor(8)
