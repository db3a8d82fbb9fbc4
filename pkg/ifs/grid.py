"""
Interpolation data grid and its validation.
The grid holds the nodes (x_k, y_l, z_{k,l}) and the vertical scaling factors g_{k,l}.
"""

import logging
from dataclasses import dataclass

import numpy as np

from core.errors import (
    BoundaryNotCollinear,
    GOutOfRange,
    NonFiniteValue,
    NonMonotoneAxis,
    ParseError,
    TooFewMaps,
)

logger = logging.getLogger(__name__)

DEFAULT_COLLINEARITY_TOLERANCE = 1e-9

EDGE_NAMES = ("left", "right", "bottom", "top")


def _frozen(values, ndim: int, name: str) -> np.ndarray:
    array = np.array(values, dtype=float)
    if array.ndim != ndim:
        raise ParseError(f"expected a {ndim}-dimensional array, got shape {array.shape}", key=name)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class DataGrid:
    """
    Rectangular interpolation data set plus vertical scaling factors.

    Attributes:
        x (np.ndarray): n+1 abscissae x_0 < ... < x_n
        y (np.ndarray): m+1 ordinates y_0 < ... < y_m
        z (np.ndarray): (n+1)x(m+1) heights, z[k, l] = z_{k,l}
        g (np.ndarray): n x m scaling factors, g[k-1, l-1] = g_{k,l}
    """
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    g: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", _frozen(self.x, 1, "x"))
        object.__setattr__(self, "y", _frozen(self.y, 1, "y"))
        object.__setattr__(self, "z", _frozen(self.z, 2, "z"))
        object.__setattr__(self, "g", _frozen(self.g, 2, "g"))
        n, m = len(self.x) - 1, len(self.y) - 1
        if self.z.shape != (n + 1, m + 1):
            raise ParseError(f"z has shape {self.z.shape}, expected {(n + 1, m + 1)}", key="z")
        if self.g.shape != (n, m):
            raise ParseError(f"g has shape {self.g.shape}, expected {(n, m)}", key="g")

    @property
    def n(self) -> int:
        return len(self.x) - 1

    @property
    def m(self) -> int:
        return len(self.y) - 1

    @property
    def map_count(self) -> int:
        return self.n * self.m

    @property
    def box(self) -> tuple[float, float, float, float]:
        """Domain box (x_0, x_n, y_0, y_m)."""
        return float(self.x[0]), float(self.x[-1]), float(self.y[0]), float(self.y[-1])

    @property
    def delta(self) -> float:
        """Largest absolute domain coordinate, max{|x_0|, |x_n|, |y_0|, |y_m|}."""
        return float(max(abs(v) for v in self.box))

    @property
    def z_range(self) -> float:
        return float(self.z.max() - self.z.min())

    @property
    def scale(self) -> float:
        """Magnitude of the data, the reference for relative tolerances."""
        return float(max(self.delta, np.abs(self.z).max()))

    def data_points(self) -> np.ndarray:
        """
        All (n+1)(m+1) data nodes as an array of shape (N, 3).

        The four domain corners come first, then the remaining nodes in
        row-major (k, l) order.

        Returns:
            np.ndarray: Node coordinates (x_k, y_l, z_{k,l})
        """
        n, m = self.n, self.m
        corners = [(0, 0), (n, 0), (0, m), (n, m)]
        order = corners + [(k, l) for k in range(n + 1) for l in range(m + 1) if (k, l) not in corners]
        return np.array([(self.x[k], self.y[l], self.z[k, l]) for k, l in order], dtype=float)

    def corner(self, k: int, l: int) -> tuple[float, float, float]:
        """Data node (x_k, y_l, z_{k,l})."""
        return float(self.x[k]), float(self.y[l]), float(self.z[k, l])


def _edge_deviation(axis: np.ndarray, heights: np.ndarray) -> float:
    """Max distance in z from the chord through the first and last point of an edge."""
    slope = (heights[-1] - heights[0]) / (axis[-1] - axis[0])
    chord = heights[0] + slope * (axis - axis[0])
    return float(np.max(np.abs(heights - chord)))


def collinearity_deviations(grid: DataGrid) -> dict[str, float]:
    """
    Measure how far each boundary point set is from being collinear.

    Args:
        grid (DataGrid): Grid with monotone axes

    Returns:
        dict[str, float]: Max z-deviation per edge ('left', 'right', 'bottom', 'top')
    """
    return {
        "left": _edge_deviation(grid.y, grid.z[0, :]),
        "right": _edge_deviation(grid.y, grid.z[-1, :]),
        "bottom": _edge_deviation(grid.x, grid.z[:, 0]),
        "top": _edge_deviation(grid.x, grid.z[:, -1]),
    }


def validate_grid(grid: DataGrid, collinearity_tolerance: float = DEFAULT_COLLINEARITY_TOLERANCE) -> DataGrid:
    """
    Check every precondition of the interpolation construction.

    Args:
        grid (DataGrid): Candidate grid
        collinearity_tolerance (float): Tolerance relative to the z-range

    Returns:
        DataGrid: The same grid, once all checks pass

    Raises:
        TooFewMaps: fewer than two maps (n*m < 2)
        NonFiniteValue: some entry of x, y, z or g is NaN or infinite
        NonMonotoneAxis: x or y not strictly increasing
        GOutOfRange: some g_{k,l} outside (0, 1)
        BoundaryNotCollinear: one of the four edge sets is not collinear
    """
    if grid.n < 1 or grid.m < 1 or grid.map_count < 2:
        raise TooFewMaps(max(grid.n, 0) * max(grid.m, 0))

    for key in ("x", "y", "z", "g"):
        values = getattr(grid, key)
        bad = np.argwhere(~np.isfinite(values))
        if bad.size:
            index = tuple(int(i) for i in bad[0])
            raise NonFiniteValue(key, index, float(values[index]))

    for axis_name, axis in (("x", grid.x), ("y", grid.y)):
        steps = np.diff(axis)
        bad = np.flatnonzero(~(steps > 0))
        if bad.size:
            raise NonMonotoneAxis(axis_name, int(bad[0]) + 1)

    outside = np.argwhere(~((grid.g > 0.0) & (grid.g < 1.0)))
    if outside.size:
        k, l = (int(i) + 1 for i in outside[0])
        raise GOutOfRange(k, l, float(grid.g[k - 1, l - 1]))

    tolerance = collinearity_tolerance * grid.z_range
    for edge, deviation in collinearity_deviations(grid).items():
        if deviation > tolerance:
            raise BoundaryNotCollinear(edge, deviation, tolerance)

    logger.info(f"Validated grid with n={grid.n}, m={grid.m} ({grid.map_count} maps)")
    return grid
