"""
Affine-bilinear maps F_{k,l}(x, y, z) = (a x + b, c y + d, e x + f y + g z + alpha x y + beta).

Scalar types for a single map plus vectorized helpers that work on an
(N, 9) coefficient array, the storage used for whole systems.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .grid import DataGrid

COEFFICIENT_NAMES = ("a", "b", "c", "d", "e", "f", "g", "alpha", "beta")
A, B, C, D, E, F, G, ALPHA, BETA = range(9)


class Point3(NamedTuple):
    """A point of I x J x R."""
    x: float
    y: float
    z: float


@dataclass(frozen=True)
class CornerResiduals:
    """Corner residuals p, q, r, t of one map (heights minus g times the far corner)."""
    p: float
    q: float
    r: float
    t: float


@dataclass(frozen=True)
class MapCoefficients:
    """The nine coefficients of one affine-bilinear map."""
    a: float
    b: float
    c: float
    d: float
    e: float
    f: float
    g: float
    alpha: float
    beta: float

    def apply(self, point) -> Point3:
        """Image of a single point."""
        x, y, z = (float(v) for v in point)
        return Point3(
            self.a * x + self.b,
            self.c * y + self.d,
            self.e * x + self.f * y + self.g * z + self.alpha * x * y + self.beta,
        )

    def apply_array(self, points: np.ndarray) -> np.ndarray:
        """Images of an (M, 3) point array."""
        return apply_maps(self.as_array()[None, :], points)[0]

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in COEFFICIENT_NAMES], dtype=float)

    @classmethod
    def from_array(cls, row) -> "MapCoefficients":
        return cls(*(float(v) for v in row))

    def to_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in COEFFICIENT_NAMES}


@dataclass(frozen=True)
class IfsMap:
    """
    One map of a system together with its contraction constant and fixed point.

    Attributes:
        coeffs (MapCoefficients): Map coefficients
        contraction (float): Lipschitz bound C in the scaled taxicab metric
        fixed_point (Point3): Unique fixed point gamma
        label (tuple): (k, l) labels of the factors, outermost first
    """
    coeffs: MapCoefficients
    contraction: float
    fixed_point: Point3
    label: tuple[tuple[int, int], ...] = ()


def corner_residuals(grid: DataGrid, k: int, l: int) -> CornerResiduals:
    """Residuals p_{k,l}, q_{k,l}, r_{k,l}, t_{k,l} of map (k, l)."""
    z, n, m = grid.z, grid.n, grid.m
    g = grid.g[k - 1, l - 1]
    return CornerResiduals(
        p=float(z[k, l] - g * z[n, m]),
        q=float(z[k - 1, l] - g * z[0, m]),
        r=float(z[k, l - 1] - g * z[n, 0]),
        t=float(z[k - 1, l - 1] - g * z[0, 0]),
    )


def compute_coefficients(grid: DataGrid, k: int, l: int) -> MapCoefficients:
    """
    Coefficients of F_{k,l}, fixed by the four corner conditions.

    Args:
        grid (DataGrid): Validated grid
        k (int): Column index in 1..n
        l (int): Row index in 1..m

    Returns:
        MapCoefficients: Map sending the domain corners to the corners of cell (k, l)
    """
    if not (1 <= k <= grid.n and 1 <= l <= grid.m):
        raise IndexError(f"map index ({k}, {l}) outside 1..{grid.n} x 1..{grid.m}")
    x, y = grid.x, grid.y
    x0, xn, y0, ym = grid.box
    dx, dy = xn - x0, ym - y0
    area = dx * dy

    a = (x[k] - x[k - 1]) / dx
    b = (x[k - 1] * xn - x[k] * x0) / dx
    c = (y[l] - y[l - 1]) / dy
    d = (y[l - 1] * ym - y[l] * y0) / dy

    res = corner_residuals(grid, k, l)
    p, q, r, t = res.p, res.q, res.r, res.t
    alpha = (p - q - r + t) / area
    e = (y0 * (q - p) - ym * (t - r)) / area
    f = (x0 * (r - p) - xn * (t - q)) / area
    beta = (y0 * (x0 * p - xn * q) - ym * (x0 * r - xn * t)) / area

    return MapCoefficients(
        a=float(a), b=float(b), c=float(c), d=float(d),
        e=float(e), f=float(f), g=float(grid.g[k - 1, l - 1]),
        alpha=float(alpha), beta=float(beta),
    )


def fixed_point(coeffs: MapCoefficients) -> Point3:
    """
    Closed-form fixed point of a map with a, c, g different from 1.

    Returns:
        Point3: gamma with F(gamma) = gamma
    """
    return Point3(*fixed_points(coeffs.as_array()[None, :])[0])


def fixed_points(coeffs: np.ndarray) -> np.ndarray:
    """Fixed points of every row of an (N, 9) coefficient array, shape (N, 3)."""
    xs = coeffs[:, B] / (1.0 - coeffs[:, A])
    ys = coeffs[:, D] / (1.0 - coeffs[:, C])
    zs = (
        coeffs[:, E] * xs
        + coeffs[:, F] * ys
        + coeffs[:, ALPHA] * xs * ys
        + coeffs[:, BETA]
    ) / (1.0 - coeffs[:, G])
    return np.column_stack([xs, ys, zs])


def apply_maps(coeffs: np.ndarray, points: np.ndarray) -> np.ndarray:
    """
    Apply every map of an (N, 9) coefficient array to an (M, 3) point array.

    Returns:
        np.ndarray: Images of shape (N, M, 3); [i, j] is map i applied to point j
    """
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    x, y, z = points[:, 0][None, :], points[:, 1][None, :], points[:, 2][None, :]
    col = lambda j: coeffs[:, j][:, None]
    images = np.empty((coeffs.shape[0], points.shape[0], 3))
    images[..., 0] = col(A) * x + col(B)
    images[..., 1] = col(C) * y + col(D)
    images[..., 2] = col(E) * x + col(F) * y + col(G) * z + col(ALPHA) * x * y + col(BETA)
    return images
