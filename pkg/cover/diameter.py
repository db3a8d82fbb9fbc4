"""
Exact rho-diameter of a point set in linear time.

For rho(u, v) = |dx| + |dy| + theta |dz|, write w = (x, y, theta z). Then
rho(u, v) = max over sign vectors s of s . (w(u) - w(v)), and four sign
patterns with a leading + suffice, so the diameter is the largest spread
max s.w - min s.w among them.
"""

import numpy as np

from ifs.metric import ScaledTaxicabMetric

SIGN_PATTERNS = np.array(
    [
        [1.0, 1.0, 1.0],
        [1.0, 1.0, -1.0],
        [1.0, -1.0, 1.0],
        [1.0, -1.0, -1.0],
    ]
)

CHUNK_PAIRS = 1_000_000


def max_pairwise_distance(points, metric: ScaledTaxicabMetric, brute_force: bool = False) -> float:
    """
    Largest rho-distance between two points of the set.

    Args:
        points: (N, 3) array or sequence of points, N >= 1
        metric (ScaledTaxicabMetric): Metric providing theta
        brute_force (bool): Use the O(N^2) pairwise scan instead

    Returns:
        float: M = max_{i,j} rho(p_i, p_j)
    """
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    if points.shape[0] == 0:
        raise ValueError("max_pairwise_distance needs at least one point")
    if brute_force:
        return _brute_force(points, metric)

    projections = metric.scaled(points) @ SIGN_PATTERNS.T
    # covers rounding in both the projections and rho, so every pair that could
    # win the brute-force scan stays among the candidates
    tolerance = 32.0 * np.finfo(float).eps * float(np.abs(metric.scaled(points)).sum(axis=1).max())
    best = 0.0
    for column in projections.T:
        highest = np.flatnonzero(column >= column.max() - tolerance)
        lowest = np.flatnonzero(column <= column.min() + tolerance)
        best = max(best, _largest_between(points[highest], points[lowest], metric))
    return best


def _largest_between(first: np.ndarray, second: np.ndarray, metric: ScaledTaxicabMetric) -> float:
    # candidate sets are tiny unless the data has many exact ties; chunk to bound memory
    rows = max(1, CHUNK_PAIRS // max(len(second), 1))
    best = 0.0
    for start in range(0, len(first), rows):
        block = metric.distances(first[start:start + rows, None, :], second[None, :, :])
        best = max(best, float(block.max()))
    return best


def _brute_force(points: np.ndarray, metric: ScaledTaxicabMetric) -> float:
    best = 0.0
    for start in range(points.shape[0]):
        row = metric.distances(points[start], points)
        best = max(best, float(row.max()))
    return best
