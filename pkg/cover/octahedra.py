"""
Octahedron covers of the attractor.

The radii solve rho_i = c_i (M + max_{j != i} rho_j) in closed form from the
two largest contraction constants; each map contributes the rho-ball of its
radius around its fixed point, and rho-balls are octahedrons.
"""

import logging
from dataclasses import dataclass
from typing import Iterator

import numpy as np
from scipy.spatial import cKDTree

from core.errors import TooFewMaps
from ifs.maps import Point3
from ifs.metric import ScaledTaxicabMetric
from ifs.system import IfsSystem
from .diameter import max_pairwise_distance
from .selection import top2_select

logger = logging.getLogger(__name__)

# Triangles of the octahedron over vertices V1..V6 (+x, +y, +z, -x, -y, -z), outward-facing.
OCTAHEDRON_FACES = np.array(
    [
        [0, 1, 2], [1, 3, 2], [3, 4, 2], [4, 0, 2],
        [1, 0, 5], [3, 1, 5], [4, 3, 5], [0, 4, 5],
    ]
)

NEAREST_CANDIDATES = 8


@dataclass(frozen=True, eq=False)
class RadiusSolution:
    """
    Closed-form solution of the radius system.

    Attributes:
        primary_index (int): i', index of the largest constant
        secondary_index (int): i'', index of the largest constant among the others
        diameter (float): M, largest rho-distance between fixed points
        radii (np.ndarray): rho_i for every map
    """
    primary_index: int
    secondary_index: int
    diameter: float
    radii: np.ndarray

    def system_residual(self, constants: np.ndarray) -> float:
        """
        Largest relative residual of rho_i = c_i (M + max_{j != i} rho_j).

        Returns:
            float: max_i |lhs - rhs| / max(|rhs|, tiny)
        """
        radii = self.radii
        order = top2_select(radii)
        others_max = np.full_like(radii, radii[order.primary])
        others_max[order.primary] = radii[order.secondary]
        rhs = np.asarray(constants) * (self.diameter + others_max)
        scale = np.maximum(np.abs(rhs), np.finfo(float).tiny)
        return float(np.max(np.abs(radii - rhs) / scale))


def solve_radii(constants: np.ndarray, diameter: float) -> RadiusSolution:
    """
    Radii from the two largest constants.

    rho_{i'} = M c_{i'} (1 + c_{i''}) / (1 - c_{i'} c_{i''}) and
    rho_i = M c_i (1 + c_{i'}) / (1 - c_{i'} c_{i''}) for every other i.

    Args:
        constants (np.ndarray): Contraction constants, N >= 2, all < 1
        diameter (float): M

    Returns:
        RadiusSolution: Indices, M and radii

    Raises:
        TooFewMaps: if N < 2
    """
    constants = np.asarray(constants, dtype=float)
    selection = top2_select(constants)
    c1 = float(constants[selection.primary])
    c2 = float(constants[selection.secondary])
    denominator = 1.0 - c1 * c2

    radii = diameter * constants * (1.0 + c1) / denominator
    radii[selection.primary] = diameter * c1 * (1.0 + c2) / denominator
    return RadiusSolution(selection.primary, selection.secondary, float(diameter), radii)


def cover_radii(system: IfsSystem, brute_force_diameter: bool = False) -> RadiusSolution:
    """
    Solve the radius system of a (possibly composed) system.

    Args:
        system (IfsSystem): System with at least two maps
        brute_force_diameter (bool): Compute M with the O(N^2) scan

    Returns:
        RadiusSolution: Radii for every map
    """
    if len(system) < 2:
        raise TooFewMaps(len(system))
    diameter = max_pairwise_distance(system.fixed_points, system.metric, brute_force=brute_force_diameter)
    solution = solve_radii(system.contractions, diameter)
    logger.info(
        f"Solved radii for order-{system.order} system: M={diameter:.6g}, "
        f"i'={solution.primary_index}, i''={solution.secondary_index}, "
        f"max radius {solution.radii[solution.primary_index]:.6g}"
    )
    return solution


def octahedron_vertices(center, radius: float, theta: float) -> np.ndarray:
    """
    Vertices V1..V6 of the rho-ball of the given radius.

    Returns:
        np.ndarray: (6, 3) array: center +r x, +r y, +r/theta z, -r x, -r y, -r/theta z
    """
    return octahedra_vertices(np.asarray(center, dtype=float)[None, :], np.array([radius], dtype=float), theta)[0]


def octahedra_vertices(centers: np.ndarray, radii: np.ndarray, theta: float) -> np.ndarray:
    """Vertices of many octahedrons at once, shape (N, 6, 3)."""
    offsets = np.array(
        [[1, 0, 0], [0, 1, 0], [0, 0, 1], [-1, 0, 0], [0, -1, 0], [0, 0, -1]], dtype=float
    ) * np.array([1.0, 1.0, 1.0 / theta])
    return centers[:, None, :] + radii[:, None, None] * offsets[None, :, :]


@dataclass(frozen=True)
class Octahedron:
    """Closed rho-ball B[center, radius]."""
    center: Point3
    radius: float
    theta: float

    @property
    def vertices(self) -> list[Point3]:
        return [Point3(*v) for v in octahedron_vertices(self.center, self.radius, self.theta).tolist()]

    @property
    def diameter(self) -> float:
        return 2.0 * self.radius

    def contains(self, point, slack: float = 0.0) -> bool:
        dx = abs(point[0] - self.center.x)
        dy = abs(point[1] - self.center.y)
        dz = abs(point[2] - self.center.z)
        return dx + dy + self.theta * dz <= self.radius + slack


@dataclass(frozen=True, eq=False)
class OctahedronCover:
    """
    One octahedron per map of an order-p system.

    Attributes:
        order (int): p
        centers (np.ndarray): (N, 3) fixed points
        radii (np.ndarray): (N,) radii
        metric (ScaledTaxicabMetric): Metric whose balls the octahedrons are
        solution (RadiusSolution): The radius system solution behind the cover
    """
    order: int
    centers: np.ndarray
    radii: np.ndarray
    metric: ScaledTaxicabMetric
    solution: RadiusSolution

    def __len__(self) -> int:
        return int(self.radii.shape[0])

    def __getitem__(self, index: int) -> Octahedron:
        return Octahedron(Point3(*self.centers[index].tolist()), float(self.radii[index]), self.metric.theta)

    def __iter__(self) -> Iterator[Octahedron]:
        return (self[i] for i in range(len(self)))

    @property
    def octahedra(self) -> list[Octahedron]:
        return list(self)

    @property
    def max_radius(self) -> float:
        return float(self.radii.max())

    def vertices(self) -> np.ndarray:
        """All vertices, shape (N, 6, 3), in V1..V6 order."""
        return octahedra_vertices(self.centers, self.radii, self.metric.theta)

    def contains(self, point, slack: float = 0.0) -> bool:
        """True iff some octahedron holds the point within radius + slack."""
        distances = self.metric.distances(self.centers, np.asarray(point, dtype=float)[None, :])
        return bool(np.any(distances <= self.radii + slack))

    def required_slack(self, points: np.ndarray, slack: float = 0.0) -> np.ndarray:
        """
        How far each point lies outside the cover: max(0, min_i rho(p, gamma_i) - r_i).

        The nearest centers (plain L1 after scaling z by theta) settle almost
        every point; the rest are checked against every center within
        max_radius + slack. Values up to `slack` are exact; larger values are
        upper bounds and only mean "outside".

        Args:
            points (np.ndarray): (M, 3) array
            slack (float): Tolerance the caller will compare against

        Returns:
            np.ndarray: (M,) non-negative excess distances
        """
        points = np.asarray(points, dtype=float).reshape(-1, 3)
        if points.shape[0] == 0:
            return np.zeros(0)
        tree = cKDTree(self.metric.scaled(self.centers))
        queries = self.metric.scaled(points)

        k = min(NEAREST_CANDIDATES, len(self))
        distances, indices = tree.query(queries, k=k, p=1)
        distances = distances.reshape(points.shape[0], -1)
        indices = indices.reshape(points.shape[0], -1)
        excess = np.maximum(np.min(distances - self.radii[indices], axis=1), 0.0)

        unresolved = np.flatnonzero(excess > 0.0)
        if unresolved.size:
            candidates = tree.query_ball_point(queries[unresolved], r=self.max_radius + slack, p=1)
            for row, members in zip(unresolved, candidates):
                if members:
                    members = np.asarray(members)
                    gaps = self.metric.distances(self.centers[members], points[row][None, :])
                    excess[row] = min(excess[row], max(float(np.min(gaps - self.radii[members])), 0.0))
        return excess

    def contains_many(self, points: np.ndarray, slack: float = 0.0) -> np.ndarray:
        """Vectorized membership for an (M, 3) array, shape (M,) booleans."""
        return self.required_slack(points, slack) <= slack


def build_cover(system: IfsSystem, brute_force_diameter: bool = False) -> OctahedronCover:
    """
    Octahedron cover of the attractor from a (possibly composed) system.

    Args:
        system (IfsSystem): System S_p
        brute_force_diameter (bool): Compute M with the O(N^2) scan

    Returns:
        OctahedronCover: One octahedron per map, centered at its fixed point
    """
    solution = cover_radii(system, brute_force_diameter=brute_force_diameter)
    cover = OctahedronCover(
        order=system.order,
        centers=system.fixed_points,
        radii=solution.radii,
        metric=system.metric,
        solution=solution,
    )
    logger.info(f"Built cover of order {cover.order} with {len(cover)} octahedra")
    return cover


def contains(cover: OctahedronCover, point, slack: float = 0.0) -> bool:
    """Membership of a single point in the union of the cover's octahedrons."""
    return cover.contains(point, slack)


if __name__ == "__main__":
    from ifs.composition import compose_system
    from ifs.grid import DataGrid
    from ifs.system import build_ifs

    logging.basicConfig(
        level=logging.INFO,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )

    base = build_ifs(DataGrid(
        x=[0, 100, 200],
        y=[0, 100, 200],
        z=[[0, 10, 20], [-10, -30, 10], [-20, -10, 0]],
        g=[[0.7, 0.6], [0.5, 0.6]],
    ))
    for order in range(1, 6):
        demo_cover = build_cover(compose_system(base, order))
        print(f"p={order}: {len(demo_cover)} octahedra, max radius {demo_cover.max_radius:.6g}")
