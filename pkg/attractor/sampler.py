"""
Sampling of the attractor (the graph of the interpolating surface).

Two samplers are provided: deterministic Hutchinson iteration on a point
cloud, with grid deduplication and a point cap, and the chaos game.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.spatial import cKDTree

from cover.diameter import max_pairwise_distance
from ifs.metric import ScaledTaxicabMetric
from ifs.system import IfsSystem

logger = logging.getLogger(__name__)

DEFAULT_POINT_CAP = 200_000
DEFAULT_RESOLUTION = 1e-6


class SamplingMethod(str, Enum):
    DETERMINISTIC = "deterministic"
    CHAOS_GAME = "chaos_game"


@dataclass(frozen=True, eq=False)
class PointCloud:
    """
    A finite sample of the attractor.

    Attributes:
        points (np.ndarray): (M, 3) coordinates
        generation (int): Hutchinson iterations applied, or chaos-game steps taken
        method (SamplingMethod): How the cloud was produced
        truncated (bool): Whether the point cap dropped any points
        hausdorff_bound (float): A priori rho-Hausdorff bound to the attractor, if known
    """
    points: np.ndarray
    generation: int = 0
    method: SamplingMethod = SamplingMethod.DETERMINISTIC
    truncated: bool = False
    hausdorff_bound: float = math.inf

    def __len__(self) -> int:
        return int(self.points.shape[0])


class AttractorSampler:
    """
    Samples the attractor of a (possibly composed) system.

    Key Features:
    - Deterministic Hutchinson iteration with dedup on a grid of size resolution * scale
    - Coarse-to-fine truncation: points already present in the input cloud are kept first
    - Seeded chaos game, optionally as several independent chains
    """

    def __init__(self,
                 system: IfsSystem,
                 point_cap: int = DEFAULT_POINT_CAP,
                 resolution: float = DEFAULT_RESOLUTION,
                 scale: float | None = None):
        """
        Initialize the sampler.

        Args:
            system (IfsSystem): System whose attractor is sampled
            point_cap (int): Maximum cloud size kept after each step
            resolution (float): Dedup grid size relative to the data scale
            scale (float, optional): Data scale; taken from the system's grid by default
        """
        self.system = system
        self.point_cap = point_cap
        if scale is None:
            scale = system.grid.scale if system.grid is not None else 1.0
        self.scale = float(scale)
        self.epsilon = resolution * self.scale
        self.logger = logging.getLogger(__name__)

    def seed_cloud(self) -> PointCloud:
        """The data nodes of the grid, known to lie on the attractor."""
        if self.system.grid is None:
            raise ValueError("system carries no grid; pass an explicit seed cloud")
        return PointCloud(self.system.grid.data_points(), generation=0)

    def hutchinson_step(self, cloud: PointCloud, cap: int | None = None) -> PointCloud:
        """
        One application of the Hutchinson operator, the union of all map images.

        Images are deduplicated on the epsilon grid keeping first occurrences
        (point-major order). If more than point_cap points remain, points
        that were already in the input cloud come first and the tail is cut.

        Args:
            cloud (PointCloud): Nonempty input cloud
            cap (int, optional): Point cap for this step; the sampler default otherwise

        Returns:
            PointCloud: The image cloud, generation + 1
        """
        if len(cloud) == 0:
            raise ValueError("hutchinson_step needs a nonempty cloud")
        images = np.swapaxes(self.system.apply(cloud.points), 0, 1).reshape(-1, 3)

        keys = self._grid_keys(images)
        _, first = np.unique(keys, axis=0, return_index=True)
        first.sort()
        unique_points = images[first]

        cap = self.point_cap if cap is None else cap
        truncated = cloud.truncated
        if unique_points.shape[0] > cap:
            previous = self._grid_keys(cloud.points)
            known = _rows_in(keys[first], previous)
            ordered = np.concatenate([np.flatnonzero(known), np.flatnonzero(~known)])
            unique_points = unique_points[ordered[:cap]]
            truncated = True
            self.logger.warning(
                f"Hutchinson step {cloud.generation + 1}: truncated {len(first)} points to cap {cap}"
            )

        return PointCloud(
            points=unique_points,
            generation=cloud.generation + 1,
            method=SamplingMethod.DETERMINISTIC,
            truncated=truncated,
        )

    def sample_attractor(self, iterations: int, seed_cloud: PointCloud | None = None) -> PointCloud:
        """
        Apply hutchinson_step repeatedly.

        Args:
            iterations (int): Number of steps (0 returns the seed unchanged)
            seed_cloud (PointCloud, optional): Starting cloud; data nodes by default

        Returns:
            PointCloud: Cloud with hausdorff_bound = C_max^p * rho-diameter(seed)
        """
        if iterations < 0:
            raise ValueError(f"iterations must be >= 0, got {iterations}")
        cloud = seed_cloud if seed_cloud is not None else self.seed_cloud()
        if iterations == 0:
            return cloud

        seed_diameter = max_pairwise_distance(cloud.points, self.system.metric)
        for _ in range(iterations):
            cloud = self.hutchinson_step(cloud)
        bound = self.system.max_contraction ** iterations * seed_diameter

        self.logger.info(
            f"Sampled {len(cloud)} points in {iterations} Hutchinson steps "
            f"(truncated={cloud.truncated}, bound={bound:.3g})"
        )
        return PointCloud(cloud.points, cloud.generation, cloud.method, cloud.truncated, bound)

    def chaos_game(self, steps: int, burn_in: int = 0, rng_seed: int = 0, chains: int = 1) -> PointCloud:
        """
        Random iteration u <- F_i(u) with i uniform over the maps.

        Every chain starts at the data corner (x_0, y_0, z_{0,0}) and emits
        steps - burn_in points; chains use seeds spawned from rng_seed and are
        concatenated in chain order.

        Args:
            steps (int): Iterations per chain, > burn_in
            burn_in (int): Leading points discarded per chain
            rng_seed (int): Seed making the result reproducible
            chains (int): Number of independent chains

        Returns:
            PointCloud: (chains * (steps - burn_in)) points
        """
        if not steps > burn_in >= 0:
            raise ValueError(f"need steps > burn_in >= 0, got steps={steps}, burn_in={burn_in}")
        start = self._start_point()
        seeds = np.random.SeedSequence(rng_seed).spawn(chains)
        coefficients = self.system.coefficients.tolist()

        clouds = []
        for chain_seed in seeds:
            rng = np.random.default_rng(chain_seed)
            choices = rng.integers(0, len(coefficients), size=steps).tolist()
            clouds.append(_run_chain(coefficients, choices, start, burn_in))

        points = np.concatenate(clouds, axis=0)
        self.logger.info(f"Chaos game produced {len(points)} points ({chains} chain(s), seed {rng_seed})")
        return PointCloud(points, generation=steps, method=SamplingMethod.CHAOS_GAME)

    def _start_point(self) -> tuple[float, float, float]:
        if self.system.grid is not None:
            return self.system.grid.corner(0, 0)
        return tuple(float(v) for v in self.system.fixed_points[0])

    def _grid_keys(self, points: np.ndarray) -> np.ndarray:
        return np.floor(points / self.epsilon + 0.5).astype(np.int64)


def _run_chain(coefficients: list[list[float]], choices: list[int], start, burn_in: int) -> np.ndarray:
    x, y, z = start
    emitted = np.empty((len(choices) - burn_in, 3))
    for step, choice in enumerate(choices):
        a, b, c, d, e, f, g, alpha, beta = coefficients[choice]
        x, y, z = a * x + b, c * y + d, e * x + f * y + g * z + alpha * x * y + beta
        if step >= burn_in:
            emitted[step - burn_in] = (x, y, z)
    return emitted


def _rows_in(rows: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Boolean mask: which rows of `rows` also occur in `reference`."""
    combined = np.concatenate([reference, rows], axis=0)
    _, inverse = np.unique(combined, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    return np.isin(inverse[reference.shape[0]:], inverse[: reference.shape[0]])


def hausdorff_distance(a, b, metric: ScaledTaxicabMetric) -> float:
    """
    Symmetric Hausdorff distance in rho between two point sets.

    Args:
        a, b: PointCloud or (M, 3) arrays
        metric (ScaledTaxicabMetric): Metric providing theta

    Returns:
        float: max(sup_a d(a, B), sup_b d(b, A))
    """
    pa = metric.scaled(a.points if isinstance(a, PointCloud) else a)
    pb = metric.scaled(b.points if isinstance(b, PointCloud) else b)
    forward, _ = cKDTree(pb).query(pa, k=1, p=1)
    backward, _ = cKDTree(pa).query(pb, k=1, p=1)
    return float(max(forward.max(), backward.max()))
