"""
Flat iterated function systems.

The n x m maps of a grid are stored row-major as one flat index set, with
their (k, l) labels kept alongside. Composed systems use the same type.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from core.errors import ContractionNotStrict
from .grid import DEFAULT_COLLINEARITY_TOLERANCE, DataGrid, validate_grid
from .maps import IfsMap, MapCoefficients, Point3, apply_maps, compute_coefficients, fixed_points
from .metric import ScaledTaxicabMetric, compute_theta, contraction_constants

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class IfsSystem:
    """
    A flat collection of maps with contraction constants and fixed points.

    Attributes:
        order (int): Composition order p (1 for the base system)
        coefficients (np.ndarray): (N, 9) map coefficients
        contractions (np.ndarray): (N,) contraction constants
        fixed_points (np.ndarray): (N, 3) fixed points
        labels (np.ndarray): (N, p, 2) factor labels (k, l), outermost factor first
        metric (ScaledTaxicabMetric): Metric shared by every order
        grid (DataGrid, optional): Grid the base system was built from
    """
    order: int
    coefficients: np.ndarray
    contractions: np.ndarray
    fixed_points: np.ndarray
    labels: np.ndarray
    metric: ScaledTaxicabMetric
    grid: DataGrid | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return int(self.coefficients.shape[0])

    def __getitem__(self, index: int) -> IfsMap:
        return IfsMap(
            coeffs=MapCoefficients.from_array(self.coefficients[index]),
            contraction=float(self.contractions[index]),
            fixed_point=Point3(*(float(v) for v in self.fixed_points[index])),
            label=tuple((int(k), int(l)) for k, l in self.labels[index]),
        )

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    @property
    def max_contraction(self) -> float:
        return float(self.contractions.max())

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Images of an (M, 3) array under every map, shape (N, M, 3)."""
        return apply_maps(self.coefficients, points)


def build_ifs(grid: DataGrid, collinearity_tolerance: float = DEFAULT_COLLINEARITY_TOLERANCE) -> IfsSystem:
    """
    Construct the base system of a grid: coefficients, theta, constants, fixed points.

    Args:
        grid (DataGrid): Interpolation data (validated here)
        collinearity_tolerance (float): Boundary tolerance, relative to the z-range

    Returns:
        IfsSystem: Order-1 system of the n*m maps, row-major in (k, l)

    Raises:
        GridValidationError: if the grid is not admissible
        ContractionNotStrict: if any constant fails to be below 1
    """
    validate_grid(grid, collinearity_tolerance)

    labels = [(k, l) for k in range(1, grid.n + 1) for l in range(1, grid.m + 1)]
    coefficients = np.array([compute_coefficients(grid, k, l).as_array() for k, l in labels])
    metric = compute_theta(coefficients, grid.delta)

    contractions = contraction_constants(coefficients, metric)
    worst = int(np.argmax(contractions))
    if not contractions[worst] < 1.0:
        raise ContractionNotStrict(float(contractions[worst]))

    system = IfsSystem(
        order=1,
        coefficients=coefficients,
        contractions=contractions,
        fixed_points=fixed_points(coefficients),
        labels=np.array(labels, dtype=int).reshape(-1, 1, 2),
        metric=metric,
        grid=grid,
    )
    logger.info(f"Built base system: {len(system)} maps, max contraction {system.max_contraction:.6g}")
    return system


if __name__ == "__main__":
    logging.basicConfig(
        level=logging.INFO,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )

    demo = DataGrid(
        x=[0, 100, 200],
        y=[0, 100, 200],
        z=[[0, 10, 20], [-10, -30, 10], [-20, -10, 0]],
        g=[[0.7, 0.6], [0.5, 0.6]],
    )
    base = build_ifs(demo)
    print(f"theta = {base.metric.theta}")
    for ifs_map in base:
        print(f"F{ifs_map.label[0]}: C = {ifs_map.contraction:.6f}, gamma = {tuple(ifs_map.fixed_point)}")
