"""
Scaled taxicab metric rho(u, v) = |dx| + |dy| + theta |dz| and the
contraction constants of the maps with respect to it.
"""

import logging
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from core.errors import ContractionNotStrict
from .maps import A, ALPHA, C, E, F, G, MapCoefficients

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScaledTaxicabMetric:
    """
    Metric on I x J x R whose closed balls are octahedrons.

    Attributes:
        theta (float): z-weight, min(theta1, theta2)
        delta (float): max{|x_0|, |x_n|, |y_0|, |y_m|}
        theta1 (float): x-side bound on theta
        theta2 (float): y-side bound on theta
    """
    theta: float
    delta: float
    theta1: float = 1.0
    theta2: float = 1.0

    def __post_init__(self):
        if not self.theta > 0:
            raise ValueError(f"theta must be positive, got {self.theta!r}")

    @property
    def weights(self) -> np.ndarray:
        return np.array([1.0, 1.0, self.theta])

    def distance(self, u, v) -> float:
        return rho(self, u, v)

    def distances(self, us: np.ndarray, vs: np.ndarray) -> np.ndarray:
        """Row-wise rho between two broadcastable (..., 3) arrays."""
        diff = np.abs(np.asarray(us, dtype=float) - np.asarray(vs, dtype=float))
        return diff[..., 0] + diff[..., 1] + self.theta * diff[..., 2]

    def scaled(self, points: np.ndarray) -> np.ndarray:
        """Map points to (x, y, theta z), where rho becomes the plain L1 distance."""
        return np.asarray(points, dtype=float).reshape(-1, 3) * self.weights


def rho(metric: ScaledTaxicabMetric, u, v) -> float:
    """Distance |x-x'| + |y-y'| + theta |z-z'| between two points."""
    return float(abs(u[0] - v[0]) + abs(u[1] - v[1]) + metric.theta * abs(u[2] - v[2]))


def compute_theta(
    all_coeffs: Iterable[MapCoefficients] | np.ndarray,
    delta: float,
) -> ScaledTaxicabMetric:
    """
    Choose theta so that every map is a contraction for rho.

    theta1 is 1 when every e and alpha vanishes, otherwise
    (1 - max a) / (2 max(|e| + delta |alpha|)); theta2 likewise with c and f.

    Args:
        all_coeffs: The full family of base maps (dataclasses or an (N, 9) array)
        delta (float): max{|x_0|, |x_n|, |y_0|, |y_m|}

    Returns:
        ScaledTaxicabMetric: The metric with theta = min(theta1, theta2)
    """
    coeffs = _as_coefficient_array(all_coeffs)
    max_a = float(coeffs[:, A].max())
    max_c = float(coeffs[:, C].max())
    alpha_term = delta * np.abs(coeffs[:, ALPHA])
    x_side = np.abs(coeffs[:, E]) + alpha_term
    y_side = np.abs(coeffs[:, F]) + alpha_term

    all_zero_x = not np.any(coeffs[:, E]) and not np.any(coeffs[:, ALPHA])
    all_zero_y = not np.any(coeffs[:, F]) and not np.any(coeffs[:, ALPHA])
    theta1 = 1.0 if all_zero_x else (1.0 - max_a) / (2.0 * float(x_side.max()))
    theta2 = 1.0 if all_zero_y else (1.0 - max_c) / (2.0 * float(y_side.max()))
    theta = min(theta1, theta2)
    if not theta > 0:
        # a or c reaches 1 (a single column or row of cells)
        raise ContractionNotStrict(max(max_a, max_c))

    logger.info(f"Computed theta={theta:.6g} (theta1={theta1:.6g}, theta2={theta2:.6g}, delta={delta:g})")
    return ScaledTaxicabMetric(theta=theta, delta=float(delta), theta1=theta1, theta2=theta2)


def contraction_constants(coeffs: np.ndarray, metric: ScaledTaxicabMetric) -> np.ndarray:
    """Vectorized C = max{a + theta(|e| + delta|alpha|), c + theta(|f| + delta|alpha|), g}."""
    alpha_term = metric.delta * np.abs(coeffs[:, ALPHA])
    x_side = coeffs[:, A] + metric.theta * (np.abs(coeffs[:, E]) + alpha_term)
    y_side = coeffs[:, C] + metric.theta * (np.abs(coeffs[:, F]) + alpha_term)
    return np.maximum(np.maximum(x_side, y_side), coeffs[:, G])


def contraction_constant(coeffs: MapCoefficients, metric: ScaledTaxicabMetric) -> float:
    """
    Lipschitz constant of one map with respect to rho.

    Raises:
        ContractionNotStrict: if the constant is not below 1
    """
    value = float(contraction_constants(coeffs.as_array()[None, :], metric)[0])
    if not value < 1.0:
        raise ContractionNotStrict(value)
    return value


def _as_coefficient_array(all_coeffs) -> np.ndarray:
    if isinstance(all_coeffs, np.ndarray):
        return all_coeffs.reshape(-1, 9)
    flat: list[MapCoefficients] = []
    for item in all_coeffs:
        # n x m nested lists are accepted as well as flat ones
        flat.extend(item if isinstance(item, (list, tuple)) else [item])
    return np.array([c.as_array() for c in flat], dtype=float).reshape(-1, 9)
