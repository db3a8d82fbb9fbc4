"""
Composition of affine-bilinear maps in coefficient space and the order-p systems S_p.
"""

import logging

import numpy as np

from core.errors import SystemTooLarge
from .maps import A, ALPHA, B, BETA, C, D, E, F, G, MapCoefficients, fixed_points
from .metric import contraction_constants
from .system import IfsSystem

logger = logging.getLogger(__name__)

DEFAULT_MAX_MAPS = 10**6

# Composed systems share the flat representation of the base system.
ComposedSystem = IfsSystem

_COLUMNS = {"a": A, "b": B, "c": C, "d": D, "e": E, "f": F, "g": G, "alpha": ALPHA, "beta": BETA}


def compose_pair(outer: MapCoefficients, inner: MapCoefficients) -> MapCoefficients:
    """
    Coefficients of outer o inner.

    Args:
        outer (MapCoefficients): Map applied last
        inner (MapCoefficients): Map applied first

    Returns:
        MapCoefficients: The composition, again affine-bilinear
    """
    row = compose_arrays(outer.as_array()[None, :], inner.as_array()[None, :])[0]
    return MapCoefficients.from_array(row)


def compose_arrays(outer: np.ndarray, inner: np.ndarray) -> np.ndarray:
    """
    Compose every outer map with every inner map.

    Args:
        outer (np.ndarray): (K, 9) coefficients of the maps applied last
        inner (np.ndarray): (L, 9) coefficients of the maps applied first

    Returns:
        np.ndarray: (K * L, 9) coefficients; row i * L + j is outer[i] o inner[j]
    """
    o = {name: outer[:, idx][:, None] for name, idx in _COLUMNS.items()}
    i = {name: inner[:, idx][None, :] for name, idx in _COLUMNS.items()}

    composed = np.empty((outer.shape[0], inner.shape[0], 9))
    composed[..., A] = o["a"] * i["a"]
    composed[..., B] = o["a"] * i["b"] + o["b"]
    composed[..., C] = o["c"] * i["c"]
    composed[..., D] = o["c"] * i["d"] + o["d"]
    composed[..., E] = o["e"] * i["a"] + o["g"] * i["e"] + o["alpha"] * i["a"] * i["d"]
    composed[..., F] = o["f"] * i["c"] + o["g"] * i["f"] + o["alpha"] * i["b"] * i["c"]
    composed[..., G] = o["g"] * i["g"]
    composed[..., ALPHA] = o["alpha"] * i["a"] * i["c"] + o["g"] * i["alpha"]
    composed[..., BETA] = (
        o["e"] * i["b"]
        + o["f"] * i["d"]
        + o["alpha"] * i["b"] * i["d"]
        + o["g"] * i["beta"]
        + o["beta"]
    )
    return composed.reshape(-1, 9)


def compose_system(
    base: IfsSystem,
    order: int,
    max_maps: int = DEFAULT_MAX_MAPS,
    tighten: bool = False,
) -> ComposedSystem:
    """
    Enumerate all order-fold compositions of the base maps.

    Each step composes a base map (outer) with every map of the previous
    order (inner), so entries come out lexicographic in their factor labels.
    Contraction constants are products of the factors' constants; fixed
    points are recomputed from the composed coefficients.

    Args:
        base (IfsSystem): Order-1 system
        order (int): p >= 1
        max_maps (int): Cap on (n*m)^p
        tighten (bool): Also evaluate the constant formula on the composed
            coefficients and keep the smaller of the two bounds

    Returns:
        ComposedSystem: The system S_p (the base itself when p == 1)

    Raises:
        ValueError: if order < 1
        SystemTooLarge: if (n*m)^p exceeds max_maps
    """
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    if base.order != 1:
        raise ValueError("compose_system expects an order-1 base system")

    requested = len(base) ** order
    if requested > max_maps:
        raise SystemTooLarge(requested, max_maps)
    if order == 1:
        return base

    coefficients = base.coefficients
    contractions = base.contractions
    labels = base.labels
    for _ in range(2, order + 1):
        coefficients = compose_arrays(base.coefficients, coefficients)
        contractions = np.outer(base.contractions, contractions).reshape(-1)
        labels = np.concatenate(
            [
                np.repeat(base.labels, len(labels), axis=0),
                np.tile(labels, (len(base), 1, 1)),
            ],
            axis=1,
        )

    if tighten:
        contractions = np.minimum(contractions, contraction_constants(coefficients, base.metric))

    system = IfsSystem(
        order=order,
        coefficients=coefficients,
        contractions=contractions,
        fixed_points=fixed_points(coefficients),
        labels=labels,
        metric=base.metric,
        grid=base.grid,
    )
    logger.info(f"Composed order-{order} system with {len(system)} maps (max contraction {system.max_contraction:.6g})")
    return system
