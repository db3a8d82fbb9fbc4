"""
End-to-end pipeline: grid -> order-p system -> octahedron cover -> attractor
sample -> containment check -> artifacts on disk.
"""

import logging
import math
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any

import numpy as np

from attractor.sampler import AttractorSampler, PointCloud, SamplingMethod
from core.config import Settings
from core.errors import ReportInconsistent
from cover.octahedra import OctahedronCover, build_cover, octahedra_vertices, solve_radii
from ifs.composition import compose_system
from ifs.grid import DataGrid
from ifs.maps import COEFFICIENT_NAMES
from ifs.system import IfsSystem, build_ifs
from tools.exporters import ArtifactWriter

logger = logging.getLogger(__name__)

STATUS_SUCCESS = "success"
STATUS_CONTAINMENT_FAILED = "containment_failed"


@dataclass(frozen=True)
class ContainmentSummary:
    """
    Outcome of testing sampled points against a cover.

    Attributes:
        points_tested (int): Total number of points checked
        failures (int): Points farther than `slack` outside every octahedron
        max_slack_used (float): Largest excess over the radius among all points
        slack (float): Absolute tolerance used
        deterministic_points (int): Points from Hutchinson iteration
        chaos_points (int): Points from the chaos game
        truncated (bool): Whether the deterministic sample hit the point cap
    """
    points_tested: int
    failures: int
    max_slack_used: float
    slack: float
    deterministic_points: int = 0
    chaos_points: int = 0
    truncated: bool = False

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "points_tested": self.points_tested,
            "failures": self.failures,
            "max_slack_used": self.max_slack_used,
            "slack": self.slack,
            "deterministic_points": self.deterministic_points,
            "chaos_points": self.chaos_points,
            "truncated": self.truncated,
            "passed": self.passed,
        }


def check_containment(cover: OctahedronCover, clouds: list[PointCloud], slack: float) -> ContainmentSummary:
    """
    Test every point of the given clouds against the cover.

    Args:
        cover (OctahedronCover): Cover under test
        clouds (list[PointCloud]): Samples of the attractor
        slack (float): Absolute tolerance

    Returns:
        ContainmentSummary: Counts and the largest excess seen
    """
    points = np.concatenate([c.points for c in clouds], axis=0) if clouds else np.zeros((0, 3))
    excess = cover.required_slack(points, slack)
    failures = int(np.count_nonzero(excess > slack))
    summary = ContainmentSummary(
        points_tested=int(points.shape[0]),
        failures=failures,
        max_slack_used=float(excess.max()) if excess.size else 0.0,
        slack=float(slack),
        deterministic_points=sum(len(c) for c in clouds if c.method == SamplingMethod.DETERMINISTIC),
        chaos_points=sum(len(c) for c in clouds if c.method == SamplingMethod.CHAOS_GAME),
        truncated=any(c.truncated for c in clouds),
    )
    if failures:
        logger.warning(f"Containment failed for {failures} of {summary.points_tested} points (slack {slack:.3g})")
    else:
        logger.info(f"All {summary.points_tested} points lie in the order-{cover.order} cover")
    return summary


@dataclass(frozen=True, eq=False)
class CoverReport:
    """
    Everything needed to reproduce and audit a cover.

    Attributes:
        order (int): p
        theta (float): z-weight of the metric
        delta (float): max{|x_0|, |x_n|, |y_0|, |y_m|}
        diameter (float): M
        primary_index (int): i'
        secondary_index (int): i''
        labels (np.ndarray): (N, p, 2) factor labels, 1-based
        coefficients (np.ndarray): (N, 9)
        contractions (np.ndarray): (N,)
        fixed_points (np.ndarray): (N, 3)
        radii (np.ndarray): (N,)
        containment (ContainmentSummary, optional): Result of the sampling check
    """
    order: int
    theta: float
    delta: float
    diameter: float
    primary_index: int
    secondary_index: int
    labels: np.ndarray
    coefficients: np.ndarray
    contractions: np.ndarray
    fixed_points: np.ndarray
    radii: np.ndarray
    containment: ContainmentSummary | None = None

    @classmethod
    def from_cover(cls, system: IfsSystem, cover: OctahedronCover,
                   containment: ContainmentSummary | None = None) -> "CoverReport":
        return cls(
            order=system.order,
            theta=system.metric.theta,
            delta=system.metric.delta,
            diameter=cover.solution.diameter,
            primary_index=cover.solution.primary_index,
            secondary_index=cover.solution.secondary_index,
            labels=system.labels,
            coefficients=system.coefficients,
            contractions=system.contractions,
            fixed_points=system.fixed_points,
            radii=cover.radii,
            containment=containment,
        )

    @classmethod
    def from_dict(cls, document: dict[str, Any]) -> "CoverReport":
        """Rebuild a report from its JSON form; per-map records are required."""
        maps = document.get("maps")
        if not maps:
            raise ValueError("report has no per-map records")
        return cls(
            order=int(document["order"]),
            theta=float(document["theta"]),
            delta=float(document["delta"]),
            diameter=float(document["M"]),
            primary_index=int(document["i_prime"]),
            secondary_index=int(document["i_double_prime"]),
            labels=np.array([r["labels"] for r in maps], dtype=int),
            coefficients=np.array([[r["coefficients"][name] for name in COEFFICIENT_NAMES] for r in maps]),
            contractions=np.array([r["contraction"] for r in maps]),
            fixed_points=np.array([r["fixed_point"] for r in maps]),
            radii=np.array([r["radius"] for r in maps]),
        )

    @property
    def vertices(self) -> np.ndarray:
        return octahedra_vertices(self.fixed_points, self.radii, self.theta)

    def verify(self, rel_tol: float = 1e-12) -> bool:
        """
        Recompute the radii from the report's constants and M.

        Returns:
            bool: True iff i', i'' and every radius are reproduced within rel_tol
        """
        solution = solve_radii(self.contractions, self.diameter)
        if (solution.primary_index, solution.secondary_index) != (self.primary_index, self.secondary_index):
            return False
        return bool(np.allclose(solution.radii, self.radii, rtol=rel_tol, atol=0.0))

    def to_dict(self, include_maps: bool = True) -> dict[str, Any]:
        document: dict[str, Any] = {
            "order": self.order,
            "map_count": int(self.radii.shape[0]),
            "theta": self.theta,
            "delta": self.delta,
            "M": self.diameter,
            "i_prime": self.primary_index,
            "i_double_prime": self.secondary_index,
            "max_radius": float(self.radii.max()),
            "max_contraction": float(self.contractions.max()),
            "containment": self.containment.to_dict() if self.containment else None,
        }
        if include_maps:
            document["maps"] = self._map_records()
        return document

    def _map_records(self) -> list[dict[str, Any]]:
        vertices = self.vertices.tolist()
        records = []
        for i, (labels, coeffs, constant, gamma, radius) in enumerate(zip(
            self.labels.tolist(), self.coefficients.tolist(), self.contractions.tolist(),
            self.fixed_points.tolist(), self.radii.tolist(),
        )):
            records.append({
                "index": i,
                "labels": labels,
                "coefficients": dict(zip(COEFFICIENT_NAMES, coeffs)),
                "contraction": constant,
                "fixed_point": gamma,
                "radius": radius,
                "vertices": vertices[i],
            })
        return records


@dataclass
class PipelineResult:
    """
    Result of run_pipeline, shaped like the other command results.

    Attributes:
        status (str): "success" or "containment_failed"
        report (CoverReport): The cover report
        artifacts (dict[str, Path]): Files written, by kind
        metadata (dict): Run parameters and timings
        timestamp (str): ISO timestamp of completion
    """
    status: str
    report: CoverReport
    artifacts: dict[str, Path] = field(default_factory=dict)
    metadata: dict[str, Any] = field(default_factory=dict)
    timestamp: str = field(default_factory=lambda: datetime.now().isoformat())

    @property
    def exit_code(self) -> int:
        return 0 if self.status == STATUS_SUCCESS else 2

    def to_dict(self) -> dict[str, Any]:
        return {
            "status": self.status,
            "operation": "check",
            "data": self.report.to_dict(include_maps=False),
            "artifacts": {kind: str(path) for kind, path in self.artifacts.items()},
            "metadata": self.metadata,
            "timestamp": self.timestamp,
        }


def build_system(grid: DataGrid, order: int, settings: Settings, tighten: bool = False) -> IfsSystem:
    """Base system of the grid composed up to `order` under the settings' map cap."""
    base = build_ifs(grid, settings.collinearity_tolerance)
    return compose_system(base, order, max_maps=settings.max_maps, tighten=tighten)


def run_pipeline(
    grid: DataGrid,
    order: int,
    iterations: int,
    output_dir: str | Path | None = None,
    settings: Settings | None = None,
    *,
    chaos_steps: int = 0,
    chaos_seed: int = 0,
    chaos_burn_in: int = 0,
    chains: int = 1,
    tighten: bool = False,
    summary_only: bool = False,
    write_mesh: bool = True,
    name: str = "",
) -> PipelineResult:
    """
    Build the order-p cover, sample the attractor and check containment.

    Artifacts written to output_dir (skipped when it is None):
        report       - CoverReport JSON (per-map records unless summary_only)
        mesh         - OBJ with every octahedron (unless write_mesh is False)
        surface      - XYZ point cloud of the samples
        containment  - containment summary JSON

    Args:
        grid (DataGrid): Validated interpolation data
        order (int): Composition order p
        iterations (int): Hutchinson iterations from the data nodes
        output_dir (str | Path, optional): Artifact directory
        settings (Settings, optional): Caps and tolerances; defaults otherwise
        chaos_steps (int): Chaos-game steps per chain; 0 disables it
        chaos_seed (int): Chaos-game seed
        chaos_burn_in (int): Leading chaos-game points discarded per chain
        chains (int): Independent chaos-game chains
        tighten (bool): Tighten composed constants, see compose_system
        summary_only (bool): Drop per-map records from the report file
        write_mesh (bool): Export the OBJ mesh
        name (str): Prefix for artifact file names

    Returns:
        PipelineResult: status "containment_failed" iff some point fell outside

    Raises:
        OctaCoverError: validation errors and SystemTooLarge propagate
        ReportInconsistent: if the report does not reproduce its own radii
    """
    settings = settings or Settings()
    started = datetime.now()

    base = build_ifs(grid, settings.collinearity_tolerance)
    system = compose_system(base, order, max_maps=settings.max_maps, tighten=tighten)
    cover = build_cover(system)

    sampler = AttractorSampler(base, point_cap=settings.point_cap, resolution=settings.dedup_resolution)
    clouds = [sampler.sample_attractor(iterations)]
    if chaos_steps > 0:
        clouds.append(sampler.chaos_game(chaos_steps, burn_in=chaos_burn_in, rng_seed=chaos_seed, chains=chains))

    slack = settings.containment_slack * grid.scale
    containment = check_containment(cover, clouds, slack)
    report = CoverReport.from_cover(system, cover, containment)
    if not report.verify():
        logger.error(f"Cover report of order {order} failed its self-consistency check")
        raise ReportInconsistent(order)

    status = STATUS_SUCCESS if containment.passed else STATUS_CONTAINMENT_FAILED
    result = PipelineResult(
        status=status,
        report=report,
        metadata={
            "order": order,
            "map_count": len(system),
            "iterations": iterations,
            "chaos_steps": chaos_steps,
            "chaos_seed": chaos_seed,
            "chains": chains,
            "tighten": tighten,
            "hausdorff_bound": _finite_or_none(clouds[0].hausdorff_bound),
            "elapsed_seconds": None,
        },
    )

    if output_dir is not None:
        writer = ArtifactWriter(output_dir, prefix=name)
        suffix = f"p{order}"
        result.artifacts["report"] = writer.json(f"report_{suffix}", report.to_dict(include_maps=not summary_only))
        if write_mesh:
            result.artifacts["mesh"] = writer.obj(
                f"cover_{suffix}", cover, comment=f"order {order}, {len(cover)} octahedra, theta {system.metric.theta!r}"
            )
        result.artifacts["surface"] = writer.xyz("surface", np.concatenate([c.points for c in clouds], axis=0))
        result.artifacts["containment"] = writer.json(f"containment_{suffix}", containment.to_dict())

    result.metadata["elapsed_seconds"] = (datetime.now() - started).total_seconds()
    logger.info(f"Pipeline finished for order {order}: {status} in {result.metadata['elapsed_seconds']:.2f}s")
    return result


def _finite_or_none(value: float) -> float | None:
    return value if math.isfinite(value) else None
