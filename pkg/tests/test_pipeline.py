import json
from dataclasses import replace

import numpy as np
import pytest

from attractor.sampler import AttractorSampler
from core.config import Settings
from core.errors import ReportInconsistent, SystemTooLarge
from cover.octahedra import build_cover
from pipeline import runner
from pipeline.runner import (
    STATUS_CONTAINMENT_FAILED,
    STATUS_SUCCESS,
    CoverReport,
    PipelineResult,
    check_containment,
    run_pipeline,
)
from tools.exporters import read_obj_vertices


@pytest.fixture(scope="module")
def example1_run(example1_grid, tmp_path_factory):
    output = tmp_path_factory.mktemp("example1")
    return run_pipeline(example1_grid, 1, 6, output, chaos_steps=5000, chaos_seed=7, name="example1")


def test_example1_order1_passes(example1_run):
    assert example1_run.status == STATUS_SUCCESS
    assert example1_run.exit_code == 0
    containment = example1_run.report.containment
    assert containment.failures == 0
    assert containment.points_tested == (2**6 + 1) ** 2 + 5000
    assert containment.chaos_points == 5000


def test_artifacts_written(example1_run):
    artifacts = example1_run.artifacts
    assert set(artifacts) == {"report", "mesh", "surface", "containment"}
    assert artifacts["mesh"].name == "example1_cover_p1.obj"
    mesh = artifacts["mesh"].read_text().splitlines()
    assert sum(line.startswith("o ") for line in mesh) == 4
    assert sum(line.startswith("f ") for line in mesh) == 32
    surface = np.loadtxt(artifacts["surface"])
    assert surface.shape == ((2**6 + 1) ** 2 + 5000, 3)
    containment = json.loads(artifacts["containment"].read_text())
    assert containment["passed"] is True


def test_report_file_is_self_consistent(example1_run):
    document = json.loads(example1_run.artifacts["report"].read_text())
    assert document["order"] == 1
    assert document["map_count"] == 4
    assert len(document["maps"]) == 4
    assert document["maps"][0]["labels"] == [[1, 1]]
    assert set(document["maps"][0]["coefficients"]) == {"a", "b", "c", "d", "e", "f", "g", "alpha", "beta"}
    report = CoverReport.from_dict(document)
    assert report.verify()
    np.testing.assert_array_equal(report.radii, example1_run.report.radii)


def test_mesh_matches_report(example1_run):
    document = json.loads(example1_run.artifacts["report"].read_text())
    mesh = read_obj_vertices(example1_run.artifacts["mesh"])
    theta = document["theta"]
    for record, vertices in zip(document["maps"], mesh):
        center, radius = np.array(record["fixed_point"]), record["radius"]
        np.testing.assert_allclose(vertices[0], center + [radius, 0, 0], rtol=1e-12)
        np.testing.assert_allclose(vertices[2], center + [0, 0, radius / theta], rtol=1e-12)
        np.testing.assert_allclose(vertices[5], center - [0, 0, radius / theta], rtol=1e-12)
        np.testing.assert_array_equal(vertices, record["vertices"])


def test_verify_detects_tampering(example1_run):
    report = example1_run.report
    assert report.verify()
    assert not replace(report, radii=report.radii * (1 + 1e-9)).verify()
    assert not replace(report, primary_index=0).verify()


def test_summary_only_report(example1_grid, tmp_path):
    result = run_pipeline(example1_grid, 2, 3, tmp_path, summary_only=True, write_mesh=False)
    document = json.loads(result.artifacts["report"].read_text())
    assert "maps" not in document
    assert document["map_count"] == 16
    assert "mesh" not in result.artifacts


def test_without_output_dir_writes_nothing(example1_grid):
    result = run_pipeline(example1_grid, 1, 2, None)
    assert result.artifacts == {}
    assert result.to_dict()["status"] == STATUS_SUCCESS


def test_high_order_radii_shrink(example1_grid):
    seventh = run_pipeline(example1_grid, 7, 2, None)
    ninth = run_pipeline(example1_grid, 9, 2, None)
    assert len(ninth.report.radii) == 4**9
    assert ninth.report.radii.max() < seventh.report.radii.max()
    assert ninth.status == STATUS_SUCCESS


def test_map_cap_from_settings(example2_grid):
    with pytest.raises(SystemTooLarge):
        run_pipeline(example2_grid, 5, 2, None, Settings(max_maps=10**4))
    result = run_pipeline(example2_grid, 5, 2, None, Settings(max_maps=10**5))
    assert len(result.report.radii) == 59049


def test_containment_failure_is_reported(example1_system):
    cover = build_cover(example1_system)
    shrunk = replace(cover, radii=cover.radii * 0.5)
    cloud = AttractorSampler(example1_system).sample_attractor(4)
    summary = check_containment(shrunk, [cloud], slack=1e-9 * 200)
    assert summary.failures > 0
    assert not summary.passed
    assert summary.max_slack_used > 0
    failed = PipelineResult(status=STATUS_CONTAINMENT_FAILED, report=CoverReport.from_cover(example1_system, shrunk))
    assert failed.exit_code == 2


def test_inconsistent_report_fails_the_run(example1_grid, tmp_path, monkeypatch):
    monkeypatch.setattr(CoverReport, "verify", lambda self, rel_tol=1e-12: False)
    with pytest.raises(ReportInconsistent) as info:
        run_pipeline(example1_grid, 1, 2, tmp_path)
    assert info.value.exit_code == 1
    assert not list(tmp_path.iterdir())


def test_corrupted_radii_are_caught(example1_grid, monkeypatch):
    real_solve = runner.solve_radii

    def skewed(constants, diameter):
        solution = real_solve(constants, diameter)
        return replace(solution, radii=solution.radii * 1.01)

    # the cover keeps the true radii; only the report check sees the skewed ones
    monkeypatch.setattr(runner, "solve_radii", skewed)
    with pytest.raises(ReportInconsistent):
        run_pipeline(example1_grid, 2, 2, None)
