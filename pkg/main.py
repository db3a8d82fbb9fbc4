"""
octacover command-line interface.

Exit codes: 0 success, 1 validation/parse error, 2 containment failure, 3 resource cap.
"""

import functools
import json
import logging
import sys
from pathlib import Path
from typing import Optional

import click

from attractor.sampler import AttractorSampler
from core.config import Settings, configure_logging
from core.errors import OctaCoverError
from cover.octahedra import build_cover
from ifs.grid import collinearity_deviations
from ifs.maps import COEFFICIENT_NAMES
from ifs.system import build_ifs
from pipeline.benchmark import DEFAULT_SIZES, bench_selection, format_table
from pipeline.runner import CoverReport, build_system, run_pipeline
from tools.exporters import ArtifactWriter, write_xyz
from tools.grid_files import parse_grid

logger = logging.getLogger("octacover")

GRID_ARGUMENT = click.argument("grid_path", metavar="GRID", type=click.Path(exists=True, dir_okay=False))


def handle_errors(command):
    """Report expected failures on stderr and exit with their exit code."""
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except OctaCoverError as e:
            logger.error(f"{type(e).__name__}: {e}")
            click.echo(f"Error: {e}", err=True)
            sys.exit(e.exit_code)
        except (click.exceptions.Exit, click.ClickException):
            raise
        except Exception as e:
            logger.exception("Unexpected failure")
            click.echo(f"Error: {e}", err=True)
            sys.exit(1)
    return wrapper


def _load(ctx: click.Context, grid_path: str):
    settings: Settings = ctx.obj
    return parse_grid(grid_path, settings.collinearity_tolerance)


@click.group()
@click.option("--log-level", type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
              default=None, help="Logging level (default: OCTACOVER_LOG_LEVEL or INFO)")
@click.option("--max-maps", type=int, default=None, help="Cap on maps of a composed system (default: 1000000)")
@click.option("--point-cap", type=int, default=None, help="Cap on deterministic sample size (default: 200000)")
@click.option("--env-file", type=click.Path(dir_okay=False), default=None, help="Explicit .env file to load")
@click.pass_context
def cli(ctx: click.Context, log_level: Optional[str], max_maps: Optional[int], point_cap: Optional[int],
        env_file: Optional[str]) -> None:
    """Octahedron covers of fractal interpolation surfaces."""
    try:
        settings = Settings.from_env(env_file)
    except OctaCoverError as e:
        click.echo(f"Error: {e}", err=True)
        sys.exit(e.exit_code)
    settings = settings.with_overrides(log_level=log_level.upper() if log_level else None,
                                       max_maps=max_maps, point_cap=point_cap)
    configure_logging(settings.log_level)
    ctx.obj = settings


@cli.command()
@GRID_ARGUMENT
@click.pass_context
@handle_errors
def validate(ctx: click.Context, grid_path: str) -> None:
    """Check a grid file against every precondition."""
    grid = _load(ctx, grid_path)
    click.echo(f"grid: n={grid.n}, m={grid.m}, maps={grid.map_count}, scale={grid.scale:g}")
    for edge, deviation in collinearity_deviations(grid).items():
        click.echo(f"  {edge:<6} boundary deviation {deviation:.3e}")
    click.echo("OK")


@cli.command()
@GRID_ARGUMENT
@click.option("--json", "as_json", is_flag=True, help="Print the coefficients as JSON")
@click.pass_context
@handle_errors
def coeffs(ctx: click.Context, grid_path: str, as_json: bool) -> None:
    """Print theta, delta and every map's coefficients, constant and fixed point."""
    system = build_ifs(_load(ctx, grid_path), ctx.obj.collinearity_tolerance)
    metric = system.metric
    if as_json:
        document = {
            "theta": metric.theta,
            "theta1": metric.theta1,
            "theta2": metric.theta2,
            "delta": metric.delta,
            "maps": [
                {
                    "k": ifs_map.label[0][0],
                    "l": ifs_map.label[0][1],
                    "coefficients": ifs_map.coeffs.to_dict(),
                    "contraction": ifs_map.contraction,
                    "fixed_point": list(ifs_map.fixed_point),
                }
                for ifs_map in system
            ],
        }
        click.echo(json.dumps(document, indent=2))
        return

    click.echo(f"theta = {metric.theta!r} (theta1 = {metric.theta1!r}, theta2 = {metric.theta2!r})")
    click.echo(f"delta = {metric.delta!r}")
    for ifs_map in system:
        k, l = ifs_map.label[0]
        values = ", ".join(f"{name}={value:.6g}" for name, value in zip(COEFFICIENT_NAMES, ifs_map.coeffs.as_array()))
        click.echo(f"F[{k},{l}]: {values}")
        click.echo(f"        C={ifs_map.contraction:.6g}, gamma=({', '.join(f'{v:.6g}' for v in ifs_map.fixed_point)})")


@cli.command()
@GRID_ARGUMENT
@click.option("--order", "-p", type=click.IntRange(min=1), default=1, show_default=True, help="Composition order p")
@click.option("--output", "output_dir", type=click.Path(file_okay=False), default=None,
              help="Directory for the report and OBJ mesh")
@click.option("--tighten", is_flag=True, help="Tighten composed contraction constants")
@click.option("--brute-force-diameter", is_flag=True, help="Compute M with the O(N^2) scan")
@click.option("--summary-only", is_flag=True, help="Omit per-map records from the report")
@click.pass_context
@handle_errors
def cover(ctx: click.Context, grid_path: str, order: int, output_dir: Optional[str], tighten: bool,
          brute_force_diameter: bool, summary_only: bool) -> None:
    """Build the order-p octahedron cover."""
    settings: Settings = ctx.obj
    grid = _load(ctx, grid_path)
    system = build_system(grid, order, settings, tighten=tighten)
    octahedra = build_cover(system, brute_force_diameter=brute_force_diameter)
    report = CoverReport.from_cover(system, octahedra)

    click.echo(f"order {order}: {len(octahedra)} octahedra, theta={system.metric.theta:.6g}")
    click.echo(f"M={report.diameter:.6g}, i'={report.primary_index}, i''={report.secondary_index}, "
               f"max radius={octahedra.max_radius:.6g}")
    if output_dir:
        writer = ArtifactWriter(output_dir, prefix=Path(grid_path).stem)
        writer.json(f"report_p{order}", report.to_dict(include_maps=not summary_only))
        writer.obj(f"cover_p{order}", octahedra, comment=f"order {order}, theta {system.metric.theta!r}")
        for path in writer.written:
            click.echo(f"Wrote: {path}")


@cli.command()
@GRID_ARGUMENT
@click.option("--iters", type=click.IntRange(min=0), default=8, show_default=True, help="Hutchinson iterations")
@click.option("--chaos", is_flag=True, help="Use the chaos game instead of Hutchinson iteration")
@click.option("--steps", type=click.IntRange(min=1), default=100_000, show_default=True, help="Chaos-game steps per chain")
@click.option("--seed", type=int, default=0, show_default=True, help="Chaos-game seed")
@click.option("--burn-in", type=click.IntRange(min=0), default=0, show_default=True, help="Chaos-game points discarded per chain")
@click.option("--chains", type=click.IntRange(min=1), default=1, show_default=True, help="Independent chaos-game chains")
@click.option("--output", "output_path", type=click.Path(dir_okay=False), default=None, help="XYZ file for the points")
@click.pass_context
@handle_errors
def sample(ctx: click.Context, grid_path: str, iters: int, chaos: bool, steps: int, seed: int, burn_in: int,
           chains: int, output_path: Optional[str]) -> None:
    """Sample the surface (the attractor of the base system)."""
    settings: Settings = ctx.obj
    system = build_ifs(_load(ctx, grid_path), settings.collinearity_tolerance)
    sampler = AttractorSampler(system, point_cap=settings.point_cap, resolution=settings.dedup_resolution)
    if chaos:
        cloud = sampler.chaos_game(steps, burn_in=burn_in, rng_seed=seed, chains=chains)
    else:
        cloud = sampler.sample_attractor(iters)

    click.echo(f"{len(cloud)} points ({cloud.method.value}, truncated={cloud.truncated})")
    if output_path:
        write_xyz(output_path, cloud.points)
        click.echo(f"Wrote: {output_path}")


@cli.command()
@GRID_ARGUMENT
@click.option("--order", "-p", type=click.IntRange(min=1), default=1, show_default=True, help="Composition order p")
@click.option("--iters", type=click.IntRange(min=0), default=8, show_default=True, help="Hutchinson iterations")
@click.option("--steps", type=click.IntRange(min=0), default=100_000, show_default=True,
              help="Chaos-game steps (0 disables the chaos game)")
@click.option("--seed", type=int, default=0, show_default=True, help="Chaos-game seed")
@click.option("--output", "output_dir", type=click.Path(file_okay=False), default=None,
              help="Artifact directory (default: OCTACOVER_OUTPUT_DIR or ./output)")
@click.option("--tighten", is_flag=True, help="Tighten composed contraction constants")
@click.option("--summary-only", is_flag=True, help="Omit per-map records from the report")
@click.option("--no-mesh", is_flag=True, help="Skip the OBJ export")
@click.pass_context
@handle_errors
def check(ctx: click.Context, grid_path: str, order: int, iters: int, steps: int, seed: int,
          output_dir: Optional[str], tighten: bool, summary_only: bool, no_mesh: bool) -> None:
    """Run the full pipeline: cover, samples, containment check and artifacts."""
    settings: Settings = ctx.obj
    grid = _load(ctx, grid_path)
    result = run_pipeline(
        grid,
        order,
        iters,
        output_dir or settings.output_dir,
        settings,
        chaos_steps=steps,
        chaos_seed=seed,
        tighten=tighten,
        summary_only=summary_only,
        write_mesh=not no_mesh,
        name=Path(grid_path).stem,
    )
    containment = result.report.containment
    click.echo(f"order {order}: {len(result.report.radii)} octahedra, max radius {result.report.radii.max():.6g}")
    click.echo(f"containment: {containment.points_tested} points, {containment.failures} failures, "
               f"max slack used {containment.max_slack_used:.3e}")
    for kind, path in result.artifacts.items():
        click.echo(f"Wrote {kind}: {path}")
    click.echo(result.status)
    sys.exit(result.exit_code)


@cli.command()
@click.option("--sizes", type=str, default=",".join(str(s) for s in DEFAULT_SIZES), show_default=True,
              help="Comma-separated array sizes")
@click.option("--repetitions", type=click.IntRange(min=1), default=5, show_default=True, help="Timed runs per size")
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for the random arrays")
@handle_errors
def bench(sizes: str, repetitions: int, seed: int) -> None:
    """Compare single-pass top-two selection with a full sort."""
    try:
        parsed = [int(s) for s in sizes.split(",") if s.strip()]
    except ValueError as e:
        raise click.BadParameter(f"sizes must be integers: {e}", param_hint="--sizes")
    rows = bench_selection(parsed, repetitions=repetitions, seed=seed)
    click.echo(format_table(rows))
    if not all(row.agree for row in rows):
        click.echo("Error: selection and sort disagree", err=True)
        sys.exit(1)


def main() -> None:
    cli()


if __name__ == "__main__":
    main()
