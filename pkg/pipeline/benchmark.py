"""
Micro-benchmark: single-pass top-two selection against a full sort.
"""

import logging
import statistics
import time
from dataclasses import asdict, dataclass
from typing import Callable, Sequence

import numpy as np

from cover.selection import SelectionResult, top2_by_sorting, top2_select

logger = logging.getLogger(__name__)

DEFAULT_SIZES = (10, 1_000, 100_000, 1_000_000)


@dataclass(frozen=True)
class BenchmarkRow:
    """
    Timings for one array size.

    Attributes:
        size (int): N
        select_median (float): Median seconds for top2_select
        sort_median (float): Median seconds for the sorting baseline
        agree (bool): Both methods returned the same top-two values
        primary_comparisons (int): Comparisons against the running maximum
        secondary_comparisons (int): Comparisons against the running second maximum
    """
    size: int
    select_median: float
    sort_median: float
    agree: bool
    primary_comparisons: int
    secondary_comparisons: int

    @property
    def speedup(self) -> float:
        return self.sort_median / self.select_median if self.select_median > 0 else float("inf")

    def to_dict(self) -> dict:
        return {**asdict(self), "speedup": self.speedup}


def _median_time(method: Callable[[Sequence[float]], SelectionResult], values: np.ndarray,
                 repetitions: int) -> tuple[float, SelectionResult]:
    timings = []
    result = None
    for _ in range(repetitions):
        start = time.perf_counter()
        result = method(values)
        timings.append(time.perf_counter() - start)
    return statistics.median(timings), result


def bench_selection(sizes: Sequence[int] = DEFAULT_SIZES, repetitions: int = 5, seed: int = 0) -> list[BenchmarkRow]:
    """
    Time top2_select against top2_by_sorting on identical random arrays.

    Args:
        sizes (Sequence[int]): Array lengths, each >= 2
        repetitions (int): Timed runs per method and size
        seed (int): Seed for the random arrays

    Returns:
        list[BenchmarkRow]: One row per size, in the given order
    """
    if repetitions < 1:
        raise ValueError(f"repetitions must be >= 1, got {repetitions}")
    rng = np.random.default_rng(seed)
    rows = []
    for size in sizes:
        values = rng.random(size)
        select_time, selected = _median_time(top2_select, values, repetitions)
        sort_time, baseline = _median_time(top2_by_sorting, values, repetitions)
        agree = (
            values[selected.primary] == values[baseline.primary]
            and values[selected.secondary] == values[baseline.secondary]
        )
        row = BenchmarkRow(
            size=size,
            select_median=select_time,
            sort_median=sort_time,
            agree=bool(agree),
            primary_comparisons=selected.primary_comparisons,
            secondary_comparisons=selected.secondary_comparisons,
        )
        logger.info(f"N={size}: select {select_time:.3g}s, sort {sort_time:.3g}s, agree={row.agree}")
        rows.append(row)
    return rows


def format_table(rows: Sequence[BenchmarkRow]) -> str:
    """Plain-text table of benchmark rows."""
    header = f"{'N':>10} {'top2 (s)':>12} {'sort (s)':>12} {'speedup':>8} {'agree':>6} {'cmp1':>10} {'cmp2':>10}"
    lines = [header, "-" * len(header)]
    for row in rows:
        lines.append(
            f"{row.size:>10} {row.select_median:>12.3e} {row.sort_median:>12.3e} {row.speedup:>8.2f} "
            f"{str(row.agree):>6} {row.primary_comparisons:>10} {row.secondary_comparisons:>10}"
        )
    return "\n".join(lines)
