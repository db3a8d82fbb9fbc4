"""
Selection of the two largest contraction constants.
A single pass replaces the sort the earlier localization method relied on.
"""

from dataclasses import dataclass
from typing import Sequence

from core.errors import TooFewMaps


@dataclass(frozen=True)
class SelectionResult:
    """
    Indices of the largest value and of the largest among the rest.

    Attributes:
        primary (int): i', first index holding the maximum
        secondary (int): i'', first index holding the maximum over indices != i'
        primary_comparisons (int): Comparisons against the running maximum
        secondary_comparisons (int): Comparisons against the running second maximum
    """
    primary: int
    secondary: int
    primary_comparisons: int = 0
    secondary_comparisons: int = 0

    def __iter__(self):
        return iter((self.primary, self.secondary))


def top2_select(constants: Sequence[float]) -> SelectionResult:
    """
    Find i' and i'' in one pass, ties going to the first occurrence.

    Every element after the first is compared with the running maximum;
    only elements that do not beat it are compared with the running second.

    Args:
        constants: N >= 2 values

    Returns:
        SelectionResult: (i', i'') plus comparison counts

    Raises:
        TooFewMaps: if N < 2
    """
    values = constants.tolist() if hasattr(constants, "tolist") else list(constants)
    count = len(values)
    if count < 2:
        raise TooFewMaps(count)

    best, best_value = 0, values[0]
    second, second_value = -1, 0.0
    primary = secondary = 0
    for index in range(1, count):
        value = values[index]
        primary += 1
        if value > best_value:
            second, second_value = best, best_value
            best, best_value = index, value
        elif second < 0:
            second, second_value = index, value
        else:
            secondary += 1
            if value > second_value:
                second, second_value = index, value

    return SelectionResult(best, second, primary, secondary)


def top2_by_sorting(constants: Sequence[float]) -> SelectionResult:
    """Sort-based selection with the same tie rule; the baseline and test oracle."""
    values = constants.tolist() if hasattr(constants, "tolist") else list(constants)
    if len(values) < 2:
        raise TooFewMaps(len(values))
    # stable sort on the negated value keeps first occurrences ahead of later ties
    ranking = sorted(range(len(values)), key=lambda i: -values[i])
    return SelectionResult(ranking[0], ranking[1])
