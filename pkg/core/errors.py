"""
Exception hierarchy for the octahedron cover project.
Every error carries the process exit code the CLI reports for it.
"""

from typing import Optional


class OctaCoverError(Exception):
    """Base class for all expected failures."""

    exit_code: int = 1


class GridValidationError(OctaCoverError):
    """The data grid violates one of the interpolation preconditions."""


class NonFiniteValue(GridValidationError):
    """A grid entry is NaN or infinite."""

    def __init__(self, key: str, index: tuple[int, ...], value: float):
        self.key = key
        self.index = index
        self.value = value
        where = ",".join(str(i) for i in index)
        super().__init__(f"{key}[{where}] = {value!r} is not a finite number")


class NonMonotoneAxis(GridValidationError):
    """An abscissa or ordinate sequence is not strictly increasing."""

    def __init__(self, axis: str, index: int):
        self.axis = axis
        self.index = index
        super().__init__(f"axis '{axis}' is not strictly increasing at index {index}")


class GOutOfRange(GridValidationError):
    """A vertical scaling factor lies outside the open interval (0, 1)."""

    def __init__(self, k: int, l: int, value: float):
        self.k = k
        self.l = l
        self.value = value
        super().__init__(f"g[{k},{l}] = {value!r} is not in the open interval (0, 1)")


class BoundaryNotCollinear(GridValidationError):
    """One of the four boundary point sets is not collinear."""

    def __init__(self, edge: str, deviation: float, tolerance: float):
        self.edge = edge
        self.deviation = deviation
        self.tolerance = tolerance
        super().__init__(
            f"boundary set '{edge}' is not collinear: "
            f"max deviation {deviation:.6g} exceeds tolerance {tolerance:.6g}"
        )


class TooFewMaps(GridValidationError):
    """The system has fewer than two maps."""

    def __init__(self, count: int):
        self.count = count
        super().__init__(f"at least two maps are required, got {count}")


class ParseError(OctaCoverError):
    """An input document could not be read into a data grid or setting."""

    def __init__(self, message: str, key: Optional[str] = None, line: Optional[int] = None):
        self.key = key
        self.line = line
        context = []
        if key is not None:
            context.append(f"key '{key}'")
        if line is not None:
            context.append(f"line {line}")
        prefix = f"[{', '.join(context)}] " if context else ""
        super().__init__(f"{prefix}{message}")


class ContractionNotStrict(OctaCoverError):
    """A computed contraction constant is not below one."""

    def __init__(self, value: float):
        self.value = value
        super().__init__(f"contraction constant {value!r} is not < 1 (inconsistent metric or coefficients)")


class SystemTooLarge(OctaCoverError):
    """The composed system would exceed the configured map cap."""

    exit_code = 3

    def __init__(self, requested: int, cap: int):
        self.requested = requested
        self.cap = cap
        super().__init__(f"composed system needs {requested} maps, cap is {cap}")


class ReportInconsistent(OctaCoverError):
    """A cover report does not reproduce its own radii from its constants and M."""

    def __init__(self, order: int):
        self.order = order
        super().__init__(f"order-{order} cover report failed its self-consistency check")
