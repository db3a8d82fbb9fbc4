"""
Reading and writing grid files.

A grid file is a UTF-8 JSON document with keys:
    x: [x_0, ..., x_n]
    y: [y_0, ..., y_m]
    z: (n+1) rows of m+1 heights, z[k][l] = z_{k,l}
    g: n rows of m scaling factors, g[k-1][l-1] = g_{k,l}
Optional "name" and "description" strings are ignored by the construction.
"""

import json
import logging
import math
from pathlib import Path
from typing import Any

from core.errors import ParseError
from ifs.grid import DEFAULT_COLLINEARITY_TOLERANCE, DataGrid, validate_grid

logger = logging.getLogger(__name__)

REQUIRED_KEYS = ("x", "y", "z", "g")


def _number(value: Any, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"expected a number, got {value!r}", key=key)
    number = float(value)
    if not math.isfinite(number):
        raise ParseError(f"expected a finite number, got {value!r}", key=key)
    return number


def _vector(document: dict, key: str) -> list[float]:
    values = document[key]
    if not isinstance(values, list):
        raise ParseError("expected an array", key=key)
    return [_number(v, f"{key}[{i}]") for i, v in enumerate(values)]


def _matrix(document: dict, key: str, rows: int, columns: int) -> list[list[float]]:
    values = document[key]
    if not isinstance(values, list) or not all(isinstance(row, list) for row in values):
        raise ParseError("expected an array of arrays", key=key)
    if len(values) != rows:
        raise ParseError(f"shape mismatch: {len(values)} rows, expected {rows}", key=key)
    matrix = []
    for i, row in enumerate(values):
        if len(row) != columns:
            raise ParseError(f"shape mismatch: row {i} has {len(row)} entries, expected {columns}", key=key)
        matrix.append([_number(v, f"{key}[{i}][{j}]") for j, v in enumerate(row)])
    return matrix


def grid_from_text(text: str, collinearity_tolerance: float = DEFAULT_COLLINEARITY_TOLERANCE) -> DataGrid:
    """
    Parse and validate grid file contents.

    Args:
        text (str): JSON document
        collinearity_tolerance (float): Passed to validate_grid

    Returns:
        DataGrid: Validated grid

    Raises:
        ParseError: malformed JSON, missing keys, non-numeric entries or shape mismatch
        GridValidationError: the grid parses but is not admissible
    """
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, line=e.lineno) from e
    if not isinstance(document, dict):
        raise ParseError("top level must be an object")
    for key in REQUIRED_KEYS:
        if key not in document:
            raise ParseError("missing required key", key=key)

    x = _vector(document, "x")
    y = _vector(document, "y")
    n, m = len(x) - 1, len(y) - 1
    z = _matrix(document, "z", n + 1, m + 1)
    g = _matrix(document, "g", max(n, 0), max(m, 0))

    return validate_grid(DataGrid(x=x, y=y, z=z, g=g), collinearity_tolerance)


def parse_grid(path: str | Path, collinearity_tolerance: float = DEFAULT_COLLINEARITY_TOLERANCE) -> DataGrid:
    """
    Read a grid file from disk.

    Args:
        path (str | Path): Grid file
        collinearity_tolerance (float): Passed to validate_grid

    Returns:
        DataGrid: Validated grid
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e}") from e
    grid = grid_from_text(text, collinearity_tolerance)
    logger.info(f"Loaded grid from {path}")
    return grid


def serialize_grid(grid: DataGrid, name: str | None = None) -> str:
    """
    Render a grid as a grid file; parse_grid reads it back bit-exactly.

    Returns:
        str: JSON text (floats in shortest round-trip form)
    """
    document: dict[str, Any] = {}
    if name:
        document["name"] = name
    document.update({
        "x": grid.x.tolist(),
        "y": grid.y.tolist(),
        "z": grid.z.tolist(),
        "g": grid.g.tolist(),
    })
    return json.dumps(document, indent=2) + "\n"
