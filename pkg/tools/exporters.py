"""
Artifact writers: octahedron meshes (OBJ), point clouds (XYZ) and JSON documents.
Every file is written to a temporary sibling first and renamed into place.
"""

import json
import logging
import os
import re
import tempfile
from contextlib import contextmanager
from datetime import datetime
from pathlib import Path
from typing import Any, Iterator, TextIO

import numpy as np

from cover.octahedra import OCTAHEDRON_FACES, OctahedronCover

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def _default_mode() -> int:
    """Permissions a plain open() would give a new file under the current umask."""
    mask = os.umask(0)
    os.umask(mask)
    return 0o666 & ~mask


@contextmanager
def atomic_writer(path: str | Path) -> Iterator[TextIO]:
    """
    Open a temporary file next to `path`; rename it over `path` on success.

    The temporary file is removed if the body raises.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    handle = tempfile.NamedTemporaryFile(
        "w", encoding="utf-8", dir=path.parent, prefix=f".{path.name}.", suffix=".tmp", delete=False
    )
    try:
        with handle:
            yield handle
        os.chmod(handle.name, _default_mode())
        os.replace(handle.name, path)
    except BaseException:
        Path(handle.name).unlink(missing_ok=True)
        raise


def write_obj(path: str | Path, cover: OctahedronCover, comment: str = "") -> Path:
    """
    Export every octahedron of a cover as a triangle mesh.

    One `o octahedron_<i>` object per map, its six vertices V1..V6 and eight
    faces; face indices are 1-based and global across objects.

    Args:
        path (str | Path): Target .obj file
        cover (OctahedronCover): Cover to export
        comment (str): Optional header comment

    Returns:
        Path: The written file
    """
    path = Path(path)
    vertices = cover.vertices()
    vertex_line = "v " + " ".join([FLOAT_FORMAT] * 3) + "\n"
    with atomic_writer(path) as fh:
        fh.write("# octacover mesh export\n")
        if comment:
            fh.write(f"# {comment}\n")
        offset = 1
        for index, block in enumerate(vertices.tolist()):
            fh.write(f"o octahedron_{index}\n")
            fh.writelines(vertex_line % tuple(v) for v in block)
            fh.writelines("f %d %d %d\n" % tuple(face) for face in (OCTAHEDRON_FACES + offset).tolist())
            offset += len(block)
    logger.info(f"Wrote {len(cover)} octahedra ({8 * len(cover)} triangles) to {path}")
    return path


def write_xyz(path: str | Path, points: np.ndarray) -> Path:
    """Write whitespace-separated `x y z` lines, one per point."""
    path = Path(path)
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    with atomic_writer(path) as fh:
        np.savetxt(fh, points, fmt=FLOAT_FORMAT, delimiter=" ")
    logger.info(f"Wrote {points.shape[0]} points to {path}")
    return path


def write_json(path: str | Path, document: dict[str, Any]) -> Path:
    """Write a JSON document with stable key order (insertion order)."""
    path = Path(path)
    with atomic_writer(path) as fh:
        json.dump(document, fh, indent=2, allow_nan=False)
        fh.write("\n")
    logger.info(f"Wrote {path}")
    return path


def read_obj_vertices(path: str | Path) -> np.ndarray:
    """
    Vertex coordinates of an OBJ file, grouped six per octahedron.

    Returns:
        np.ndarray: (N, 6, 3) array in file order
    """
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("v "):
                rows.append([float(v) for v in line.split()[1:4]])
    return np.array(rows, dtype=float).reshape(-1, 6, 3)


class ArtifactWriter:
    """
    Writes the artifacts of one run into a directory.

    Key Features:
    - Creates the directory on first use
    - Optional timestamped file names so runs do not overwrite each other
    - Tracks every file written, in order
    """

    def __init__(self, directory: str | Path = "output", timestamped: bool = False, prefix: str = ""):
        """
        Initialize the writer.

        Args:
            directory (str | Path): Output directory
            timestamped (bool): Insert a YYYYmmdd_HHMMSS stamp into file names
            prefix (str): Optional name prefix, sanitized for the filesystem
        """
        self.directory = Path(directory)
        self.prefix = self._sanitize_filename(prefix) if prefix else ""
        self.stamp = datetime.now().strftime('%Y%m%d_%H%M%S') if timestamped else ""
        self.written: list[Path] = []
        self.logger = logging.getLogger(__name__)

    def _sanitize_filename(self, text: str) -> str:
        sanitized = re.sub(r'[<>:"/\\|?*]', '', text)
        sanitized = re.sub(r'\s+', '_', sanitized)
        return sanitized[:50].strip('_')

    def path_for(self, name: str, extension: str) -> Path:
        parts = [p for p in (self.prefix, name, self.stamp) if p]
        return self.directory / f"{'_'.join(parts)}.{extension}"

    def obj(self, name: str, cover: OctahedronCover, comment: str = "") -> Path:
        return self._track(write_obj(self.path_for(name, "obj"), cover, comment))

    def xyz(self, name: str, points: np.ndarray) -> Path:
        return self._track(write_xyz(self.path_for(name, "xyz"), points))

    def json(self, name: str, document: dict[str, Any]) -> Path:
        return self._track(write_json(self.path_for(name, "json"), document))

    def _track(self, path: Path) -> Path:
        self.written.append(path)
        return path
