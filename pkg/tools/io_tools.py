"""
Shared CSV field format and trajectory manifests.

Format:

    # grid n1=<int> n2=<int> min1=<f> max1=<f> min2=<f> max2=<f>
    # columns W,dV1_dz2,dV2_dz1            (optional)
    i,j,z1,z2,<value>[,<value>...]

Rows are row-major in i then j. ``i`` and ``j`` are mesh indices; ingested
patches may start at any index, and the offset is kept so reports can quote
the original mesh node. Floats are written with ``repr`` so a write/read
round trip is bit-exact.
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from tools.field_tools import Grid2D, ScalarField2D, TimeSeries, VectorField2D
from utils import CSVFormatError, ManifestError, read_json, write_json

logger = logging.getLogger(__name__)

_HEADER_RE = re.compile(
    r"#\s*grid\s+n1=(?P<n1>\d+)\s+n2=(?P<n2>\d+)\s+min1=(?P<min1>\S+)\s+max1=(?P<max1>\S+)"
    r"\s+min2=(?P<min2>\S+)\s+max2=(?P<max2>\S+)\s*$"
)


@dataclass(frozen=True)
class ProfileTable:
    """Named gridded profiles read from one CSV file, with their mesh-index offset."""

    grid: Grid2D
    fields: dict[str, ScalarField2D]
    i0: int = 0
    j0: int = 0

    def __getitem__(self, name: str) -> ScalarField2D:
        if name not in self.fields:
            raise KeyError(f"profile column {name!r} not present (have {sorted(self.fields)})")
        return self.fields[name]

    def __contains__(self, name: str) -> bool:
        return name in self.fields

    def local(self, i: int, j: int) -> tuple[int, int]:
        """Array index of mesh node (i, j)."""
        li, lj = i - self.i0, j - self.j0
        if not (0 <= li < self.grid.n1 and 0 <= lj < self.grid.n2):
            raise KeyError(f"mesh node ({i}, {j}) outside the ingested patch")
        return li, lj

    def mesh_index(self, li: int, lj: int) -> tuple[int, int]:
        return li + self.i0, lj + self.j0

    def value(self, name: str, i: int, j: int) -> float:
        li, lj = self.local(i, j)
        return float(self[name].values[li, lj])


def format_header(grid: Grid2D) -> str:
    return (
        f"# grid n1={grid.n1} n2={grid.n2} min1={grid.min1!r} max1={grid.max1!r} "
        f"min2={grid.min2!r} max2={grid.max2!r}"
    )


def write_field_csv(
    path: str | Path,
    grid: Grid2D,
    columns: dict[str, np.ndarray],
    i0: int = 0,
    j0: int = 0,
) -> Path:
    """Write one or more same-grid arrays in the shared CSV format."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = list(columns)
    arrays = [np.asarray(columns[n], dtype=float) for n in names]
    z1, z2 = grid.z1, grid.z2
    lines = [format_header(grid)]
    if names not in (["value"], ["value1", "value2"]):
        lines.append("# columns " + ",".join(names))
    for i in range(grid.n1):
        for j in range(grid.n2):
            vals = ",".join(repr(float(a[i, j])) for a in arrays)
            lines.append(f"{i + i0},{j + j0},{float(z1[i])!r},{float(z2[j])!r},{vals}")
    path.write_text("\n".join(lines) + "\n")
    return path


def write_scalar_csv(path: str | Path, field: ScalarField2D) -> Path:
    return write_field_csv(path, field.grid, {"value": field.values})


def write_vector_csv(path: str | Path, field: VectorField2D) -> Path:
    return write_field_csv(path, field.grid, {"value1": field.u1, "value2": field.u2})


def _parse_float(token: str, path, line_no: int) -> float:
    try:
        value = float(token)
    except ValueError as exc:
        raise CSVFormatError(f"not a number: {token!r}", path, line_no) from exc
    if not math.isfinite(value):
        raise CSVFormatError(f"non-finite value {token!r}", path, line_no)
    return value


def load_profile_csv(path: str | Path, columns: Sequence[str] | None = None) -> ProfileTable:
    """
    Read a CSV field file into a ProfileTable.

    Args:
        path: File in the shared CSV format
        columns: Names to assign to the value columns. Defaults to the file's
            ``# columns`` line, else "value" / "value1,value2".

    Returns:
        ProfileTable with one ScalarField2D per column

    Raises:
        CSVFormatError: ragged rows, non-monotone coordinates or NaNs, with
            the offending line number
    """
    path = Path(path)
    text = path.read_text().splitlines()
    if not text:
        raise CSVFormatError("empty file", path, 1)
    m = _HEADER_RE.match(text[0].strip())
    if not m:
        raise CSVFormatError("missing or malformed '# grid' header", path, 1)
    try:
        grid = Grid2D(
            float(m["min1"]), float(m["max1"]), float(m["min2"]), float(m["max2"]), int(m["n1"]), int(m["n2"])
        )
    except ValueError as exc:
        raise CSVFormatError(str(exc), path, 1) from exc

    start = 1
    declared: list[str] | None = None
    if len(text) > 1 and text[1].strip().startswith("# columns"):
        declared = [c.strip() for c in text[1].strip()[len("# columns"):].split(",") if c.strip()]
        start = 2

    rows = [(n + 1, line) for n, line in enumerate(text[start:], start=start) if line.strip()]
    if len(rows) != grid.n1 * grid.n2:
        raise CSVFormatError(f"expected {grid.n1 * grid.n2} rows, found {len(rows)}", path, len(text))

    width = None
    data = None
    i0 = j0 = 0
    z1_seen = np.full(grid.n1, np.nan)
    z2_seen = np.full(grid.n2, np.nan)
    for k, (line_no, line) in enumerate(rows):
        parts = line.split(",")
        if width is None:
            width = len(parts)
            if width < 5:
                raise CSVFormatError("rows need i,j,z1,z2 and at least one value", path, line_no)
            data = np.empty((width - 4, grid.n1, grid.n2))
        elif len(parts) != width:
            raise CSVFormatError(f"ragged row: {len(parts)} fields, expected {width}", path, line_no)
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise CSVFormatError("mesh indices must be integers", path, line_no) from exc
        if k == 0:
            i0, j0 = i, j
        li, lj = i - i0, j - j0
        if (li, lj) != divmod(k, grid.n2):
            raise CSVFormatError(f"rows out of order at mesh node ({i}, {j})", path, line_no)
        z1 = _parse_float(parts[2], path, line_no)
        z2 = _parse_float(parts[3], path, line_no)
        if lj == 0:
            if li > 0 and not z1 > z1_seen[li - 1]:
                raise CSVFormatError(f"non-monotone z1 coordinate {z1!r}", path, line_no)
            z1_seen[li] = z1
        elif z1 != z1_seen[li]:
            raise CSVFormatError(f"z1 changes within row block i={i}", path, line_no)
        if li == 0:
            if lj > 0 and not z2 > z2_seen[lj - 1]:
                raise CSVFormatError(f"non-monotone z2 coordinate {z2!r}", path, line_no)
            z2_seen[lj] = z2
        for c, token in enumerate(parts[4:]):
            data[c, li, lj] = _parse_float(token, path, line_no)

    ncols = data.shape[0]
    names = list(columns) if columns is not None else declared
    if names is None:
        names = ["value"] if ncols == 1 else [f"value{c + 1}" for c in range(ncols)]
    if len(names) != ncols:
        raise CSVFormatError(f"{ncols} value columns but {len(names)} names given", path, start)
    fields = {name: ScalarField2D(grid, data[c]) for c, name in enumerate(names)}
    logger.debug("Loaded %s: columns=%s grid=%s offset=(%d, %d)", path, names, grid.shape, i0, j0)
    return ProfileTable(grid=grid, fields=fields, i0=i0, j0=j0)


def load_scalar_csv(path: str | Path) -> ScalarField2D:
    table = load_profile_csv(path)
    if len(table.fields) != 1:
        raise CSVFormatError(f"expected one value column, found {len(table.fields)}", path)
    return next(iter(table.fields.values()))


def load_vector_csv(path: str | Path) -> VectorField2D:
    table = load_profile_csv(path)
    if len(table.fields) != 2:
        raise CSVFormatError(f"expected two value columns, found {len(table.fields)}", path)
    a, b = table.fields.values()
    return VectorField2D(table.grid, a.values, b.values)


# =============================================================================
# Trajectory dumps
# =============================================================================


def write_trajectory(
    directory: str | Path,
    prefix: str,
    times: Sequence[float],
    snapshots: Sequence[dict[str, ScalarField2D]],
) -> Path:
    """
    Dump a sequence of named scalar snapshots, one CSV per field per time,
    plus a JSON manifest {times, grid, fields}.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    grid = next(iter(snapshots[0].values())).grid
    files: dict[str, list[str]] = {name: [] for name in snapshots[0]}
    for k, snap in enumerate(snapshots):
        for name, fld in snap.items():
            fname = f"{prefix}-{name}-{k:05d}.csv"
            write_scalar_csv(directory / fname, fld)
            files[name].append(fname)
    manifest = {
        "times": [float(t) for t in times],
        "grid": {
            "n1": grid.n1,
            "n2": grid.n2,
            "min1": grid.min1,
            "max1": grid.max1,
            "min2": grid.min2,
            "max2": grid.max2,
        },
        "fields": files,
    }
    return write_json(directory / f"{prefix}-trajectory.json", manifest)


def read_trajectory(manifest_path: str | Path) -> dict[str, TimeSeries]:
    """Load every field of a trajectory manifest as a TimeSeries."""
    manifest_path = Path(manifest_path)
    manifest = read_json(manifest_path)
    for key in ("times", "grid", "fields"):
        if key not in manifest:
            raise ManifestError("missing entry", field=key)
    out = {}
    for name, files in manifest["fields"].items():
        if len(files) != len(manifest["times"]):
            raise ManifestError(f"{len(files)} files for {len(manifest['times'])} times", field=f"fields.{name}")
        snaps = [load_scalar_csv(manifest_path.parent / f) for f in files]
        out[name] = TimeSeries(tuple(manifest["times"]), tuple(snaps))
    return out
