"""
Plot-ready CSV series for reports and fields.

Every file is plain columnar CSV with a header row, so any plotting tool can
read it:

    <prefix>-<certifier>-line<k>.csv     s,z1,z2,W        flow-line polylines
    <prefix>-<certifier>-proots.csv      p,root_T1,root_T4,root_T5
    <prefix>-<name>.csv                  shared field format (heat maps)
    <prefix>-<name>-series.csv           t,<name>         time series
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from models.schemas import CertificateReport
from tools.field_tools import ScalarField2D
from tools.flowline_tools import FlowLine
from tools.io_tools import write_scalar_csv

logger = logging.getLogger(__name__)


def _fmt(value: Any) -> str:
    return "" if value is None else repr(float(value))


def write_rows_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"row has {len(row)} values for {len(header)} columns")
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def write_polyline_csv(path: str | Path, line: FlowLine | Mapping[str, Any]) -> Path:
    """(s, z1, z2, W) rows of a flow line, or of a flow-line witness dict."""
    rows = line.rows() if isinstance(line, FlowLine) else [tuple(r) for r in line["samples"]]
    return write_rows_csv(path, ("s", "z1", "z2", "W"), rows)


def _report_polylines(report: CertificateReport) -> list[Mapping[str, Any]]:
    lines = []
    if "flowline" in report.traces:
        lines.append(report.traces["flowline"])
    lines.extend(report.traces.get("flowlines", []))
    lines.extend(f["flowline"] for f in report.findings if "flowline" in f)
    return [ln for ln in lines if ln.get("samples")]


def emit_plotdata(
    directory: str | Path,
    prefix: str,
    reports: Sequence[CertificateReport] = (),
    fields: Mapping[str, ScalarField2D] | None = None,
    series: Mapping[str, tuple[Sequence[float], Sequence[float]]] | None = None,
) -> list[Path]:
    """
    Write plot data for certificate reports, gridded fields and time series.

    Args:
        directory: Output directory (created if missing)
        prefix: File-name prefix, normally the run's config hash
        reports: Certificate reports; flow-line witnesses and p-root rungs are exported
        fields: Named scalar fields exported in the shared CSV format
        series: name → (times, values), e.g. conservation drift

    Returns:
        Paths written, in write order
    """
    directory = Path(directory)
    written: list[Path] = []
    for report in reports:
        stem = f"{prefix}-{report.certifier}"
        for k, line in enumerate(_report_polylines(report)):
            written.append(write_polyline_csv(directory / f"{stem}-line{k}.csv", line))
        rungs = report.traces.get("rungs")
        if rungs:
            rows = [(r["p"], r.get("root_T1"), r.get("root_T4"), r.get("root_T5")) for r in rungs]
            written.append(write_rows_csv(directory / f"{stem}-proots.csv", ("p", "root_T1", "root_T4", "root_T5"), rows))
    for name, fld in (fields or {}).items():
        written.append(write_scalar_csv(directory / f"{prefix}-{name}.csv", fld))
    for name, (times, values) in (series or {}).items():
        if len(times) != len(values):
            raise ValueError(f"series {name}: {len(times)} times for {len(values)} values")
        written.append(write_rows_csv(directory / f"{prefix}-{name}-series.csv", ("t", name), zip(times, values)))
    logger.info("Wrote %d plot-data files to %s", len(written), directory)
    return written
