"""
Shared utilities, error types and validators for the blow-up verification lab.
"""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path
from typing import Any

# =============================================================================
# Error types
# =============================================================================


class FieldValueError(ValueError):
    """A sampled value is unusable (non-finite, or a non-positive weight)."""

    def __init__(self, message: str, node: tuple[int, int] | None = None, value: float | None = None):
        self.node = node
        self.value = value
        if node is not None:
            message = f"{message} at node {node} (value={value!r})"
        super().__init__(message)


class GridMismatchError(ValueError):
    """Two fields that must share a grid do not."""


class CFLViolationError(ValueError):
    def __init__(self, cfl: float, limit: float):
        self.cfl = cfl
        self.limit = limit
        super().__init__(f"CFL number {cfl:.6g} exceeds limit {limit:.6g}")


class PoissonConvergenceError(RuntimeError):
    def __init__(self, residual: float, tolerance: float):
        self.residual = residual
        self.tolerance = tolerance
        super().__init__(f"Poisson solve residual {residual:.3e} above tolerance {tolerance:.3e}")


class WindowError(ValueError):
    """A rescaling window maps outside the sampled domain."""

    def __init__(self, message: str, corner: tuple[float, ...] | None = None):
        self.corner = corner
        if corner is not None:
            message = f"{message}; first offending corner {corner}"
        super().__init__(message)


class CSVFormatError(ValueError):
    def __init__(self, message: str, path: str | Path | None = None, line: int | None = None):
        self.path = str(path) if path is not None else None
        self.line = line
        location = ""
        if path is not None:
            location = f"{path}"
        if line is not None:
            location = f"{location}:{line}" if location else f"line {line}"
        super().__init__(f"{location}: {message}" if location else message)


class ManifestError(ValueError):
    """A JSON manifest is malformed; ``field`` names the offending entry."""

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        if field:
            message = f"{field}: {message}"
        super().__init__(message)


# =============================================================================
# Validators
# =============================================================================


def validate_alpha(alpha: float, *, allow_negative: bool = True) -> float:
    """Check a blow-up exponent: α ≠ 0 and α < 1."""
    if not math.isfinite(alpha):
        raise ValueError(f"alpha must be finite, got {alpha!r}")
    if alpha == 0.0:
        raise ValueError("alpha = 0 is not a blow-up exponent")
    if alpha >= 1.0:
        raise ValueError(f"alpha must be < 1, got {alpha}")
    if not allow_negative and alpha < 0.0:
        raise ValueError(f"alpha must lie in (0, 1) here, got {alpha}")
    return float(alpha)


def validate_gamma(gamma: float) -> float:
    """Hölder exponents live in the open unit interval."""
    if not (0.0 < gamma < 1.0):
        raise ValueError(f"Hölder exponent must lie in (0, 1), got {gamma}")
    return float(gamma)


def validate_positive(name: str, value: float) -> float:
    if not math.isfinite(value) or value <= 0.0:
        raise ValueError(f"{name} must be positive and finite, got {value!r}")
    return float(value)


# =============================================================================
# Hashing and JSON
# =============================================================================


def canonical_json(payload: Any) -> str:
    """Serialize with sorted keys and fixed separators for byte-stable output."""
    return json.dumps(payload, sort_keys=True, indent=2, default=_json_default) + "\n"


def config_hash(payload: Any, length: int = 12) -> str:
    """Short SHA-256 prefix of the canonical JSON form of ``payload``."""
    digest = hashlib.sha256(
        json.dumps(payload, sort_keys=True, separators=(",", ":"), default=_json_default).encode()
    ).hexdigest()
    return digest[:length]


def write_json(path: str | Path, payload: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(canonical_json(payload))
    return path


def read_json(path: str | Path) -> Any:
    path = Path(path)
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ManifestError(f"invalid JSON at line {exc.lineno}: {exc.msg}", field=str(path)) from exc


def _json_default(obj: Any) -> Any:
    # numpy scalars and arrays appear in traces
    if hasattr(obj, "tolist"):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"Object of type {type(obj).__name__} is not JSON serializable")


def finite_or_none(value: float) -> float | None:
    """JSON has no inf/nan; map them to null."""
    return float(value) if math.isfinite(value) else None
