"""
Grids, sampled fields and the finite-difference / quadrature layer.

Everything else in the lab is built on these types. Arrays are indexed
``values[i, j]`` with ``i`` running along z¹ and ``j`` along z².

Sign conventions:
    scalar vorticity   ω = ∂₂v¹ − ∂₁v²
    perpendicular grad ∇⊥f = (−∂₂f, ∂₁f)
so that curl2d(perp_gradient(f)) = −Δf.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import RectBivariateSpline

from config import get_default
from utils import FieldValueError, GridMismatchError, validate_gamma

logger = logging.getLogger(__name__)


# =============================================================================
# Types
# =============================================================================


@dataclass(frozen=True)
class Grid2D:
    """Uniform rectangular mesh [min1, max1] × [min2, max2] with n1 × n2 nodes."""

    min1: float
    max1: float
    min2: float
    max2: float
    n1: int
    n2: int

    def __post_init__(self):
        if self.n1 < 3 or self.n2 < 3:
            raise ValueError(f"Grid needs at least 3 nodes per axis, got ({self.n1}, {self.n2})")
        for lo, hi, axis in ((self.min1, self.max1, 1), (self.min2, self.max2, 2)):
            if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
                raise ValueError(f"Grid axis {axis} needs finite bounds with max > min, got [{lo}, {hi}]")

    @property
    def h1(self) -> float:
        return (self.max1 - self.min1) / (self.n1 - 1)

    @property
    def h2(self) -> float:
        return (self.max2 - self.min2) / (self.n2 - 1)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n1, self.n2)

    @property
    def z1(self) -> np.ndarray:
        return self.min1 + self.h1 * np.arange(self.n1)

    @property
    def z2(self) -> np.ndarray:
        return self.min2 + self.h2 * np.arange(self.n2)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Node coordinates as two (n1, n2) arrays."""
        return np.meshgrid(self.z1, self.z2, indexing="ij")

    def contains(self, z1, z2, slack: float = 0.0) -> np.ndarray:
        z1 = np.asarray(z1)
        z2 = np.asarray(z2)
        return (
            (z1 >= self.min1 - slack)
            & (z1 <= self.max1 + slack)
            & (z2 >= self.min2 - slack)
            & (z2 <= self.max2 + slack)
        )

    def refined(self) -> Grid2D:
        """Same bounds with the spacing halved."""
        return Grid2D(self.min1, self.max1, self.min2, self.max2, 2 * self.n1 - 1, 2 * self.n2 - 1)

    def bounds(self) -> tuple[float, float, float, float]:
        return (self.min1, self.max1, self.min2, self.max2)


def _frozen_array(values, shape: tuple[int, int], label: str) -> np.ndarray:
    arr = np.array(values, dtype=float, copy=True)
    if arr.shape != shape:
        raise ValueError(f"{label}: expected shape {shape}, got {arr.shape}")
    bad = ~np.isfinite(arr)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise FieldValueError(f"{label}: non-finite sample", node=(int(i), int(j)), value=float(arr[i, j]))
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ScalarField2D:
    grid: Grid2D
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_array(self.values, self.grid.shape, "scalar field"))

    @classmethod
    def from_function(cls, grid: Grid2D, fn: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> ScalarField2D:
        z1, z2 = grid.mesh()
        return cls(grid, np.broadcast_to(fn(z1, z2), grid.shape))

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def __add__(self, other: ScalarField2D) -> ScalarField2D:
        require_same_grid(self, other)
        return ScalarField2D(self.grid, self.values + other.values)

    def __sub__(self, other: ScalarField2D) -> ScalarField2D:
        require_same_grid(self, other)
        return ScalarField2D(self.grid, self.values - other.values)

    def scaled(self, factor: float) -> ScalarField2D:
        return ScalarField2D(self.grid, factor * self.values)


@dataclass(frozen=True)
class VectorField2D:
    grid: Grid2D
    u1: np.ndarray
    u2: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "u1", _frozen_array(self.u1, self.grid.shape, "vector component 1"))
        object.__setattr__(self, "u2", _frozen_array(self.u2, self.grid.shape, "vector component 2"))

    @classmethod
    def from_function(cls, grid: Grid2D, fn) -> VectorField2D:
        z1, z2 = grid.mesh()
        a, b = fn(z1, z2)
        return cls(grid, np.broadcast_to(a, grid.shape), np.broadcast_to(b, grid.shape))

    def magnitude(self) -> np.ndarray:
        return np.hypot(self.u1, self.u2)


@dataclass(frozen=True)
class TimeSeries:
    """Snapshots on one grid at strictly increasing times."""

    times: tuple[float, ...]
    snapshots: tuple

    def __post_init__(self):
        times = tuple(float(t) for t in self.times)
        snapshots = tuple(self.snapshots)
        if not snapshots:
            raise ValueError("TimeSeries needs at least one snapshot")
        if len(times) != len(snapshots):
            raise ValueError(f"{len(times)} times for {len(snapshots)} snapshots")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("TimeSeries times must be strictly increasing")
        grid = snapshots[0].grid
        for k, snap in enumerate(snapshots):
            if snap.grid != grid:
                raise GridMismatchError(f"snapshot {k} is on a different grid")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "snapshots", snapshots)

    @property
    def grid(self) -> Grid2D:
        return self.snapshots[0].grid

    def __len__(self) -> int:
        return len(self.snapshots)


@dataclass(frozen=True)
class HolderEstimate:
    gamma: float
    sup_norm: float
    seminorm: float
    pairs_used: int = 0
    all_pairs: bool = True

    @property
    def norm(self) -> float:
        return self.sup_norm + self.seminorm


@dataclass(frozen=True)
class Rectangle:
    a1: float
    b1: float
    a2: float
    b2: float

    def __post_init__(self):
        if self.b1 <= self.a1 or self.b2 <= self.a2:
            raise ValueError(f"Degenerate rectangle {self}")


@dataclass(frozen=True)
class Sector:
    """Polar region l1 ≤ |z| ≤ l2, θ1 ≤ arg z ≤ θ2 around the origin."""

    l1: float
    l2: float
    theta1: float
    theta2: float

    def __post_init__(self):
        if self.l1 < 0 or self.l2 <= self.l1:
            raise ValueError(f"Sector radii must satisfy 0 <= l1 < l2, got ({self.l1}, {self.l2})")
        if self.theta2 <= self.theta1:
            raise ValueError(f"Sector angles must satisfy theta1 < theta2, got ({self.theta1}, {self.theta2})")

    def contains(self, z1, z2) -> np.ndarray:
        r = np.hypot(z1, z2)
        theta = np.arctan2(z2, z1)
        return (r >= self.l1) & (r <= self.l2) & (theta >= self.theta1) & (theta <= self.theta2)


def require_same_grid(*fields) -> Grid2D:
    grid = fields[0].grid
    for f in fields[1:]:
        if f.grid != grid:
            raise GridMismatchError(f"grid mismatch: {grid} vs {f.grid}")
    return grid


# =============================================================================
# Finite differences
# =============================================================================


def derivative(values: np.ndarray, h: float, axis: int, periodic: bool = False) -> np.ndarray:
    """
    Second-order derivative along ``axis`` (0 → z¹, 1 → z²).

    Interior nodes use central differences; edges use the one-sided
    (−3f₀ + 4f₁ − f₂)/2h stencil. A periodic axis stores its first node
    again as the last one and is differenced with wrap-around.
    """
    f = np.asarray(values, dtype=float)
    if periodic:
        core = np.take(f, range(f.shape[axis] - 1), axis=axis)
        d = (np.roll(core, -1, axis=axis) - np.roll(core, 1, axis=axis)) / (2.0 * h)
        first = np.take(d, [0], axis=axis)
        return np.concatenate([d, first], axis=axis)
    d = np.empty_like(f)
    f = np.moveaxis(f, axis, 0)
    out = np.moveaxis(d, axis, 0)
    out[1:-1] = (f[2:] - f[:-2]) / (2.0 * h)
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h)
    out[-1] = (3.0 * f[-1] - 4.0 * f[-2] + f[-3]) / (2.0 * h)
    return d


def gradient(f: ScalarField2D) -> VectorField2D:
    g = f.grid
    return VectorField2D(g, derivative(f.values, g.h1, 0), derivative(f.values, g.h2, 1))


def curl2d(v: VectorField2D) -> ScalarField2D:
    """Scalar vorticity ω = ∂₂v¹ − ∂₁v²."""
    g = v.grid
    return ScalarField2D(g, derivative(v.u1, g.h2, 1) - derivative(v.u2, g.h1, 0))


def perp_gradient(f: ScalarField2D, weight: ScalarField2D | None = None) -> VectorField2D:
    """
    Return (−∂₂f, ∂₁f), or (−∂₂f/w, ∂₁f/w) when a weight is given.

    The weighted form is the test field of the scaled axisymmetric problem
    (w = r); it is divergence free for the measure w dz.
    """
    g = f.grid
    a = -derivative(f.values, g.h2, 1)
    b = derivative(f.values, g.h1, 0)
    if weight is None:
        return VectorField2D(g, a, b)
    require_same_grid(f, weight)
    bad = weight.values <= 0.0
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise FieldValueError("weight must be strictly positive", node=(int(i), int(j)), value=float(weight.values[i, j]))
    return VectorField2D(g, a / weight.values, b / weight.values)


def divergence(v: VectorField2D, weight: ScalarField2D | None = None) -> ScalarField2D:
    """∂₁v¹ + ∂₂v², or (1/w)(∂₁(w v¹) + ∂₂(w v²)) for a weight w."""
    g = v.grid
    if weight is None:
        return ScalarField2D(g, derivative(v.u1, g.h1, 0) + derivative(v.u2, g.h2, 1))
    require_same_grid(v, weight)
    w = weight.values
    return ScalarField2D(g, (derivative(w * v.u1, g.h1, 0) + derivative(w * v.u2, g.h2, 1)) / w)


def laplacian(f: ScalarField2D) -> ScalarField2D:
    """Five-point Laplacian in the interior; edge nodes use composed one-sided derivatives."""
    g = f.grid
    u = f.values
    lap = derivative(derivative(u, g.h1, 0), g.h1, 0) + derivative(derivative(u, g.h2, 1), g.h2, 1)
    lap[1:-1, 1:-1] = (
        (u[2:, 1:-1] - 2.0 * u[1:-1, 1:-1] + u[:-2, 1:-1]) / g.h1**2
        + (u[1:-1, 2:] - 2.0 * u[1:-1, 1:-1] + u[1:-1, :-2]) / g.h2**2
    )
    return ScalarField2D(g, lap)


# =============================================================================
# Interpolation
# =============================================================================


class BicubicInterpolator:
    """
    Cubic-spline interpolation of gridded samples at arbitrary points.

    Periodic axes are padded with wrapped copies before fitting; queries on
    non-periodic axes are clipped into the grid.
    """

    _PAD = 3

    def __init__(self, grid: Grid2D, values: np.ndarray, periodic: tuple[bool, bool] = (False, False)):
        self.grid = grid
        self.periodic = periodic
        z1, z2, v = grid.z1, grid.z2, np.asarray(values, dtype=float)
        if periodic[0]:
            z1, v = self._wrap(z1, v, axis=0, h=grid.h1)
        if periodic[1]:
            z2, v = self._wrap(z2, v, axis=1, h=grid.h2)
        self._spline = RectBivariateSpline(z1, z2, v, kx=3, ky=3, s=0)
        self._values = np.asarray(values, dtype=float)

    def _wrap(self, z: np.ndarray, v: np.ndarray, axis: int, h: float):
        p = self._PAD
        n = z.size - 1
        core = np.take(v, range(n), axis=axis)
        left = np.take(core, range(n - p, n), axis=axis)
        right = np.take(core, range(0, p + 1), axis=axis)
        zz = np.concatenate([z[0] - h * np.arange(p, 0, -1), z[:n], z[0] + h * (n + np.arange(p + 1))])
        return zz, np.concatenate([left, core, right], axis=axis)

    def _fold(self, z: np.ndarray, lo: float, hi: float, periodic: bool) -> np.ndarray:
        if periodic:
            return lo + np.mod(z - lo, hi - lo)
        return np.clip(z, lo, hi)

    def __call__(self, z1, z2, limit: bool = False) -> np.ndarray:
        g = self.grid
        z1 = np.asarray(z1, dtype=float)
        z2 = np.asarray(z2, dtype=float)
        shape = np.broadcast(z1, z2).shape
        a = self._fold(np.broadcast_to(z1, shape).ravel(), g.min1, g.max1, self.periodic[0])
        b = self._fold(np.broadcast_to(z2, shape).ravel(), g.min2, g.max2, self.periodic[1])
        out = self._spline(a, b, grid=False)
        if limit:
            out = self._limit(a, b, out)
        return out.reshape(shape)

    def _limit(self, a: np.ndarray, b: np.ndarray, out: np.ndarray) -> np.ndarray:
        # Clip to the range of the enclosing cell's corners (quasi-monotone).
        g = self.grid
        i = np.clip(np.floor((a - g.min1) / g.h1).astype(int), 0, g.n1 - 2)
        j = np.clip(np.floor((b - g.min2) / g.h2).astype(int), 0, g.n2 - 2)
        v = self._values
        corners = np.stack([v[i, j], v[i + 1, j], v[i, j + 1], v[i + 1, j + 1]])
        return np.clip(out, corners.min(axis=0), corners.max(axis=0))

    def partial(self, z1, z2, axis: int) -> np.ndarray:
        """Derivative of the spline along ``axis`` at the query points."""
        g = self.grid
        z1, z2 = np.broadcast_arrays(np.asarray(z1, dtype=float), np.asarray(z2, dtype=float))
        a = self._fold(z1.ravel(), g.min1, g.max1, self.periodic[0])
        b = self._fold(z2.ravel(), g.min2, g.max2, self.periodic[1])
        dx, dy = (1, 0) if axis == 0 else (0, 1)
        out = self._spline(a, b, dx=dx, dy=dy, grid=False)
        return out.reshape(z1.shape)


def interpolate(f: ScalarField2D, z1, z2) -> np.ndarray:
    return BicubicInterpolator(f.grid, f.values)(z1, z2)


# =============================================================================
# Hölder norms
# =============================================================================


def _series_points(series: TimeSeries) -> tuple[np.ndarray, np.ndarray]:
    """Flatten a series into (points[N, 3], values[N, m]) with columns z1, z2, t."""
    g = series.grid
    z1, z2 = g.mesh()
    pts, vals = [], []
    for t, snap in zip(series.times, series.snapshots):
        pts.append(np.column_stack([z1.ravel(), z2.ravel(), np.full(z1.size, t)]))
        if isinstance(snap, VectorField2D):
            vals.append(np.column_stack([snap.u1.ravel(), snap.u2.ravel()]))
        else:
            vals.append(snap.values.reshape(-1, 1))
    return np.vstack(pts), np.vstack(vals)


def _pair_ratios(pts, vals, a: np.ndarray, b: np.ndarray, gamma: float) -> np.ndarray:
    dx = np.hypot(pts[a, 0] - pts[b, 0], pts[a, 1] - pts[b, 1])
    dist = dx + np.sqrt(np.abs(pts[a, 2] - pts[b, 2]))
    du = np.linalg.norm(vals[a] - vals[b], axis=1)
    ok = dist > 0
    out = np.zeros_like(dist)
    out[ok] = du[ok] / dist[ok] ** gamma
    return out


def _stratified_pairs(
    shape: tuple[int, int, int], seed: int, block: int, chunk: int
) -> tuple[np.ndarray, np.ndarray]:
    """
    One block of distinct node pairs over a (time, z1, z2) lattice.

    Pair q falls in distance band q mod K, where band k holds lattice offsets
    whose largest component lies in [2^k, 2^(k+1)). Flat indices follow the
    row order of ``_series_points``.
    """
    ext = np.array(shape) - 1
    reach = int(ext.max())
    bands = reach.bit_length()
    rng = np.random.default_rng([seed, block])
    k = (block * chunk + np.arange(chunk)) % bands
    m = rng.integers(2**k, np.minimum(2 ** (k + 1), reach + 1))
    # the axis carrying the band offset must be long enough for it
    scores = np.where(ext[None, :] >= m[:, None], rng.random((chunk, 3)), -1.0)
    axis = np.argmax(scores, axis=1)
    cap = np.minimum(m[:, None], ext[None, :])
    d = rng.integers(-cap, cap + 1)
    d[np.arange(chunk), axis] = m * (2 * rng.integers(0, 2, size=chunk) - 1)
    a = rng.integers(np.maximum(0, -d), ext[None, :] - np.maximum(0, d) + 1)
    b = a + d
    n1, n2 = shape[1], shape[2]
    return a[:, 0] * n1 * n2 + a[:, 1] * n2 + a[:, 2], b[:, 0] * n1 * n2 + b[:, 1] * n2 + b[:, 2]


def holder_norm(series: TimeSeries, gamma: float, budget: int | None = None) -> HolderEstimate:
    """
    Sup norm and parabolic C^γ seminorm of a sampled space-time field.

    The seminorm uses the distance |x − y| + √|t − s|. When the number of
    node pairs exceeds ``budget`` a deterministic sample, stratified by
    distance band and free of repeated nodes, is used; the sample for a
    smaller budget is always a prefix of the sample for a larger one,
    so the estimate is monotone in the budget.
    """
    gamma = validate_gamma(gamma)
    budget = budget if budget is not None else get_default("field", "holder_pair_budget")
    pts, vals = _series_points(series)
    n = len(pts)
    if n < 2:
        raise ValueError("holder_norm needs at least two nodes")
    sup = float(np.max(np.linalg.norm(vals, axis=1)))
    total = n * (n - 1) // 2
    best = 0.0
    if total <= budget:
        for start in range(0, n - 1):
            b = np.arange(start + 1, n)
            a = np.full(b.size, start)
            best = max(best, float(_pair_ratios(pts, vals, a, b, gamma).max()))
        return HolderEstimate(gamma, sup, best, pairs_used=total, all_pairs=True)

    g = series.grid
    seed = g.n1 * 1_000_003 + g.n2 * 1_009 + len(series)
    shape = (len(series), g.n1, g.n2)
    chunk = 4096
    used = 0
    block = 0
    while used < budget:
        take = min(chunk, budget - used)
        a, b = _stratified_pairs(shape, seed, block, chunk)
        best = max(best, float(_pair_ratios(pts, vals, a[:take], b[:take], gamma).max()))
        used += take
        block += 1
    logger.debug("holder_norm sampled %d of %d pairs", used, total)
    return HolderEstimate(gamma, sup, best, pairs_used=used, all_pairs=False)


# =============================================================================
# Quadrature
# =============================================================================


def _rectangle_fractions(grid: Grid2D, rect: Rectangle) -> np.ndarray:
    z1, z2 = grid.z1, grid.z2
    o1 = np.clip(np.minimum(z1[1:], rect.b1) - np.maximum(z1[:-1], rect.a1), 0.0, None) / grid.h1
    o2 = np.clip(np.minimum(z2[1:], rect.b2) - np.maximum(z2[:-1], rect.a2), 0.0, None) / grid.h2
    return np.outer(o1, o2)


def _distance_to_sector_boundary(sector: Sector, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    r = np.hypot(x, y)
    theta = np.arctan2(y, x)
    dists = []
    for angle in (sector.theta1, sector.theta2):
        u = np.array([math.cos(angle), math.sin(angle)])
        t = np.clip(x * u[0] + y * u[1], sector.l1, min(sector.l2, 1e300))
        dists.append(np.hypot(x - t * u[0], y - t * u[1]))
    for radius in (sector.l1, sector.l2):
        if not math.isfinite(radius):
            continue
        inside = (theta >= sector.theta1) & (theta <= sector.theta2)
        ends = np.minimum(
            np.hypot(x - radius * math.cos(sector.theta1), y - radius * math.sin(sector.theta1)),
            np.hypot(x - radius * math.cos(sector.theta2), y - radius * math.sin(sector.theta2)),
        )
        dists.append(np.where(inside, np.abs(r - radius), ends))
    return np.min(dists, axis=0)


def sector_fractions(grid: Grid2D, sector: Sector, subcells: int | None = None) -> np.ndarray:
    """
    Area fraction of each grid cell lying inside ``sector``.

    Cells far from the boundary get 0 or 1 from their centre; cells within one
    diagonal of the boundary are resolved on a subcells × subcells midpoint
    lattice.
    """
    s = subcells or get_default("field", "quadrature_subcells")
    c1 = 0.5 * (grid.z1[:-1] + grid.z1[1:])
    c2 = 0.5 * (grid.z2[:-1] + grid.z2[1:])
    x, y = np.meshgrid(c1, c2, indexing="ij")
    frac = sector.contains(x, y).astype(float)
    diag = math.hypot(grid.h1, grid.h2)
    near = _distance_to_sector_boundary(sector, x, y) < diag
    if near.any():
        offs = (np.arange(s) + 0.5) / s - 0.5
        o1, o2 = np.meshgrid(offs * grid.h1, offs * grid.h2, indexing="ij")
        px = x[near][:, None] + o1.ravel()[None, :]
        py = y[near][:, None] + o2.ravel()[None, :]
        frac[near] = sector.contains(px, py).mean(axis=1)
    return frac


def region_fractions(grid: Grid2D, region: Rectangle | Sector) -> np.ndarray:
    if isinstance(region, Rectangle):
        return _rectangle_fractions(grid, region)
    if isinstance(region, Sector):
        return sector_fractions(grid, region)
    raise TypeError(f"Unsupported quadrature region: {type(region).__name__}")


def quadrature(f: ScalarField2D, region: Rectangle | Sector, fractions: np.ndarray | None = None) -> float:
    """
    Integrate ``f`` over a rectangle or sector.

    Each cell contributes the mean of its four corner values times its area
    times the fraction of the cell inside the region, which is the composite
    trapezoid rule on node-aligned rectangles.
    """
    g = f.grid
    frac = region_fractions(g, region) if fractions is None else fractions
    if not frac.any():
        raise ValueError(f"Region {region} does not intersect grid bounds {g.bounds()}")
    u = f.values
    cell_mean = 0.25 * (u[:-1, :-1] + u[1:, :-1] + u[:-1, 1:] + u[1:, 1:])
    return float(np.sum(cell_mean * frac) * g.h1 * g.h2)


def line_integral(values: Sequence[float] | np.ndarray, s: np.ndarray) -> float:
    """Trapezoid integral of samples along a parametrized curve."""
    return float(np.trapezoid(np.asarray(values, dtype=float), np.asarray(s, dtype=float)))


# =============================================================================
# Compactly supported test functions
# =============================================================================


def smooth_bump(s: np.ndarray) -> np.ndarray:
    """exp(1 − 1/(1 − s²)) on |s| < 1, zero outside; equals 1 at s = 0."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = np.abs(s) < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - s[inside] ** 2))
    return out


@dataclass(frozen=True)
class BumpTestFunction:
    """Radial bump f(z) = φ(|z − c|/ρ), optionally times a time bump."""

    center: tuple[float, float]
    radius: float
    time_center: float | None = None
    time_radius: float | None = None
    amplitude: float = 1.0

    def spatial(self, z1, z2) -> np.ndarray:
        rho = np.hypot(np.asarray(z1) - self.center[0], np.asarray(z2) - self.center[1]) / self.radius
        return self.amplitude * smooth_bump(rho)

    def temporal(self, t: float) -> float:
        if self.time_center is None:
            return 1.0
        return float(smooth_bump(np.array((t - self.time_center) / self.time_radius)))

    def sample(self, grid: Grid2D, t: float | None = None) -> ScalarField2D:
        z1, z2 = grid.mesh()
        factor = 1.0 if t is None else self.temporal(t)
        return ScalarField2D(grid, factor * self.spatial(z1, z2))

    def fits_inside(self, grid: Grid2D, margin_nodes: int = 1) -> bool:
        c1, c2 = self.center
        m1, m2 = (margin_nodes - 1e-9) * grid.h1, (margin_nodes - 1e-9) * grid.h2
        return (
            c1 - self.radius >= grid.min1 + m1
            and c1 + self.radius <= grid.max1 - m1
            and c2 - self.radius >= grid.min2 + m2
            and c2 + self.radius <= grid.max2 - m2
        )
