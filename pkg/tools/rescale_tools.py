"""
Blow-up sequences and the dimension-reduction diagnostics.

A blow-up sequence centred at (x_k, t_k) with magnitudes Q_k produces the
rescaled fields

    ṽ_k(x̃, t̃) = Q_k⁻¹ v(Q_k^{−(1−α)/α} x̃ + x_k, Q_k^{−1/α} t̃ + t_k),

and the pressure scales as p̃_k = Q_k⁻² p. Spatial points are meridian-plane
coordinates (r, x³) for axisymmetric input and (z¹, z²) otherwise.

Usage:
    seq, failures = find_near_maximal(series, c=0.9)
    window = RescaleWindow(Grid2D(-1, 1, -1, 1, 21, 21), times=(-0.5, -0.25, 0.0))
    field = rescale_field(series, seq.centers[0], seq.times[0], seq.Q[0], alpha, window)
    ratio = check_anchor(seq, field, AnchorCriterion.default(), k=0)
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from config import anchor_lambda_default, get_default, window_radius_default
from tools.field_tools import (
    BicubicInterpolator,
    Grid2D,
    HolderEstimate,
    ScalarField2D,
    TimeSeries,
    VectorField2D,
    derivative,
    holder_norm,
)
from utils import WindowError, validate_alpha, validate_positive

logger = logging.getLogger(__name__)

# v(x1, x2, t) -> tuple of component arrays
AnalyticField = Callable[[np.ndarray, np.ndarray, np.ndarray], tuple[np.ndarray, ...]]


# =============================================================================
# Types
# =============================================================================


@dataclass(frozen=True)
class BlowupSequence:
    centers: tuple[tuple[float, float], ...]
    times: tuple[float, ...]
    Q: tuple[float, ...]
    alpha: float
    c: float = 1.0
    indices: tuple[int, ...] = ()
    magnitudes: tuple[float, ...] = ()
    off_axis_distance: float | None = None

    def __post_init__(self):
        validate_alpha(self.alpha)
        if self.c < 1.0:
            raise ValueError(f"comparability constant must be >= 1, got {self.c}")
        if not (len(self.centers) == len(self.times) == len(self.Q)):
            raise ValueError("centers, times and Q must have equal length")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("blow-up sequence times must be strictly increasing")
        for q in self.Q:
            validate_positive("Q_k", q)
        for k, mag in enumerate(self.magnitudes):
            q = self.Q[k]
            if not (mag / self.c <= q * (1 + 1e-12) and q <= self.c * mag * (1 + 1e-12)):
                raise ValueError(f"Q_{k} = {q} not comparable to |v(x_k, t_k)| = {mag} with c = {self.c}")
        if self.off_axis_distance is not None:
            d = self.off_axis_distance
            worst = min(abs(x[0]) for x in self.centers) if self.centers else d
            if worst < d:
                raise ValueError(f"center at |x'| = {worst} violates the off-axis distance {d}")

    def __len__(self) -> int:
        return len(self.centers)


@dataclass(frozen=True)
class AnchorCriterion:
    """Tabulated λ (linear interpolation, linear extension past the table) and a radius rule."""

    s_table: tuple[float, ...]
    lam_table: tuple[float, ...]
    radius: Callable[[int], float] = window_radius_default

    def __post_init__(self):
        if len(self.s_table) != len(self.lam_table) or not self.s_table:
            raise ValueError("anchor table needs matching, non-empty s and λ columns")
        if any(b <= a for a, b in zip(self.s_table, self.s_table[1:])):
            raise ValueError("anchor table s values must be strictly increasing")
        if any(b < a for a, b in zip(self.lam_table, self.lam_table[1:])):
            raise ValueError("anchor function λ must be non-decreasing")
        if self(0.0) < 1.0:
            raise ValueError(f"anchor function needs λ(0) >= 1, got {self(0.0)}")

    @classmethod
    def default(cls) -> AnchorCriterion:
        table = get_default("rescale", "anchor_table")
        return cls(tuple(table["s"]), tuple(table["lam"]))

    @classmethod
    def constant(cls, value: float, radius: Callable[[int], float] = window_radius_default) -> AnchorCriterion:
        return cls((0.0,), (float(value),), radius)

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        xs = np.asarray(self.s_table)
        ys = np.asarray(self.lam_table)
        out = np.interp(s, xs, ys)
        if len(xs) > 1:
            slope = (ys[-1] - ys[-2]) / (xs[-1] - xs[-2])
            out = np.where(s > xs[-1], ys[-1] + slope * (s - xs[-1]), out)
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class DomainClass:
    tag: str
    offset: float | None = None
    distances: tuple[float, ...] = ()

    def __post_init__(self):
        if self.tag not in ("FullPlane", "HalfPlane", "Inconclusive"):
            raise ValueError(f"unknown domain tag {self.tag!r}")
        if self.tag == "HalfPlane" and (self.offset is None or not math.isfinite(self.offset) or self.offset < 0):
            raise ValueError(f"half-plane offset must be finite and >= 0, got {self.offset}")


@dataclass(frozen=True)
class RescaleWindow:
    grid: Grid2D
    times: tuple[float, ...] = (0.0,)

    def __post_init__(self):
        if not self.times:
            raise ValueError("rescale window needs at least one time")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("window times must be strictly increasing")

    def origin_index(self) -> tuple[int, int, int]:
        """(time, i, j) index of (x̃, t̃) = (0, 0)."""
        g = self.grid
        i = int(np.argmin(np.abs(g.z1)))
        j = int(np.argmin(np.abs(g.z2)))
        k = int(np.argmin(np.abs(np.asarray(self.times))))
        if abs(g.z1[i]) > 1e-12 or abs(g.z2[j]) > 1e-12 or abs(self.times[k]) > 1e-12:
            raise WindowError("window does not contain the node (x̃, t̃) = (0, 0)")
        return k, i, j


@dataclass(frozen=True)
class RescaledField:
    window: RescaleWindow
    components: dict[str, np.ndarray]
    Q: float
    alpha: float
    center: tuple[float, float] = (0.0, 0.0)
    t_center: float = 0.0
    pressure_gradient: tuple[np.ndarray, np.ndarray] | None = None
    transverse: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        shape = (len(self.window.times),) + self.window.grid.shape
        for name, arr in self.components.items():
            if np.shape(arr) != shape:
                raise ValueError(f"component {name}: expected shape {shape}, got {np.shape(arr)}")

    def magnitude(self) -> np.ndarray:
        return np.sqrt(sum(np.asarray(a) ** 2 for a in self.components.values()))

    def snapshot(self, name: str, k: int) -> ScalarField2D:
        return ScalarField2D(self.window.grid, self.components[name][k])


# =============================================================================
# Near-maximal points and anchors
# =============================================================================


def _magnitude(snapshot) -> np.ndarray:
    if isinstance(snapshot, VectorField2D):
        return snapshot.magnitude()
    return np.abs(snapshot.values)


def find_near_maximal(
    series: TimeSeries,
    c: float,
    alpha: float = 0.5,
    indices: Sequence[int] | None = None,
) -> tuple[BlowupSequence, list[dict]]:
    """
    Near-maximal centres: at each selected time the argmax of |v| is kept
    when it reaches c times the supremum over all earlier and current times.

    Args:
        series: Velocity (VectorField2D) or magnitude (ScalarField2D) snapshots
        c: Domination factor in (0, 1]
        alpha: Scaling exponent recorded on the sequence
        indices: Snapshot indices to examine (default: all)

    Returns:
        (sequence, failures); each failure names the index and the shortfall
    """
    if not (0.0 < c <= 1.0):
        raise ValueError(f"near-maximal factor must lie in (0, 1], got {c}")
    if len(series) == 0:
        raise ValueError("series is empty")
    mags = [_magnitude(s) for s in series.snapshots]
    running = np.maximum.accumulate([float(m.max()) for m in mags])
    g = series.grid
    z1, z2 = g.z1, g.z2
    centers, times, qs, kept, failures = [], [], [], [], []
    for k in indices if indices is not None else range(len(series)):
        m = mags[k]
        flat = int(np.argmax(m))
        i, j = divmod(flat, g.n2)
        value = float(m[i, j])
        if value > 0.0 and value >= c * running[k]:
            centers.append((float(z1[i]), float(z2[j])))
            times.append(series.times[k])
            qs.append(value)
            kept.append(k)
        else:
            failures.append({"index": k, "value": value, "required": c * float(running[k])})
    if failures:
        logger.info("find_near_maximal: %d of %d indices did not qualify", len(failures), len(failures) + len(kept))
    seq = BlowupSequence(tuple(centers), tuple(times), tuple(qs), alpha, 1.0, tuple(kept), tuple(qs))
    return seq, failures


@dataclass(frozen=True)
class AnchorResult:
    ratio: float
    node: tuple[int, int, int]
    nodes_checked: int


def check_anchor(seq: BlowupSequence, rescaled: RescaledField, crit: AnchorCriterion, k: int = 1) -> AnchorResult:
    """
    Worst ratio |ṽ_k| / (λ(|x̃|² + |t̃|)·|ṽ_k(0,0)|) over the admissible window.

    Only nodes with |x̃|² + |t̃| ≤ radius(k) are checked; a ratio ≤ 1 means
    the centre is an anchor point.
    """
    mag = rescaled.magnitude()
    kt, i0, j0 = rescaled.window.origin_index()
    base = float(mag[kt, i0, j0])
    if base == 0.0:
        raise ValueError("|ṽ_k(0,0)| = 0: the centre is not a blow-up point")
    g = rescaled.window.grid
    x1, x2 = g.mesh()
    s = (x1**2 + x2**2)[None, :, :] + np.abs(np.asarray(rescaled.window.times))[:, None, None]
    admissible = s <= crit.radius(k)
    ratio = np.where(admissible, mag / (crit(s) * base), -np.inf)
    worst = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
    return AnchorResult(float(ratio[worst]), tuple(int(w) for w in worst), int(admissible.sum()))


# =============================================================================
# Rescaling
# =============================================================================


def scale_factors(Q: float, alpha: float) -> tuple[float, float]:
    """(space factor Q^{−(1−α)/α}, time factor Q^{−1/α})."""
    return Q ** (-(1.0 - alpha) / alpha), Q ** (-1.0 / alpha)


def _gridded_sampler(series: Mapping[str, TimeSeries]):
    first = next(iter(series.values()))
    grid = first.grid
    times = np.asarray(first.times)
    interps = {
        name: [BicubicInterpolator(grid, snap.values) for snap in ts.snapshots] for name, ts in series.items()
    }

    def sample(x1, x2, t: float) -> dict[str, np.ndarray]:
        k = int(np.searchsorted(times, t, side="right")) - 1
        k = min(max(k, 0), len(times) - 1)
        out = {}
        for name, items in interps.items():
            if k == len(times) - 1 or t == times[k]:
                out[name] = items[k](x1, x2)
            else:
                w = (t - times[k]) / (times[k + 1] - times[k])
                out[name] = (1.0 - w) * items[k](x1, x2) + w * items[k + 1](x1, x2)
        return out

    return grid, (float(times[0]), float(times[-1])), sample


def _as_component_series(series) -> dict[str, TimeSeries]:
    if isinstance(series, TimeSeries):
        snap = series.snapshots[0]
        if isinstance(snap, VectorField2D):
            return {
                "v1": TimeSeries(series.times, tuple(ScalarField2D(s.grid, s.u1) for s in series.snapshots)),
                "v2": TimeSeries(series.times, tuple(ScalarField2D(s.grid, s.u2) for s in series.snapshots)),
            }
        return {"v": series}
    return dict(series)


def rescale_field(
    v: AnalyticField | TimeSeries | Mapping[str, TimeSeries],
    center: tuple[float, float],
    t_center: float,
    Q: float,
    alpha: float,
    window: RescaleWindow,
    names: Sequence[str] | None = None,
    domain: tuple[float, float, float, float] | None = None,
    time_range: tuple[float, float] | None = None,
) -> RescaledField:
    """
    Sample ṽ = Q⁻¹ v(Q^{−(1−α)/α} x̃ + x_k, Q^{−1/α} t̃ + t_k) on a window.

    Analytic inputs are evaluated directly; gridded inputs are interpolated
    bicubically in space and linearly between snapshots.

    Raises:
        WindowError: a window corner maps outside the domain or time range
    """
    validate_alpha(alpha)
    validate_positive("Q", Q)
    sx, st = scale_factors(Q, alpha)
    g = window.grid
    tt = np.asarray(window.times)

    if callable(v):
        sampler = None
    else:
        comp = _as_component_series(v)
        grid, trange, sampler = _gridded_sampler(comp)
        domain = domain or grid.bounds()
        time_range = time_range or trange
        names = list(comp)

    for a in (g.min1, g.max1):
        for b in (g.min2, g.max2):
            for t in (tt[0], tt[-1]):
                x1 = sx * a + center[0]
                x2 = sx * b + center[1]
                tp = st * t + t_center
                slack = 1e-12 * (1.0 + abs(x1) + abs(x2))
                if domain is not None and not (
                    domain[0] - slack <= x1 <= domain[1] + slack and domain[2] - slack <= x2 <= domain[3] + slack
                ):
                    raise WindowError("rescale window escapes the spatial domain", corner=(a, b, float(t)))
                if time_range is not None and not (
                    time_range[0] - 1e-12 <= tp <= time_range[1] + 1e-12
                ):
                    raise WindowError("rescale window escapes the sampled time range", corner=(a, b, float(t)))

    xt1, xt2 = g.mesh()
    x1 = sx * xt1 + center[0]
    x2 = sx * xt2 + center[1]
    stacks: dict[str, list[np.ndarray]] = {}
    for t in tt:
        tp = st * t + t_center
        if sampler is None:
            values = v(x1, x2, tp)
            if isinstance(values, np.ndarray) and values.ndim == 2:
                values = (values,)
            labels = list(names) if names is not None else [f"v{c + 1}" for c in range(len(values))]
            sampled = dict(zip(labels, values))
        else:
            sampled = sampler(x1, x2, tp)
        for name, arr in sampled.items():
            stacks.setdefault(name, []).append(np.broadcast_to(arr, g.shape) / Q)
    components = {name: np.stack(arrs) for name, arrs in stacks.items()}
    return RescaledField(window, components, Q, alpha, tuple(center), t_center)


def sss_field(profile: Callable, alpha: float, T0: float = 1.0, shift: tuple[float, float] = (0.0, 0.0)) -> AnalyticField:
    """Exact self-similar field v = (T₀−t)^{−α} V((x − shift)/(T₀−t)^{1−α})."""

    def v(x1, x2, t):
        tau = T0 - np.asarray(t, dtype=float)
        y1 = (x1 - shift[0]) / tau ** (1.0 - alpha)
        y2 = (x2 - shift[1]) / tau ** (1.0 - alpha)
        return tuple(tau ** (-alpha) * np.asarray(c) for c in profile(y1, y2))

    return v


def sss_closed_form(
    profile: Callable,
    alpha: float,
    Q: float,
    center: tuple[float, float],
    window: RescaleWindow,
    fixed_boundary: bool = False,
) -> dict[str, np.ndarray]:
    """
    Closed form of the rescaled exact self-similar field with T₀ = 1 and
    Q = (1 − t_k)^{−α}:

        ṽ = (1 − t̃)^{−α} V((x̃ + z_k)/(1 − t̃)^{1−α}),  z_k = x_k Q^{(1−α)/α}.

    With ``fixed_boundary`` the parent is centred at the fixed point
    ``center`` through U(y) = V(y + center); the rescaling about that point has
    no spatial shift.
    """
    g = window.grid
    xt1, xt2 = g.mesh()
    if fixed_boundary:
        z = (0.0, 0.0)
    else:
        factor = Q ** ((1.0 - alpha) / alpha)
        z = (center[0] * factor, center[1] * factor)
    out: dict[str, list[np.ndarray]] = {}
    for t in window.times:
        tau = 1.0 - t
        y1 = (xt1 + z[0]) / tau ** (1.0 - alpha)
        y2 = (xt2 + z[1]) / tau ** (1.0 - alpha)
        if fixed_boundary:
            y1, y2 = y1 + center[0], y2 + center[1]
        for c, comp in enumerate(profile(y1, y2)):
            out.setdefault(f"v{c + 1}", []).append(tau ** (-alpha) * np.broadcast_to(comp, g.shape))
    return {k: np.stack(v) for k, v in out.items()}


# =============================================================================
# Domain classification
# =============================================================================


def scaled_boundary_distances(seq: BlowupSequence, alpha: float) -> np.ndarray:
    radii = np.array([abs(x[0]) for x in seq.centers])
    if np.any(radii > 1.0 + 1e-12):
        raise ValueError("centres must satisfy |x'_k| <= 1")
    q = np.asarray(seq.Q)
    return q ** ((1.0 - alpha) / alpha) * np.clip(1.0 - radii, 0.0, None)


def classify_domain(
    seq: BlowupSequence,
    alpha: float,
    threshold: float | None = None,
    spread: float | None = None,
) -> DomainClass:
    """
    Half plane when the scaled boundary distances Q^{(1−α)/α}(1 − |x'_k|)
    settle (offset = median of the tail), full plane when they grow
    monotonically past ``threshold``, otherwise Inconclusive.
    """
    validate_alpha(alpha)
    threshold = threshold if threshold is not None else get_default("rescale", "divergence_threshold")
    spread = spread if spread is not None else get_default("rescale", "half_plane_spread")
    d = scaled_boundary_distances(seq, alpha)
    if d.size == 0:
        return DomainClass("Inconclusive")
    tail = d[len(d) // 2:] if d.size >= 6 else d
    med = float(np.median(tail))
    if float(tail.max() - tail.min()) <= spread * max(1.0, med):
        return DomainClass("HalfPlane", med, tuple(float(x) for x in d))
    if np.all(np.diff(tail) >= 0) and tail[-1] > threshold:
        return DomainClass("FullPlane", None, tuple(float(x) for x in d))
    return DomainClass("Inconclusive", None, tuple(float(x) for x in d))


# =============================================================================
# Reduced equations
# =============================================================================


@dataclass(frozen=True)
class ReducedResidual:
    radial: np.ndarray
    vertical: np.ndarray
    euler_residual: float
    swirl_term: float
    o_theta: float
    theta: float


def _dt(arr: np.ndarray, times: np.ndarray) -> np.ndarray:
    if len(times) < 2:
        return np.zeros_like(arr)
    return np.gradient(arr, times, axis=0, edge_order=2 if len(times) > 2 else 1)


def reduced_residual(
    rescaled: RescaledField,
    Q: float,
    alpha: float,
    r0: float,
    theta: float | None = None,
) -> ReducedResidual:
    """
    Residuals of the rescaled axisymmetric equations in the meridian plane.

    Components ``vr`` and ``v3`` (and optionally ``vtheta``) are read from the
    rescaled field, on window axes (x̃¹ radial, x̃³ axial). The pressure
    gradient is taken from the field when supplied, otherwise recovered
    from ∇p̃ = −∂_t̃ ṽ − ṽ·∇ṽ. The returned ``euler_residual`` is the
    pressure-free transport residual of ω̃ = ∂₃ṽ^r − ∂₁ṽ³.

    Transverse derivatives ∂₂ are taken from ``rescaled.transverse`` when
    present and from ∂₂ = tan θ ∂₁ otherwise.
    """
    if r0 <= 0.0:
        raise ValueError(f"r0 must be positive (off-axis only), got {r0}")
    validate_alpha(alpha)
    comps = rescaled.components
    for name in ("vr", "v3"):
        if name not in comps:
            raise ValueError(f"reduced_residual needs component {name!r}")
    g = rescaled.window.grid
    times = np.asarray(rescaled.window.times)
    vr, v3 = np.asarray(comps["vr"]), np.asarray(comps["v3"])
    vth = np.asarray(comps.get("vtheta", np.zeros_like(vr)))

    d1 = lambda a: np.stack([derivative(x, g.h1, 0) for x in a])  # noqa: E731
    d3 = lambda a: np.stack([derivative(x, g.h2, 1) for x in a])  # noqa: E731
    sx, _ = scale_factors(Q, alpha)
    r = r0 + sx * g.mesh()[0][None, :, :]
    if np.any(r <= 0.0):
        raise ValueError("window reaches the axis r <= 0")

    adv_r = vr * d1(vr) + v3 * d3(vr)
    adv_3 = vr * d1(v3) + v3 * d3(v3)
    dt_r, dt_3 = _dt(vr, times), _dt(v3, times)
    if rescaled.pressure_gradient is not None:
        p1, p3 = (np.asarray(p) for p in rescaled.pressure_gradient)
    else:
        p1, p3 = -dt_r - adv_r, -dt_3 - adv_3

    if theta is None:
        half_width = max(abs(g.min1), abs(g.max1), abs(g.min2), abs(g.max2))
        theta = math.atan(sx * half_width / r0)
    tan_t = math.tan(theta)
    trans = rescaled.transverse
    d2_vr = np.asarray(trans["vr"]) if "vr" in trans else tan_t * d1(vr)
    d2_p = np.asarray(trans["p"]) if "p" in trans else tan_t * p1
    c1 = 1.0 - math.cos(theta)
    s1 = math.sin(theta)
    o_r = vr * d1(vr) * c1 - vr * d2_vr * s1 + p1 * c1 - d2_p * s1
    o_3 = vr * d1(v3) * c1 - v3 * d2_vr * s1

    swirl = vth**2 / (Q ** (1.0 / alpha - 1.0) * r)
    radial = -adv_r - p1 - dt_r + swirl + o_r
    vertical = -adv_3 - p3 - dt_3 + o_3

    omega = d3(vr) - d1(v3)
    transport = _dt(omega, times) + vr * d1(omega) + v3 * d3(omega)
    return ReducedResidual(
        radial=radial,
        vertical=vertical,
        euler_residual=float(np.max(np.abs(transport))),
        swirl_term=float(np.max(np.abs(swirl))),
        o_theta=float(np.max(np.abs(o_r) + np.abs(o_3))),
        theta=float(theta),
    )


def swirl_exponent(alpha: float) -> float:
    """Exponent of Q in the swirl term: it vanishes as Q grows iff this is negative."""
    return -(1.0 / alpha - 1.0)


# =============================================================================
# tan θ collapse
# =============================================================================


def axisymmetric_parent(f: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> Callable:
    """Lift f(r, x³) to a function of Cartesian (x¹, x², x³)."""
    return lambda x1, x2, x3: f(np.hypot(x1, x2), x3)


@dataclass(frozen=True)
class TanThetaCollapse:
    defect: float
    node_defect: float
    transverse: float
    longitudinal: float
    flagged: bool


def tan_theta_collapse(
    parent: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray],
    r0: float,
    theta: float,
    grid: Grid2D,
    scale: float = 1.0,
    step: float = 1e-5,
    tolerance: float = 1e-6,
) -> TanThetaCollapse:
    """
    Check ∂₂ṽ = tan θ ∂₁ṽ on the plane through (r₀cos θ, r₀sin θ) parallel to
    the (x¹, x³) plane, with window coordinates x = base + scale·x̃.

    ``defect`` = max|∂₂ṽ − ∂₁ṽ tan θ| with the plane's tan θ; for an
    axisymmetric parent it shrinks linearly in tan θ as the plane approaches
    θ = 0, as does ``transverse`` = max|∂₂ṽ|. ``node_defect`` uses each
    node's own longitude x²/x¹ instead, which is exact for axisymmetric
    parents, and is what ``flagged`` tests.
    """
    xt1, xt3 = grid.mesh()
    x1 = r0 * math.cos(theta) + scale * xt1
    x2 = np.full_like(x1, r0 * math.sin(theta))
    x3 = scale * xt3
    e = step * scale
    d1 = (parent(x1 + e, x2, x3) - parent(x1 - e, x2, x3)) / (2 * step)
    d2 = (parent(x1, x2 + e, x3) - parent(x1, x2 - e, x3)) / (2 * step)
    node_defect = float(np.max(np.abs(d2 - d1 * (x2 / x1))))
    longitudinal = float(np.max(np.abs(d1)))
    return TanThetaCollapse(
        defect=float(np.max(np.abs(d2 - d1 * math.tan(theta)))),
        node_defect=node_defect,
        transverse=float(np.max(np.abs(d2))),
        longitudinal=longitudinal,
        flagged=node_defect > tolerance * (1.0 + longitudinal),
    )


# =============================================================================
# Convergence diagnostics
# =============================================================================


def successive_holder(
    fields: Sequence[RescaledField],
    component: str,
    gamma: float,
    fractions: Sequence[float] = (0.5, 1.0),
    budget: int | None = None,
) -> list[dict]:
    """
    C^γ norms of ṽ_{k+1} − ṽ_k on nested windows centred at the origin.

    A Cauchy-type surrogate for the compactness extraction: the norms should
    shrink along k when the rescaled sequence converges.
    """
    out = []
    for k in range(len(fields) - 1):
        a, b = fields[k], fields[k + 1]
        if a.window != b.window:
            raise ValueError(f"fields {k} and {k + 1} are sampled on different windows")
        diff = np.asarray(b.components[component]) - np.asarray(a.components[component])
        g = a.window.grid
        _, i0, j0 = a.window.origin_index()
        for frac in fractions:
            ni = max(1, int(round(frac * min(i0, g.n1 - 1 - i0))))
            nj = max(1, int(round(frac * min(j0, g.n2 - 1 - j0))))
            ni, nj = max(ni, 1), max(nj, 1)
            sub = Grid2D(float(g.z1[i0 - ni]), float(g.z1[i0 + ni]), float(g.z2[j0 - nj]), float(g.z2[j0 + nj]),
                         2 * ni + 1, 2 * nj + 1)
            snaps = tuple(ScalarField2D(sub, d[i0 - ni:i0 + ni + 1, j0 - nj:j0 + nj + 1]) for d in diff)
            est: HolderEstimate = holder_norm(TimeSeries(a.window.times, snaps), gamma, budget)
            out.append({"k": k, "fraction": frac, "sup": est.sup_norm, "seminorm": est.seminorm})
    return out
