"""
Self-similar ansatz construction and validation.

An ansatz bundles the exponents (α, β, T₀) with named profiles sampled on a
common grid. Profile names follow the usual conventions:

    Theta        swirl profile Θ
    Vr, V3       meridian velocity profiles (axisymmetric families)
    V1, V2       planar velocity profiles (Boussinesq limit)
    H, H2        Boussinesq scalar and its square
    W            vorticity profile, ω = ∂₂v¹ − ∂₁v²

Analytic profiles are plain callables of (z¹, z²); gridded profiles come from
the shared CSV format and are interpolated bicubically off the nodes.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np
from pydantic import ValidationError

from config import get_default
from models.schemas import AnsatzManifest, ProfileFinding, RectangleConfig, SectorConfig, StripConfig, ValidationReport
from tools.field_tools import (
    BicubicInterpolator,
    Grid2D,
    ScalarField2D,
    TimeSeries,
    VectorField2D,
    curl2d,
    require_same_grid,
)
from tools.io_tools import ProfileTable, load_profile_csv
from tools.rescale_tools import RescaleWindow
from utils import FieldValueError, GridMismatchError, ManifestError, WindowError, read_json, validate_alpha

logger = logging.getLogger(__name__)

# Fixed boundary point (r, x³) = (1, 0) in the meridian plane.
BOUNDARY_POINT = (1.0, 0.0)

_VARIANT_PROFILES = {
    "LHsc": ("Theta", "Vr", "V3"),
    "LHsc2": ("Theta", "Vr", "V3"),
    "centered-boundary": ("Vr", "V3"),
}


# =============================================================================
# Profiles and ansatz
# =============================================================================


@dataclass(frozen=True)
class Profile:
    """A named profile, either an analytic callable or a gridded field."""

    name: str
    fn: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None
    field: ScalarField2D | None = None

    def __post_init__(self):
        if (self.fn is None) == (self.field is None):
            raise ValueError(f"profile {self.name!r} needs exactly one of fn or field")

    @property
    def analytic(self) -> bool:
        return self.fn is not None

    @cached_property
    def _interp(self) -> BicubicInterpolator:
        return BicubicInterpolator(self.field.grid, self.field.values)

    def __call__(self, z1, z2) -> np.ndarray:
        z1, z2 = np.broadcast_arrays(np.asarray(z1, dtype=float), np.asarray(z2, dtype=float))
        if self.fn is not None:
            return np.broadcast_to(np.asarray(self.fn(z1, z2), dtype=float), z1.shape)
        return self._interp(z1, z2)

    def sample(self, grid: Grid2D) -> np.ndarray:
        if self.field is not None and self.field.grid == grid:
            return self.field.values
        values = np.array(self(*grid.mesh()))
        bad = np.argwhere(~np.isfinite(values))
        if bad.size:
            i, j = (int(x) for x in bad[0])
            raise FieldValueError(f"profile {self.name!r} is not finite", node=(i, j), value=float(values[i, j]))
        return values


@dataclass(frozen=True)
class SelfSimilarAnsatz:
    alpha: float
    profiles: Mapping[str, Profile]
    grid: Grid2D
    beta: float = 0.0
    T0: float = 1.0
    variant: str | None = None
    center: str = "boundary"
    orientation: str = "upper_minus"
    parities: Mapping[str, Mapping[str, str]] = field(default_factory=dict)
    decay: Mapping[str, float] = field(default_factory=dict)
    signs: Mapping[str, str] = field(default_factory=dict)
    ingested: bool = False
    base_only: bool = False
    sector: SectorConfig | None = None
    rectangle: RectangleConfig | None = None
    strip: StripConfig | None = None
    error_modulus: Callable[[float], float] | None = None
    offset: tuple[int, int] = (0, 0)

    def __post_init__(self):
        validate_alpha(self.alpha)
        if not math.isfinite(self.beta) or self.beta < 0.0:
            raise ValueError(f"beta must be finite and >= 0, got {self.beta}")
        for name, prof in self.profiles.items():
            if prof.name != name:
                raise ValueError(f"profile registered as {name!r} is named {prof.name!r}")
            if prof.analytic:
                prof.sample(self.grid)

    def has(self, name: str) -> bool:
        return name in self.profiles

    def profile(self, name: str) -> Profile:
        if name not in self.profiles:
            raise ValueError(f"ansatz has no profile {name!r} (have {sorted(self.profiles)})")
        return self.profiles[name]

    def sample(self, name: str) -> np.ndarray:
        return self.profile(name).sample(self.grid)

    def scalar(self, name: str) -> ScalarField2D:
        return ScalarField2D(self.grid, self.sample(name))

    def velocity(self) -> VectorField2D:
        return VectorField2D(self.grid, self.sample("V1"), self.sample("V2"))

    def h2(self) -> np.ndarray:
        if self.has("H2"):
            return self.sample("H2")
        return self.sample("H") ** 2

    def h2_at(self, z1, z2) -> np.ndarray:
        if self.has("H2"):
            return self.profile("H2")(z1, z2)
        return self.profile("H")(z1, z2) ** 2

    def vorticity(self) -> np.ndarray:
        if self.has("W"):
            return self.sample("W")
        return curl2d(self.velocity()).values

    def mesh_index(self, i: int, j: int) -> list[int]:
        return [int(i) + self.offset[0], int(j) + self.offset[1]]


def _split_profile_ref(ref: str) -> tuple[str, str | None]:
    path, _, column = ref.partition("#")
    return path, column or None


def load_ansatz(manifest_path: str | Path) -> SelfSimilarAnsatz:
    """
    Read an ansatz manifest and the CSV profiles it names.

    Profile entries are CSV paths relative to the manifest, optionally with a
    ``#column`` suffix selecting one column of a multi-column file.
    """
    manifest_path = Path(manifest_path)
    raw = read_json(manifest_path)
    try:
        manifest = AnsatzManifest.model_validate(raw)
    except ValidationError as exc:
        err = exc.errors()[0]
        loc = ".".join(str(x) for x in err["loc"])
        raise ManifestError(err["msg"], field=loc) from exc

    tables: dict[Path, ProfileTable] = {}
    profiles: dict[str, Profile] = {}
    grid = None
    offset = (0, 0)
    for name, ref in manifest.profiles.items():
        rel, column = _split_profile_ref(ref)
        path = (manifest_path.parent / rel).resolve()
        if path not in tables:
            tables[path] = load_profile_csv(path)
        table = tables[path]
        if column is None:
            column = name if name in table else (next(iter(table.fields)) if len(table.fields) == 1 else None)
        if column is None or column not in table:
            raise ManifestError(f"no column for profile {name!r} in {path.name}", field=f"profiles.{name}")
        if grid is None:
            grid, offset = table.grid, (table.i0, table.j0)
        elif table.grid != grid:
            raise GridMismatchError(f"profile {name!r} is on {table.grid}, expected {grid}")
        profiles[name] = Profile(name, field=table[column])
    logger.info("Loaded ansatz %s: alpha=%s beta=%s profiles=%s", manifest_path.name, manifest.alpha,
                manifest.beta, sorted(profiles))
    return SelfSimilarAnsatz(
        alpha=manifest.alpha,
        beta=manifest.beta,
        T0=manifest.T0,
        profiles=profiles,
        grid=grid,
        variant=manifest.variant,
        center=manifest.center,
        orientation=manifest.orientation,
        parities=manifest.parities,
        decay=manifest.decay_exponents,
        signs=manifest.signs,
        ingested=manifest.ingested,
        base_only=manifest.base_only,
        sector=manifest.sector,
        rectangle=manifest.rectangle,
        strip=manifest.strip,
        offset=offset,
    )


# =============================================================================
# Regimes
# =============================================================================


@dataclass(frozen=True)
class RegimeClass:
    tag: str
    discriminant: float


def regime_discriminant(alpha: float, beta: float) -> Fraction:
    """−2β/α + 1/α − 1, exact in rational arithmetic on the binary floats."""
    a, b = Fraction(alpha), Fraction(beta)
    return -2 * b / a + 1 / a - 1


def classify_regime(alpha: float, beta: float = 0.0) -> RegimeClass:
    validate_alpha(alpha)
    if not math.isfinite(beta) or beta < 0.0:
        raise ValueError(f"beta must be finite and >= 0, got {beta}")
    disc = regime_discriminant(alpha, beta)
    if alpha > 0.0:
        return RegimeClass("VelocityBlowup", float(disc))
    if disc > 0:
        return RegimeClass("Supercritical", float(disc))
    if disc < 0:
        return RegimeClass("Subcritical", float(disc))
    return RegimeClass("Critical", 0.0)


# =============================================================================
# Scaled families
# =============================================================================


@dataclass(frozen=True)
class ScaledMember:
    k: int
    Q: float
    vr: np.ndarray
    v3: np.ndarray
    vtheta: np.ndarray | None = None
    h: np.ndarray | None = None


def _require_variant(ansatz: SelfSimilarAnsatz, variant: str | None) -> str:
    variant = variant or ansatz.variant
    if variant not in _VARIANT_PROFILES:
        raise ValueError(f"unknown scaled-family variant {variant!r}")
    missing = [n for n in _VARIANT_PROFILES[variant] if not ansatz.has(n)]
    if missing:
        raise ValueError(f"variant {variant} needs profiles {missing}")
    if variant == "centered-boundary" and ansatz.alpha < 0.0:
        raise ValueError("the centered-boundary family needs alpha in (0, 1)")
    if variant != "centered-boundary" and ansatz.alpha > 0.0:
        raise ValueError(f"variant {variant} is a vorticity blow-up family and needs alpha < 0")
    return variant


def _profile_args(ansatz: SelfSimilarAnsatz, variant: str, x1, x2, tau):
    y1 = x1 / tau ** (1.0 - ansatz.alpha)
    y2 = x2 / tau ** (1.0 - ansatz.alpha)
    if variant == "centered-boundary":
        y1, y2 = y1 + BOUNDARY_POINT[0], y2 + BOUNDARY_POINT[1]
    return y1, y2


def ansatz_velocity(ansatz: SelfSimilarAnsatz, x1, x2, t: float, variant: str | None = None) -> dict[str, np.ndarray]:
    """
    Leading-order fields of the ansatz at time t, spatial coordinates measured
    from the boundary point (the o(T₀−t) remainder is dropped).
    """
    variant = _require_variant(ansatz, variant)
    a, b = ansatz.alpha, ansatz.beta
    tau = ansatz.T0 - t
    if tau <= 0.0:
        raise ValueError(f"t = {t} is not before the blow-up time {ansatz.T0}")
    y1, y2 = _profile_args(ansatz, variant, np.asarray(x1, dtype=float), np.asarray(x2, dtype=float), tau)
    out: dict[str, np.ndarray] = {}
    if variant == "LHsc":
        out["vtheta"] = tau ** (-a) * ansatz.profile("Theta")(y1, y2)
        out["vr"] = tau ** (b - a) * ansatz.profile("Vr")(y1, y2)
        out["v3"] = tau ** (b - a) * ansatz.profile("V3")(y1, y2)
    elif variant == "LHsc2":
        out["vtheta"] = tau ** (-(a + b)) * ansatz.profile("Theta")(y1, y2)
        out["vr"] = tau ** (-a) * ansatz.profile("Vr")(y1, y2)
        out["v3"] = tau ** (-a) * ansatz.profile("V3")(y1, y2)
    else:
        out["vr"] = tau ** (-a) * ansatz.profile("Vr")(y1, y2)
        out["v3"] = tau ** (-a) * ansatz.profile("V3")(y1, y2)
        if ansatz.has("Theta"):
            out["vtheta"] = tau ** (-a) * ansatz.profile("Theta")(y1, y2)
    return out


def build_scaled_family(
    ansatz: SelfSimilarAnsatz,
    Qs: Sequence[float],
    window: RescaleWindow,
    variant: str | None = None,
) -> list[ScaledMember]:
    """
    Sample the k-th scaled solutions of a family on a (x̃, t̃) window.

    With Q_k = (1 − t_k)^{−α} (T₀ = 1) the scaled members are

        LHsc               ṽ^θ = (1−t̃)^{−α}Θ(y),   ṽ^{r,3} = Q^{−β/α}(1−t̃)^{β−α}V^{r,3}(y)
        LHsc2              ṽ^θ = Q^{β/α}(1−t̃)^{−α−β}Θ(y),   ṽ^{r,3} = (1−t̃)^{−α}V^{r,3}(y)
        centered-boundary  ṽ = (1−t̃)^{−α}U(y),   U(y) = V(y + (1, 0))

    with y = x̃/(1−t̃)^{1−α}. Each member also carries h_k = Q^{−β/α}ṽ^θ.
    """
    variant = _require_variant(ansatz, variant)
    if any(t >= 1.0 for t in window.times):
        raise ValueError("window times must satisfy t̃ < 1")
    a, b = ansatz.alpha, ansatz.beta
    x1, x2 = window.grid.mesh()
    members = []
    for k, Q in enumerate(Qs):
        if not (math.isfinite(Q) and Q > 0.0):
            raise ValueError(f"Q_{k} must be positive, got {Q}")
        stacks: dict[str, list[np.ndarray]] = {"vr": [], "v3": [], "vtheta": [], "h": []}
        for t in window.times:
            tau = 1.0 - t
            y1, y2 = _profile_args(ansatz, variant, x1, x2, tau)
            if variant == "LHsc":
                damp = Q ** (-b / a) * tau ** (b - a)
                theta = tau ** (-a) * ansatz.profile("Theta")(y1, y2)
                stacks["vr"].append(damp * ansatz.profile("Vr")(y1, y2))
                stacks["v3"].append(damp * ansatz.profile("V3")(y1, y2))
            elif variant == "LHsc2":
                theta = Q ** (b / a) * tau ** (-(a + b)) * ansatz.profile("Theta")(y1, y2)
                stacks["vr"].append(tau ** (-a) * ansatz.profile("Vr")(y1, y2))
                stacks["v3"].append(tau ** (-a) * ansatz.profile("V3")(y1, y2))
            else:
                theta = tau ** (-a) * ansatz.profile("Theta")(y1, y2) if ansatz.has("Theta") else None
                stacks["vr"].append(tau ** (-a) * ansatz.profile("Vr")(y1, y2))
                stacks["v3"].append(tau ** (-a) * ansatz.profile("V3")(y1, y2))
            if theta is not None:
                stacks["vtheta"].append(theta)
                stacks["h"].append(Q ** (-b / a) * theta if variant != "centered-boundary" else theta)
        members.append(
            ScaledMember(
                k=k,
                Q=float(Q),
                vr=np.stack(stacks["vr"]),
                v3=np.stack(stacks["v3"]),
                vtheta=np.stack(stacks["vtheta"]) if stacks["vtheta"] else None,
                h=np.stack(stacks["h"]) if stacks["h"] else None,
            )
        )
    logger.debug("build_scaled_family: variant=%s members=%d", variant, len(members))
    return members


# =============================================================================
# Vorticity consistency
# =============================================================================


@dataclass(frozen=True)
class VorticityCheck:
    mismatch: np.ndarray
    flagged: list[tuple[int, int]]
    max_mismatch: float
    accuracy: float


def _flag(mismatch: np.ndarray, accuracy: float) -> VorticityCheck:
    flagged = [(int(i), int(j)) for i, j in np.argwhere(mismatch > accuracy)]
    return VorticityCheck(mismatch, flagged, float(mismatch.max()) if mismatch.size else 0.0, accuracy)


def vorticity_consistency(V: VectorField2D, W_claimed: ScalarField2D, accuracy: float | None = None) -> VorticityCheck:
    """|W_claimed − (∂₂V¹ − ∂₁V²)| per node, flagging nodes above ``accuracy``."""
    require_same_grid(V, W_claimed)
    accuracy = accuracy if accuracy is not None else get_default("profile", "data_accuracy")
    return _flag(np.abs(W_claimed.values - curl2d(V).values), accuracy)


def pointwise_vorticity_check(W, dV1_dz2, dV2_dz1, accuracy: float | None = None) -> VorticityCheck:
    """Same check when the two velocity derivatives are supplied directly."""
    accuracy = accuracy if accuracy is not None else get_default("profile", "data_accuracy")
    W, a, b = (np.asarray(x, dtype=float) for x in (W, dV1_dz2, dV2_dz1))
    if not (W.shape == a.shape == b.shape):
        raise GridMismatchError(f"shape mismatch: {W.shape}, {a.shape}, {b.shape}")
    return _flag(np.abs(W - (a - b)), accuracy)


# =============================================================================
# Symmetry, decay and signs
# =============================================================================


def _grid_symmetric(grid: Grid2D, axis: int) -> bool:
    lo, hi = (grid.min1, grid.max1) if axis == 0 else (grid.min2, grid.max2)
    return abs(lo + hi) <= 1e-12 * max(1.0, abs(hi))


def parity_defect(ansatz: SelfSimilarAnsatz, name: str, axis: int, parity: str) -> tuple[float, tuple[int, int]] | None:
    """max|u(z) ∓ u(reflected z)| and its node, or None when the grid cannot be reflected."""
    prof = ansatz.profile(name)
    u = prof.sample(ansatz.grid)
    if prof.analytic:
        z1, z2 = ansatz.grid.mesh()
        reflected = prof(-z1, z2) if axis == 0 else prof(z1, -z2)
    elif _grid_symmetric(ansatz.grid, axis):
        reflected = np.flip(u, axis=axis)
    else:
        return None
    d = np.abs(u + reflected) if parity == "odd" else np.abs(u - reflected)
    node = np.unravel_index(int(np.argmax(d)), d.shape)
    return float(d[node]), (int(node[0]), int(node[1]))


def fit_decay(values: np.ndarray, grid: Grid2D, annulus: float | None = None, bins: int = 8) -> tuple[float, float]:
    """
    Least-squares slope of log max|u| against log r over radial bins of the
    outer annulus, each bin represented by the node attaining its maximum.
    Returns (exponent, rms residual).
    """
    annulus = annulus if annulus is not None else get_default("profile", "decay_annulus")
    R = min(max(abs(grid.min1), abs(grid.max1)), max(abs(grid.min2), abs(grid.max2)))
    z1, z2 = grid.mesh()
    r = np.hypot(z1, z2)
    u = np.abs(np.asarray(values))
    edges = np.linspace((1.0 - annulus) * R, R, bins + 1)
    xs, ys = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        sel = (r >= lo) & (r <= hi) & (u > 0.0)
        if sel.any():
            k = int(np.argmax(u[sel]))
            xs.append(math.log(float(r[sel][k])))
            ys.append(math.log(float(u[sel][k])))
    if len(xs) < 3:
        raise ValueError("outer annulus holds too few nonzero samples for a decay fit")
    coef, res, *_ = np.polyfit(xs, ys, 1, full=True)
    rms = math.sqrt(float(res[0]) / len(xs)) if len(res) else 0.0
    return float(coef[0]), rms


_SIGN_TESTS = {
    "positive": lambda u: u > 0.0,
    "negative": lambda u: u < 0.0,
    "nonnegative": lambda u: u >= 0.0,
    "nonpositive": lambda u: u <= 0.0,
}


def sign_violations(ansatz: SelfSimilarAnsatz, name: str, condition: str) -> tuple[int, tuple[int, int] | None, float]:
    """Count of open-first-quadrant nodes violating ``condition``, worst node and value."""
    u = ansatz.sample(name)
    z1, z2 = ansatz.grid.mesh()
    quadrant = (z1 > 0.0) & (z2 > 0.0)
    bad = quadrant & ~_SIGN_TESTS[condition](u)
    if not bad.any():
        return 0, None, 0.0
    severity = np.where(bad, np.abs(u), -np.inf)
    node = np.unravel_index(int(np.argmax(severity)), u.shape)
    return int(bad.sum()), (int(node[0]), int(node[1])), float(u[node])


def symmetry_decay_check(ansatz: SelfSimilarAnsatz, tolerance: float | None = None) -> ValidationReport:
    """Parity defects, fitted decay exponents and sign violations for every declared condition."""
    if tolerance is None:
        key = "parity_tol_ingested" if ansatz.ingested else "parity_tol_analytic"
        tolerance = get_default("profile", key)
    decay_tol = get_default("profile", "decay_tolerance")
    findings: list[ProfileFinding] = []
    notes: list[str] = []

    for name, axes in ansatz.parities.items():
        for var, parity in axes.items():
            axis = 0 if var == "z1" else 1
            result = parity_defect(ansatz, name, axis, parity)
            if result is None:
                msg = f"{name}: grid not symmetric in {var}, parity check skipped"
                notes.append(msg)
                findings.append(ProfileFinding(profile=name, kind="notice", passed=True, detail=msg))
                continue
            defect, node = result
            findings.append(
                ProfileFinding(
                    profile=name,
                    kind="parity",
                    passed=defect <= tolerance,
                    value=defect,
                    node=ansatz.mesh_index(*node),
                    detail=f"{parity} in {var}, tolerance {tolerance:g}",
                )
            )

    for name, expected in ansatz.decay.items():
        try:
            slope, rms = fit_decay(ansatz.sample(name), ansatz.grid)
        except ValueError as exc:
            notes.append(f"{name}: {exc}")
            findings.append(ProfileFinding(profile=name, kind="notice", passed=True, detail=str(exc)))
            continue
        findings.append(
            ProfileFinding(
                profile=name,
                kind="decay",
                passed=abs(slope - expected) <= decay_tol,
                value=slope,
                detail=f"declared {expected:g}, fit residual {rms:.3g}",
            )
        )

    for name, condition in ansatz.signs.items():
        count, node, value = sign_violations(ansatz, name, condition)
        findings.append(
            ProfileFinding(
                profile=name,
                kind="sign",
                passed=count == 0,
                value=value if count else None,
                node=ansatz.mesh_index(*node) if node else None,
                detail=f"{condition}: {count} violating nodes" if count else f"{condition}: holds",
            )
        )

    regime = None
    disc = None
    if ansatz.alpha != 0.0:
        rc = classify_regime(ansatz.alpha, ansatz.beta)
        regime, disc = rc.tag, rc.discriminant
    failed = sum(not f.passed for f in findings)
    logger.info("symmetry_decay_check: %d findings, %d failed", len(findings), failed)
    return ValidationReport(regime=regime, discriminant=disc, findings=findings, notes=notes)


# =============================================================================
# Base ODE
# =============================================================================


@dataclass(frozen=True)
class BaseODESolution:
    z: np.ndarray
    h2_rk4: np.ndarray
    w_rk4: np.ndarray
    h2_closed: np.ndarray
    w_closed: np.ndarray
    discrepancy: float
    extra_zeros: dict[str, list[float]]


def power_law_base(alpha: float, C: float, z) -> tuple[np.ndarray, np.ndarray]:
    """Closed form for V¹ ≡ 0: H² = C z^e, W = −(H²)′ with e = −(1+α)/(1−α)."""
    z = np.asarray(z, dtype=float)
    e = -(1.0 + alpha) / (1.0 - alpha)
    return C * z**e, -C * e * z ** (e - 1.0)


def _gauss_cumulative(f: Callable[[np.ndarray], np.ndarray], a: np.ndarray, b: np.ndarray, m: int) -> np.ndarray:
    """∫_a^b f per (broadcast) interval with an m-point Gauss-Legendre rule."""
    xi, wi = np.polynomial.legendre.leggauss(m)
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = mid[..., None] + half[..., None] * xi
    return np.sum(wi * f(x), axis=-1) * half


def _sign_changes(z: np.ndarray, u: np.ndarray) -> list[float]:
    s = np.sign(u)
    zeros = [float(z[i]) for i in np.flatnonzero(s == 0.0)]
    idx = np.flatnonzero(s[:-1] * s[1:] < 0)
    zeros += [float(0.5 * (z[i] + z[i + 1])) for i in idx]
    return sorted(zeros)


def base_ode_solve(
    v1_base: Callable[[np.ndarray], np.ndarray],
    alpha: float,
    C: float,
    z_range: tuple[float, float] = (1.0, 10.0),
    steps: int = 10_000,
    w0: float | None = None,
    anchor: float = 1.0,
    gauss_points: int | None = None,
) -> BaseODESolution:
    """
    Integrate the base system

        b (H²)′ + (1+α) H² = 0,   b W′ + W − (H²)′ = 0,   b = V¹ + (1−α) z,

    with RK4 and compare against the exponential-integral closed form

        A(z) = ∫_{z₀}^z ds/b,   H² = H²(z₀) e^{−(1+α)A},
        W = e^{−A} [W(z₀) − (1+α) H²(z₀) ∫_{z₀}^z e^{−αA} b⁻² ds],

    where H²(z₀) = C exp(−(1+α)∫_anchor^{z₀} ds/b). The default W(z₀) is
    (1+α)H²(z₀)/b(z₀) = −(H²)′(z₀), which selects the power-law branch when
    V¹ ≡ 0.

    Raises:
        ValueError: the drift coefficient b is not positive on the range
    """
    validate_alpha(alpha)
    z0, z1 = (float(x) for x in z_range)
    if not (0.0 < z0 < z1):
        raise ValueError(f"z range must satisfy 0 < z0 < z1, got {z_range}")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    m = gauss_points or get_default("profile", "gauss_points")

    def b(z):
        return np.asarray(v1_base(np.asarray(z, dtype=float)), dtype=float) + (1.0 - alpha) * np.asarray(z)

    z = np.linspace(z0, z1, steps + 1)
    probe = np.concatenate([z, np.linspace(min(anchor, z0), max(anchor, z0), 65)])
    bp = b(probe)
    if not np.all(bp > 0.0):
        k = int(np.argmin(bp))
        raise ValueError(f"drift coefficient V1 + (1-alpha) z vanishes or turns negative at z = {probe[k]:g}")

    anchor_int = float(_gauss_cumulative(lambda x: 1.0 / b(x), np.array([anchor]), np.array([z0]), m)[0])
    h2_start = C * math.exp(-(1.0 + alpha) * anchor_int)
    w_start = (1.0 + alpha) * h2_start / float(b(z0)) if w0 is None else float(w0)

    # closed form: A at panel ends, then A at Gauss nodes inside each panel
    a_ends, b_ends = z[:-1], z[1:]
    panel_A = _gauss_cumulative(lambda x: 1.0 / b(x), a_ends, b_ends, m)
    A = np.concatenate([[0.0], np.cumsum(panel_A)])
    xi, wi = np.polynomial.legendre.leggauss(m)
    half = 0.5 * (b_ends - a_ends)
    nodes = 0.5 * (a_ends + b_ends)[:, None] + half[:, None] * xi
    A_nodes = A[:-1, None] + _gauss_cumulative(lambda x: 1.0 / b(x), np.broadcast_to(a_ends[:, None], nodes.shape), nodes, m)
    integrand = np.exp(-alpha * A_nodes) / b(nodes) ** 2
    I = np.concatenate([[0.0], np.cumsum(np.sum(wi * integrand, axis=1) * half)])
    h2_closed = h2_start * np.exp(-(1.0 + alpha) * A)
    w_closed = np.exp(-A) * (w_start - (1.0 + alpha) * h2_start * I)

    def rhs(zz: float, y: np.ndarray) -> np.ndarray:
        bz = float(b(zz))
        dh2 = -(1.0 + alpha) * y[0] / bz
        return np.array([dh2, (dh2 - y[1]) / bz])

    h = (z1 - z0) / steps
    y = np.array([h2_start, w_start])
    out = np.empty((steps + 1, 2))
    out[0] = y
    for n in range(steps):
        zz = z[n]
        k1 = rhs(zz, y)
        k2 = rhs(zz + 0.5 * h, y + 0.5 * h * k1)
        k3 = rhs(zz + 0.5 * h, y + 0.5 * h * k2)
        k4 = rhs(zz + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        out[n + 1] = y

    def rel(a_, b_):
        scale = float(np.max(np.abs(b_)))
        return float(np.max(np.abs(a_ - b_))) / scale if scale > 0.0 else float(np.max(np.abs(a_)))

    discrepancy = max(rel(out[:, 0], h2_closed), rel(out[:, 1], w_closed))
    zeros = {"H2": _sign_changes(z, h2_closed), "W": _sign_changes(z, w_closed)} if C != 0.0 else {}
    logger.debug("base_ode_solve: alpha=%s C=%s steps=%d discrepancy=%.3e", alpha, C, steps, discrepancy)
    return BaseODESolution(z, out[:, 0], out[:, 1], h2_closed, w_closed, discrepancy, zeros)


# =============================================================================
# Homogeneity
# =============================================================================


@dataclass(frozen=True)
class HomogeneityResult:
    defect: float
    relative_defect: float
    lambdas: tuple[float, ...]
    verdict: str
    notes: tuple[str, ...] = ()


def homogeneity_check(
    theta: ScalarField2D,
    degree: float,
    lambdas: Sequence[float] = (0.5, 2.0),
    tolerance: float | None = None,
) -> HomogeneityResult:
    """
    max |Θ(λy) − λ^d Θ(y)| over grid nodes y with λy inside the grid.

    Verdicts: ``trivial`` (Θ ≡ 0), ``rejected`` (relative defect above
    tolerance), ``singular_at_origin`` (homogeneous of negative degree and
    growing towards 0), ``inconsistent`` (homogeneous of negative degree but
    bounded near 0), ``homogeneous_regular`` (degree ≥ 0).
    """
    tolerance = tolerance if tolerance is not None else get_default("profile", "homogeneity_tol")
    g = theta.grid
    u = theta.values
    if theta.sup() <= get_default("profile", "nontrivial"):
        return HomogeneityResult(0.0, 0.0, tuple(lambdas), "trivial")
    z1, z2 = g.mesh()
    r = np.hypot(z1, z2)
    r_in = 4.0 * max(g.h1, g.h2)
    interp = BicubicInterpolator(g, u)
    notes: list[str] = []
    used: list[float] = []
    defect = 0.0
    scale = 0.0
    for lam in lambdas:
        sel = (r >= r_in) & (lam * r >= r_in) & g.contains(lam * z1, lam * z2)
        if not sel.any():
            notes.append(f"no nodes y with {lam:g}y inside the grid; lambda dropped")
            continue
        used.append(float(lam))
        lhs = interp(lam * z1[sel], lam * z2[sel])
        rhs = lam**degree * u[sel]
        defect = max(defect, float(np.max(np.abs(lhs - rhs))))
        scale = max(scale, float(np.max(np.abs(u[sel]))), float(np.max(np.abs(lhs))))
    if not used:
        raise ValueError("grid does not cover any pair of nested annuli")
    relative = defect / scale if scale > 0.0 else 0.0
    if relative > tolerance:
        verdict = "rejected"
    elif degree >= 0.0:
        verdict = "homogeneous_regular"
    else:
        ring = r >= r_in
        amplitude = float(np.max(np.abs(u[ring]) * r[ring] ** (-degree)))
        inner = (r < r_in) & (r > 0.0)
        if not inner.any():
            notes.append("no nodes near the origin; boundedness not tested")
            verdict = "singular_at_origin"
        else:
            rho = float(r[inner].min())
            near = float(np.max(np.abs(u[r < r_in])))
            verdict = "inconsistent" if near < 0.5 * amplitude * rho**degree else "singular_at_origin"
    logger.debug("homogeneity_check: degree=%s defect=%.3e verdict=%s", degree, defect, verdict)
    return HomogeneityResult(defect, relative, tuple(used), verdict, tuple(notes))


# =============================================================================
# Asymptotic and quasi self-similarity
# =============================================================================


def default_error_modulus(T0: float = 1.0) -> Callable[[float], float]:
    """(T₀−t)/log(1/(T₀−t)), an o(T₀−t) modulus for 0 < T₀−t < 1."""

    def modulus(t: float) -> float:
        tau = T0 - t
        if not (0.0 < tau < 1.0):
            raise ValueError(f"default error modulus needs 0 < T0 - t < 1, got {tau}")
        return tau / math.log(1.0 / tau)

    return modulus


def asss_defect(
    v: Callable[[np.ndarray, np.ndarray, float], tuple[np.ndarray, ...]],
    profile: Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, ...]],
    alpha: float,
    T0: float,
    times: Sequence[float],
    grid: Grid2D,
    modulus: Callable[[float], float] | None = None,
) -> list[dict[str, float]]:
    """
    Distance of a solution from its self-similar profile, measured against
    the error modulus: (T₀−t)^α · max|v − (T₀−t)^{−α}V(x/(T₀−t)^{1−α})| / m(t).
    """
    validate_alpha(alpha)
    modulus = modulus or default_error_modulus(T0)
    x1, x2 = grid.mesh()
    out = []
    for t in times:
        tau = T0 - t
        if tau <= 0.0:
            raise ValueError(f"t = {t} is not before the blow-up time {T0}")
        y1, y2 = x1 / tau ** (1.0 - alpha), x2 / tau ** (1.0 - alpha)
        defect = 0.0
        for comp, ref in zip(v(x1, x2, t), profile(y1, y2)):
            defect = max(defect, float(np.max(np.abs(np.asarray(comp) - tau ** (-alpha) * np.asarray(ref)))))
        out.append({"t": float(t), "defect": defect, "ratio": defect * tau**alpha / modulus(t)})
    return out


@dataclass(frozen=True)
class QuasiProfile:
    times: tuple[float, ...]
    profiles: tuple[dict[str, np.ndarray], ...]
    variation: tuple[float, ...]
    window: Grid2D


def quasi_profile(series: TimeSeries, alpha: float, T0: float, window: Grid2D) -> QuasiProfile:
    """
    Quasi profile V(y, t) = (T₀−t)^α v((T₀−t)^{1−α} y, t) on a y-window for
    every snapshot, with max|V(·, t_{n+1}) − V(·, t_n)| as a time-variation
    diagnostic (constant profiles mean exact self-similarity).

    Raises:
        WindowError: the scaled window leaves the sampled domain
    """
    validate_alpha(alpha, allow_negative=False)
    g = series.grid
    y1, y2 = window.mesh()
    profiles = []
    for t, snap in zip(series.times, series.snapshots):
        tau = T0 - t
        if tau <= 0.0:
            raise ValueError(f"snapshot time {t} is not before the blow-up time {T0}")
        s = tau ** (1.0 - alpha)
        for a in (window.min1, window.max1):
            for b in (window.min2, window.max2):
                if not bool(g.contains(s * a, s * b, slack=1e-12)):
                    raise WindowError("quasi-profile window leaves the sampled domain", corner=(a, b, float(t)))
        comps = {"u1": snap.u1, "u2": snap.u2} if isinstance(snap, VectorField2D) else {"u": snap.values}
        profiles.append({k: tau**alpha * BicubicInterpolator(g, v)(s * y1, s * y2) for k, v in comps.items()})
    variation = tuple(
        max(float(np.max(np.abs(b[k] - a[k]))) for k in a) for a, b in zip(profiles, profiles[1:])
    )
    return QuasiProfile(tuple(series.times), tuple(profiles), variation, window)
