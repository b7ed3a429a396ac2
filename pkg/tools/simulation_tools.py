"""
Desk-scale steppers for axisymmetric Euler, 2D Euler and half-plane Boussinesq.

All three use semi-Lagrangian transport with quasi-monotone bicubic
interpolation: departure points come from a midpoint rule on the frozen
velocity, and interpolated values are clipped to the enclosing cell, so
transported extrema never grow.

Axisymmetric system (grid axis 0 = r ∈ [r_min, 1], axis 1 = x³ periodic):
    Γ = r v^θ is transported by b = (v^r, v³);
    η = ω/r, ω = ∂₃v^r − ∂_r v³, obeys Dη/Dt = ∂₃(Γ²)/r⁴.
The meridian velocity is updated by the stream-function increment ΔΨ with
∂_r(∂_rΔΨ/r) + ∂₃²ΔΨ/r = −Δω and ΔΨ = 0 on both walls, so v^r stays zero on
the walls, the axial flux is unchanged and already-balanced states do not move.

2D system: Δψ = −ω (ω = ∂₂v¹ − ∂₁v², v = (−∂₂ψ, ∂₁ψ)), ψ constant on each wall.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import cg, splu

from config import OUTER_RADIUS, get_default
from tools.field_tools import (
    BicubicInterpolator,
    BumpTestFunction,
    Grid2D,
    Rectangle,
    ScalarField2D,
    TimeSeries,
    VectorField2D,
    derivative,
    perp_gradient,
    quadrature,
)
from utils import CFLViolationError, FieldValueError, GridMismatchError, PoissonConvergenceError

logger = logging.getLogger(__name__)

AXISYM_PERIODIC = (False, True)


# =============================================================================
# Elliptic solves
# =============================================================================


def _unknowns(n: int, periodic: bool) -> np.ndarray:
    return np.arange(n - 1) if periodic else np.arange(1, n - 1)


@dataclass(frozen=True)
class _EllipticSystem:
    matrix: sparse.csc_matrix
    lu: object
    rows: np.ndarray
    cols: np.ndarray


@lru_cache(maxsize=32)
def _elliptic_system(grid: Grid2D, periodic: tuple[bool, bool], kind: str) -> _EllipticSystem:
    """Assemble and factorize the five-point operator on the unknown nodes."""
    if periodic[0] and periodic[1]:
        raise ValueError("at least one grid axis must carry walls for the elliptic solve")
    ui = _unknowns(grid.n1, periodic[0])
    uj = _unknowns(grid.n2, periodic[1])
    index = -np.ones(grid.shape, dtype=int)
    ii, jj = np.meshgrid(ui, uj, indexing="ij")
    index[ii, jj] = np.arange(ii.size).reshape(ii.shape)
    if periodic[0]:
        index[-1, :] = index[0, :]
    if periodic[1]:
        index[:, -1] = index[:, 0]

    h1, h2 = grid.h1, grid.h2
    r = grid.z1
    data, row_idx, col_idx = [], [], []

    def couple(row: np.ndarray, i: np.ndarray, j: np.ndarray, weight: np.ndarray):
        target = index[i, j]
        keep = target >= 0
        data.append(weight[keep])
        row_idx.append(row[keep])
        col_idx.append(target[keep])

    rows = index[ii, jj].ravel()
    i = ii.ravel()
    j = jj.ravel()
    im = (i - 1) % (grid.n1 - 1) if periodic[0] else i - 1
    ip = (i + 1) % (grid.n1 - 1) if periodic[0] else i + 1
    jm = (j - 1) % (grid.n2 - 1) if periodic[1] else j - 1
    jp = (j + 1) % (grid.n2 - 1) if periodic[1] else j + 1
    if kind == "laplace":
        w_im = np.full(i.size, 1.0 / h1**2)
        w_ip = w_im
        w_j = np.full(i.size, 1.0 / h2**2)
        w_jm = w_jp = w_j
    elif kind == "axisym":
        ri = r[i]
        w_im = 1.0 / (0.5 * (ri + r[i - 1]) * h1**2)
        w_ip = 1.0 / (0.5 * (ri + r[np.minimum(i + 1, grid.n1 - 1)]) * h1**2)
        w_jm = w_jp = 1.0 / (ri * h2**2)
    else:
        raise ValueError(f"Unknown elliptic operator {kind!r}")
    couple(rows, im, j, w_im)
    couple(rows, ip, j, w_ip)
    couple(rows, i, jm, w_jm)
    couple(rows, i, jp, w_jp)
    data.append(-(w_im + w_ip + w_jm + w_jp))
    row_idx.append(rows)
    col_idx.append(rows)
    n = ii.size
    matrix = sparse.csc_matrix(
        (np.concatenate(data), (np.concatenate(row_idx), np.concatenate(col_idx))), shape=(n, n)
    )
    logger.debug("Factorizing %s operator with %d unknowns", kind, n)
    return _EllipticSystem(matrix=matrix, lu=splu(matrix), rows=ui, cols=uj)


def solve_elliptic(
    grid: Grid2D,
    rhs: np.ndarray,
    periodic: tuple[bool, bool],
    walls: dict[int, tuple[float, float]] | None = None,
    kind: str = "laplace",
    method: str = "direct",
    tolerance: float | None = None,
) -> np.ndarray:
    """
    Solve L u = rhs with constant Dirichlet values on the wall axes.

    Args:
        grid: Mesh; periodic axes repeat their first node as the last one
        rhs: Right-hand side at every node (only unknown nodes are used)
        periodic: Periodicity per axis
        walls: axis → (low value, high value); missing wall axes default to 0
        kind: "laplace" (Δu) or "axisym" (∂_r(∂_r u/r) + ∂₃²u/r)
        method: "direct" (cached sparse LU) or "cg" (iterative, capped at a
            multiple of the node count)
        tolerance: Residual bound, relative to max(1, ‖rhs‖∞)

    Returns:
        Solution on all nodes

    Raises:
        PoissonConvergenceError: residual above tolerance
    """
    tolerance = tolerance if tolerance is not None else get_default("simulation", "poisson_residual")
    system = _elliptic_system(grid, tuple(periodic), kind)
    walls = walls or {}
    u = np.zeros(grid.shape)
    for axis in (0, 1):
        if periodic[axis]:
            continue
        lo, hi = walls.get(axis, (0.0, 0.0))
        if axis == 0:
            u[0, :], u[-1, :] = lo, hi
        else:
            u[:, 0], u[:, -1] = lo, hi

    ii, jj = np.meshgrid(system.rows, system.cols, indexing="ij")
    # Move the known wall values to the right-hand side.
    boundary_only = u.copy()
    boundary_only[ii, jj] = 0.0
    if periodic[0]:
        boundary_only[-1, :] = 0.0
    if periodic[1]:
        boundary_only[:, -1] = 0.0
    lifted = _apply_operator(grid, boundary_only, periodic, kind)
    b = (np.asarray(rhs, dtype=float) - lifted)[ii, jj].ravel()

    if method == "direct":
        x = system.lu.solve(b)
    elif method == "cg":
        cap = get_default("simulation", "cg_iteration_factor") * b.size
        x, info = cg(-system.matrix, -b, rtol=tolerance * 1e-2, atol=0.0, maxiter=cap)
        if info > 0:
            logger.warning("cg stopped at the iteration cap (%d)", cap)
    else:
        raise ValueError(f"Unknown elliptic method {method!r}")

    residual = float(np.max(np.abs(system.matrix @ x - b))) if b.size else 0.0
    scale = max(1.0, float(np.max(np.abs(b))) if b.size else 0.0)
    if residual > tolerance * scale:
        raise PoissonConvergenceError(residual, tolerance * scale)

    u[ii, jj] = x.reshape(ii.shape)
    if periodic[0]:
        u[-1, :] = u[0, :]
    if periodic[1]:
        u[:, -1] = u[:, 0]
    return u


def _apply_operator(grid: Grid2D, u: np.ndarray, periodic: tuple[bool, bool], kind: str) -> np.ndarray:
    """Five-point operator at every node; only values at unknown nodes are used."""
    h1, h2 = grid.h1, grid.h2
    if periodic[0]:
        core = u[:-1, :]
        up, um = np.roll(core, -1, axis=0), np.roll(core, 1, axis=0)
        c1 = np.vstack([up, up[:1]]), np.vstack([um, um[:1]])
    else:
        c1 = None
    if periodic[1]:
        core = u[:, :-1]
        up, um = np.roll(core, -1, axis=1), np.roll(core, 1, axis=1)
        c2 = np.hstack([up, up[:, :1]]), np.hstack([um, um[:, :1]])
    else:
        c2 = None
    pad = np.pad(u, 1, mode="edge")
    u_ip = c1[0] if c1 else pad[2:, 1:-1]
    u_im = c1[1] if c1 else pad[:-2, 1:-1]
    u_jp = c2[0] if c2 else pad[1:-1, 2:]
    u_jm = c2[1] if c2 else pad[1:-1, :-2]
    if kind == "laplace":
        out = (u_ip - 2 * u + u_im) / h1**2 + (u_jp - 2 * u + u_jm) / h2**2
    else:
        r = grid.z1[:, None]
        r_p = r + 0.5 * h1
        r_m = r - 0.5 * h1
        out = ((u_ip - u) / r_p - (u - u_im) / r_m) / h1**2 + (u_jp - 2 * u + u_jm) / (r * h2**2)
    return out


# =============================================================================
# Semi-Lagrangian transport
# =============================================================================


def departure_points(
    grid: Grid2D, u1: np.ndarray, u2: np.ndarray, dt: float, periodic: tuple[bool, bool]
) -> tuple[np.ndarray, np.ndarray]:
    """Midpoint-rule departure points of the nodes under a frozen velocity."""
    z1, z2 = grid.mesh()
    i1 = BicubicInterpolator(grid, u1, periodic)
    i2 = BicubicInterpolator(grid, u2, periodic)
    m1 = z1 - 0.5 * dt * u1
    m2 = z2 - 0.5 * dt * u2
    return z1 - dt * i1(m1, m2), z2 - dt * i2(m1, m2)


def advect(
    grid: Grid2D, values: np.ndarray, d1: np.ndarray, d2: np.ndarray, periodic: tuple[bool, bool]
) -> np.ndarray:
    """Sample ``values`` at departure points with cell-limited bicubic interpolation."""
    out = BicubicInterpolator(grid, values, periodic)(d1, d2, limit=True)
    if periodic[0]:
        out[-1, :] = out[0, :]
    if periodic[1]:
        out[:, -1] = out[:, 0]
    return out


def cfl_number(grid: Grid2D, u1: np.ndarray, u2: np.ndarray, dt: float) -> float:
    speed = float(np.max(np.hypot(u1, u2)))
    return speed * dt / min(grid.h1, grid.h2)


def _check_cfl(grid: Grid2D, u1, u2, dt: float, limit: float | None) -> float:
    limit = limit if limit is not None else get_default("simulation", "cfl_limit")
    if dt <= 0:
        raise ValueError(f"time step must be positive, got {dt}")
    cfl = cfl_number(grid, u1, u2, dt)
    if cfl > limit:
        raise CFLViolationError(cfl, limit)
    return cfl


def _check_finite(label: str, values: np.ndarray):
    bad = ~np.isfinite(values)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise FieldValueError(f"{label}: non-finite value in update", node=(int(i), int(j)), value=float(values[i, j]))


# =============================================================================
# Axisymmetric Euler
# =============================================================================


@dataclass(frozen=True)
class AxiState:
    """Axisymmetric velocity on the (r, x³) grid; r ∈ [r_min, 1], x³ periodic."""

    grid: Grid2D
    vr: np.ndarray
    vtheta: np.ndarray
    v3: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        g = self.grid
        if g.min1 <= 0.0:
            raise ValueError(f"r_min must be positive, got {g.min1}")
        if abs(g.max1 - OUTER_RADIUS) > 1e-14:
            raise ValueError(f"outer radius is fixed at {OUTER_RADIUS}, got {g.max1}")
        for name in ("vr", "vtheta", "v3"):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.shape != g.shape:
                raise ValueError(f"{name}: expected shape {g.shape}, got {arr.shape}")
            _check_finite(name, arr)
            if np.max(np.abs(arr[:, 0] - arr[:, -1])) > 1e-12 * max(1.0, np.max(np.abs(arr))):
                raise FieldValueError(f"{name}: x3-periodic values differ between top and bottom")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        wall = np.max(np.abs(self.vr[[0, -1], :]))
        if wall > 1e-12 * max(1.0, float(np.max(np.abs(self.vr)))):
            raise FieldValueError("v^r must vanish on the walls r = r_min and r = 1", value=float(wall))
        self._check_divergence()

    def _check_divergence(self):
        radial, axial = _divergence_terms(self.grid, self.vr, self.v3)
        div = np.abs(radial + axial)
        scale = max(float(np.max(np.abs(radial))), float(np.max(np.abs(axial))))
        limit = get_default("simulation", "divergence_tol") * scale + get_default("field", "round_off")
        i, j = np.unravel_index(int(np.argmax(div)), div.shape)
        if div[i, j] > limit:
            raise FieldValueError(
                f"axisymmetric divergence {div[i, j]:.3g} exceeds {limit:.3g}", node=(int(i), int(j)),
                value=float(div[i, j]),
            )

    @property
    def r(self) -> np.ndarray:
        return self.grid.z1[:, None] * np.ones((1, self.grid.n2))

    @property
    def gamma(self) -> np.ndarray:
        return self.r * self.vtheta

    def meridian_vorticity(self) -> np.ndarray:
        g = self.grid
        return derivative(self.vr, g.h2, 1, periodic=True) - derivative(self.v3, g.h1, 0)


def _divergence_terms(grid: Grid2D, vr: np.ndarray, v3: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    r = grid.z1[:, None]
    return derivative(r * vr, grid.h1, 0) / r, derivative(v3, grid.h2, 1, periodic=True)


def axisym_divergence(state: AxiState) -> ScalarField2D:
    """∂_r v^r + v^r/r + ∂₃v³ in the conservative form (1/r)∂_r(r v^r) + ∂₃v³."""
    radial, axial = _divergence_terms(state.grid, state.vr, state.v3)
    return ScalarField2D(state.grid, radial + axial)


def step_axisym(state: AxiState, dt: float, cfl_limit: float | None = None) -> AxiState:
    """Advance the axisymmetric system by one step of size ``dt``."""
    g = state.grid
    _check_cfl(g, state.vr, state.v3, dt, cfl_limit)
    r = state.r
    d1, d2 = departure_points(g, state.vr, state.v3, dt, AXISYM_PERIODIC)

    gamma_new = advect(g, state.gamma, d1, d2, AXISYM_PERIODIC)

    omega = state.meridian_vorticity()
    eta = omega / r

    def source(gam: np.ndarray) -> np.ndarray:
        return derivative(gam**2, g.h2, 1, periodic=True) / r**4

    eta_new = advect(g, eta, d1, d2, AXISYM_PERIODIC)
    s_old = source(state.gamma)
    if np.any(s_old) or np.any(source(gamma_new)):
        eta_new = eta_new + 0.5 * dt * (advect(g, s_old, d1, d2, AXISYM_PERIODIC) + source(gamma_new))

    d_omega = r * eta_new - omega
    if np.any(d_omega):
        d_psi = solve_elliptic(g, -d_omega, AXISYM_PERIODIC, kind="axisym")
        vr = state.vr - derivative(d_psi, g.h2, 1, periodic=True) / r
        v3 = state.v3 + derivative(d_psi, g.h1, 0) / r
        vr[[0, -1], :] = 0.0
    else:
        vr, v3 = np.array(state.vr), np.array(state.v3)
    vtheta = gamma_new / r
    for label, arr in (("v^r", vr), ("v^theta", vtheta), ("v^3", v3)):
        _check_finite(label, arr)
    return AxiState(g, vr, vtheta, v3, time=state.time + dt)


def run_axisym(state: AxiState, dt: float, steps: int, cfl_limit: float | None = None) -> list[AxiState]:
    states = [state]
    for n in range(steps):
        states.append(step_axisym(states[-1], dt, cfl_limit))
        if (n + 1) % 50 == 0:
            logger.info("axisym step %d/%d t=%.4f", n + 1, steps, states[-1].time)
    return states


def _require_same_grid(states: Sequence[AxiState]):
    if len(states) < 2:
        raise ValueError("need at least two snapshots")
    for k, s in enumerate(states):
        if s.grid != states[0].grid:
            raise GridMismatchError(f"snapshot {k} is on a different grid")


def gamma_conservation(states: Sequence[AxiState]) -> float:
    """
    Maximum relative drift of ‖Γ(·, t)‖∞ against the first snapshot.

    When Γ(0) ≡ 0 the drift is reported as absolute (the largest later sup).
    """
    _require_same_grid(states)
    sups = [float(np.max(np.abs(s.gamma))) for s in states]
    if sups[0] == 0.0:
        return max(sups[1:])
    return max(abs(s - sups[0]) for s in sups[1:]) / sups[0]


def gamma_lp_drift(states: Sequence[AxiState], n: int) -> float:
    """Relative drift of ∫|Γ|^{2n} r dr dx³ (absolute when the initial value is 0)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    _require_same_grid(states)
    g = states[0].grid
    box = Rectangle(g.min1, g.max1, g.min2, g.max2)
    values = [quadrature(ScalarField2D(g, np.abs(s.gamma) ** (2 * n) * s.r), box) for s in states]
    if values[0] == 0.0:
        return max(values[1:])
    return max(abs(v - values[0]) for v in values[1:]) / values[0]


def swirl_bound_check(state: AxiState, gamma0_sup: float) -> float:
    """max over nodes of |v^θ|·r − Γ₀_sup; ≤ 0 when the swirl bound holds."""
    if state.grid.min1 <= 0.0:
        raise ValueError("swirl bound needs r_min > 0")
    return float(np.max(np.abs(state.vtheta) * state.r - gamma0_sup))


# =============================================================================
# 2D Euler and Boussinesq
# =============================================================================


@dataclass(frozen=True)
class Euler2DState:
    grid: Grid2D
    omega: np.ndarray
    psi: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    periodic: tuple[bool, bool] = (True, False)
    flux: float = 0.0
    time: float = 0.0

    @classmethod
    def from_vorticity(
        cls,
        grid: Grid2D,
        omega: np.ndarray,
        periodic: tuple[bool, bool] = (True, False),
        flux: float = 0.0,
        time: float = 0.0,
    ) -> Euler2DState:
        """Solve Δψ = −ω with ψ = 0 on the low wall and ψ = flux on the high wall."""
        omega = np.array(omega, dtype=float)
        _check_finite("omega", omega)
        walls = {}
        for axis in (0, 1):
            if not periodic[axis]:
                walls[axis] = (0.0, flux)
        if not periodic[0] and not periodic[1] and flux != 0.0:
            raise ValueError("a closed box carries no net flux")
        psi = solve_elliptic(grid, -omega, tuple(periodic), walls=walls)
        u1 = -derivative(psi, grid.h2, 1, periodic=periodic[1])
        u2 = derivative(psi, grid.h1, 0, periodic=periodic[0])
        return cls(grid, omega, psi, u1, u2, tuple(periodic), flux, time)

    def velocity(self) -> VectorField2D:
        return VectorField2D(self.grid, self.u1, self.u2)

    def divergence(self) -> np.ndarray:
        g = self.grid
        return derivative(self.u1, g.h1, 0, self.periodic[0]) + derivative(self.u2, g.h2, 1, self.periodic[1])


# Forcing added to the vorticity equation for each Boussinesq orientation:
#   upper_minus  buoyancy +(0, h²): ∂_tω + v·∇ω + ∂₁h² = 0
#   upper_plus   buoyancy −(0, h²): ∂_tω + v·∇ω − ∂₁h² = 0
#   left         buoyancy +(h², 0): ∂_tω + v·∇ω − ∂₂h² = 0
_FORCING = {"upper_minus": (0, -1.0), "upper_plus": (0, 1.0), "left": (1, 1.0)}


@dataclass(frozen=True)
class BoussinesqState:
    flow: Euler2DState
    h: np.ndarray
    orientation: str = "upper_minus"

    def __post_init__(self):
        if self.orientation not in _FORCING:
            raise ValueError(f"Unknown orientation {self.orientation!r}; expected one of {sorted(_FORCING)}")
        h = np.array(self.h, dtype=float)
        if h.shape != self.flow.grid.shape:
            raise ValueError(f"h: expected shape {self.flow.grid.shape}, got {h.shape}")
        _check_finite("h", h)
        h.setflags(write=False)
        object.__setattr__(self, "h", h)

    def forcing(self, h: np.ndarray | None = None) -> np.ndarray:
        h = self.h if h is None else h
        axis, sign = _FORCING[self.orientation]
        g = self.flow.grid
        step = g.h1 if axis == 0 else g.h2
        return sign * derivative(h**2, step, axis, periodic=self.flow.periodic[axis])


def _transport_omega(state: Euler2DState, dt: float, cfl_limit: float | None):
    g = state.grid
    _check_cfl(g, state.u1, state.u2, dt, cfl_limit)
    d1, d2 = departure_points(g, state.u1, state.u2, dt, state.periodic)
    return d1, d2, advect(g, state.omega, d1, d2, state.periodic)


def step_euler2d(state: Euler2DState, dt: float, cfl_limit: float | None = None) -> Euler2DState:
    _, _, omega = _transport_omega(state, dt, cfl_limit)
    _check_finite("omega", omega)
    return Euler2DState.from_vorticity(state.grid, omega, state.periodic, state.flux, state.time + dt)


def step_boussinesq(state: BoussinesqState, dt: float, cfl_limit: float | None = None) -> BoussinesqState:
    """
    One step of the Boussinesq system: ω and h transported, and the forcing
    integrated along characteristics with the trapezoid rule.
    """
    flow = state.flow
    d1, d2, omega = _transport_omega(flow, dt, cfl_limit)
    h_new = advect(flow.grid, state.h, d1, d2, flow.periodic)
    if np.any(state.h) or np.any(h_new):
        s_dep = advect(flow.grid, state.forcing(), d1, d2, flow.periodic)
        omega = omega + 0.5 * dt * (s_dep + state.forcing(h_new))
    _check_finite("omega", omega)
    _check_finite("h", h_new)
    new_flow = Euler2DState.from_vorticity(flow.grid, omega, flow.periodic, flow.flux, flow.time + dt)
    return replace(state, flow=new_flow, h=h_new)


def run_euler2d(state: Euler2DState, dt: float, steps: int, cfl_limit: float | None = None) -> list[Euler2DState]:
    states = [state]
    for _ in range(steps):
        states.append(step_euler2d(states[-1], dt, cfl_limit))
    return states


def run_boussinesq(
    state: BoussinesqState, dt: float, steps: int, cfl_limit: float | None = None
) -> list[BoussinesqState]:
    states = [state]
    for _ in range(steps):
        states.append(step_boussinesq(states[-1], dt, cfl_limit))
    return states


def velocity_series(states: Sequence[Euler2DState | BoussinesqState]) -> TimeSeries:
    flows = [s.flow if isinstance(s, BoussinesqState) else s for s in states]
    return TimeSeries(tuple(f.time for f in flows), tuple(f.velocity() for f in flows))


# =============================================================================
# Weak form
# =============================================================================


TestStream = BumpTestFunction | Sequence[ScalarField2D] | Callable[[float], ScalarField2D]


def _test_snapshots(f: TestStream, series: TimeSeries) -> list[ScalarField2D]:
    if isinstance(f, BumpTestFunction):
        return [f.sample(series.grid, t) for t in series.times]
    if callable(f):
        return [f(t) for t in series.times]
    snaps = list(f)
    if len(snaps) != len(series):
        raise ValueError(f"{len(snaps)} test-field snapshots for {len(series)} velocity snapshots")
    return snaps


def weak_residual(series: TimeSeries, f: TestStream, frame: int = 2) -> float:
    """
    Space-time quadrature of (v·∇v + ∂_t v)·∇⊥f.

    The pressure drops out because ∇⊥f is divergence free. ``f`` must vanish
    on a ``frame``-node border of the window and at the first and last times.
    """
    snaps = _test_snapshots(f, series)
    g = series.grid
    scale = max(float(np.max(np.abs(s.values))) for s in snaps)
    if scale == 0.0:
        return 0.0
    tol = 1e-12 * scale
    for k, s in enumerate(snaps):
        v = s.values
        border = np.concatenate([v[:frame].ravel(), v[-frame:].ravel(), v[:, :frame].ravel(), v[:, -frame:].ravel()])
        if np.max(np.abs(border)) > tol:
            raise ValueError(f"test field support touches the spatial window boundary at snapshot {k}")
    if len(series) < 3:
        raise ValueError("weak_residual needs at least three snapshots")
    if max(np.max(np.abs(snaps[0].values)), np.max(np.abs(snaps[-1].values))) > tol:
        raise ValueError("test field support touches the first or last time of the window")

    times = np.asarray(series.times)
    u1 = np.stack([s.u1 for s in series.snapshots])
    u2 = np.stack([s.u2 for s in series.snapshots])
    dtu1 = np.gradient(u1, times, axis=0, edge_order=2)
    dtu2 = np.gradient(u2, times, axis=0, edge_order=2)
    box = Rectangle(g.min1, g.max1, g.min2, g.max2)
    per_time = []
    for k in range(len(series)):
        a1 = u1[k] * derivative(u1[k], g.h1, 0) + u2[k] * derivative(u1[k], g.h2, 1) + dtu1[k]
        a2 = u1[k] * derivative(u2[k], g.h1, 0) + u2[k] * derivative(u2[k], g.h2, 1) + dtu2[k]
        zeta = perp_gradient(snaps[k])
        per_time.append(quadrature(ScalarField2D(g, a1 * zeta.u1 + a2 * zeta.u2), box))
    return float(np.trapezoid(per_time, times))
