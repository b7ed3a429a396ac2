"""
Flow lines of planar vector fields.

A flow line is integrated with classical RK4 from a seed, forward (step > 0)
or backward (step < 0) in its parameter. Quantities that evolve along the
line, such as W in dW/ds = ∂₁H² − W, are carried in the same RK4 state.

A step is halved when the field is non-finite or the RK4 stages disagree
too much (the drift blows up near a singular curve); the line terminates as
HitSingularCurve once the step falls below ``min_step``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

logger = logging.getLogger(__name__)

VelocityFn = Callable[[float, float], tuple[float, float]]
CarryFn = Callable[[float, float, np.ndarray], np.ndarray]

TERMINATIONS = ("ReachedBoundary", "LeftWindow", "HitSingularCurve", "ParameterLimit")


@dataclass(frozen=True)
class FlowLine:
    s: np.ndarray
    positions: np.ndarray
    values: np.ndarray
    termination: str
    carried: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if self.termination not in TERMINATIONS:
            raise ValueError(f"unknown termination {self.termination!r}")
        n = len(self.s)
        if self.positions.shape != (n, 2) or len(self.values) != n:
            raise ValueError("flow line samples have inconsistent lengths")
        d = np.diff(self.s)
        if n > 1 and not (np.all(d > 0) or np.all(d < 0)):
            raise ValueError("flow-line parameter must be strictly monotone")

    def __len__(self) -> int:
        return len(self.s)

    @property
    def start(self) -> tuple[float, float]:
        return float(self.positions[0, 0]), float(self.positions[0, 1])

    @property
    def end(self) -> tuple[float, float]:
        return float(self.positions[-1, 0]), float(self.positions[-1, 1])

    def rows(self) -> list[tuple[float, float, float, float]]:
        """(s, z1, z2, W) rows for polyline dumps."""
        return [
            (float(s), float(p[0]), float(p[1]), float(w))
            for s, p, w in zip(self.s, self.positions, self.values)
        ]

    def witness(self, every: int = 1) -> dict:
        return {
            "seed": list(self.start),
            "end": list(self.end),
            "termination": self.termination,
            "samples": [list(r) for r in self.rows()[::every]],
        }


def _rk4_stages(rhs, s: float, x: np.ndarray, h: float):
    k1 = rhs(s, x)
    k2 = rhs(s + 0.5 * h, x + 0.5 * h * k1)
    k3 = rhs(s + 0.5 * h, x + 0.5 * h * k2)
    k4 = rhs(s + h, x + h * k3)
    return k1, k2, k3, k4


def integrate_flowline(
    velocity: VelocityFn,
    start: tuple[float, float],
    step: float,
    horizon: float,
    inside: Callable[[float, float], bool] | None = None,
    at_boundary: Callable[[float, float], bool] | None = None,
    carry: CarryFn | None = None,
    carry0: Sequence[float] = (),
    carry_names: Sequence[str] = (),
    sample: Callable[[float, float], float] | None = None,
    min_step: float | None = None,
    jump_tol: float = 0.05,
) -> FlowLine:
    """
    Integrate dz/ds = velocity(z) from ``start`` until |s| reaches ``horizon``.

    Args:
        velocity: Field (z1, z2) -> (f1, f2)
        start: Seed point, also the first sample
        step: Nominal parameter step; negative integrates backward
        horizon: Largest |s| before ParameterLimit
        inside: Window predicate; leaving it ends the line as LeftWindow
        at_boundary: Predicate for a target boundary (ReachedBoundary); a step
            landing on it is accepted even when it overshoots the window
        carry: Right-hand side g(z1, z2, y) of quantities carried along the line
        carry0: Initial carried values
        carry_names: Names for the carried columns
        sample: Field sampled at every accepted point (the ``values`` column)
        min_step: Smallest step before the line ends as HitSingularCurve
        jump_tol: Largest accepted |h|·‖k4 − k1‖ for the position

    Returns:
        FlowLine with the accepted samples and the termination reason
    """
    if step == 0.0 or not math.isfinite(step):
        raise ValueError(f"step must be finite and nonzero, got {step}")
    if horizon <= 0.0:
        raise ValueError(f"horizon must be positive, got {horizon}")
    min_step = min_step if min_step is not None else abs(step) * 2.0**-20
    ncarry = len(carry0)

    def rhs(_s: float, x: np.ndarray) -> np.ndarray:
        f1, f2 = velocity(float(x[0]), float(x[1]))
        out = np.empty(2 + ncarry)
        out[0], out[1] = f1, f2
        if ncarry:
            out[2:] = carry(float(x[0]), float(x[1]), x[2:])
        return out

    x = np.array([start[0], start[1], *carry0], dtype=float)
    s = 0.0
    ss, xs = [s], [x.copy()]
    h = float(step)
    termination = "ParameterLimit"
    while abs(s) < horizon * (1.0 - 1e-12):
        if abs(s + h) > horizon:
            h = math.copysign(horizon - abs(s), step)
        try:
            k1, k2, k3, k4 = _rk4_stages(rhs, s, x, h)
            ok = all(np.all(np.isfinite(k)) for k in (k1, k2, k3, k4))
        except (FloatingPointError, ZeroDivisionError):
            ok = False
        if ok:
            ok = abs(h) * float(np.hypot(*(k4[:2] - k1[:2]))) <= jump_tol
        hit = False
        if ok:
            x_new = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            hit = at_boundary is not None and at_boundary(float(x_new[0]), float(x_new[1]))
            if not hit and inside is not None and not inside(float(x_new[0]), float(x_new[1])):
                ok = False
                if abs(h) * 0.5 < min_step:
                    termination = "LeftWindow"
                    break
        if not ok:
            if abs(h) * 0.5 < min_step:
                if termination != "LeftWindow":
                    termination = "HitSingularCurve"
                break
            h *= 0.5
            continue
        s += h
        x = x_new
        ss.append(s)
        xs.append(x.copy())
        if hit:
            termination = "ReachedBoundary"
            break
        if abs(h) < abs(step):
            h = math.copysign(min(abs(step), 2.0 * abs(h)), step)

    X = np.array(xs)
    values = (
        np.array([sample(float(p[0]), float(p[1])) for p in X[:, :2]]) if sample is not None else np.zeros(len(X))
    )
    names = list(carry_names) or [f"y{i}" for i in range(ncarry)]
    carried = {n: X[:, 2 + i].copy() for i, n in enumerate(names)}
    logger.debug("flow line from %s: %d samples, %s", start, len(ss), termination)
    return FlowLine(np.array(ss), X[:, :2].copy(), values, termination, carried)
