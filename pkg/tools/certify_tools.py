"""
Contradiction certifiers for self-similar profiles.

Each certifier checks the hypotheses of one non-existence argument on the
sampled profiles, runs the argument's quantitative mechanism and returns a
CertificateReport:

    ContradictionFound  every hypothesis passed and the mechanism produced
                        the contradiction, within the attached tolerances
    HypothesesNotMet    at least one hypothesis failed (each with a witness)
    Inconclusive        hypotheses hold but the mechanism did not conclude

Certifiers raise ValueError only for malformed requests (an exponent ladder
violating p > 1 − 2α, a sector outside the grid, a basis wider than the
grid). Profiles use the planar Boussinesq convention: V1, V2, W, H or H2 on
the upper half plane z² ≥ 0.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Sequence

import numpy as np

from config import get_default, get_p_ladder, get_thread_count
from models.schemas import CertificateReport, HypothesisCheck, RouteDecision
from tools.field_tools import (
    BicubicInterpolator,
    BumpTestFunction,
    Grid2D,
    ScalarField2D,
    Sector,
    derivative,
    line_integral,
    quadrature,
    sector_fractions,
)
from tools.flowline_tools import FlowLine, integrate_flowline
from tools.profile_tools import (
    BOUNDARY_POINT,
    SelfSimilarAnsatz,
    classify_regime,
    fit_decay,
    homogeneity_check,
    parity_defect,
)

logger = logging.getLogger(__name__)

ROUTES = {
    "velocity": "velocity-blowup-odd-limit",
    "homogeneity": "swirl-homogeneity",
    "independence": "swirl-independence",
    "boussinesq": "boussinesq-limit",
    "subcritical": "subcritical-euler-limit",
}


# =============================================================================
# Shared helpers
# =============================================================================


def _check(name: str, passed: bool, detail: str, witness: dict[str, Any] | None = None) -> HypothesisCheck:
    if not passed and not witness:
        witness = {"detail": detail}
    return HypothesisCheck(name=name, passed=bool(passed), detail=detail, witness=witness)


def _verdict(hypotheses: Sequence[HypothesisCheck], concluded: bool) -> str:
    if not all(h.passed for h in hypotheses):
        return "HypothesesNotMet"
    return "ContradictionFound" if concluded else "Inconclusive"


def _node_witness(ansatz: SelfSimilarAnsatz, node, value: float, **extra) -> dict[str, Any]:
    i, j = (int(x) for x in node)
    z1, z2 = ansatz.grid.z1[i], ansatz.grid.z2[j]
    return {"node": ansatz.mesh_index(i, j), "z": [float(z1), float(z2)], "value": float(value), **extra}


def _worst(values: np.ndarray, mask: np.ndarray, bad: np.ndarray):
    """Node of the most severe violation among ``mask & bad``."""
    sel = mask & bad
    if not sel.any():
        return None
    score = np.where(sel, np.abs(values), -np.inf)
    return np.unravel_index(int(np.argmax(score)), values.shape)


def _d1(ansatz: SelfSimilarAnsatz, values: np.ndarray) -> np.ndarray:
    return derivative(values, ansatz.grid.h1, 0)


def strict_maximum(values: np.ndarray, mask: np.ndarray, margin: float) -> tuple[tuple[int, int], float, float]:
    """
    Argmax of ``values`` over ``mask`` and the gap to its largest masked
    8-neighbour. The maximum is strict when the gap exceeds ``margin``.
    """
    masked = np.where(mask, values, -np.inf)
    node = np.unravel_index(int(np.argmax(masked)), values.shape)
    i, j = int(node[0]), int(node[1])
    best = -np.inf
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            a, b = i + di, j + dj
            if (di or dj) and 0 <= a < values.shape[0] and 0 <= b < values.shape[1] and mask[a, b]:
                best = max(best, float(values[a, b]))
    gap = float(values[i, j] - best) if math.isfinite(best) else math.inf
    return (i, j), float(values[i, j]), gap


# =============================================================================
# Sector integral test
# =============================================================================


def _sector_inside_grid(grid: Grid2D, sector: Sector) -> bool:
    pts = [(0.0, 0.0)]
    for theta in (sector.theta1, sector.theta2):
        for r in (sector.l1, sector.l2):
            pts.append((r * math.cos(theta), r * math.sin(theta)))
    return all(bool(grid.contains(a, b, slack=1e-12)) for a, b in pts)


def sector_integral_test(
    ansatz: SelfSimilarAnsatz,
    sector: Sector | None = None,
    p_ladder: Sequence[int] | None = None,
    margin: float | None = None,
) -> CertificateReport:
    """
    W^p-tested integral identity on a sector D between the rays θ₁ < θ₂:

        T₁ = ∫_D [(1 − 2(1−α)/(p+1)) W − ∂₁H²] W^p dz
        T₂, T₃ = outer / inner arc terms   (V_r l + (1−α) l²) W^{p+1}/(p+1)
        T₄, T₅ = ray terms on θ₂ / θ₁      V·(−sin θ, cos θ) W^{p+1}/(p+1)

    The identity T₁ + T₂ − T₃ + T₄ − T₅ = 0 holds for exact profiles. For
    large p the bulk term is positive near a strict maximum and the ray
    terms' (p+1)-th roots approach sup_r W on each ray; the contradiction is
    T₁ > 0 together with T₄ − T₅ > 0 at the top two rungs.

    All terms are divided by M^p, M = max_D W, so tiny profiles do not
    underflow; reported roots undo the scaling.
    """
    if sector is None:
        cfg = ansatz.sector
        if cfg is None:
            hyp = [_check("sector_declared", False, "no sector configured", {"sector": None})]
            return CertificateReport(
                proposition=ROUTES["boussinesq"], certifier="sector_integral_test", verdict="HypothesesNotMet",
                hypotheses=hyp,
            )
        sector = Sector(cfg.l1, cfg.l2, cfg.theta1, cfg.theta2)
        p_ladder = p_ladder or cfg.p
    p_ladder = sorted(p_ladder or get_p_ladder())
    alpha = ansatz.alpha
    for p in p_ladder:
        if p <= 1.0 - 2.0 * alpha:
            raise ValueError(f"p = {p} violates p > 1 - 2 alpha = {1.0 - 2.0 * alpha}")
    if not (0.0 < sector.theta1 < sector.theta2 < math.pi / 2):
        raise ValueError("sector angles must satisfy 0 < theta1 < theta2 < pi/2")
    g = ansatz.grid
    if not _sector_inside_grid(g, sector):
        raise ValueError(f"sector {sector} is not contained in the grid {g.bounds()}")
    margin = margin if margin is not None else get_default("certify", "integral_tol")
    strict_margin = get_default("certify", "strict_max_margin")
    nontrivial = get_default("profile", "nontrivial")

    W = ansatz.vorticity()
    V1, V2 = ansatz.sample("V1"), ansatz.sample("V2")
    dH2 = _d1(ansatz, ansatz.h2())
    z1, z2 = g.mesh()
    inside = sector.contains(z1, z2) & (z1 > 0.0) & (z2 > 0.0)
    M = float(np.max(np.where(inside, W, -np.inf))) if inside.any() else 0.0

    hyps: list[HypothesisCheck] = []
    hyps.append(_check("nontrivial", M > nontrivial, f"max_D W = {M:.6g}", {"max_W": M}))
    bad = _worst(V1, inside, V1 >= 0.0)
    hyps.append(_check("signs_V1", bad is None, "V1 < 0 in the sector",
                       _node_witness(ansatz, bad, V1[bad]) if bad is not None else None))
    bad = _worst(V2, inside, V2 <= 0.0)
    hyps.append(_check("signs_V2", bad is None, "V2 > 0 in the sector",
                       _node_witness(ansatz, bad, V2[bad]) if bad is not None else None))
    bad = _worst(dH2, inside, dH2 <= 0.0)
    hyps.append(_check("signs_dH2", bad is None, "d1 H^2 > 0 off the vertical axis",
                       _node_witness(ansatz, bad, dH2[bad]) if bad is not None else None))
    bad = _worst(W, inside, W < 0.0)
    hyps.append(_check("W_nonnegative", bad is None, "W >= 0 in the sector",
                       _node_witness(ansatz, bad, W[bad]) if bad is not None else None))

    if M > nontrivial:
        node, wmax, gap = strict_maximum(W, inside, strict_margin)
        hyps.append(_check("strict_max", gap > strict_margin, f"max exceeds neighbours by {gap:.3g}",
                           _node_witness(ansatz, node, wmax, gap=gap)))
        lead = wmax - float(dH2[node])
        hyps.append(_check("max_dominates_dH2", lead > 0.0, f"W(z0) - d1 H^2(z0) = {lead:.6g}",
                           _node_witness(ansatz, node, lead)))
    else:
        node = None

    # truncation: the outer arc must carry a strictly smaller W than the max
    thetas = np.linspace(sector.theta1, sector.theta2, get_default("certify", "ray_samples"))
    iw = BicubicInterpolator(g, W)
    iv1 = BicubicInterpolator(g, V1)
    iv2 = BicubicInterpolator(g, V2)
    arc_max = float(np.max(iw(sector.l2 * np.cos(thetas), sector.l2 * np.sin(thetas))))
    declared = ansatz.decay.get("W")
    tail_ok = arc_max <= 0.5 * M if M > 0 else False
    detail = f"max W on r = l2 is {arc_max:.3g} of max {M:.3g}"
    if declared is not None:
        expected = -1.0 / (1.0 - alpha)
        tail_ok = tail_ok and declared <= expected + get_default("profile", "decay_tolerance")
        detail += f"; declared decay {declared:g} vs {expected:g}"
    hyps.append(_check("decay_tail", tail_ok, detail, {"arc_max": arc_max, "max_W": M, "declared": declared}))

    if M <= nontrivial:
        report = CertificateReport(
            proposition=ROUTES["boussinesq"], certifier="sector_integral_test", verdict=_verdict(hyps, False),
            hypotheses=hyps, traces={"p": list(p_ladder)}, tolerances={"nontrivial": nontrivial},
        )
        return report

    fractions = sector_fractions(g, sector)
    rs = np.linspace(sector.l1, sector.l2, get_default("certify", "ray_samples"))
    Wn = np.clip(W / M, 0.0, None)

    def ray(theta: float):
        x, y = rs * math.cos(theta), rs * math.sin(theta)
        flux = -iv1(x, y) * math.sin(theta) + iv2(x, y) * math.cos(theta)
        return flux, np.clip(iw(x, y) / M, 0.0, None)

    def arc(l: float):
        x, y = l * np.cos(thetas), l * np.sin(thetas)
        vr = iv1(x, y) * np.cos(thetas) + iv2(x, y) * np.sin(thetas)
        return vr * l + (1.0 - alpha) * l * l, np.clip(iw(x, y) / M, 0.0, None)

    g2, w2 = ray(sector.theta2)
    g1, w1 = ray(sector.theta1)
    outer_g, outer_w = arc(sector.l2)
    inner_g, inner_w = arc(sector.l1)

    sup1, sup2 = float(np.max(w1)) * M, float(np.max(w2)) * M
    order_tol = get_default("certify", "ray_sup_tol")
    hyps.append(_check("ray_sup_order", sup2 >= sup1 - order_tol * max(sup1, sup2),
                       f"sup W on the theta2 ray is {sup2:.6g}, on the theta1 ray {sup1:.6g}",
                       {"theta1": sup1, "theta2": sup2}))

    rungs = []
    for p in p_ladder:
        bulk = ((1.0 - 2.0 * (1.0 - alpha) / (p + 1)) * W - dH2) * Wn**p
        T1 = quadrature(ScalarField2D(g, bulk), sector, fractions)
        T2 = M * line_integral(outer_g * outer_w ** (p + 1), thetas) / (p + 1)
        T3 = M * line_integral(inner_g * inner_w ** (p + 1), thetas) / (p + 1) if sector.l1 > 0.0 else 0.0
        T4 = M * line_integral(g2 * w2 ** (p + 1), rs) / (p + 1)
        T5 = M * line_integral(g1 * w1 ** (p + 1), rs) / (p + 1)

        def root(t: float, weight: float = 1.0) -> float | None:
            if t <= 0.0:
                return None
            return math.exp((math.log(weight * t) + p * math.log(M)) / (p + 1))

        total = T1 + T2 - T3 + T4 - T5
        scale = abs(T1) + abs(T2) + abs(T3) + abs(T4) + abs(T5)
        rungs.append({
            "p": p,
            "T1": T1, "T2": T2, "T3": T3, "T4": T4, "T5": T5,
            "root_T1": root(T1),
            "root_T4": root(T4, p + 1),
            "root_T5": root(T5, p + 1),
            "identity_total": total,
            "relative_residual": total / scale if scale > 0.0 else 0.0,
        })
        logger.debug("sector rung p=%d: T1=%.3e T4=%.3e T5=%.3e", p, T1, T4, T5)

    def decisive(r: dict) -> bool:
        r4, r5 = r["root_T4"], r["root_T5"]
        if r["T1"] <= 0.0 or r4 is None or r["T4"] - r["T5"] <= 0.0 or r["identity_total"] <= 0.0:
            return False
        return r5 is None or r4 > r5 * (1.0 + margin)

    top = rungs[-2:] if len(rungs) >= 2 else rungs
    outer = [r["T2"] for r in top]
    hyps.append(_check("outer_arc_nonnegative", min(outer) >= 0.0,
                       f"T2 at the top rungs {', '.join(f'{t:.3g}' for t in outer)}", {"T2": outer}))
    concluded = all(decisive(r) for r in top)
    trend = [r["root_T4"] for r in rungs]
    notes = []
    if not concluded:
        notes.append("bulk and ray inequalities not established at the top rungs")
    ray_sup = {"theta1": sup1, "theta2": sup2}
    verdict = _verdict(hyps, concluded)
    logger.info("sector_integral_test: %s", verdict)
    return CertificateReport(
        proposition=ROUTES["boussinesq"],
        certifier="sector_integral_test",
        verdict=verdict,
        hypotheses=hyps,
        traces={"rungs": rungs, "root_T4_trend": trend, "ray_sup": ray_sup, "max_W": M,
                "max_node": ansatz.mesh_index(*node) if node else None},
        tolerances={"root_margin": margin, "strict_max_margin": strict_margin, "nontrivial": nontrivial,
                    "ray_sup_tol": order_tol},
        notes=notes,
    )


# =============================================================================
# Rectangle flow-line test
# =============================================================================


def _max_location(i: int, j: int, lo_i: int, hi_i: int, lo_j: int, hi_j: int) -> str:
    left, right = i == lo_i, i == hi_i
    lower, upper = j == lo_j, j == hi_j
    if not (left or right or lower or upper):
        return "interior"
    if right and upper:
        return "corner_P3"
    if lower or left:
        return "lower_or_left_side"
    return "upper_side" if upper else "right_side"


QUALIFYING_LOCATIONS = ("interior", "upper_side", "right_side", "corner_P3")


def rectangle_flowline_test(
    ansatz: SelfSimilarAnsatz,
    rectangle: tuple[float, float, float, float] | None = None,
    tolerance: float = 1e-10,
) -> CertificateReport:
    """
    Backward flow from the strict maximum of W in a rectangle D.

    Along dz/ds = V + (1−α)z the profile equation gives dW/ds = ∂₁H² − W ≤ 0
    in D, so W does not decrease backward. The field makes an acute angle
    with the positive z¹ axis, so a backward line from a maximum in the
    interior, on the open upper or right side, or at the upper-right corner
    stays in D for a while, contradicting strictness of the maximum.

    Args:
        rectangle: (a1, b1, a2, b2) = [a1, b1] × [a2, b2]; defaults to the
            ansatz's declared rectangle
    """
    if rectangle is None:
        cfg = ansatz.rectangle
        if cfg is None:
            hyp = [_check("rectangle_declared", False, "no rectangle configured", {"rectangle": None})]
            return CertificateReport(
                proposition=ROUTES["boussinesq"], certifier="rectangle_flowline_test",
                verdict="HypothesesNotMet", hypotheses=hyp,
            )
        rectangle = (cfg.a1, cfg.b1, cfg.a2, cfg.b2)
    a1, b1, a2, b2 = (float(x) for x in rectangle)
    if not (0.0 <= a1 < b1 and 0.0 <= a2 < b2):
        raise ValueError(f"rectangle must lie in the closed first quadrant with a < b, got {rectangle}")
    g = ansatz.grid
    if not (g.contains(a1, a2, slack=1e-12) and g.contains(b1, b2, slack=1e-12)):
        raise ValueError(f"rectangle {rectangle} is not contained in the grid {g.bounds()}")
    alpha = ansatz.alpha
    margin = get_default("certify", "strict_max_margin")

    W = ansatz.vorticity()
    V1, V2 = ansatz.sample("V1"), ansatz.sample("V2")
    H2 = ansatz.h2()
    dH2 = _d1(ansatz, H2)
    z1, z2 = g.mesh()
    slack = 1e-9 * max(g.h1, g.h2)
    in_d = (z1 >= a1 - slack) & (z1 <= b1 + slack) & (z2 >= a2 - slack) & (z2 <= b2 + slack)
    if not in_d.any():
        raise ValueError("rectangle contains no grid nodes")
    idx_i = np.flatnonzero(in_d.any(axis=1))
    idx_j = np.flatnonzero(in_d.any(axis=0))

    hyps: list[HypothesisCheck] = []
    bad = _worst(W, in_d, W < 0.0)
    hyps.append(_check("W_nonnegative", bad is None, "W >= 0 in D",
                       _node_witness(ansatz, bad, W[bad]) if bad is not None else None))
    bad = _worst(W - dH2, in_d, W < dH2)
    hyps.append(_check("W_dominates_dH2", bad is None, "W >= d1 H^2 in D",
                       _node_witness(ansatz, bad, (W - dH2)[bad]) if bad is not None else None))
    drift = V1 + (1.0 - alpha) * z1
    bad = _worst(drift, in_d & (z1 > 0.0), drift <= 0.0)
    hyps.append(_check("drift_positive", bad is None, "V1 + (1-alpha) z1 > 0 off the axis",
                       _node_witness(ansatz, bad, drift[bad]) if bad is not None else None))
    bad = _worst(V2, in_d & (z2 > 0.0), V2 <= 0.0)
    hyps.append(_check("V2_positive", bad is None, "V2 > 0 in D",
                       _node_witness(ansatz, bad, V2[bad]) if bad is not None else None))

    node, wmax, gap = strict_maximum(W, in_d, margin)
    location = _max_location(node[0], node[1], idx_i[0], idx_i[-1], idx_j[0], idx_j[-1])
    hyps.append(_check("nontrivial", wmax > get_default("profile", "nontrivial"), f"max_D W = {wmax:.6g}",
                       _node_witness(ansatz, node, wmax)))
    hyps.append(_check("strict_max", gap > margin, f"max exceeds neighbours by {gap:.3g}",
                       _node_witness(ansatz, node, wmax, gap=gap)))
    hyps.append(_check("max_location", location in QUALIFYING_LOCATIONS, f"maximum at {location}",
                       _node_witness(ansatz, node, wmax, location=location)))

    traces: dict[str, Any] = {"max_node": ansatz.mesh_index(*node), "max_value": wmax, "location": location}
    concluded = False
    if all(h.passed for h in hyps):
        iv1, iv2, idh = (BicubicInterpolator(g, a) for a in (V1, V2, dH2))
        iw = BicubicInterpolator(g, W)
        z0 = (float(g.z1[node[0]]), float(g.z2[node[1]]))
        speed = math.hypot(float(iv1(*z0)) + (1 - alpha) * z0[0], float(iv2(*z0)) + (1 - alpha) * z0[1])
        step = -0.1 * min(g.h1, g.h2) / max(speed, 1e-12)

        def field(x: float, y: float):
            return float(iv1(x, y)) + (1.0 - alpha) * x, float(iv2(x, y)) + (1.0 - alpha) * y

        line = integrate_flowline(
            field, z0, step, horizon=20 * abs(step),
            inside=lambda x, y: a1 - slack <= x <= b1 + slack and a2 - slack <= y <= b2 + slack,
            carry=lambda x, y, w: np.array([float(idh(x, y)) - w[0]]),
            carry0=(wmax,), carry_names=("W_ode",),
            sample=lambda x, y: float(iw(x, y)),
        )
        w_ode = line.carried["W_ode"]
        w_line = line.values
        # backward in s: the equation keeps W at or above W(z0)
        monotone = bool(np.all(np.diff(w_ode) >= -tolerance))
        stays = len(line) > 1
        # the sampled W must fall below W(z0) off the maximum
        drop = float(wmax - np.min(w_line[1:])) if stays else 0.0
        concluded = stays and monotone and drop > tolerance
        traces.update({
            "flowline": line.witness(),
            "W_ode": w_ode.tolist(),
            "W_sampled": w_line.tolist(),
            "ode_monotone": monotone,
            "sampled_drop": drop,
            "ode_minus_sampled": float(np.max(w_ode - w_line)),
            "steps_inside": len(line) - 1,
        })
    verdict = _verdict(hyps, concluded)
    logger.info("rectangle_flowline_test: %s (max at %s)", verdict, location)
    return CertificateReport(
        proposition=ROUTES["boussinesq"],
        certifier="rectangle_flowline_test",
        verdict=verdict,
        hypotheses=hyps,
        traces=traces,
        tolerances={"strict_max_margin": margin, "monotone_tol": tolerance},
        notes=([] if concluded or verdict == "HypothesesNotMet"
               else ["backward line did not leave the maximum level in D"]),
    )


def screen_rectangles(
    W: np.ndarray,
    grid: Grid2D,
    offset: tuple[int, int] = (0, 0),
    cells: int = 2,
    margin: float = 0.0,
) -> list[dict[str, Any]]:
    """
    Mesh rectangles of ``cells`` × ``cells`` cells in the open first quadrant
    whose strict maximum of W (W ≥ 0 throughout) lies in the qualifying set.
    """
    W = np.asarray(W, dtype=float)
    z1, z2 = grid.z1, grid.z2
    found = []
    for i in range(W.shape[0] - cells):
        if z1[i] <= 0.0:
            continue
        for j in range(W.shape[1] - cells):
            if z2[j] <= 0.0:
                continue
            block = W[i:i + cells + 1, j:j + cells + 1]
            if block.min() < 0.0:
                continue
            flat = int(np.argmax(block))
            bi, bj = divmod(flat, cells + 1)
            top = block[bi, bj]
            rest = np.delete(block.ravel(), flat)
            if not top > rest.max() + margin:
                continue
            location = _max_location(bi, bj, 0, cells, 0, cells)
            if location not in QUALIFYING_LOCATIONS:
                continue
            oi, oj = i + offset[0], j + offset[1]
            found.append({
                "corners": [[oi, oj], [oi + cells, oj], [oi + cells, oj + cells], [oi, oj + cells]],
                "max_node": [oi + bi, oj + bj],
                "max_value": float(top),
                "location": location,
            })
    return found


# =============================================================================
# Singular flow-line test (strip)
# =============================================================================


def _row_zero_curve(row_d: np.ndarray, z1: np.ndarray, tol: float, allow_last_max: bool = False):
    """
    Sign pattern of ∂₁W along a row (z¹ > 0). Returns (ok, bracket index or
    None, number of sign changes).
    """
    pos = np.flatnonzero(z1 > 0.0)
    signs = [(k, 1 if row_d[k] > tol else -1) for k in pos if abs(row_d[k]) > tol]
    changes = [(a[0], b[0], a[1], b[1]) for a, b in zip(signs, signs[1:]) if a[1] != b[1]]
    if not changes:
        return True, None, 0
    last = changes[-1]
    if len(changes) == 1 or allow_last_max:
        ok = last[2] > 0 > last[3]
        return ok, (last[0], last[1]), len(changes)
    return False, (last[0], last[1]), len(changes)


def _bisect(fn: Callable[[float], float], lo: float, hi: float, iterations: int = 60) -> float:
    flo = fn(lo)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def singular_flowline_test(
    ansatz: SelfSimilarAnsatz,
    l0: float | None = None,
    seeds: int | None = None,
    tau_horizon: float | None = None,
    tau_step: float | None = None,
    allow_last_max: bool = False,
    threads: int | None = None,
) -> CertificateReport:
    """
    Backward flow lines in self-similar variables on the strip 0 ≤ z² ≤ l₀.

    With τ = −ln(1−t) the lines of the rewritten vorticity equation obey the
    autonomous system

        dz̃¹/dτ = V¹ + ∂₁H²/∂₁W + (1−α) z̃¹,   dz̃²/dτ = V² + (1−α) z̃²,

    singular only on the curve z¹ = L(z²) where ∂₁W vanishes. The drift runs
    to −∞ just right of the curve and +∞ just left of it, so lines cannot
    cross it. Lines reaching the left side (where W vanishes by oddness) or
    persisting to the parameter horizon force ω = 0 at their seeds; with
    H² > 0 far out this is a contradiction. Persistence is checked up to the
    finite horizon only.
    """
    g = ansatz.grid
    alpha = ansatz.alpha
    l0 = l0 if l0 is not None else (ansatz.strip.l0 if ansatz.strip else g.max2)
    if not (0.0 < l0 <= g.max2 + 1e-12) or g.min2 > 0.0 or g.min1 > 0.0:
        raise ValueError(f"strip 0 <= z2 <= {l0} must lie inside the grid {g.bounds()} with z1 = 0 included")
    seeds = seeds or (ansatz.strip.seeds if ansatz.strip and ansatz.strip.seeds else None) or get_default(
        "certify", "seed_count")
    tau_horizon = tau_horizon or get_default("certify", "tau_horizon")
    tau_step = tau_step or get_default("certify", "tau_step")
    tol = get_default("profile", "parity_tol_ingested" if ansatz.ingested else "parity_tol_analytic")

    W = ansatz.vorticity()
    V1, V2 = ansatz.sample("V1"), ansatz.sample("V2")
    H2 = ansatz.h2()
    dW = _d1(ansatz, W)
    dH2 = _d1(ansatz, H2)
    z1, z2 = g.mesh()
    strip = (z2 >= 0.0) & (z2 <= l0 + 1e-12) & (z1 >= 0.0)
    hyps: list[HypothesisCheck] = []

    # (a) oddness in z1: W and H^2 vanish on the left side, declared parities hold
    left = np.flatnonzero(np.isclose(g.z1, 0.0, atol=1e-12))
    if left.size:
        col = left[0]
        rows = np.flatnonzero(g.z2 <= l0 + 1e-12)
        lw = float(np.max(np.abs(W[col, rows])))
        lh = float(np.max(np.abs(H2[col, rows])))
        hyps.append(_check("left_side_zero", max(lw, lh) <= tol, f"max |W|, |H^2| on z1 = 0: {lw:.3g}, {lh:.3g}",
                           {"max_W": lw, "max_H2": lh}))
    for name, want in (("V1", "odd"), ("V2", "even"), ("H", "odd"), ("H2", "even")):
        declared = ansatz.parities.get(name, {}).get("z1")
        if declared is None or not ansatz.has(name):
            continue
        res = parity_defect(ansatz, name, 0, declared)
        if res is None:
            continue
        defect, node = res
        hyps.append(_check(f"parity_{name}", declared == want and defect <= tol,
                           f"{name} declared {declared} in z1 (needs {want}), defect {defect:.3g}",
                           _node_witness(ansatz, node, defect, declared=declared)))

    # (b) growth bounds
    speed = np.hypot(V1, V2)
    for label, values, bound in (
        ("growth_V", speed, alpha / (alpha - 1.0)),
        ("growth_H2", np.abs(H2), 2.0 * (alpha + ansatz.beta) / (alpha - 1.0)),
    ):
        try:
            slope, _ = fit_decay(values, g)
        except ValueError:
            hyps.append(_check(label, True, "too few nonzero samples for a growth fit"))
            continue
        ok = slope <= bound + get_default("profile", "decay_tolerance")
        hyps.append(_check(label, ok, f"fitted exponent {slope:.3g}, bound {bound:.3g}",
                           {"exponent": slope, "bound": bound}))

    # (c) inflow at the top of the strip
    top = int(np.argmin(np.abs(g.z2 - l0)))
    row = V2[:, top]
    k = int(np.argmin(row))
    hyps.append(_check("top_inflow", row[k] >= -tol, "V2 >= 0 on the top of the strip",
                       _node_witness(ansatz, (k, top), row[k])))

    # (d) one zero curve of d1 W per row
    curve: list[tuple[int, float]] = []
    iwd = BicubicInterpolator(g, W)
    bad_row = None
    for j in np.flatnonzero(g.z2 <= l0 + 1e-12):
        ok, bracket, count = _row_zero_curve(dW[:, j], g.z1, tol, allow_last_max)
        if not ok:
            bad_row = (int(j), count, bracket)
            break
        if bracket is not None:
            y = float(g.z2[j])
            L = _bisect(lambda x: float(iwd.partial(x, y, 0)), float(g.z1[bracket[0]]), float(g.z1[bracket[1]]))
            curve.append((int(j), L))
    hyps.append(_check(
        "single_zero_curve", bad_row is None,
        "d1 W changes sign at most once per row, from + to -" if bad_row is None
        else f"row {bad_row[0]}: {bad_row[1]} sign changes",
        {"row": ansatz.mesh_index(0, bad_row[0])[1], "sign_changes": bad_row[1]} if bad_row else None,
    ))

    # (e) d1 H^2 >= 0 in a collar around the curve, sub-linear ratio
    collar_nodes = 2
    bad = None
    for j, L in curve:
        near = np.flatnonzero(np.abs(g.z1 - L) <= collar_nodes * g.h1)
        for i in near:
            if dH2[i, j] < -tol and (bad is None or dH2[i, j] < dH2[bad]):
                bad = (int(i), int(j))
    hyps.append(_check("collar_dH2_nonnegative", bad is None, "d1 H^2 >= 0 near the zero curve",
                       _node_witness(ansatz, bad, dH2[bad]) if bad is not None else None))
    ratio = np.where(np.abs(dW) > tol, np.abs(dH2) / np.maximum(np.abs(dW), tol), 0.0)
    try:
        slope, _ = fit_decay(np.where(strip, ratio, 0.0), g)
        hyps.append(_check("sublinear_ratio", slope < 1.0, f"|d1 H^2 / d1 W| grows like r^{slope:.3g}",
                           {"exponent": slope}))
    except ValueError:
        hyps.append(_check("sublinear_ratio", True, "ratio vanishes in the outer annulus"))

    # H^2 > 0 far out along the strip
    right = g.n1 - 1
    rows = np.flatnonzero(g.z2 <= l0 + 1e-12)
    far = H2[right, rows]
    kf = int(np.argmin(far))
    hyps.append(_check("h2_positive_far", bool(np.all(far > 0.0)), "H^2 > 0 on the right edge of the strip",
                       _node_witness(ansatz, (right, rows[kf]), far[kf])))

    traces: dict[str, Any] = {"curve": [[float(g.z2[j]), L] for j, L in curve]}
    concluded = False
    if all(h.passed for h in hyps):
        iv1, iv2, ih = (BicubicInterpolator(g, a) for a in (V1, V2, H2))

        def drift(x: float, y: float) -> float:
            d = float(iwd.partial(x, y, 0))
            if d == 0.0:
                return math.nan
            return float(iv1(x, y)) + float(ih.partial(x, y, 0)) / d + (1.0 - alpha) * x

        # collar drift signs: − just right of the curve, + just left
        collar_pts = get_default("certify", "collar_points")
        picks = curve if len(curve) <= collar_pts else [curve[int(k)] for k in
                                                         np.linspace(0, len(curve) - 1, collar_pts)]
        collar = []
        collar_ok = True
        for j, L in picks:
            y = float(g.z2[j])
            for delta in (0.25 * g.h1, 0.0625 * g.h1):
                rs, ls = drift(L + delta, y), drift(max(L - delta, 0.0), y)
                good = rs < 0.0 < ls
                collar_ok &= bool(good)
                collar.append({"z2": y, "L": L, "delta": delta, "right": rs, "left": ls, "ok": bool(good)})
        traces["collar"] = collar

        def field(x: float, y: float):
            return drift(x, y), float(iv2(x, y)) + (1.0 - alpha) * y

        k1 = max(1, int(round(math.sqrt(seeds))))
        k2 = max(1, int(math.ceil(seeds / k1)))
        xs = np.linspace(g.max1 / (k1 + 1), g.max1 * k1 / (k1 + 1), k1)
        ys = np.linspace(0.0, l0, k2 + 2)[1:-1] if k2 > 1 else np.array([0.5 * l0])
        seed_pts = [(float(x), float(y)) for x in xs for y in ys][:seeds]
        on_curve = {j: L for j, L in curve}

        def run(seed):
            return integrate_flowline(
                field, seed, -tau_step, tau_horizon,
                inside=lambda x, y: -1e-12 <= x <= g.max1 and -1e-12 <= y <= l0 + 1e-12,
                at_boundary=lambda x, y: x <= 0.0,
                sample=lambda x, y: float(iwd(x, y)),
            )

        workers = threads or get_thread_count()
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                lines: list[FlowLine] = list(pool.map(run, seed_pts))
        else:
            lines = [run(s) for s in seed_pts]
        resolved = [ln.termination in ("ReachedBoundary", "ParameterLimit") for ln in lines]
        traces["seeds"] = [
            {"seed": list(s), "termination": ln.termination, "end": list(ln.end), "samples": len(ln)}
            for s, ln in zip(seed_pts, lines)
        ]
        traces["flowlines"] = [ln.witness(every=max(1, len(ln) // 50)) for ln in lines]
        traces["curve_rows"] = len(on_curve)
        concluded = collar_ok and all(resolved)
    verdict = _verdict(hyps, concluded)
    logger.info("singular_flowline_test: %s", verdict)
    return CertificateReport(
        proposition=ROUTES["boussinesq"],
        certifier="singular_flowline_test",
        verdict=verdict,
        hypotheses=hyps,
        traces=traces,
        tolerances={"zero_tol": tol, "tau_horizon": tau_horizon, "tau_step": tau_step},
        notes=[f"backward persistence checked up to tau = -{tau_horizon:g}"],
    )


# =============================================================================
# Base sign tests
# =============================================================================


def base_sign_tests(
    ansatz: SelfSimilarAnsatz,
    zero_tol: float | None = None,
    allow_last_max: bool = False,
) -> CertificateReport:
    """
    Zeros and negative values of W that the base equations forbid.

    On the base z² = 0 the flow keeps z² = 0 and W, H² solve a linear ODE
    pair whose non-trivial solutions have no zero on z¹ > 0: a zero of W
    there forces ω = h² = 0 on the base. Backward flow lines from a node with
    W < 0 in the open quadrant keep W negative until they reach an axis,
    where W ≥ 0. Both findings contradict H² > 0 on the positive axis.

    Args:
        zero_tol: |W| on the base at or below ``zero_tol`` times max|W| there
            is a zero; defaults to ``certify.base_zero_tol``
    """
    g = ansatz.grid
    alpha = ansatz.alpha
    base = np.flatnonzero(np.isclose(g.z2, 0.0, atol=1e-12))
    if not base.size:
        raise ValueError("the grid has no base row z2 = 0")
    jb = int(base[0])
    W = ansatz.vorticity()
    V1 = ansatz.sample("V1")
    H2 = ansatz.h2()
    dH2 = _d1(ansatz, H2)
    pos = np.flatnonzero(g.z1 > 0.0)
    zb = g.z1[pos]
    drift = V1[pos, jb] + (1.0 - alpha) * zb

    hyps: list[HypothesisCheck] = []
    k = int(np.argmin(drift))
    hyps.append(_check("drift_positive_base", bool(np.all(drift > 0.0)), "V1 + (1-alpha) z1 > 0 on the base",
                       _node_witness(ansatz, (pos[k], jb), drift[k])))
    db = dH2[pos, jb]
    k = int(np.argmin(db))
    hyps.append(_check("dH2_nonnegative_base", bool(np.all(db >= -1e-12)), "d1 H^2 >= 0 on the base",
                       _node_witness(ansatz, (pos[k], jb), db[k])))
    hb = H2[pos, jb]
    k = int(np.argmin(hb))
    hyps.append(_check("h2_positive_base", bool(np.all(hb > 0.0)), "H^2 > 0 on the positive axis",
                       _node_witness(ansatz, (pos[k], jb), hb[k])))

    findings: list[dict[str, Any]] = []
    notes: list[str] = []
    wb = W[pos, jb]
    zero_tol = zero_tol if zero_tol is not None else get_default("certify", "base_zero_tol")
    zero_level = zero_tol * float(np.max(np.abs(wb)))
    small = np.abs(wb) <= zero_level
    for n in np.flatnonzero(small):
        findings.append({"kind": "extra_zero", **_node_witness(ansatz, (pos[n], jb), wb[n])})
    for n in np.flatnonzero((wb[:-1] * wb[1:] < 0.0) & ~small[:-1] & ~small[1:]):
        findings.append({
            "kind": "extra_zero",
            "node": ansatz.mesh_index(pos[n], jb),
            "z": [float(0.5 * (zb[n] + zb[n + 1])), 0.0],
            "value": float(wb[n]),
            "bracket": [float(zb[n]), float(zb[n + 1])],
        })

    traces: dict[str, Any] = {}
    if allow_last_max:
        dwb = np.diff(wb)
        extrema = []
        for n in range(1, len(dwb)):
            if dwb[n - 1] > 0 >= dwb[n]:
                extrema.append({"z1": float(zb[n]), "kind": "max", "value": float(wb[n])})
            elif dwb[n - 1] < 0 <= dwb[n]:
                extrema.append({"z1": float(zb[n]), "kind": "min", "value": float(wb[n])})
        traces["extrema"] = extrema
        if extrema and extrema[-1]["kind"] == "max":
            notes.append(f"last base extremum is a maximum at z1 = {extrema[-1]['z1']:g}")
            if all(h.passed for h in hyps):
                findings.extend(_relaxed_base_flow(ansatz, jb, extrema[-1]["z1"]))
        elif extrema:
            notes.append("last base extremum is a minimum; relaxed argument does not apply")

    if ansatz.base_only:
        notes.append("base-only profiles: open-quadrant scan skipped")
    else:
        z1, z2 = g.mesh()
        quad = (z1 > 0.0) & (z2 > 0.0)
        neg = np.argwhere(quad & (W < 0.0))
        if neg.size:
            iv1, iv2, idh, iw = (BicubicInterpolator(g, a) for a in (V1, ansatz.sample("V2"), dH2, W))
            order = sorted(neg.tolist(), key=lambda ij: W[ij[0], ij[1]])
            for i, j in order[:8]:
                seed = (float(g.z1[i]), float(g.z2[j]))
                line = integrate_flowline(
                    lambda x, y: (float(iv1(x, y)) + (1 - alpha) * x, float(iv2(x, y)) + (1 - alpha) * y),
                    seed, -0.5 * min(g.h1, g.h2), horizon=10.0,
                    inside=lambda x, y: g.contains(x, y, slack=1e-12),
                    at_boundary=lambda x, y: x <= 0.0 or y <= 0.0,
                    carry=lambda x, y, w: np.array([float(idh(x, y)) - w[0]]),
                    carry0=(float(W[i, j]),), carry_names=("W_ode",),
                    sample=lambda x, y: float(iw(x, y)),
                )
                x_end, y_end = line.end
                w_end = float(line.values[-1])
                w_ode_end = float(line.carried["W_ode"][-1])
                # the line must end on or within a mesh step of an axis, still negative by the
                # equation, where the data have W >= 0
                at_axis = line.termination == "ReachedBoundary" or x_end <= g.h1 or y_end <= g.h2
                findings.append({
                    "kind": "negative_w", **_node_witness(ansatz, (i, j), W[i, j]),
                    "termination": line.termination, "end": [x_end, y_end],
                    "W_end": w_end, "W_ode_end": w_ode_end,
                    "resolved": bool(at_axis and w_ode_end < 0.0 and w_end >= -zero_level),
                    "flowline": line.witness(every=max(1, len(line) // 25)),
                })
            if len(order) > 8:
                notes.append(f"{len(order)} negative nodes; flow lines traced for the 8 most negative")

    unresolved = [f for f in findings if f["kind"] == "negative_w" and not f["resolved"]]
    concluded = len(findings) > len(unresolved)
    if not findings:
        notes.append("no extra base zeros and no negative W found")
    elif unresolved:
        notes.append(f"{len(unresolved)} negative-W lines did not end at an axis with W >= 0")
    verdict = _verdict(hyps, concluded)
    logger.info("base_sign_tests: %s (%d findings)", verdict, len(findings))
    return CertificateReport(
        proposition=ROUTES["boussinesq"],
        certifier="base_sign_tests",
        verdict=verdict,
        hypotheses=hyps,
        traces=traces,
        tolerances={"zero_tol": zero_tol, "zero_level": zero_level},
        findings=findings,
        notes=notes,
    )


def _relaxed_base_flow(ansatz: SelfSimilarAnsatz, jb: int, z_max: float) -> list[dict[str, Any]]:
    """Base lines seeded right of the last maximum that persist or reach the origin."""
    g = ansatz.grid
    alpha = ansatz.alpha
    y = float(g.z2[jb])
    iv1 = BicubicInterpolator(g, ansatz.sample("V1"))
    iw = BicubicInterpolator(g, ansatz.vorticity())
    ih = BicubicInterpolator(g, ansatz.h2())

    def field(x: float, _y: float):
        d = float(iw.partial(x, y, 0))
        if d == 0.0:
            return math.nan, 0.0
        return float(iv1(x, y)) + float(ih.partial(x, y, 0)) / d + (1.0 - alpha) * x, 0.0

    out = []
    for x0 in np.linspace(z_max, g.max1, 5)[1:-1]:
        line = integrate_flowline(
            field, (float(x0), y), -get_default("certify", "tau_step"), get_default("certify", "tau_horizon"),
            inside=lambda x, _y: 0.0 <= x <= g.max1, at_boundary=lambda x, _y: x <= 0.0,
        )
        if line.termination in ("ReachedBoundary", "ParameterLimit"):
            out.append({"kind": "relaxed_base_flow", "seed": [float(x0), y], "termination": line.termination})
    return out


# =============================================================================
# Swirl independence and homogeneity
# =============================================================================


def default_basis(grid: Grid2D, m: int) -> list[BumpTestFunction]:
    """
    m bumps centred on a k × k lattice of nodes (row-major), k = ⌈√m⌉, each
    vanishing on the two outermost rows and columns.
    """
    k = int(math.ceil(math.sqrt(m)))
    radius = min((grid.n1 - 3) // (k + 1) * grid.h1, (grid.n2 - 3) // (k + 1) * grid.h2)
    if radius <= 0.0:
        raise ValueError(f"grid {grid.shape} is too coarse for a {k} x {k} bump lattice")
    centres = []
    for z, n, h in ((grid.z1, grid.n1, grid.h1), (grid.z2, grid.n2, grid.h2)):
        reach = int(math.ceil(radius / h - 1e-9))
        idx = np.rint(np.linspace(1 + reach, n - 2 - reach, k)).astype(int)
        centres.append(z[idx])
    return [BumpTestFunction((float(a), float(b)), radius) for a in centres[0] for b in centres[1]][:m]


def _d2_zero_extended(values: np.ndarray, h: float) -> np.ndarray:
    pad = np.pad(values, ((0, 0), (1, 1)))
    return (pad[:, 2:] - pad[:, :-2]) / (2.0 * h)


def theta_independence_test(
    theta2: ScalarField2D,
    m: int = 25,
    odd_in_z2: bool = False,
    basis: Sequence[BumpTestFunction] | None = None,
    tolerance: float | None = None,
) -> CertificateReport:
    """
    I_i = ∫ Θ² (−∂₂f_i) over a bump basis. All I_i vanishing means ∂₂Θ² = 0
    weakly; with Θ odd in z² that forces Θ ≡ 0.

    ∂₂f is the central difference of f extended by zero, so summation by
    parts gives I_i = h₁h₂ Σ f_i D₂(Θ²) exactly with the central D₂ of the
    direct check, as long as f vanishes on the two outermost rows.
    """
    if m < 4:
        raise ValueError(f"basis size must be >= 4, got {m}")
    g = theta2.grid
    basis = list(basis) if basis is not None else default_basis(g, m)
    for n, f in enumerate(basis):
        if not f.fits_inside(g, margin_nodes=1):
            raise ValueError(f"basis function {n} (centre {f.center}, radius {f.radius}) exceeds the grid")
    tolerance = tolerance if tolerance is not None else get_default("certify", "integral_tol")
    nontrivial = get_default("profile", "nontrivial")
    sq = theta2.values
    cell = g.h1 * g.h2

    integrals, scales = [], []
    for f in basis:
        d2f = _d2_zero_extended(f.sample(g).values, g.h2)
        integrals.append(float(-cell * np.sum(sq * d2f)))
        scales.append(float(cell * np.sum(np.abs(sq * d2f))))
    offenders = [
        {"index": n, "integral": I, "scale": s}
        for n, (I, s) in enumerate(zip(integrals, scales))
        if abs(I) > tolerance * max(s, nontrivial)
    ]
    independent = not offenders
    direct = float(np.max(np.abs(derivative(sq, g.h2, 1))))

    hyps = [
        _check("nontrivial", theta2.sup() > nontrivial, f"sup Theta^2 = {theta2.sup():.3g}",
               {"sup": theta2.sup()}),
        _check("odd_in_z2", odd_in_z2, "Theta declared odd in z2", {"declared": odd_in_z2}),
    ]
    verdict = _verdict(hyps, independent)
    logger.info("theta_independence_test: %s (%d offenders)", verdict, len(offenders))
    return CertificateReport(
        proposition=ROUTES["independence"],
        certifier="theta_independence_test",
        verdict=verdict,
        hypotheses=hyps,
        traces={"integrals": integrals, "independent": independent, "direct_max_d2": direct,
                "basis": [{"center": list(f.center), "radius": f.radius} for f in basis]},
        tolerances={"relative": tolerance},
        findings=offenders,
        notes=[] if independent else ["Theta^2 depends on z2: independence rejected"],
    )


def theta_independence_for_ansatz(ansatz: SelfSimilarAnsatz, m: int = 25) -> CertificateReport:
    theta = ansatz.sample("Theta")
    odd = ansatz.parities.get("Theta", {}).get("z2") == "odd"
    return theta_independence_test(ScalarField2D(ansatz.grid, theta**2), m=m, odd_in_z2=odd)


def homogeneity_test(ansatz: SelfSimilarAnsatz) -> CertificateReport:
    """
    The swirl-only limit is stationary, so Θ must be homogeneous of degree
    α/(1−α) < 0 and hence singular at the origin; a bounded non-trivial Θ
    that fails homogeneity, or is homogeneous yet bounded, is a contradiction.
    """
    degree = ansatz.alpha / (1.0 - ansatz.alpha)
    theta = ansatz.scalar("Theta")
    result = homogeneity_check(theta, degree)
    hyps = [
        _check("nontrivial", result.verdict != "trivial", f"sup |Theta| = {theta.sup():.3g}", {"sup": theta.sup()}),
        _check("locally_bounded", result.verdict != "singular_at_origin",
               "Theta bounded near the origin", {"verdict": result.verdict}),
    ]
    concluded = result.verdict in ("rejected", "inconsistent")
    return CertificateReport(
        proposition=ROUTES["homogeneity"],
        certifier="homogeneity_test",
        verdict=_verdict(hyps, concluded),
        hypotheses=hyps,
        traces={"degree": degree, "defect": result.defect, "relative_defect": result.relative_defect,
                "lambdas": list(result.lambdas), "homogeneity": result.verdict},
        tolerances={"homogeneity": get_default("profile", "homogeneity_tol")},
        notes=list(result.notes),
    )


# =============================================================================
# Odd vertical limit
# =============================================================================


def odd_limit_test(ansatz: SelfSimilarAnsatz) -> CertificateReport:
    """
    Blow-up at a fixed boundary point: the rescaled limit is the shear
    v = (0, c/(1−t)^α) with c the vertical profile at the centre. A vertical
    profile odd in x³ vanishes on x³ = 0, so c = 0, contradicting |ṽ(0,0)| = 1.
    """
    tol = get_default("profile", "parity_tol_ingested" if ansatz.ingested else "parity_tol_analytic")
    nontrivial = get_default("profile", "nontrivial")
    name = "V3"
    v3 = ansatz.profile(name)
    res = parity_defect(ansatz, name, 1, "odd")
    hyps = []
    if res is None:
        hyps.append(_check("odd_vertical", False, "grid not symmetric in x3; oddness not checkable",
                           {"profile": name}))
    else:
        defect, node = res
        hyps.append(_check("odd_vertical", defect <= tol, f"oddness defect {defect:.3g}",
                           _node_witness(ansatz, node, defect)))
    sup = float(np.max(np.abs(ansatz.sample(name))))
    hyps.append(_check("nontrivial", sup > nontrivial, f"sup |V3| = {sup:.3g}", {"sup": sup}))
    g = ansatz.grid
    # the centre sits on x³ = 0: at (1, 0) in physical coordinates, the origin otherwise
    z1c = BOUNDARY_POINT[0] if ansatz.variant == "centered-boundary" else 0.0
    point = (min(max(z1c, g.min1), g.max1), min(max(0.0, g.min2), g.max2))
    c = float(v3(*point))
    concluded = abs(c) <= max(tol, nontrivial)
    verdict = _verdict(hyps, concluded)
    return CertificateReport(
        proposition=ROUTES["velocity"] if ansatz.alpha > 0.0 else ROUTES["subcritical"],
        certifier="odd_limit_test",
        verdict=verdict,
        hypotheses=hyps,
        traces={"limit_constant": c, "evaluated_at": list(point)},
        tolerances={"parity": tol},
        notes=[] if concluded else ["limit constant is nonzero; no contradiction with the normalization"],
    )


# =============================================================================
# Routing and execution
# =============================================================================


CERTIFIERS: dict[str, Callable[[SelfSimilarAnsatz], CertificateReport]] = {
    "sector_integral_test": sector_integral_test,
    "rectangle_flowline_test": rectangle_flowline_test,
    "singular_flowline_test": singular_flowline_test,
    "base_sign_tests": base_sign_tests,
    "theta_independence_test": theta_independence_for_ansatz,
    "homogeneity_test": homogeneity_test,
    "odd_limit_test": odd_limit_test,
}


def route_proposition(ansatz: SelfSimilarAnsatz) -> RouteDecision:
    """Deterministic routing from regime, family and center to the certifiers to run."""
    regime = classify_regime(ansatz.alpha, ansatz.beta)
    base = {"regime": regime.tag, "discriminant": regime.discriminant}
    if regime.tag == "VelocityBlowup":
        if ansatz.center != "boundary":
            return RouteDecision(proposition="none", certifiers=[], **base,
                                 rationale="interior centre: the full-plane limit has no certifier")
        return RouteDecision(proposition=ROUTES["velocity"], certifiers=["odd_limit_test"], **base,
                             rationale="boundary centre: limit is a vertical shear, oddness forces it to vanish")
    if ansatz.variant == "LHsc":
        return RouteDecision(proposition=ROUTES["homogeneity"], certifiers=["homogeneity_test"], **base,
                             rationale="swirl-dominated family: the limit is stationary and homogeneous")
    if ansatz.variant not in ("LHsc2", None):
        return RouteDecision(proposition="none", certifiers=[], **base,
                             rationale=f"variant {ansatz.variant} has no vorticity blow-up route")
    if regime.tag == "Supercritical":
        return RouteDecision(proposition=ROUTES["independence"], certifiers=["theta_independence_test"], **base,
                             rationale="positive discriminant: swirl term dominates, Theta^2 independent of z2")
    if regime.tag == "Critical":
        names = ["singular_flowline_test", "sector_integral_test", "base_sign_tests"]
        if ansatz.rectangle is not None:
            names.append("rectangle_flowline_test")
        return RouteDecision(proposition=ROUTES["boussinesq"], certifiers=names, **base,
                             rationale="2 beta = 1 - alpha: the limit solves the Boussinesq equations")
    return RouteDecision(proposition=ROUTES["subcritical"], certifiers=["odd_limit_test"], **base,
                         rationale="negative discriminant: swirl term vanishes, half-plane Euler limit")


def run_certifiers(
    ansatz: SelfSimilarAnsatz,
    names: Sequence[str],
    threads: int | None = None,
) -> list[CertificateReport]:
    """Run independent certifiers, in parallel when threads > 1; reports keep the order of ``names``."""
    unknown = [n for n in names if n not in CERTIFIERS]
    if unknown:
        raise ValueError(f"unknown certifiers {unknown}")
    workers = threads or get_thread_count()
    if workers <= 1 or len(names) <= 1:
        return [CERTIFIERS[n](ansatz) for n in names]
    with ThreadPoolExecutor(max_workers=min(workers, len(names))) as pool:
        futures = [pool.submit(CERTIFIERS[n], ansatz) for n in names]
        return [f.result() for f in futures]
