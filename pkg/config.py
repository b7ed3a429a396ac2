"""
Configuration for the blow-up verification lab

This module holds the numeric defaults every tool falls back to when the
caller does not pass an explicit value. Defaults are grouped by concern in a
single registry; accessors return copies so callers cannot mutate it.

Sections:
    field:       finite-difference and quadrature tolerances, Hölder sampling.
    simulation:  CFL limit, inner radius, Poisson residual bound.
    rescale:     anchor function, window radius rule, domain thresholds.
    profile:     parity / nontriviality tolerances, data accuracy.
    certify:     p ladder, strict-max margin, flow-line horizon, seeds.
    cli:         output directory and worker threads.

Environment overrides (read once at import):
    BLOWUP_LAB_OUTPUT_DIR   directory reports and CSV artifacts are written to
    BLOWUP_LAB_THREADS      worker threads for independent certifier runs
"""

import copy
import math
import os
from typing import Any

_env_output_dir = os.getenv("BLOWUP_LAB_OUTPUT_DIR")
_env_threads = os.getenv("BLOWUP_LAB_THREADS")

# The cylinder radius is fixed at 1: the boundary point of interest is (1, 0, 0).
OUTER_RADIUS = 1.0

LAB_DEFAULTS: dict[str, dict[str, Any]] = {
    "field": {
        "holder_pair_budget": 20_000,
        "quadrature_subcells": 8,
        "round_off": 1e-12,
    },
    "simulation": {
        "cfl_limit": 0.5,
        "r_min": 0.25,
        "poisson_residual": 1e-8,
        # conjugate-gradient iteration cap is this factor times the node count
        "cg_iteration_factor": 50,
        # max|div| relative to the larger of its two terms
        "divergence_tol": 0.05,
        "steady_tolerance": 1e-10,
    },
    "rescale": {
        "anchor_table": {"s": [0.0, 1.0, 10.0, 100.0], "lam": [2.0, 4.0, 22.0, 202.0]},
        "window_radius_factor": 4.0,
        "divergence_threshold": 1e3,
        "half_plane_spread": 0.05,
    },
    "profile": {
        "parity_tol_analytic": 1e-10,
        "parity_tol_ingested": 1e-6,
        "nontrivial": 1e-12,
        "data_accuracy": 1e-7,
        "decay_annulus": 0.25,
        "homogeneity_tol": 5e-2,
        "decay_tolerance": 0.05,
        "gauss_points": 8,
    },
    "certify": {
        "p_ladder": [25, 50, 100, 200],
        "strict_max_margin": 1e-12,
        "tau_horizon": 20.0,
        "tau_step": 0.01,
        "seed_count": 16,
        "collar_points": 10,
        "integral_tol": 1e-8,
        # sup W on the upper ray may trail the lower ray by this relative amount
        "ray_sup_tol": 1e-6,
        # |W| on the base at or below this fraction of max|W| counts as a zero
        "base_zero_tol": 1e-10,
        "ray_samples": 801,
    },
    "cli": {
        "output_dir": "lab_output",
        "threads": 1,
    },
}


def get_default(section: str, key: str) -> Any:
    """
    Look up a default value.

    Args:
        section: Registry section (e.g. "certify")
        key: Entry within the section

    Returns:
        A deep copy of the registered value
    """
    if section not in LAB_DEFAULTS:
        raise ValueError(f"Unknown config section: {section}")
    values = LAB_DEFAULTS[section]
    if key not in values:
        raise ValueError(f"Unknown config key: {section}.{key}")
    return copy.deepcopy(values[key])


def get_tolerance(key: str) -> float:
    """Look up a tolerance by key in the profile, field and certify sections."""
    for section in ("profile", "field", "certify"):
        if key in LAB_DEFAULTS[section]:
            return float(LAB_DEFAULTS[section][key])
    raise ValueError(f"Unknown tolerance: {key}")


def get_p_ladder() -> list[int]:
    """Exponents used for the p-power sector tests, increasing."""
    return get_default("certify", "p_ladder")


def anchor_lambda_default(s: float) -> float:
    """Default anchor function λ(s) = 2(1 + s)."""
    return 2.0 * (1.0 + s)


def window_radius_default(k: int) -> float:
    """Default admissible window radius for the k-th rescaling."""
    return get_default("rescale", "window_radius_factor") * math.sqrt(max(k, 1))


def get_output_dir() -> str:
    """Output directory, honouring BLOWUP_LAB_OUTPUT_DIR."""
    return _env_output_dir or get_default("cli", "output_dir")


def get_thread_count() -> int:
    """Worker thread count, honouring BLOWUP_LAB_THREADS."""
    if _env_threads:
        try:
            threads = int(_env_threads)
        except ValueError as exc:
            raise ValueError(f"BLOWUP_LAB_THREADS must be an integer, got {_env_threads!r}") from exc
        if threads < 1:
            raise ValueError(f"BLOWUP_LAB_THREADS must be >= 1, got {threads}")
        return threads
    return get_default("cli", "threads")


def get_current_config() -> dict[str, Any]:
    """Get the full effective configuration, env overrides applied."""
    config = copy.deepcopy(LAB_DEFAULTS)
    config["cli"]["output_dir"] = get_output_dir()
    config["cli"]["threads"] = get_thread_count()
    config["simulation"]["outer_radius"] = OUTER_RADIUS
    return config
