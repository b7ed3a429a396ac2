"""
Pytest configuration and shared fixtures.

Planted profiles are small analytic ansätze whose certificate outcome is
known in advance; the writers put them (or datacheck patches) on disk in the
shared CSV format so the CLI tests can load them through manifests.
"""

import json
import math

import numpy as np
import pytest

from models.schemas import RectangleConfig, SectorConfig, StripConfig
from tools.field_tools import Grid2D
from tools.io_tools import write_field_csv
from tools.profile_tools import Profile, SelfSimilarAnsatz

SQRT3 = math.sqrt(3.0)


def _gauss(c1, c2, width):
    return lambda z1, z2: np.exp(-((z1 - c1) ** 2 + (z2 - c2) ** 2) / width)


def _sector_velocity():
    return {
        "V1": lambda z1, z2: -z1 / np.sqrt(1.0 + z1 * z2),
        "V2": lambda z1, z2: z2 / np.sqrt(1.0 + z1 * z2),
        "H2": lambda z1, z2: 0.01 * z1**2,
    }


PLANTED = {
    # strict maximum of W on the upper ray; all sign conditions hold
    "sector": {
        "grid": (0.0, 5.5, 0.0, 5.5, 111, 111),
        "alpha": -2.0, "beta": 1.5, "variant": "LHsc2",
        "profiles": {"W": _gauss(1.0, SQRT3, 0.98), **_sector_velocity()},
        "sector": {"l1": 0.0, "l2": 6.0, "theta1": math.pi / 6, "theta2": math.pi / 3},
    },
    # the larger bump sits on the lower ray, so the ray terms have the wrong order
    "sector_lower": {
        "grid": (0.0, 5.5, 0.0, 5.5, 111, 111),
        "alpha": -2.0, "beta": 1.5, "variant": "LHsc2",
        "profiles": {
            "W": lambda z1, z2: 0.9 * _gauss(1.0, SQRT3, 0.98)(z1, z2) + _gauss(SQRT3, 1.0, 0.98)(z1, z2),
            **_sector_velocity(),
        },
        "sector": {"l1": 0.0, "l2": 6.0, "theta1": math.pi / 6, "theta2": math.pi / 3},
    },
    # mirror-symmetric ridges on both rays, strict maximum on the bisector
    "sector_symmetric": {
        "grid": (0.0, 5.5, 0.0, 5.5, 111, 111),
        "alpha": -2.0, "beta": 1.5, "variant": "LHsc2",
        "profiles": {
            "W": lambda z1, z2: (_gauss(1.0, SQRT3, 0.98)(z1, z2) + _gauss(SQRT3, 1.0, 0.98)(z1, z2)
                                 + 1.5 * _gauss(1.5, 1.5, 0.1)(z1, z2)),
            **_sector_velocity(),
        },
        "sector": {"l1": 0.0, "l2": 6.0, "theta1": math.pi / 6, "theta2": math.pi / 3},
    },
    "rectangle": {
        "grid": (0.0, 2.0, 0.0, 2.0, 41, 41),
        "alpha": -2.0, "beta": 1.5, "variant": "LHsc2",
        "profiles": {
            "W": _gauss(1.0, 1.0, 0.1),
            "V1": lambda z1, z2: 0.1 * z1,
            "V2": lambda z1, z2: 0.1 * z2,
            "H2": lambda z1, z2: 0.0 * z1,
        },
        "rectangle": {"a1": 0.5, "b1": 1.5, "a2": 0.5, "b2": 1.5},
    },
    "singular": {
        "grid": (0.0, 6.0, 0.0, 2.0, 61, 21),
        "alpha": -2.0, "beta": 1.5, "variant": "LHsc2",
        "profiles": {
            "W": lambda z1, z2: z1 / np.sqrt(1.0 + z1**2),
            "V1": lambda z1, z2: 0.0 * z1,
            "V2": lambda z1, z2: 0.0 * z1,
            "H2": lambda z1, z2: 0.1 * np.tanh(z1),
        },
        "strip": {"l0": 2.0},
    },
    "base": {
        "grid": (0.5, 10.5, 0.0, 2.0, 101, 5),
        "alpha": -2.0, "beta": 1.5, "variant": "LHsc2", "base_only": True,
        "profiles": {
            "W": lambda z1, z2: 2.0 - z1,
            "V1": lambda z1, z2: 0.0 * z1,
            "V2": lambda z1, z2: 0.0 * z1,
            "H2": lambda z1, z2: np.cbrt(z1),
        },
    },
    "odd_limit": {
        "grid": (0.0, 2.0, -1.0, 1.0, 21, 21),
        "alpha": 0.5, "beta": 0.0, "variant": None,
        "profiles": {"V3": lambda z1, z2: z2 * np.exp(-(z1**2))},
    },
    "homogeneity": {
        "grid": (-2.0, 2.0, -2.0, 2.0, 41, 41),
        "alpha": -2.0, "beta": 1.5, "variant": "LHsc",
        "profiles": {"Theta": lambda z1, z2: np.exp(-(z1**2 + z2**2))},
    },
}


def build_planted(name: str, **overrides) -> SelfSimilarAnsatz:
    """Analytic ansatz for a planted design; ``overrides`` replace profiles or ansatz fields."""
    entry = dict(PLANTED[name])
    profiles = dict(entry.pop("profiles"))
    for key in list(overrides):
        if key[:1].isupper():
            profiles[key] = overrides.pop(key)
    grid = Grid2D(*entry.pop("grid"))
    configs = {}
    for key, model in (("sector", SectorConfig), ("rectangle", RectangleConfig), ("strip", StripConfig)):
        if key in entry:
            configs[key] = model(**entry.pop(key))
    entry.update(configs)
    entry.update(overrides)
    return SelfSimilarAnsatz(
        profiles={n: Profile(n, fn=fn) for n, fn in profiles.items()},
        grid=grid,
        **entry,
    )


@pytest.fixture
def unit_grid():
    """17 × 17 nodes on [−1, 1]²."""
    return Grid2D(-1.0, 1.0, -1.0, 1.0, 17, 17)


@pytest.fixture
def planted():
    """Factory for planted analytic ansätze."""
    return build_planted


@pytest.fixture
def write_planted_manifest(tmp_path):
    """Write a planted ansatz as one multi-column CSV plus a manifest; return the manifest path."""

    def _write(name: str, directory=None, **manifest_overrides):
        directory = directory or tmp_path
        directory.mkdir(parents=True, exist_ok=True)
        entry = PLANTED[name]
        grid = Grid2D(*entry["grid"])
        z1, z2 = grid.mesh()
        columns = {n: np.broadcast_to(fn(z1, z2), grid.shape).astype(float) for n, fn in entry["profiles"].items()}
        write_field_csv(directory / f"{name}-profiles.csv", grid, columns)
        manifest = {
            "alpha": entry["alpha"],
            "beta": entry["beta"],
            "variant": entry["variant"],
            "profiles": {n: f"{name}-profiles.csv#{n}" for n in columns},
        }
        for key in ("sector", "rectangle", "strip", "base_only"):
            if key in entry:
                manifest[key] = entry[key]
        manifest.update(manifest_overrides)
        manifest = {k: v for k, v in manifest.items() if v is not None}
        path = directory / f"{name}-ansatz.json"
        path.write_text(json.dumps(manifest, indent=2))
        return path

    return _write


def _patch_grid(i0: int, j0: int, h: float = 0.01) -> Grid2D:
    a, b = (i0 + 1) * h, (j0 + 1) * h
    return Grid2D(a, a + 2 * h, b, b + 2 * h, 3, 3)


@pytest.fixture
def write_datacheck_patch(tmp_path):
    """
    Write a 3 × 3 datacheck patch (columns W, dV1_dz2, dV2_dz1):

        mismatch   i0 = 35, j0 = 719, centre off by 1.0235e-5
        negative   centred at (3, 709) with W = −2.9778e-18 there
        rectangle  i0 = 19, j0 = 710, strict interior maximum 2.3461e-16
    """

    def _write(kind: str):
        if kind == "mismatch":
            i0, j0 = 35, 719
            dv1 = np.linspace(1e-3, 9e-3, 9).reshape(3, 3)
            dv2 = np.linspace(-2e-3, 2e-3, 9).reshape(3, 3)
            W = dv1 - dv2
            W[1, 1] += 1.0235e-5
        elif kind == "negative":
            i0, j0 = 2, 708
            W = np.full((3, 3), 1e-17)
            W[1, 1] = -2.9778e-18
            dv1, dv2 = W.copy(), np.zeros((3, 3))
        elif kind == "rectangle":
            i0, j0 = 19, 710
            W = np.array([[1.0e-16, 1.2e-16, 0.9e-16], [1.1e-16, 2.3461e-16, 1.3e-16], [0.8e-16, 1.0e-16, 1.4e-16]])
            dv1, dv2 = W.copy(), np.zeros((3, 3))
        else:
            raise ValueError(kind)
        path = tmp_path / f"{kind}-patch.csv"
        write_field_csv(path, _patch_grid(i0, j0), {"W": W, "dV1_dz2": dv1, "dV2_dz1": dv2}, i0=i0, j0=j0)
        return path

    return _write
