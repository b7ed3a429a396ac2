"""
Unit tests for the defaults registry and environment overrides.
"""

import math

import pytest

import config
from config import (
    LAB_DEFAULTS,
    anchor_lambda_default,
    get_current_config,
    get_default,
    get_output_dir,
    get_p_ladder,
    get_thread_count,
    get_tolerance,
    window_radius_default,
)


class TestDefaults:
    """Test registry lookups."""

    def test_get_default_returns_copy(self):
        """Test that callers cannot mutate the registry."""
        ladder = get_default("certify", "p_ladder")
        ladder.append(1000)
        assert LAB_DEFAULTS["certify"]["p_ladder"] == [25, 50, 100, 200]

    def test_unknown_keys(self):
        """Test unknown sections and keys."""
        with pytest.raises(ValueError, match="section"):
            get_default("nope", "x")
        with pytest.raises(ValueError, match="certify.nope"):
            get_default("certify", "nope")

    def test_tolerances(self):
        """Test tolerance lookup across sections."""
        assert get_tolerance("parity_tol_ingested") == 1e-6
        assert get_tolerance("integral_tol") == 1e-8
        with pytest.raises(ValueError, match="tolerance"):
            get_tolerance("missing")

    def test_solver_and_certifier_defaults(self):
        """Test the simulation and certifier tolerances under their current names."""
        assert get_default("simulation", "cg_iteration_factor") == 50
        with pytest.raises(ValueError, match="simulation.sor_iteration_factor"):
            get_default("simulation", "sor_iteration_factor")
        assert 0.0 < get_default("simulation", "divergence_tol") < 1.0
        assert get_tolerance("ray_sup_tol") == 1e-6
        assert get_tolerance("base_zero_tol") == 1e-10

    def test_p_ladder_increasing(self):
        """Test the default exponent ladder."""
        ladder = get_p_ladder()
        assert ladder == sorted(ladder)
        assert ladder[0] > 1

    def test_anchor_and_window_defaults(self):
        """Test λ(s) = 2(1 + s) and the window radius rule."""
        assert anchor_lambda_default(0.0) == 2.0
        assert anchor_lambda_default(3.0) == 8.0
        assert window_radius_default(4) == pytest.approx(8.0)
        assert window_radius_default(0) == window_radius_default(1)

    def test_current_config_includes_radius(self):
        """Test that the effective configuration carries the fixed cylinder radius."""
        cfg = get_current_config()
        assert cfg["simulation"]["outer_radius"] == 1.0
        assert math.isclose(cfg["simulation"]["r_min"], 0.25)


class TestEnvironment:
    """Test environment overrides."""

    def test_defaults_without_env(self, mocker):
        """Test fallbacks when no variables are set."""
        mocker.patch.object(config, "_env_output_dir", None)
        mocker.patch.object(config, "_env_threads", None)
        assert get_output_dir() == "lab_output"
        assert get_thread_count() == 1

    def test_env_overrides(self, mocker):
        """Test output directory and thread overrides."""
        mocker.patch.object(config, "_env_output_dir", "/tmp/lab")
        mocker.patch.object(config, "_env_threads", "4")
        assert get_output_dir() == "/tmp/lab"
        assert get_thread_count() == 4
        assert get_current_config()["cli"] == {"output_dir": "/tmp/lab", "threads": 4}

    @pytest.mark.parametrize("value", ["four", "0", "-2"])
    def test_bad_thread_count(self, mocker, value):
        """Test that malformed thread counts are rejected."""
        mocker.patch.object(config, "_env_threads", value)
        with pytest.raises(ValueError, match="BLOWUP_LAB_THREADS"):
            get_thread_count()
