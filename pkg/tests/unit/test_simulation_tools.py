"""
Unit tests for the elliptic solver, the semi-Lagrangian steppers and the weak residual.
"""

import math

import numpy as np
import pytest

from tools.field_tools import BumpTestFunction, Grid2D, ScalarField2D, TimeSeries, VectorField2D, derivative
from tools.simulation_tools import (
    AxiState,
    BoussinesqState,
    Euler2DState,
    axisym_divergence,
    cfl_number,
    gamma_conservation,
    gamma_lp_drift,
    run_axisym,
    run_euler2d,
    solve_elliptic,
    step_boussinesq,
    step_euler2d,
    swirl_bound_check,
    velocity_series,
    weak_residual,
)
from utils import CFLViolationError, FieldValueError, PoissonConvergenceError


def _axi_grid(n1=17, n2=33):
    return Grid2D(0.25, 1.0, 0.0, 2 * math.pi, n1, n2)


def _swirl_state(grid, amplitude=0.3):
    _, x3 = grid.mesh()
    zero = np.zeros(grid.shape)
    return AxiState(grid, zero, 0.5 * (1.0 + amplitude * np.cos(x3)), zero)


class TestSolveElliptic:
    """Test the five-point elliptic solves."""

    def test_dirichlet_sine_mode(self):
        """Test second-order accuracy on a sine mode with zero walls."""
        g = Grid2D(0.0, 1.0, 0.0, 1.0, 33, 33)
        z1, z2 = g.mesh()
        exact = np.sin(math.pi * z1) * np.sin(math.pi * z2)
        u = solve_elliptic(g, -2 * math.pi**2 * exact, (False, False))
        assert np.max(np.abs(u - exact)) < 2e-3

    def test_linear_wall_profile_is_exact(self):
        """Test that constant wall values lift to a discretely harmonic profile."""
        g = Grid2D(0.0, 2 * math.pi, 0.0, 1.0, 17, 9)
        _, z2 = g.mesh()
        u = solve_elliptic(g, np.zeros(g.shape), (True, False), walls={1: (0.0, 1.0)})
        assert np.allclose(u, z2, atol=1e-12)

    def test_cg_matches_direct(self):
        """Test that the iterative path agrees with the factorized one."""
        g = Grid2D(0.0, 1.0, 0.0, 1.0, 17, 17)
        rhs = np.random.default_rng(3).normal(size=g.shape)
        direct = solve_elliptic(g, rhs, (False, False))
        iterative = solve_elliptic(g, rhs, (False, False), method="cg")
        assert np.allclose(direct, iterative, atol=1e-7)

    def test_unreachable_tolerance(self):
        """Test that a residual above tolerance raises."""
        g = Grid2D(0.0, 1.0, 0.0, 1.0, 15, 15)
        rhs = np.random.default_rng(5).normal(size=g.shape)
        with pytest.raises(PoissonConvergenceError):
            solve_elliptic(g, rhs, (False, False), tolerance=1e-300)

    def test_rejects_bad_arguments(self):
        """Test unknown methods, operators and fully periodic grids."""
        g = Grid2D(0.0, 1.0, 0.0, 1.0, 9, 9)
        rhs = np.zeros(g.shape)
        with pytest.raises(ValueError, match="method"):
            solve_elliptic(g, rhs, (False, False), method="sor")
        with pytest.raises(ValueError, match="operator"):
            solve_elliptic(g, rhs, (False, False), kind="biharmonic")
        with pytest.raises(ValueError, match="walls"):
            solve_elliptic(g, rhs, (True, True))


class TestAxiState:
    """Test axisymmetric state validation and diagnostics."""

    def test_rejects_nonzero_wall_velocity(self):
        """Test that v^r must vanish on both walls."""
        g = _axi_grid()
        vr = np.zeros(g.shape)
        vr[-1, 3] = 0.1
        vr[-1, -1] = vr[-1, 0]
        with pytest.raises(FieldValueError, match="walls"):
            AxiState(g, vr, np.zeros(g.shape), np.zeros(g.shape))

    def test_rejects_bad_geometry(self):
        """Test r_min and outer radius constraints."""
        zero = np.zeros((9, 9))
        with pytest.raises(ValueError, match="r_min"):
            AxiState(Grid2D(0.0, 1.0, 0.0, 1.0, 9, 9), zero, zero, zero)
        with pytest.raises(ValueError, match="outer radius"):
            AxiState(Grid2D(0.25, 2.0, 0.0, 1.0, 9, 9), zero, zero, zero)

    def test_rejects_non_periodic_data(self):
        """Test that the first and last x³ columns must agree."""
        g = _axi_grid()
        _, x3 = g.mesh()
        zero = np.zeros(g.shape)
        with pytest.raises(FieldValueError, match="periodic"):
            AxiState(g, zero, x3, zero)

    def test_rejects_divergent_meridional_flow(self):
        """Test that a radial flow with no axial counterpart is refused with the worst node."""
        g = _axi_grid()
        r, _ = g.mesh()
        vr = np.sin(math.pi * (r - 0.25) / 0.75)
        vr[[0, -1], :] = 0.0
        zero = np.zeros(g.shape)
        with pytest.raises(FieldValueError, match="divergence") as exc:
            AxiState(g, vr, zero, zero)
        assert exc.value.node is not None

    def test_steps_keep_divergence_at_round_off(self):
        """Test that stream-function increments leave the discrete divergence unchanged."""
        states = run_axisym(_swirl_state(_axi_grid()), 1e-3, 3)
        assert max(axisym_divergence(s).sup() for s in states) < 1e-9

    def test_stream_function_velocity_is_divergence_free(self):
        """Test the conservative axisymmetric divergence of a stream-function flow."""
        g = _axi_grid()
        r, x3 = g.mesh()
        psi = np.sin(math.pi * (r - 0.25) / 0.75) ** 2 * np.cos(x3)
        vr = -derivative(psi, g.h2, 1, periodic=True) / r
        v3 = derivative(psi, g.h1, 0) / r
        state = AxiState(g, vr, np.zeros(g.shape), v3)
        assert axisym_divergence(state).sup() < 1e-10
        assert state.meridian_vorticity().shape == g.shape


class TestAxisymStepper:
    """Test the axisymmetric stepper and its conservation diagnostics."""

    def test_radial_swirl_is_steady(self):
        """Test that a swirl depending on r only stays put."""
        g = _axi_grid()
        r, _ = g.mesh()
        zero = np.zeros(g.shape)
        state = AxiState(g, zero, 1.0 / r, zero)
        states = run_axisym(state, 0.01, 5)
        assert gamma_conservation(states) < 1e-10
        assert gamma_lp_drift(states, 2) < 1e-10
        assert np.allclose(states[-1].vr, 0.0)
        assert states[-1].time == pytest.approx(0.05)

    def test_swirl_bound_and_walls_hold(self):
        """Test that Γ never exceeds its initial sup and v^r stays zero on the walls."""
        g = _axi_grid()
        state = _swirl_state(g)
        gamma0 = float(np.max(np.abs(state.gamma)))
        states = run_axisym(state, 0.01, 5)
        assert np.any(states[-1].v3 != 0.0)
        for s in states:
            assert swirl_bound_check(s, gamma0) <= 1e-12
            assert np.max(np.abs(s.vr[[0, -1], :])) == 0.0
        assert gamma_conservation(states) < 0.05

    def test_cfl_violation(self):
        """Test that an oversized step raises before advancing."""
        g = _axi_grid()
        zero = np.zeros(g.shape)
        state = AxiState(g, zero, zero, np.ones(g.shape))
        with pytest.raises(CFLViolationError) as exc:
            run_axisym(state, 1.0, 1)
        assert exc.value.cfl > exc.value.limit

    def test_nonpositive_step(self):
        """Test that dt <= 0 is rejected."""
        g = _axi_grid()
        with pytest.raises(ValueError, match="positive"):
            run_axisym(_swirl_state(g), 0.0, 1)

    def test_diagnostics_argument_checks(self):
        """Test that Lp drift needs n >= 1 and two snapshots."""
        g = _axi_grid()
        state = _swirl_state(g)
        with pytest.raises(ValueError, match="n must be"):
            gamma_lp_drift([state, state], 0)
        with pytest.raises(ValueError, match="two snapshots"):
            gamma_conservation([state])


class TestEuler2D:
    """Test the 2D Euler state and stepper."""

    def test_stream_function_recovery(self):
        """Test that Δψ = −ω is solved to second order with a divergence-free velocity."""
        g = Grid2D(0.0, 2 * math.pi, 0.0, math.pi, 65, 33)
        z1, z2 = g.mesh()
        psi = np.sin(z2) * np.cos(z1)
        state = Euler2DState.from_vorticity(g, 2 * psi)
        assert np.max(np.abs(state.psi - psi)) < 5e-3
        assert np.max(np.abs(state.divergence())) < 1e-10
        assert isinstance(state.velocity(), VectorField2D)

    def test_shear_flow_is_steady(self):
        """Test that a shear vorticity ω(z²) is a steady state."""
        g = Grid2D(0.0, 2 * math.pi, 0.0, math.pi, 33, 33)
        _, z2 = g.mesh()
        state = Euler2DState.from_vorticity(g, np.cos(z2))
        states = run_euler2d(state, 0.01, 10)
        assert np.max(np.abs(states[-1].omega - state.omega)) < 1e-10

    def test_closed_box_with_flux(self):
        """Test that a closed box cannot carry a net flux."""
        g = Grid2D(0.0, 1.0, 0.0, 1.0, 9, 9)
        with pytest.raises(ValueError, match="flux"):
            Euler2DState.from_vorticity(g, np.zeros(g.shape), periodic=(False, False), flux=1.0)

    def test_flux_lifts_stream_function(self):
        """Test the channel flux boundary value and the resulting uniform flow."""
        g = Grid2D(0.0, 2 * math.pi, 0.0, 1.0, 17, 9)
        state = Euler2DState.from_vorticity(g, np.zeros(g.shape), flux=2.0)
        assert np.allclose(state.psi[:, -1], 2.0)
        assert np.allclose(state.u1, -2.0)

    def test_cfl_violation(self):
        """Test that an oversized step raises."""
        g = Grid2D(0.0, 2 * math.pi, 0.0, math.pi, 33, 33)
        _, z2 = g.mesh()
        state = Euler2DState.from_vorticity(g, np.cos(z2))
        with pytest.raises(CFLViolationError):
            step_euler2d(state, 5.0)
        assert cfl_number(g, state.u1, state.u2, 5.0) > 0.5

    def test_velocity_series(self):
        """Test conversion of a run into a velocity time series."""
        g = Grid2D(0.0, 2 * math.pi, 0.0, math.pi, 17, 9)
        _, z2 = g.mesh()
        states = run_euler2d(Euler2DState.from_vorticity(g, np.cos(z2)), 0.01, 2)
        series = velocity_series(states)
        assert len(series) == 3
        assert series.times[-1] == pytest.approx(0.02)


class TestBoussinesq:
    """Test Boussinesq forcing and stepping."""

    def _flow(self):
        g = Grid2D(0.0, 2 * math.pi, 0.0, math.pi, 33, 17)
        _, z2 = g.mesh()
        return Euler2DState.from_vorticity(g, 0.5 * np.cos(z2))

    def test_unknown_orientation(self):
        """Test that an unknown forcing orientation is rejected."""
        flow = self._flow()
        with pytest.raises(ValueError, match="orientation"):
            BoussinesqState(flow, np.zeros(flow.grid.shape), orientation="down")

    def test_left_forcing_sign(self):
        """Test the left orientation adds +∂₂h²."""
        flow = self._flow()
        _, z2 = flow.grid.mesh()
        state = BoussinesqState(flow, z2, orientation="left")
        assert np.allclose(state.forcing(), 2 * z2, atol=1e-10)

    def test_upper_minus_forcing_sign(self):
        """Test the upper_minus orientation adds −∂₁h² on the periodic axis."""
        flow = self._flow()
        z1, _ = flow.grid.mesh()
        state = BoussinesqState(flow, np.sin(z1), orientation="upper_minus")
        assert np.max(np.abs(state.forcing() + np.sin(2 * z1))) < 5e-2

    def test_zero_density_matches_euler(self):
        """Test that h ≡ 0 reduces a step to a plain Euler step."""
        flow = self._flow()
        state = BoussinesqState(flow, np.zeros(flow.grid.shape))
        after = step_boussinesq(state, 0.01)
        assert np.array_equal(after.flow.omega, step_euler2d(flow, 0.01).omega)
        assert not np.any(after.h)


class TestWeakResidual:
    """Test the space-time weak residual."""

    grid = Grid2D(0.0, 2.0, 0.0, 2.0, 41, 41)
    times = tuple(np.linspace(0.0, 1.0, 11))
    bump = BumpTestFunction((1.0, 1.0), 0.5, time_center=0.5, time_radius=0.4)

    def _series(self, fn):
        return TimeSeries(self.times, tuple(VectorField2D.from_function(self.grid, lambda a, b, t=t: fn(a, b, t))
                                            for t in self.times))

    def test_steady_shear_vanishes(self):
        """Test that a steady shear flow has zero residual."""
        series = self._series(lambda z1, z2, t: (np.sin(z2), 0 * z1))
        assert abs(weak_residual(series, self.bump)) < 1e-12

    def test_accelerating_flow_is_detected(self):
        """Test that v = (t sin z², 0) is not a weak solution."""
        series = self._series(lambda z1, z2, t: (t * np.sin(z2), 0 * z1))
        assert weak_residual(series, self.bump) > 1e-4

    def test_zero_test_field(self):
        """Test that a vanishing test field gives zero."""
        series = self._series(lambda z1, z2, t: (t * np.sin(z2), 0 * z1))
        zero = [ScalarField2D(self.grid, np.zeros(self.grid.shape)) for _ in self.times]
        assert weak_residual(series, zero) == 0.0

    def test_support_checks(self):
        """Test spatial, temporal and snapshot-count requirements."""
        series = self._series(lambda z1, z2, t: (np.sin(z2), 0 * z1))
        with pytest.raises(ValueError, match="spatial window"):
            weak_residual(series, BumpTestFunction((0.3, 1.0), 0.5, time_center=0.5, time_radius=0.4))
        with pytest.raises(ValueError, match="first or last time"):
            weak_residual(series, BumpTestFunction((1.0, 1.0), 0.5))
        short = TimeSeries(self.times[:2], series.snapshots[:2])
        with pytest.raises(ValueError, match="three snapshots"):
            weak_residual(short, BumpTestFunction((1.0, 1.0), 0.5))
