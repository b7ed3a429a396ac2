"""
Unit tests for grids, sampled fields, finite differences and quadrature.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import dblquad

from tools.field_tools import (
    BicubicInterpolator,
    BumpTestFunction,
    Grid2D,
    Rectangle,
    ScalarField2D,
    Sector,
    TimeSeries,
    VectorField2D,
    _stratified_pairs,
    curl2d,
    derivative,
    divergence,
    holder_norm,
    laplacian,
    line_integral,
    perp_gradient,
    quadrature,
    region_fractions,
    smooth_bump,
)
from utils import FieldValueError, GridMismatchError


class TestGrid2D:
    """Test grid construction and geometry."""

    def test_spacing_and_nodes(self):
        """Test spacing and node coordinates of a uniform grid."""
        g = Grid2D(0.0, 1.0, -1.0, 1.0, 11, 21)
        assert g.h1 == pytest.approx(0.1)
        assert g.h2 == pytest.approx(0.1)
        assert g.shape == (11, 21)
        assert g.z1[-1] == pytest.approx(1.0)
        z1, z2 = g.mesh()
        assert z1.shape == (11, 21)
        assert z2[0, -1] == pytest.approx(1.0)

    def test_rejects_too_few_nodes(self):
        """Test that fewer than three nodes per axis is rejected."""
        with pytest.raises(ValueError, match="at least 3"):
            Grid2D(0.0, 1.0, 0.0, 1.0, 2, 5)

    def test_rejects_inverted_bounds(self):
        """Test that max <= min is rejected."""
        with pytest.raises(ValueError, match="max > min"):
            Grid2D(1.0, 1.0, 0.0, 1.0, 5, 5)

    def test_refined_halves_spacing(self):
        """Test that refinement keeps bounds and halves the spacing."""
        g = Grid2D(0.0, 2.0, 0.0, 1.0, 9, 5)
        r = g.refined()
        assert r.bounds() == g.bounds()
        assert r.h1 == pytest.approx(g.h1 / 2)
        assert r.h2 == pytest.approx(g.h2 / 2)

    def test_contains_with_slack(self):
        """Test point containment with and without slack."""
        g = Grid2D(0.0, 1.0, 0.0, 1.0, 5, 5)
        assert bool(g.contains(0.5, 0.5))
        assert not bool(g.contains(1.05, 0.5))
        assert bool(g.contains(1.05, 0.5, slack=0.1))


class TestFields:
    """Test scalar and vector field containers."""

    def test_non_finite_sample_names_node(self):
        """Test that a NaN sample raises with its mesh index."""
        g = Grid2D(0.0, 1.0, 0.0, 1.0, 4, 4)
        values = np.zeros(g.shape)
        values[2, 1] = np.nan
        with pytest.raises(FieldValueError) as exc:
            ScalarField2D(g, values)
        assert exc.value.node == (2, 1)

    def test_values_are_read_only(self):
        """Test that sampled values cannot be modified in place."""
        g = Grid2D(0.0, 1.0, 0.0, 1.0, 4, 4)
        f = ScalarField2D(g, np.ones(g.shape))
        with pytest.raises(ValueError):
            f.values[0, 0] = 2.0

    def test_shape_mismatch(self):
        """Test that a wrongly shaped array is rejected."""
        g = Grid2D(0.0, 1.0, 0.0, 1.0, 4, 4)
        with pytest.raises(ValueError, match="expected shape"):
            ScalarField2D(g, np.ones((3, 4)))

    def test_arithmetic_requires_same_grid(self):
        """Test that adding fields on different grids fails."""
        a = ScalarField2D(Grid2D(0.0, 1.0, 0.0, 1.0, 4, 4), np.ones((4, 4)))
        b = ScalarField2D(Grid2D(0.0, 2.0, 0.0, 1.0, 4, 4), np.ones((4, 4)))
        with pytest.raises(GridMismatchError):
            a + b
        assert (a - a).sup() == 0.0
        assert a.scaled(3.0).sup() == 3.0

    def test_vector_from_function(self, unit_grid):
        """Test vector sampling and magnitude."""
        v = VectorField2D.from_function(unit_grid, lambda z1, z2: (3.0 + 0 * z1, 4.0 + 0 * z2))
        assert np.allclose(v.magnitude(), 5.0)


class TestTimeSeries:
    """Test time series validation."""

    def test_times_must_increase(self, unit_grid):
        """Test that repeated times are rejected."""
        f = ScalarField2D(unit_grid, np.zeros(unit_grid.shape))
        with pytest.raises(ValueError, match="strictly increasing"):
            TimeSeries((0.0, 0.0), (f, f))

    def test_snapshots_share_grid(self, unit_grid):
        """Test that snapshots on different grids are rejected."""
        f = ScalarField2D(unit_grid, np.zeros(unit_grid.shape))
        other = Grid2D(0.0, 1.0, 0.0, 1.0, 5, 5)
        g = ScalarField2D(other, np.zeros(other.shape))
        with pytest.raises(GridMismatchError):
            TimeSeries((0.0, 1.0), (f, g))

    def test_length_mismatch(self, unit_grid):
        """Test that times and snapshots must pair up."""
        f = ScalarField2D(unit_grid, np.zeros(unit_grid.shape))
        with pytest.raises(ValueError, match="times for"):
            TimeSeries((0.0, 1.0), (f,))


class TestDerivatives:
    """Test the finite-difference operators and their identities."""

    def test_quadratic_exact_including_edges(self):
        """Test that second-order stencils differentiate quadratics exactly."""
        g = Grid2D(-1.0, 2.0, 0.0, 1.0, 13, 7)
        z1, z2 = g.mesh()
        d1 = derivative(z1**2 + z2, g.h1, 0)
        d2 = derivative(z1 + 3 * z2**2, g.h2, 1)
        assert np.allclose(d1, 2 * z1, atol=1e-12)
        assert np.allclose(d2, 6 * z2, atol=1e-12)

    def test_periodic_axis(self):
        """Test wrap-around differencing on a periodic axis."""
        g = Grid2D(0.0, 1.0, 0.0, 2 * math.pi, 5, 129)
        _, z2 = g.mesh()
        d = derivative(np.sin(z2), g.h2, 1, periodic=True)
        assert np.max(np.abs(d - np.cos(z2))) < 1e-3
        assert np.allclose(d[:, 0], d[:, -1])

    def test_curl_of_perp_gradient_is_minus_laplacian(self, unit_grid):
        """Test curl2d(perp_gradient f) = −Δf on a quadratic."""
        f = ScalarField2D.from_function(unit_grid, lambda z1, z2: z1**2 + 2 * z1 * z2 - 3 * z2**2)
        lhs = curl2d(perp_gradient(f))
        rhs = laplacian(f)
        assert np.allclose(lhs.values, -rhs.values, atol=1e-9)
        assert np.allclose(rhs.values, 2 - 6, atol=1e-9)

    def test_perp_gradient_is_divergence_free(self, unit_grid):
        """Test that ∇⊥f is discretely divergence free, weighted or not."""
        f = ScalarField2D.from_function(unit_grid, lambda z1, z2: np.sin(3 * z1) * np.exp(z2))
        w = ScalarField2D.from_function(unit_grid, lambda z1, z2: 2.0 + z1)
        assert divergence(perp_gradient(f)).sup() < 1e-10
        assert divergence(perp_gradient(f, w), w).sup() < 1e-10

    def test_nonpositive_weight_rejected(self, unit_grid):
        """Test that a weight touching zero is rejected with its node."""
        f = ScalarField2D.from_function(unit_grid, lambda z1, z2: z1)
        w = ScalarField2D.from_function(unit_grid, lambda z1, z2: z1)
        with pytest.raises(FieldValueError, match="strictly positive"):
            perp_gradient(f, w)


class TestInterpolation:
    """Test bicubic interpolation."""

    def test_reproduces_cubics(self, unit_grid):
        """Test exact reproduction of a cubic polynomial off the nodes."""
        fn = lambda z1, z2: z1**3 - 2 * z1 * z2**2 + z2  # noqa: E731
        f = ScalarField2D.from_function(unit_grid, fn)
        interp = BicubicInterpolator(unit_grid, f.values)
        rng = np.random.default_rng(7)
        a, b = rng.uniform(-1, 1, 50), rng.uniform(-1, 1, 50)
        assert np.allclose(interp(a, b), fn(a, b), atol=1e-9)
        assert np.allclose(interp.partial(a, b, axis=0), 3 * a**2 - 2 * b**2, atol=1e-8)

    def test_clips_non_periodic_queries(self, unit_grid):
        """Test that queries outside a non-periodic grid are clipped."""
        f = ScalarField2D.from_function(unit_grid, lambda z1, z2: z1 + z2)
        interp = BicubicInterpolator(unit_grid, f.values)
        assert interp(5.0, 0.0) == pytest.approx(1.0)

    def test_wraps_periodic_queries(self):
        """Test that a periodic axis is evaluated modulo its period."""
        g = Grid2D(0.0, 1.0, 0.0, 2 * math.pi, 5, 65)
        f = ScalarField2D.from_function(g, lambda z1, z2: np.sin(z2) + 0 * z1)
        interp = BicubicInterpolator(g, f.values, periodic=(False, True))
        assert interp(0.5, 1.0 + 2 * math.pi) == pytest.approx(interp(0.5, 1.0), abs=1e-12)
        assert interp(0.5, 1.0) == pytest.approx(math.sin(1.0), abs=1e-5)

    def test_limiter_stays_within_cell_range(self, unit_grid):
        """Test that the limited interpolant never overshoots the cell corners."""
        values = np.zeros(unit_grid.shape)
        values[8, 8] = 1.0
        interp = BicubicInterpolator(unit_grid, values)
        z1, z2 = unit_grid.z1, unit_grid.z2
        a = 0.5 * (z1[9] + z1[10])
        b = 0.5 * (z2[8] + z2[9])
        assert interp(a, b) != 0.0
        assert interp(a, b, limit=True) == 0.0


class TestHolderNorm:
    """Test the sampled parabolic Hölder norm."""

    def _series(self, grid, n_times=2):
        snaps = [ScalarField2D.from_function(grid, lambda z1, z2, k=k: np.sin(2 * z1 + k) * z2)
                 for k in range(n_times)]
        return TimeSeries(tuple(0.1 * k for k in range(n_times)), tuple(snaps))

    def test_constant_field_has_zero_seminorm(self):
        """Test that a constant field has zero seminorm and its sup norm."""
        g = Grid2D(0.0, 1.0, 0.0, 1.0, 5, 5)
        f = ScalarField2D(g, np.full(g.shape, -2.0))
        est = holder_norm(TimeSeries((0.0,), (f,)), 0.5)
        assert est.seminorm == 0.0
        assert est.sup_norm == 2.0
        assert est.all_pairs
        assert est.norm == 2.0

    def test_linear_field_all_pairs(self):
        """Test the seminorm of f = z1 against the exact maximum ratio."""
        g = Grid2D(0.0, 1.0, 0.0, 1.0, 5, 5)
        f = ScalarField2D.from_function(g, lambda z1, z2: z1 + 0 * z2)
        est = holder_norm(TimeSeries((0.0,), (f,)), 0.5)
        # |dz1| / |dz|^{1/2} peaks at the longest horizontal pair
        assert est.seminorm == pytest.approx(1.0)

    @pytest.mark.parametrize("gamma", [0.0, 1.0, -0.2, 1.5])
    def test_gamma_outside_unit_interval(self, gamma):
        """Test that γ outside (0, 1) is rejected."""
        g = Grid2D(0.0, 1.0, 0.0, 1.0, 5, 5)
        f = ScalarField2D(g, np.zeros(g.shape))
        with pytest.raises(ValueError, match="Hölder exponent"):
            holder_norm(TimeSeries((0.0,), (f,)), gamma)

    def test_sampling_is_deterministic(self):
        """Test that a sampled estimate repeats exactly."""
        series = self._series(Grid2D(0.0, 1.0, 0.0, 1.0, 10, 10))
        a = holder_norm(series, 0.5, budget=500)
        b = holder_norm(series, 0.5, budget=500)
        assert a == b
        assert not a.all_pairs
        assert a.pairs_used == 500

    @settings(max_examples=20, deadline=None)
    @given(small=st.integers(min_value=1, max_value=3000), extra=st.integers(min_value=0, max_value=6000))
    def test_estimate_monotone_in_budget(self, small, extra):
        """Test that a larger budget never lowers the seminorm estimate."""
        series = self._series(Grid2D(0.0, 1.0, 0.0, 1.0, 10, 10))
        lo = holder_norm(series, 0.3, budget=small)
        hi = holder_norm(series, 0.3, budget=small + extra)
        assert hi.seminorm >= lo.seminorm

    def test_sample_is_stratified_by_distance(self):
        """Test that sampled pairs never repeat a node and fill every distance band equally."""
        shape = (3, 10, 10)
        a, b = _stratified_pairs(shape, seed=7, block=0, chunk=600)
        assert np.all(a != b)
        assert a.min() >= 0 and b.min() >= 0
        assert max(a.max(), b.max()) < 300
        offsets = np.abs(np.array(np.unravel_index(a, shape)) - np.array(np.unravel_index(b, shape)))
        band = np.floor(np.log2(offsets.max(axis=0))).astype(int)
        assert np.bincount(band).tolist() == [150, 150, 150, 150]

    def test_sampled_estimate_never_exceeds_all_pairs(self):
        """Test that the stratified estimate is bounded by the exhaustive one."""
        series = self._series(Grid2D(0.0, 1.0, 0.0, 1.0, 10, 10))
        exact = holder_norm(series, 0.5, budget=10**6)
        sampled = holder_norm(series, 0.5, budget=2000)
        assert exact.all_pairs
        assert 0.0 < sampled.seminorm <= exact.seminorm


class TestQuadrature:
    """Test rectangle and sector quadrature."""

    def test_linear_over_aligned_rectangle(self):
        """Test that the trapezoid rule integrates linear data exactly."""
        g = Grid2D(0.0, 1.0, 0.0, 1.0, 11, 11)
        f = ScalarField2D.from_function(g, lambda z1, z2: 1 + 2 * z1 + 3 * z2)
        assert quadrature(f, Rectangle(0.0, 1.0, 0.0, 1.0)) == pytest.approx(3.5, abs=1e-12)
        assert quadrature(f, Rectangle(0.0, 0.5, 0.0, 1.0)) == pytest.approx(0.5 + 0.25 + 0.75, abs=1e-12)

    def test_quarter_disc_area(self):
        """Test the area of a quarter disc through sub-cell fractions."""
        g = Grid2D(0.0, 1.2, 0.0, 1.2, 61, 61)
        f = ScalarField2D(g, np.ones(g.shape))
        area = quadrature(f, Sector(0.0, 1.0, 0.0, math.pi / 2))
        assert area == pytest.approx(math.pi / 4, abs=2e-3)

    def test_region_outside_grid(self, unit_grid):
        """Test that a region missing the grid raises."""
        f = ScalarField2D(unit_grid, np.ones(unit_grid.shape))
        with pytest.raises(ValueError, match="does not intersect"):
            quadrature(f, Rectangle(5.0, 6.0, 5.0, 6.0))

    def test_unsupported_region(self, unit_grid):
        """Test that an unknown region type is rejected."""
        with pytest.raises(TypeError):
            region_fractions(unit_grid, (0.0, 1.0))

    def test_invalid_sector(self):
        """Test sector parameter validation."""
        with pytest.raises(ValueError):
            Sector(1.0, 0.5, 0.1, 0.2)
        with pytest.raises(ValueError):
            Sector(0.0, 1.0, 0.3, 0.2)

    def test_sector_against_dblquad(self):
        """Test a smooth integrand over a sector against adaptive quadrature in polar coordinates."""
        grid = Grid2D(0.0, 2.0, 0.0, 2.0, 121, 121)
        sector = Sector(0.2, 1.5, 0.3, 1.2)
        f = ScalarField2D.from_function(grid, lambda z1, z2: np.exp(-z1) * z2)
        exact, _ = dblquad(
            lambda r, th: math.exp(-r * math.cos(th)) * r * math.sin(th) * r, 0.3, 1.2, 0.2, 1.5
        )
        assert quadrature(f, sector) == pytest.approx(exact, abs=3e-3)

    @settings(max_examples=25, deadline=None)
    @given(a=st.floats(-3, 3), b=st.floats(-3, 3))
    def test_quadrature_is_linear(self, a, b):
        """Test ∫(a f + b g) = a ∫f + b ∫g on a sector."""
        grid = Grid2D(0.0, 2.0, 0.0, 2.0, 21, 21)
        sector = Sector(0.2, 1.5, 0.3, 1.2)
        f = ScalarField2D.from_function(grid, lambda z1, z2: np.exp(-z1) * z2)
        g = ScalarField2D.from_function(grid, lambda z1, z2: np.cos(z1 + z2))
        combo = ScalarField2D(grid, a * f.values + b * g.values)
        expected = a * quadrature(f, sector) + b * quadrature(g, sector)
        assert quadrature(combo, sector) == pytest.approx(expected, abs=1e-10)


def test_line_integral_trapezoid():
    """Test the trapezoid line integral of a linear profile."""
    s = np.linspace(0.0, 2.0, 5)
    assert line_integral(3 * s, s) == pytest.approx(6.0)


class TestBumps:
    """Test compactly supported test functions."""

    def test_smooth_bump_profile(self):
        """Test the bump is 1 at the origin and vanishes outside the unit ball."""
        out = smooth_bump(np.array([0.0, 0.5, 1.0, 1.5]))
        assert out[0] == 1.0
        assert 0.0 < out[1] < 1.0
        assert out[2] == 0.0 and out[3] == 0.0

    def test_fits_inside(self, unit_grid):
        """Test the node margin check."""
        assert BumpTestFunction((0.0, 0.0), 0.5).fits_inside(unit_grid)
        assert not BumpTestFunction((0.8, 0.0), 0.5).fits_inside(unit_grid)

    def test_time_bump(self):
        """Test the temporal factor and its support."""
        f = BumpTestFunction((0.0, 0.0), 0.5, time_center=0.5, time_radius=0.2)
        assert f.temporal(0.5) == 1.0
        assert f.temporal(0.8) == 0.0
        assert BumpTestFunction((0.0, 0.0), 0.5).temporal(9.0) == 1.0
