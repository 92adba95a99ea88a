"""Tests for regularized factorization imaging."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eitshape.core import BoundaryGrid, IndicatorField, SamplingGrid
from eitshape.factorization import (FilterSpec, apply_noise, contour_points,
                                    filter_value, indicator, level_set,
                                    w_field)
from eitshape.forward_series import (SeriesCoefficients,
                                     assemble_series_operator)

GRID = BoundaryGrid(64)


def series_system(delta=0.0, seed=0, rho=0.5, gamma=1.0):
    coeffs = SeriesCoefficients(rho=rho, gamma=gamma, truncation=20)
    a = assemble_series_operator(coeffs, GRID).values
    return apply_noise(a, delta, seed)


class TestFilters:
    def test_tikhonov_formula(self):
        spec = FilterSpec.tikhonov(0.25)
        t = np.array([0.0, 0.5, 1.0, 2.0])
        np.testing.assert_allclose(filter_value(spec, t),
                                   t ** 2 / (t ** 2 + 0.25), rtol=1e-14)

    def test_landweber_single_sweep_is_linear(self):
        """One iteration (alpha = 1) gives phi = beta t^2 exactly."""
        spec = FilterSpec.landweber(1.0, beta=0.5)
        t = np.array([0.1, 0.5, 1.0])
        np.testing.assert_allclose(filter_value(spec, t, top_singular=1.0),
                                   0.5 * t ** 2, rtol=1e-12)

    def test_landweber_default_beta_halves_the_stability_limit(self):
        spec = FilterSpec.landweber(0.1)
        assert spec.resolved_beta(2.0) == pytest.approx(1.0 / 8.0)

    def test_landweber_rejects_unstable_step(self):
        spec = FilterSpec.landweber(0.5, beta=2.0)
        with pytest.raises(ValueError):
            filter_value(spec, np.array([1.5]), top_singular=1.5)

    def test_spectral_cutoff_is_a_step(self):
        spec = FilterSpec.spectral_cutoff(0.25)
        np.testing.assert_allclose(
            filter_value(spec, np.array([0.4, 0.5, 0.6])),
            [0.0, 1.0, 1.0])

    def test_filters_stay_in_unit_interval_and_increase(self):
        t = np.linspace(0.0, 3.0, 200)
        for spec in (FilterSpec.tikhonov(0.1),
                     FilterSpec.landweber(0.05),
                     FilterSpec.spectral_cutoff(0.1)):
            phi = filter_value(spec, t, top_singular=3.0)
            assert np.all(phi >= 0.0) and np.all(phi <= 1.0)
            assert np.all(np.diff(phi) >= -1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            FilterSpec(kind="unknown", alpha=0.1)
        with pytest.raises(ValueError):
            FilterSpec.tikhonov(0.0)
        with pytest.raises(ValueError):
            FilterSpec.landweber(0.3)        # 1/0.3 is not an integer
        with pytest.raises(ValueError):
            FilterSpec.tikhonov(0.1).resolved_beta(1.0)
        with pytest.raises(ValueError):
            FilterSpec(kind="tikhonov", alpha=0.1, beta=0.5)
        with pytest.raises(ValueError):
            filter_value(FilterSpec.tikhonov(0.1), np.array([-1.0]))


class TestApplyNoise:
    def test_zero_delta_is_exact(self):
        rng = np.random.default_rng(3)
        a = rng.normal(size=(12, 12))
        system = apply_noise(a, 0.0, seed=7)
        np.testing.assert_array_equal(system.noisy, a)
        recon = system.u @ np.diag(system.s) @ system.vh
        np.testing.assert_allclose(recon, a, atol=1e-12)

    def test_spectral_norm_bound(self):
        """The multiplicative perturbation obeys the Hadamard-product bound
        ||A^d - A||_2 <= delta ||A||_2 for every draw."""
        rng = np.random.default_rng(11)
        for trial in range(100):
            shape = (rng.integers(2, 20), rng.integers(2, 20))
            a = rng.normal(size=shape)
            delta = float(rng.uniform(0.0, 0.5))
            system = apply_noise(a, delta, seed=trial)
            lhs = np.linalg.norm(system.noisy - a, ord=2)
            rhs = delta * np.linalg.norm(a, ord=2)
            assert lhs <= rhs * (1.0 + 1e-12)

    def test_deterministic_for_fixed_seed(self):
        a = np.arange(16.0).reshape(4, 4)
        s1 = apply_noise(a, 0.05, seed=42)
        s2 = apply_noise(a, 0.05, seed=42)
        np.testing.assert_array_equal(s1.noisy, s2.noisy)
        s3 = apply_noise(a, 0.05, seed=43)
        assert np.any(s3.noisy != s1.noisy)

    def test_handles_rectangular_matrices(self):
        a = np.arange(15.0).reshape(5, 3)
        system = apply_noise(a, 0.01, seed=0)
        assert system.u.shape == (5, 3)
        assert system.s.shape == (3,)
        assert system.vh.shape == (3, 3)

    def test_validation(self):
        with pytest.raises(ValueError):
            apply_noise(np.zeros(4), 0.0, 0)
        with pytest.raises(ValueError):
            apply_noise(np.zeros((2, 2)), -0.1, 0)

    @given(delta=st.floats(0.0, 0.4), seed=st.integers(0, 10 ** 6))
    @settings(max_examples=25, deadline=None)
    def test_noise_bound_property(self, delta, seed):
        a = np.arange(1.0, 26.0).reshape(5, 5)
        system = apply_noise(a, delta, seed)
        assert (np.linalg.norm(system.noisy - a, ord=2)
                <= delta * np.linalg.norm(a, ord=2) * (1.0 + 1e-12))


class TestIndicator:
    def test_interior_exterior_dichotomy(self):
        """The filtered Picard sum at an exterior point exceeds the interior
        value by an order of magnitude for the concentric-disc operator."""
        system = series_system()
        spec = FilterSpec.tikhonov(1e-7)
        inside = indicator(system, spec, (0.0, 0.0), GRID)
        outside = indicator(system, spec, (0.0, 0.6), GRID)
        assert inside > 0.0
        assert outside / inside >= 10.0

    def test_dichotomy_for_landweber_filter(self):
        system = series_system()
        spec = FilterSpec.landweber(1e-4)
        inside = indicator(system, spec, (0.0, 0.0), GRID)
        outside = indicator(system, spec, (0.0, 0.6), GRID)
        assert outside / inside >= 10.0

    def test_zero_operator_raises_when_imaged(self):
        system = apply_noise(np.zeros((GRID.size, GRID.size)), 0.0, 0)
        spec = FilterSpec.tikhonov(1e-7)
        assert indicator(system, spec, (0.1, 0.1), GRID) == 0.0
        with pytest.raises(RuntimeError):
            w_field(system, spec, SamplingGrid.from_step(0.2), GRID)


class TestWField:
    def test_normalized_to_unit_maximum(self):
        field = w_field(series_system(), FilterSpec.tikhonov(1e-7),
                        SamplingGrid.from_step(0.1), GRID)
        vals = field.masked_values()
        assert vals.max() == pytest.approx(1.0)
        assert np.all(vals > 0.0)
        assert field.metadata["zero_indicator_points"] == 0

    def test_high_values_concentrate_inside_the_disc(self):
        sampling = SamplingGrid.from_step(0.05)
        field = w_field(series_system(), FilterSpec.tikhonov(1e-7),
                        sampling, GRID)
        pts = sampling.points()
        inside = np.hypot(pts[:, 0], pts[:, 1]) <= 0.5
        rec = field.masked_values() >= 0.1
        mismatch = np.count_nonzero(rec != inside)
        assert mismatch <= 40        # a thin ring around the interface

    def test_degradation_grows_with_noise(self):
        """The mismatch area of {W >= 0.1} against the true disc is
        non-decreasing in the noise level, averaged over five seeds."""
        sampling = SamplingGrid.from_step(0.05)
        pts = sampling.points()
        inside = np.hypot(pts[:, 0], pts[:, 1]) <= 0.5
        spec = FilterSpec.tikhonov(1e-7)
        means = []
        for delta in (0.0, 0.1, 0.3, 1.0):
            diffs = []
            for seed in range(5):
                field = w_field(series_system(delta=delta, seed=seed),
                                spec, sampling, GRID)
                rec = field.masked_values() >= 0.1
                diffs.append(np.count_nonzero(rec != inside))
            means.append(np.mean(diffs))
        assert all(a <= b for a, b in zip(means, means[1:]))
        assert means[-1] > means[0]

    def test_landweber_metadata_records_resolved_beta(self):
        system = series_system()
        field = w_field(system, FilterSpec.landweber(1e-3),
                        SamplingGrid.from_step(0.2), GRID)
        assert field.metadata["beta"] == pytest.approx(
            1.0 / (2.0 * system.top_singular ** 2))


def radial_test_field(step=0.05, half_width=0.7):
    """W = 1 - r sampled on a full lattice (all points retained)."""
    n = int(round(2 * half_width / step)) + 1
    axis = -half_width + step * np.arange(n)
    xx, yy = np.meshgrid(axis, axis, indexing="ij")
    grid = SamplingGrid(x=axis, y=axis.copy(),
                        mask=np.ones((n, n), dtype=bool))
    vals = 1.0 - np.hypot(xx, yy)
    return IndicatorField(grid=grid, values=vals, method="test")


class TestLevelSet:
    def test_constant_field_has_no_level_set(self):
        field = radial_test_field()
        flat = IndicatorField(grid=field.grid,
                              values=np.full(field.grid.shape, 0.3),
                              method="test")
        assert level_set(flat, 0.5).shape == (0, 2, 2)

    def test_radial_field_level_set_is_a_circle(self):
        """{1 - r = 0.5} is the circle r = 0.5; every interpolated segment
        endpoint lies on it up to the O(h^2) interpolation error."""
        field = radial_test_field(step=0.05)
        segments = level_set(field, 0.5)
        assert segments.shape[0] > 0
        pts = segments.reshape(-1, 2)
        radii = np.hypot(pts[:, 0], pts[:, 1])
        np.testing.assert_allclose(radii, 0.5, atol=5e-3)

    def test_level_set_length_approximates_circumference(self):
        field = radial_test_field(step=0.02)
        segments = level_set(field, 0.5)
        length = np.sum(np.hypot(segments[:, 1, 0] - segments[:, 0, 0],
                                 segments[:, 1, 1] - segments[:, 0, 1]))
        assert length == pytest.approx(np.pi, rel=0.02)

    def test_masked_cells_are_skipped(self):
        field = radial_test_field(step=0.05)
        vals = field.values.copy()
        vals[: vals.shape[0] // 2, :] = np.nan
        half = IndicatorField(grid=field.grid, values=vals, method="test")
        segments = level_set(half, 0.5)
        assert segments.shape[0] > 0
        pts = segments.reshape(-1, 2)
        # only the x >= 0 half of the circle survives
        assert pts[:, 0].min() > -0.05

    def test_contour_points_are_unique(self):
        field = radial_test_field()
        segments = level_set(field, 0.5)
        pts = contour_points(segments)
        assert pts.shape[1] == 2
        assert np.unique(pts, axis=0).shape[0] == pts.shape[0]
        assert pts.shape[0] <= 2 * segments.shape[0]

    def test_contour_points_of_empty_set(self):
        assert contour_points(np.empty((0, 2, 2))).shape == (0, 2)
