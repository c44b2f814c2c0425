import math

import numpy as np
import pytest

from randfield import (
    Grid,
    Kernel1D,
    RngSeed,
    ScalarField,
    field_integral,
    gaussian_kernel_1d,
    smooth,
    smoothed_noise_covariance,
    smoothness_params,
    stationary_variance,
    white_noise,
)

SQRT_8LN2 = math.sqrt(8.0 * math.log(2.0))


class TestSmoothnessParams:
    def test_fwhm_ten(self):
        p = smoothness_params(fwhm=10.0)
        assert p.lam == pytest.approx(0.0277259, abs=1e-6)
        assert p.sigma == pytest.approx(10.0 / SQRT_8LN2)

    def test_sigma_one(self):
        assert smoothness_params(sigma=1.0).lam == pytest.approx(0.5)

    def test_fwhm_for_unit_sigma(self):
        assert smoothness_params(fwhm=SQRT_8LN2).sigma == pytest.approx(1.0)

    def test_lambda_round_trip(self):
        p = smoothness_params(lam=0.125)
        assert p.lam == pytest.approx(0.125, rel=1e-12)
        assert p.fwhm == pytest.approx(p.sigma * SQRT_8LN2, rel=1e-12)

    def test_requires_exactly_one_input(self):
        with pytest.raises(ValueError):
            smoothness_params()
        with pytest.raises(ValueError):
            smoothness_params(sigma=1.0, fwhm=2.0)
        with pytest.raises(ValueError):
            smoothness_params(fwhm=-3.0)


class TestGaussianKernel:
    def test_near_zero_sigma_is_discrete_delta(self):
        k = gaussian_kernel_1d(smoothness_params(sigma=0.01), delta=1.0)
        center = k.taps.size // 2
        assert k.taps[center] >= 1.0 - 1e-12

    def test_taps_sum_to_one(self):
        for fwhm in (1.0, 3.7, 10.0, 25.0):
            k = gaussian_kernel_1d(smoothness_params(fwhm=fwhm), delta=1.0)
            assert abs(k.taps.sum() - 1.0) <= 1e-12

    def test_sigma_equals_delta_tap_ratio(self):
        k = gaussian_kernel_1d(smoothness_params(sigma=1.0), delta=1.0)
        center = k.taps.size // 2
        ratio = k.taps[center + 1] / k.taps[center]
        assert ratio == pytest.approx(math.exp(-0.5), rel=1e-12)

    def test_truncation_radius(self):
        k = gaussian_kernel_1d(smoothness_params(fwhm=10.0), delta=1.0)
        sigma = 10.0 / SQRT_8LN2
        assert k.truncation_radius == math.ceil(4.0 * sigma)
        assert k.taps.size == 2 * k.truncation_radius + 1

    def test_kernel_invariants_enforced(self):
        with pytest.raises(ValueError):
            Kernel1D(taps=np.array([0.5, 0.5]), scale_sigma=1.0, truncation_radius=1)
        with pytest.raises(ValueError):
            Kernel1D(taps=np.array([0.2, 0.5, 0.2]), scale_sigma=1.0, truncation_radius=1)
        with pytest.raises(ValueError):
            Kernel1D(taps=np.array([0.3, 0.4, 0.3001]) / 1.0001, scale_sigma=1.0, truncation_radius=1)


class TestSmooth:
    def test_impulse_sifts_to_tap_outer_product(self):
        k = gaussian_kernel_1d(smoothness_params(fwhm=4.0), delta=1.0)
        r = k.truncation_radius
        n = 4 * r + 5
        vals = np.zeros((n, n))
        vals[n // 2, n // 2] = 1.0
        out = smooth(ScalarField(Grid(dims=(n, n)), vals.ravel()), k)
        expected = np.zeros((n, n))
        lo = n // 2 - r
        hi = n // 2 + r + 1
        expected[lo:hi, lo:hi] = np.outer(k.taps, k.taps)
        assert np.allclose(out.values, expected, atol=1e-15)

    def test_mass_conserved_for_interior_support(self):
        k = gaussian_kernel_1d(smoothness_params(fwhm=4.0), delta=1.0)
        r = k.truncation_radius
        n = 6 * r
        vals = np.zeros((n, n))
        rng = RngSeed(31).generator()
        vals[2 * r : -2 * r, 2 * r : -2 * r] = rng.normal(size=(n - 4 * r, n - 4 * r))
        f = ScalarField(Grid(dims=(n, n)), vals.ravel())
        out = smooth(f, k)
        assert field_integral(out) == pytest.approx(field_integral(f), rel=1e-8)

    def test_constant_interior_preserved_boundary_shrinks(self):
        k = gaussian_kernel_1d(smoothness_params(fwhm=5.0), delta=1.0)
        r = k.truncation_radius
        n = 4 * r
        c = 2.5
        out = smooth(ScalarField(Grid(dims=(n, n)), np.full(n * n, c)), k)
        interior = out.values[r : n - r, r : n - r]
        assert np.allclose(interior, c, atol=1e-10)
        assert out.values[0, 0] < c

    def test_output_in_convex_hull_with_zero(self):
        k = gaussian_kernel_1d(smoothness_params(fwhm=6.0), delta=1.0)
        f = white_noise(Grid(dims=(40, 40)), 1.0, RngSeed(33))
        out = smooth(f, k)
        lo = min(0.0, f.values.min())
        hi = max(0.0, f.values.max())
        assert out.values.min() >= lo - 1e-12
        assert out.values.max() <= hi + 1e-12

    def test_linearity(self):
        k = gaussian_kernel_1d(smoothness_params(fwhm=4.0), delta=1.0)
        g = Grid(dims=(30, 30))
        x = white_noise(g, 1.0, RngSeed(34))
        y = white_noise(g, 1.0, RngSeed(35))
        a, b = 0.8, -1.9
        combo = ScalarField(g, a * x.values.ravel() + b * y.values.ravel())
        lhs = smooth(combo, k).values
        rhs = a * smooth(x, k).values + b * smooth(y, k).values
        scale = np.abs(rhs).max()
        assert np.allclose(lhs, rhs, atol=1e-10 * scale)

    def test_iterated_smoothing_reduces_variance(self):
        k = gaussian_kernel_1d(smoothness_params(fwhm=3.0), delta=1.0)
        f = white_noise(Grid(dims=(64, 64)), 1.0, RngSeed(36))
        variances = []
        cur = f
        for _ in range(9):
            cur = smooth(cur, k)
            variances.append(cur.values.var())
        assert all(b < a for a, b in zip(variances, variances[1:]))

    def test_smoothed_marginal_stays_gaussian(self):
        k = gaussian_kernel_1d(smoothness_params(fwhm=4.0), delta=1.0)
        g = Grid(dims=(25, 25))
        n_rep = 2000
        center = np.empty(n_rep)
        seed = RngSeed(37)
        for r in range(n_rep):
            out = smooth(white_noise(g, 1.0, seed.child(r)), k)
            center[r] = out.values[12, 12]
        z = (center - center.mean()) / center.std()
        skew = (z**3).mean()
        kurt = (z**4).mean() - 3.0
        assert abs(skew) < 4.0 * math.sqrt(6.0 / n_rep)
        assert abs(kurt) < 4.0 * math.sqrt(24.0 / n_rep)

    def test_rejects_kernel_longer_than_axis_support(self):
        k = gaussian_kernel_1d(smoothness_params(fwhm=20.0), delta=1.0)
        f = white_noise(Grid(dims=(8, 8)), 1.0, RngSeed(38))
        with pytest.raises(ValueError):
            smooth(f, k)


class TestSmoothedNoiseCovariance:
    def test_same_point_positive(self):
        g = Grid(dims=(41, 41))
        k = gaussian_kernel_1d(smoothness_params(fwhm=5.0), delta=1.0)
        v = smoothed_noise_covariance(k, 1.0, (20, 20), (20, 20), g)
        assert v > 0.0

    def test_interior_variance_matches_stationary_value(self):
        g = Grid(dims=(41, 41))
        k = gaussian_kernel_1d(smoothness_params(fwhm=5.0), delta=1.0)
        v = smoothed_noise_covariance(k, 0.7, (20, 20), (20, 20), g)
        assert v == pytest.approx(stationary_variance(k, 0.7, 2), rel=1e-12)

    def test_disjoint_supports_give_zero(self):
        g = Grid(dims=(101, 101))
        k = gaussian_kernel_1d(smoothness_params(fwhm=5.0), delta=1.0)
        span = 2 * k.truncation_radius
        v = smoothed_noise_covariance(k, 1.0, (10, 10), (10 + span + 1, 10), g)
        assert v == 0.0

    def test_rejects_point_outside_grid(self):
        g = Grid(dims=(10, 10))
        k = gaussian_kernel_1d(smoothness_params(sigma=0.5), delta=1.0)
        with pytest.raises(ValueError):
            smoothed_noise_covariance(k, 1.0, (0, 0), (0, 10), g)

    def test_monte_carlo_covariance_agrees(self):
        g = Grid(dims=(41, 41))
        k = gaussian_kernel_1d(smoothness_params(fwhm=5.0), delta=1.0)
        x, y = (20, 20), (20, 22)
        theory = smoothed_noise_covariance(k, 1.0, x, y, g)
        var = smoothed_noise_covariance(k, 1.0, x, x, g)
        n_rep = 2000
        a = np.empty(n_rep)
        b = np.empty(n_rep)
        seed = RngSeed(39)
        for r in range(n_rep):
            out = smooth(white_noise(g, 1.0, seed.child(r)), k)
            a[r] = out.values[x]
            b[r] = out.values[y]
        sample_cov = np.cov(a, b, ddof=1)[0, 1]
        se = math.sqrt((var * var + theory * theory) / (n_rep - 1))
        assert abs(sample_cov - theory) < 4.0 * se


def test_stationary_variance_dimension_power():
    k = gaussian_kernel_1d(smoothness_params(fwhm=7.0), delta=1.0)
    base = float(k.taps @ k.taps)
    assert stationary_variance(k, 1.0, 1) == pytest.approx(base)
    assert stationary_variance(k, 1.0, 2) == pytest.approx(base**2)
    assert stationary_variance(k, 2.0, 2) == pytest.approx(4.0 * base**2)
