"""Tests for grid functions, transforms, star products, and the twisted
regular representation."""
import numpy as np
import pytest

import scipy.integrate

from ncspaces.errors import GridMismatchError, SizeCapError, ValidationError
from ncspaces.gridfn import (
    GridFunction,
    freq_grid_vectors,
    integral,
    l2_norm,
    read_gridfn,
    to_frequency,
    to_position,
    write_gridfn,
)
from ncspaces.moyal import (
    dimension_reduction_check,
    interior_frequency_mask,
    moyal_direct,
    quantization_constant,
    regular_rep_matrix,
    rep_operator_norm,
    sobolev_norm,
    sphere_surface,
    star_product_fourier,
    twisted_convolve,
    twisted_involution,
)
from ncspaces.skew import SkewMatrix

THETA = SkewMatrix.rotation(1.0)


def band_limited(rng, dim, half_length, points, fraction=1 / 3):
    """Random smooth function whose transform is supported well inside the box."""
    shape = (points,) * dim
    raw = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    proto = GridFunction(dim, half_length, points, raw, side="frequency")
    vec = freq_grid_vectors(proto)
    smax = np.abs(proto.freq_axis()).max()
    mask = np.all(np.abs(vec) <= fraction * smax, axis=1).reshape(shape)
    return to_position(GridFunction(dim, half_length, points, raw * mask, side="frequency"))


class TestGridFunction:
    def test_roundtrip_transform(self):
        f = GridFunction.gaussian(2, 8.0, 32, sigma=1.2, center=(0.4, -0.6))
        back = to_position(to_frequency(f))
        assert np.abs(back.values - f.values).max() <= 1e-13

    def test_parseval(self):
        f = GridFunction.gaussian(1, 10.0, 64, sigma=0.8)
        assert l2_norm(to_frequency(f)) == pytest.approx(l2_norm(f), rel=1e-12)

    def test_gaussian_transform_analytic(self):
        # unit-height Gaussian: fhat(s) = sigma^d (2 pi)^{-d/2} exp(-s^2 sigma^2/2)
        sigma = 1.3
        f = GridFunction.gaussian(1, 12.0, 128, sigma=sigma, normalized=False)
        fhat = to_frequency(f)
        s = fhat.freq_axis()
        expected = sigma / np.sqrt(2 * np.pi) * np.exp(-(s**2) * sigma**2 / 2)
        assert np.abs(fhat.values - expected).max() <= 1e-12

    def test_power_of_two_enforced(self):
        with pytest.raises(ValidationError):
            GridFunction(1, 4.0, 48, np.zeros(48))

    def test_boundary_ratio(self):
        f = GridFunction.gaussian(1, 10.0, 64, sigma=1.0)
        assert f.boundary_ratio() <= 1e-8
        g = GridFunction.from_function(1, 10.0, 64, lambda x: np.ones_like(x))
        assert g.boundary_ratio() == 1.0

    def test_serialization_roundtrip(self, tmp_path):
        f = GridFunction.gaussian(2, 6.0, 16, sigma=0.75, center=(0.2, 0.1))
        path = tmp_path / "f.gridfn"
        write_gridfn(f, path)
        g = read_gridfn(path)
        assert g.dim == 2 and g.points == 16 and g.half_length == 6.0
        # payload is complex64: round trip to that precision
        assert np.abs(g.values - f.values).max() <= 1e-6

    def test_serialization_rejects_truncated(self, tmp_path):
        f = GridFunction.gaussian(1, 6.0, 16)
        path = tmp_path / "f.gridfn"
        write_gridfn(f, path)
        data = path.read_bytes()
        path.write_bytes(data[:-8])
        with pytest.raises(ValidationError):
            read_gridfn(path)


class TestStarProduct:
    def test_zero_theta_is_pointwise_direct(self):
        f = GridFunction.gaussian(2, 8.0, 32, sigma=1.0)
        g = GridFunction.gaussian(2, 8.0, 32, sigma=1.4, center=(0.5, 0.2))
        prod = moyal_direct(f, g, SkewMatrix.zero(2))
        assert np.abs(prod.values - f.values * g.values).max() <= 1e-8

    def test_zero_theta_is_pointwise_fourier(self):
        # M = 64 so the frequency box holds the product's spectrum to below 1e-8
        f = GridFunction.gaussian(2, 8.0, 64, sigma=1.0)
        g = GridFunction.gaussian(2, 8.0, 64, sigma=1.4, center=(0.5, 0.2))
        prod = star_product_fourier(f, g, SkewMatrix.zero(2))
        assert np.abs(prod.values - f.values * g.values).max() <= 1e-8

    def test_disjoint_bumps_at_zero_theta(self):
        def bump(center):
            def fn(x):
                u = np.clip((x - center) / 1.5, -1, 1)
                return np.where(np.abs(u) < 1, np.exp(-1 / (1 - u**2 + 1e-300)), 0.0)
            return fn

        f = GridFunction.from_function(1, 10.0, 64, bump(-4.0))
        g = GridFunction.from_function(1, 10.0, 64, bump(4.0))
        prod = moyal_direct(f, g, SkewMatrix.zero(1))
        assert np.abs(prod.values).max() <= 1e-12

    def test_direct_vs_fourier_gaussians(self):
        f = GridFunction.gaussian(2, 8.0, 64, sigma=1.0)
        g = GridFunction.gaussian(2, 8.0, 64, sigma=1.3, center=(0.4, -0.3))
        d1 = moyal_direct(f, g, THETA)
        d2 = star_product_fourier(f, g, THETA)
        assert np.abs(d1.values - d2.values).max() <= 1e-6

    def test_associativity_band_limited(self):
        rng = np.random.default_rng(0)
        theta = SkewMatrix.rotation(0.7)
        f, g, h = (band_limited(rng, 2, 8.0, 32) for _ in range(3))
        lhs = star_product_fourier(star_product_fourier(f, g, theta), h, theta)
        rhs = star_product_fourier(f, star_product_fourier(g, h, theta), theta)
        assert np.abs(lhs.values - rhs.values).max() <= 1e-8

    def test_tracial_identity(self):
        rng = np.random.default_rng(1)
        theta = SkewMatrix.rotation(0.9)
        f, g = band_limited(rng, 2, 8.0, 32), band_limited(rng, 2, 8.0, 32)
        star = star_product_fourier(f, g, theta)
        plain = integral(GridFunction(2, 8.0, 32, f.values * g.values))
        assert abs(integral(star) - plain) <= 1e-8

    def test_grid_mismatch_rejected(self):
        f = GridFunction.gaussian(2, 8.0, 32)
        g = GridFunction.gaussian(2, 8.0, 64)
        with pytest.raises(GridMismatchError):
            moyal_direct(f, g, THETA)

    def test_direct_guards(self):
        f = GridFunction.gaussian(2, 8.0, 128)
        with pytest.raises(SizeCapError):
            moyal_direct(f, f, THETA)


class TestTwistedConvolve:
    def test_zero_theta_matches_plain_convolution(self):
        rng = np.random.default_rng(2)
        f = band_limited(rng, 1, 8.0, 32, fraction=0.4)
        g = band_limited(rng, 1, 8.0, 32, fraction=0.4)
        fh, gh = to_frequency(f), to_frequency(g)
        out = twisted_convolve(fh, gh, SkewMatrix.zero(1))
        # oracle: zero-padded linear convolution, cropped to the box
        n = 32
        conv = np.convolve(fh.values, gh.values, mode="full")[n // 2 : n // 2 + n]
        conv = conv * fh.freq_step
        assert np.abs(out.values - conv).max() <= 1e-12

    def test_delta_input_shifts_with_phase(self):
        m = 16
        fh = np.zeros((m, m), dtype=complex)
        fh[10, 7] = 2.0
        fhat = GridFunction(2, 6.0, m, fh, side="frequency")
        g = GridFunction.gaussian(2, 6.0, m, sigma=1.0)
        ghat = to_frequency(g)
        out = twisted_convolve(fhat, ghat, THETA)
        freqs = fhat.freq_axis()
        s0 = np.array([freqs[10], freqs[7]])
        tvec = freq_grid_vectors(fhat)
        phases = np.exp(0.5j * (s0 @ THETA.as_array() @ (tvec - s0).T))
        idx = np.rint((tvec - s0) / fhat.freq_step).astype(int) + m // 2
        ok = ((idx >= 0) & (idx < m)).all(axis=1)
        lin = np.clip(idx[:, 0], 0, m - 1) * m + np.clip(idx[:, 1], 0, m - 1)
        oracle = np.where(ok, 2.0 * ghat.values.reshape(-1)[lin] * phases, 0.0)
        oracle = oracle * fhat.freq_step**2
        assert np.abs(out.values.reshape(-1) - oracle).max() <= 1e-14

    def test_requires_frequency_side(self):
        f = GridFunction.gaussian(1, 8.0, 32)
        with pytest.raises(ValidationError):
            twisted_convolve(f, f, SkewMatrix.zero(1))


class TestRegularRepresentation:
    def test_delta_symbol_gives_identity(self):
        m = 8
        fh = np.zeros((m, m), dtype=complex)
        fh[m // 2, m // 2] = 3.0  # delta at frequency 0
        fhat = GridFunction(2, 6.0, m, fh, side="frequency")
        mat = regular_rep_matrix(fhat, THETA)
        expected = 3.0 * fhat.freq_step**2 * np.eye(m * m)
        assert np.abs(mat - expected).max() <= 1e-14

    def test_zero_theta_norm_close_to_sup(self):
        f = GridFunction.gaussian(1, 10.0, 256, sigma=1.0)
        mat = regular_rep_matrix(f, SkewMatrix.zero(1))
        norm = rep_operator_norm(mat)
        peak = np.abs(f.values).max()
        assert norm <= peak + 1e-10
        assert norm == pytest.approx(peak, rel=2e-3)
        assert norm == pytest.approx(np.linalg.norm(mat, 2), rel=1e-8)

    def test_multiplicativity_interior(self):
        f = GridFunction.gaussian(2, 8.0, 32, sigma=1.0)
        g = GridFunction.gaussian(2, 8.0, 32, sigma=1.2, center=(0.3, -0.2))
        lf = regular_rep_matrix(f, THETA)
        lg = regular_rep_matrix(g, THETA)
        lfg = regular_rep_matrix(star_product_fourier(f, g, THETA), THETA)
        mask = interior_frequency_mask(f, 0.4)
        sub = np.ix_(mask, mask)
        assert np.abs((lf @ lg - lfg)[sub]).max() <= 1e-6

    def test_star_representation_exact_for_band_limited(self):
        rng = np.random.default_rng(3)
        f = band_limited(rng, 2, 8.0, 16, fraction=0.4)
        fhat = to_frequency(f)
        lf = regular_rep_matrix(f, THETA)
        lfstar = regular_rep_matrix(to_position(twisted_involution(fhat)), THETA)
        assert np.abs(lfstar - lf.conj().T).max() <= 1e-14

    def test_full_convention_is_doubled_half(self):
        f = GridFunction.gaussian(2, 8.0, 16, sigma=1.0)
        full = regular_rep_matrix(f, THETA, convention="full")
        half2 = regular_rep_matrix(f, THETA.scaled(2), convention="half")
        assert np.abs(full - half2).max() == 0

    def test_size_cap(self):
        f = GridFunction.gaussian(2, 8.0, 128)
        with pytest.raises(SizeCapError):
            regular_rep_matrix(f, THETA)


class TestSobolev:
    def test_alpha_zero_is_l2(self):
        f = GridFunction.gaussian(1, 10.0, 64, sigma=0.7)
        assert sobolev_norm(f, 0.0) == pytest.approx(l2_norm(f), rel=1e-12)

    def test_single_mode(self):
        m, L = 64, 8.0
        f0 = GridFunction.from_function(1, L, m, lambda x: np.exp(1j * (np.pi / L) * 4 * x))
        s0 = (np.pi / L) * 4
        expected = (1 + s0**2) ** 1.25 * l2_norm(f0)
        assert sobolev_norm(f0, 2.5) == pytest.approx(expected, rel=1e-12)

    def test_gaussian_alpha2_against_quadrature(self):
        # adaptive quadrature of the continuum weight against the analytic
        # transform of the L2-normalized Gaussian
        f = GridFunction.gaussian(1, 12.0, 256, sigma=1.0)
        peak = f.values.real.max()

        def weighted(s):
            fhat = peak / (2 * np.pi) * np.sqrt(2 * np.pi) * np.exp(-(s**2) / 2)
            return (1 + s**2) ** 2 * fhat**2

        val, _ = scipy.integrate.quad(weighted, -30, 30)
        expected = np.sqrt(2 * np.pi * val)
        assert sobolev_norm(f, 2.0) == pytest.approx(expected, abs=1e-6)

    def test_monotone_in_alpha(self):
        rng = np.random.default_rng(4)
        f = band_limited(rng, 1, 8.0, 32)
        norms = [sobolev_norm(f, a) for a in (0.0, 0.5, 1.0, 2.0, 3.5)]
        assert all(a <= b + 1e-12 for a, b in zip(norms, norms[1:]))


class TestQuantizationConstant:
    def test_plane_value(self):
        qc = quantization_constant(3.0, 2, 1.0)
        assert qc.value == pytest.approx(np.sqrt(np.pi), rel=1e-15)

    def test_sphere_surfaces(self):
        assert sphere_surface(2) == pytest.approx(2 * np.pi)
        assert sphere_surface(3) == pytest.approx(4 * np.pi)

    def test_large_alpha_limit(self):
        vals = [quantization_constant(a, 2, 1.0).value for a in (3.0, 10.0, 100.0, 1000.0)]
        assert all(a > b for a, b in zip(vals, vals[1:]))
        assert vals[-1] < 0.06

    def test_divergence_boundary(self):
        with pytest.raises(ValidationError):
            quantization_constant(2.0, 2, 1.0)


class TestDimensionReduction:
    def test_decoupled_last_axis_is_exact(self):
        theta = SkewMatrix.from_upper(2, {(0, 1): 0})
        f = GridFunction.gaussian(1, 10.0, 64, sigma=1.0)
        rep = dimension_reduction_check(f, theta, 3, allow_singular=True)
        assert max(rep.deviations) == 0

    def test_gaussian_sequence_converges(self):
        theta = SkewMatrix.from_upper(2, {(0, 1): 0.2})
        f = GridFunction.gaussian(1, 10.0, 128, sigma=1.0)
        rep = dimension_reduction_check(f, theta, 8)
        assert all(a > b for a, b in zip(rep.deviations, rep.deviations[1:]))
        assert rep.deviations[-1] <= 1e-4
        assert rep.observed_rate == pytest.approx(1.0, abs=0.1)
        assert rep.norms[-1] == pytest.approx(rep.reference_norm, rel=1e-6)

    def test_deviation_bounded_by_beta(self):
        theta = SkewMatrix.from_upper(2, {(0, 1): 0.2})
        f = GridFunction.gaussian(1, 10.0, 128, sigma=1.0)
        rep = dimension_reduction_check(f, theta, 6)
        for dev, bound in zip(rep.deviations, rep.bounds):
            assert dev <= bound

    def test_singular_theta_rejected_by_default(self):
        theta = SkewMatrix.from_upper(2, {(0, 1): 0})
        f = GridFunction.gaussian(1, 10.0, 64)
        with pytest.raises(ValidationError):
            dimension_reduction_check(f, theta, 3)
