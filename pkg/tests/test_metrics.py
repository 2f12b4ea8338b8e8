import numpy as np
import pytest

import oracles
from fegan import metrics
from fegan.errors import InvalidArgument


def random_psd(rng, d):
    a = rng.standard_normal((d, d))
    return a @ a.T + 0.1 * np.eye(d)


class TestPsnr:
    def test_identical_images_capped(self, rng):
        image = rng.random((16, 16, 3))
        assert metrics.psnr(image, image) == 100.0

    def test_uniform_difference_analytic(self):
        a = np.full((8, 8), 0.5)
        assert metrics.psnr(a, a + 0.1) == pytest.approx(20.0, abs=1e-9)

    def test_matches_scalar_oracle(self, rng):
        a = rng.random((6, 6, 3))
        b = rng.random((6, 6, 3))
        assert metrics.psnr(a, b) == pytest.approx(oracles.psnr_oracle(a, b), abs=1e-9)

    def test_monotone_in_noise_amplitude(self, rng):
        base = rng.random((16, 16))
        noise = rng.standard_normal((16, 16))
        values = [metrics.psnr(base, base + amp * noise) for amp in (0.01, 0.05, 0.2)]
        assert values[0] > values[1] > values[2]

    def test_shape_mismatch_rejected(self):
        with pytest.raises(InvalidArgument):
            metrics.psnr(np.zeros((4, 4)), np.zeros((4, 5)))


class TestMaskedPsnr:
    def test_restricts_to_mask(self, rng):
        a = rng.random((8, 8, 3))
        b = a.copy()
        b[:4] += 0.5  # corrupt only the top half
        mask_bottom = np.zeros((8, 8))
        mask_bottom[4:] = 1.0
        assert metrics.masked_psnr(a, b, mask_bottom) == 100.0
        assert metrics.masked_psnr(a, b, 1.0 - mask_bottom) < 20.0


class TestSsim:
    def test_identical_images(self, rng):
        image = rng.random((16, 16))
        assert metrics.ssim(image, image) == pytest.approx(1.0)

    def test_symmetry(self, rng):
        a, b = rng.random((14, 14)), rng.random((14, 14))
        assert metrics.ssim(a, b) == pytest.approx(metrics.ssim(b, a), abs=1e-12)

    def test_constant_images_closed_form(self):
        a = np.full((12, 12), 0.2)
        b = np.full((12, 12), 0.4)
        c1 = 0.01**2
        expected = (2 * 0.2 * 0.4 + c1) / (0.2**2 + 0.4**2 + c1)
        assert metrics.ssim(a, b) == pytest.approx(expected, abs=1e-9)

    def test_matches_scalar_window_oracle(self, rng):
        a, b = rng.random((13, 13)), rng.random((13, 13))
        assert metrics.ssim(a, b) == pytest.approx(oracles.ssim_oracle(a, b), abs=1e-9)

    def test_too_small_rejected(self):
        with pytest.raises(InvalidArgument):
            metrics.ssim(np.zeros((8, 8)), np.zeros((8, 8)))


class TestFrechet:
    def test_identical_stats_zero(self, rng):
        sigma = random_psd(rng, 3)
        stats = metrics.GaussianStats(rng.random(3), sigma)
        assert metrics.frechet_distance(stats, stats) == pytest.approx(0.0, abs=1e-8)

    def test_one_dimensional_analytic(self):
        s1 = metrics.GaussianStats(np.array([0.0]), np.array([[1.0]]))
        s2 = metrics.GaussianStats(np.array([2.0]), np.array([[4.0]]))
        assert metrics.frechet_distance(s1, s2) == pytest.approx(5.0, abs=1e-10)

    def test_matches_eigendecomposition_oracle(self, rng):
        for _ in range(5):
            s1 = metrics.GaussianStats(rng.random(3), random_psd(rng, 3))
            s2 = metrics.GaussianStats(rng.random(3), random_psd(rng, 3))
            expected = oracles.frechet_oracle(s1.mu, s1.sigma, s2.mu, s2.sigma)
            assert metrics.frechet_distance(s1, s2) == pytest.approx(expected, abs=1e-6)

    def test_symmetry_and_identity(self, rng):
        s1 = metrics.GaussianStats(rng.random(4), random_psd(rng, 4))
        s2 = metrics.GaussianStats(rng.random(4), random_psd(rng, 4))
        assert metrics.frechet_distance(s1, s2) == pytest.approx(
            metrics.frechet_distance(s2, s1), abs=1e-6
        )
        assert metrics.frechet_distance(s1, s1) <= 1e-8

    def test_non_psd_rejected(self):
        with pytest.raises(InvalidArgument):
            metrics.GaussianStats(np.zeros(2), np.array([[1.0, 0.0], [0.0, -0.5]]))

    def test_asymmetric_covariance_rejected(self):
        with pytest.raises(InvalidArgument):
            metrics.GaussianStats(np.zeros(2), np.array([[1.0, 0.5], [0.0, 1.0]]))

    def test_dimension_mismatch_rejected(self, rng):
        s1 = metrics.GaussianStats(np.zeros(2), np.eye(2))
        s2 = metrics.GaussianStats(np.zeros(3), np.eye(3))
        with pytest.raises(InvalidArgument):
            metrics.frechet_distance(s1, s2)


class TestFitGaussian:
    def test_recovers_moments(self, rng):
        feats = rng.standard_normal((500, 3)) @ np.diag([1.0, 2.0, 0.5]) + np.array([1.0, -1.0, 0.0])
        stats = metrics.fit_gaussian(feats)
        assert np.allclose(stats.mu, feats.mean(axis=0))
        assert np.allclose(stats.sigma, np.cov(feats, rowvar=False), atol=1e-10)

    def test_needs_two_rows(self):
        with pytest.raises(InvalidArgument):
            metrics.fit_gaussian(np.zeros((1, 4)))
