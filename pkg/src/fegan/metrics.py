"""Evaluation primitives: PSNR, SSIM, and the Fréchet distance between
Gaussian feature statistics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import InvalidArgument

PSNR_CAP_DB = 100.0
_PSNR_MSE_FLOOR = 1e-10

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03

_LUMA = np.array([0.299, 0.587, 0.114], dtype=np.float64)


def to_unit_range(image: np.ndarray) -> np.ndarray:
    """Map a [-1, 1] image to the [0, 1] range metrics are computed on."""
    return np.clip((np.asarray(image, dtype=np.float64) + 1.0) / 2.0, 0.0, 1.0)


def psnr(a: np.ndarray, b: np.ndarray) -> float:
    """Peak signal-to-noise ratio in dB between [0, 1] images, capped at 100."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise InvalidArgument(f"shape mismatch: {a.shape} vs {b.shape}")
    mse = float(np.mean((a - b) ** 2))
    if mse < _PSNR_MSE_FLOOR:
        return PSNR_CAP_DB
    return float(10.0 * np.log10(1.0 / mse))


def masked_psnr(a: np.ndarray, b: np.ndarray, mask: np.ndarray) -> float:
    """PSNR restricted to pixels where the mask is 1 (100 dB for empty masks)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise InvalidArgument(f"shape mismatch: {a.shape} vs {b.shape}")
    select = np.asarray(mask) > 0.5
    if a.ndim == 3:
        select = np.broadcast_to(select[..., None], a.shape)
    if not select.any():
        return PSNR_CAP_DB
    mse = float(np.mean((a[select] - b[select]) ** 2))
    if mse < _PSNR_MSE_FLOOR:
        return PSNR_CAP_DB
    return float(10.0 * np.log10(1.0 / mse))


def _grayscale(image: np.ndarray) -> np.ndarray:
    image = np.asarray(image, dtype=np.float64)
    if image.ndim == 3:
        return image @ _LUMA
    return image


def _gaussian_window(size: int, sigma: float) -> np.ndarray:
    half = (size - 1) / 2.0
    coords = np.arange(size, dtype=np.float64) - half
    g = np.exp(-(coords**2) / (2.0 * sigma**2))
    window = np.outer(g, g)
    return window / window.sum()


def _local_mean(image: np.ndarray, window: np.ndarray) -> np.ndarray:
    k = window.shape[0]
    view = np.lib.stride_tricks.sliding_window_view(image, (k, k))
    return np.tensordot(view, window, axes=([2, 3], [0, 1]))


def ssim(a: np.ndarray, b: np.ndarray) -> float:
    """Mean local structural similarity over valid 11x11 Gaussian windows.

    Inputs are [0, 1] images (grayscale conversion uses BT.601 luma);
    constants K1=0.01, K2=0.03 on dynamic range L=1.
    """
    ga, gb = _grayscale(a), _grayscale(b)
    if ga.shape != gb.shape:
        raise InvalidArgument(f"shape mismatch: {ga.shape} vs {gb.shape}")
    if min(ga.shape) < SSIM_WINDOW:
        raise InvalidArgument(
            f"images must be at least {SSIM_WINDOW}x{SSIM_WINDOW}, got {ga.shape}"
        )
    window = _gaussian_window(SSIM_WINDOW, SSIM_SIGMA)
    mu1 = _local_mean(ga, window)
    mu2 = _local_mean(gb, window)
    var1 = _local_mean(ga * ga, window) - mu1 * mu1
    var2 = _local_mean(gb * gb, window) - mu2 * mu2
    cov = _local_mean(ga * gb, window) - mu1 * mu2
    c1 = SSIM_K1**2
    c2 = SSIM_K2**2
    ssim_map = ((2 * mu1 * mu2 + c1) * (2 * cov + c2)) / (
        (mu1 * mu1 + mu2 * mu2 + c1) * (var1 + var2 + c2)
    )
    return float(ssim_map.mean())


@dataclass(frozen=True)
class GaussianStats:
    """Mean vector and covariance matrix of a feature distribution."""

    mu: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=np.float64)
        sigma = np.asarray(self.sigma, dtype=np.float64)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)
        if sigma.shape != (mu.size, mu.size):
            raise InvalidArgument(f"covariance shape {sigma.shape} does not match mean size {mu.size}")
        if not np.allclose(sigma, sigma.T, atol=1e-8):
            raise InvalidArgument("covariance must be symmetric")
        eigvals = np.linalg.eigvalsh(sigma)
        tol = 1e-8 * max(1.0, float(np.max(np.abs(eigvals))) if eigvals.size else 1.0)
        if eigvals.size and eigvals.min() < -tol:
            raise InvalidArgument(f"covariance is not PSD (min eigenvalue {eigvals.min():.3e})")


def fit_gaussian(features: np.ndarray) -> GaussianStats:
    """Sample mean and covariance of row-vector features (N, D)."""
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 2 or features.shape[0] < 2:
        raise InvalidArgument("need at least 2 feature rows of shape (N, D)")
    mu = features.mean(axis=0)
    sigma = np.cov(features, rowvar=False)
    sigma = np.atleast_2d(sigma)
    # guard tiny asymmetries / negative eigenvalues from accumulation error
    sigma = (sigma + sigma.T) / 2.0
    return GaussianStats(mu, sigma)


def frechet_distance(s1: GaussianStats, s2: GaussianStats) -> float:
    """|mu1 - mu2|^2 + Tr(S1 + S2 - 2 (S1 S2)^{1/2}).

    Uses the symmetric matrix square root of the covariance product;
    eigenvalues above -1e-8 are clipped to zero, anything more negative is
    rejected by the GaussianStats validator.
    """
    if s1.mu.size != s2.mu.size:
        raise InvalidArgument(f"dimension mismatch: {s1.mu.size} vs {s2.mu.size}")
    diff = float(np.sum((s1.mu - s2.mu) ** 2))
    covmean, _ = scipy.linalg.sqrtm(s1.sigma @ s2.sigma, disp=False)
    covmean = np.real(covmean)
    trace = float(np.trace(s1.sigma) + np.trace(s2.sigma) - 2.0 * np.trace(covmean))
    return max(0.0, diff + trace)
