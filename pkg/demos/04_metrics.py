"""PSNR, SSIM, and the Fréchet distance between Gaussian feature fits."""

import numpy as np

from fegan import metrics

rng = np.random.default_rng(0)

clean = rng.random((64, 64, 3))
print("identical images : psnr %.1f dB  ssim %.4f" % (metrics.psnr(clean, clean), metrics.ssim(clean, clean)))
for amplitude in (0.01, 0.05, 0.2):
    noisy = np.clip(clean + rng.standard_normal(clean.shape) * amplitude, 0, 1)
    print(
        "noise %.2f       : psnr %6.2f dB  ssim %.4f"
        % (amplitude, metrics.psnr(clean, noisy), metrics.ssim(clean, noisy))
    )

# Fréchet distance between two feature distributions, here 8-D Gaussians fit
# to random features; distance grows with the mean shift.
base = rng.standard_normal((400, 8))
stats_a = metrics.fit_gaussian(base)
for shift in (0.0, 0.5, 2.0):
    stats_b = metrics.fit_gaussian(base + shift)
    print("mean shift %.1f   : frechet %.4f" % (shift, metrics.frechet_distance(stats_a, stats_b)))
