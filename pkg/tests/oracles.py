"""Independent reference implementations used to check the package.

Everything here is written as straight-line scalar loops over numpy arrays,
deliberately sharing no code with the package. Keep probes tiny: these are
O(everything) on purpose.
"""

import math

import numpy as np


def compose_mask_oracle(mask, foreground):
    h, w = mask.shape
    out = np.zeros((h, w), dtype=np.float64)
    for i in range(h):
        for j in range(w):
            out[i, j] = (1.0 - mask[i, j]) * foreground[i, j]
    return out


def median_oracle(values):
    ordered = sorted(float(v) for v in values)
    n = len(ordered)
    if n % 2 == 1:
        return ordered[n // 2]
    return 0.5 * (ordered[n // 2 - 1] + ordered[n // 2])


def channel_stats_oracle(x, eps=1e-5):
    """x: (N, C, H, W); returns per-channel mean and sqrt(E[x^2]-mu^2+eps)."""
    n, c, h, w = x.shape
    mus, sigmas = [], []
    for ci in range(c):
        total, total_sq, count = 0.0, 0.0, 0
        for ni in range(n):
            for hi in range(h):
                for wi in range(w):
                    v = float(x[ni, ci, hi, wi])
                    total += v
                    total_sq += v * v
                    count += 1
        mu = total / count
        sigma = math.sqrt(total_sq / count - mu * mu + eps)
        mus.append(mu)
        sigmas.append(sigma)
    return np.array(mus), np.array(sigmas)


def conv2d_oracle(x, weight, bias=None, stride=1, padding=0, dilation=1):
    """Scalar-loop 2-D convolution (cross-correlation); x: (N, Cin, H, W)."""
    n, cin, h, w = x.shape
    cout, _, kh, kw = weight.shape
    oh = (h + 2 * padding - dilation * (kh - 1) - 1) // stride + 1
    ow = (w + 2 * padding - dilation * (kw - 1) - 1) // stride + 1
    out = np.zeros((n, cout, oh, ow), dtype=np.float64)
    for ni in range(n):
        for co in range(cout):
            for oy in range(oh):
                for ox in range(ow):
                    acc = 0.0
                    for ci in range(cin):
                        for ky in range(kh):
                            for kx in range(kw):
                                iy = oy * stride - padding + ky * dilation
                                ix = ox * stride - padding + kx * dilation
                                if 0 <= iy < h and 0 <= ix < w:
                                    acc += float(x[ni, ci, iy, ix]) * float(weight[co, ci, ky, kx])
                    if bias is not None:
                        acc += float(bias[co])
                    out[ni, co, oy, ox] = acc
    return out


def _relu(x):
    return np.maximum(x, 0.0)


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def attention_normalize_oracle(x, cond, params, eps=1e-5):
    """Straight-line attention normalization.

    params: dict with embed_w/embed_b/att_w/att_b/bias_w/bias_b/post_w/post_b,
    all 3x3 same-padded convolutions.
    """
    mu, sigma = channel_stats_oracle(x, eps)
    n, c, h, w = x.shape
    xhat = np.zeros_like(x, dtype=np.float64)
    for ni in range(n):
        for ci in range(c):
            for hi in range(h):
                for wi in range(w):
                    xhat[ni, ci, hi, wi] = (float(x[ni, ci, hi, wi]) - mu[ci]) / sigma[ci]
    emb = _relu(conv2d_oracle(cond, params["embed_w"], params["embed_b"], padding=1))
    alpha = _sigmoid(conv2d_oracle(emb, params["att_w"], params["att_b"], padding=1))
    beta = conv2d_oracle(emb, params["bias_w"], params["bias_b"], padding=1)
    y = conv2d_oracle(_relu(alpha * xhat + beta), params["post_w"], params["post_b"], padding=1)
    return np.concatenate([y, xhat], axis=1)


def partial_conv_oracle(x, mask, weight, bias, stride=1, padding=0):
    """Window-loop partial convolution; mask: (H, W) broadcast over channels."""
    n, cin, h, w = x.shape
    cout, _, k, _ = weight.shape
    oh = (h + 2 * padding - k) // stride + 1
    ow = (w + 2 * padding - k) // stride + 1
    out = np.zeros((n, cout, oh, ow), dtype=np.float64)
    new_mask = np.zeros((oh, ow), dtype=np.float64)
    for oy in range(oh):
        for ox in range(ow):
            valid = 0.0
            for ky in range(k):
                for kx in range(k):
                    iy, ix = oy * stride - padding + ky, ox * stride - padding + kx
                    if 0 <= iy < h and 0 <= ix < w:
                        valid += float(mask[iy, ix])
            if valid > 0:
                new_mask[oy, ox] = 1.0
            for ni in range(n):
                for co in range(cout):
                    if valid > 0:
                        acc = 0.0
                        for ci in range(cin):
                            for ky in range(k):
                                for kx in range(k):
                                    iy = oy * stride - padding + ky
                                    ix = ox * stride - padding + kx
                                    if 0 <= iy < h and 0 <= ix < w:
                                        acc += (
                                            float(x[ni, ci, iy, ix])
                                            * float(mask[iy, ix])
                                            * float(weight[co, ci, ky, kx])
                                        )
                        out[ni, co, oy, ox] = acc * (k * k / valid) + float(bias[co])
                    else:
                        out[ni, co, oy, ox] = float(bias[co])
    return out, new_mask


def masked_l1_oracle(gen, real, mask):
    """Mean over all elements of |gen*m - real*m|; mask broadcasts over the
    channel axis of (..., C, H, W) or (H, W, C) is not assumed — pass arrays
    shaped (N, C, H, W) and mask (H, W)."""
    n, c, h, w = gen.shape
    total, count = 0.0, 0
    for ni in range(n):
        for ci in range(c):
            for hi in range(h):
                for wi in range(w):
                    m = float(mask[hi, wi])
                    total += abs(float(gen[ni, ci, hi, wi]) * m - float(real[ni, ci, hi, wi]) * m)
                    count += 1
    return total / count


def tv_oracle(image, region=None):
    """Mean |vertical diff| + |horizontal diff| over counted terms.

    image: (N, C, H, W). A term is counted when both endpoints are inside
    the region (all terms when region is None).
    """
    n, c, h, w = image.shape
    total, count = 0.0, 0
    for ni in range(n):
        for ci in range(c):
            for hi in range(h - 1):
                for wi in range(w):
                    ok = region is None or (region[hi, wi] > 0 and region[hi + 1, wi] > 0)
                    if ok:
                        total += abs(float(image[ni, ci, hi + 1, wi]) - float(image[ni, ci, hi, wi]))
                        count += 1
            for hi in range(h):
                for wi in range(w - 1):
                    ok = region is None or (region[hi, wi] > 0 and region[hi, wi + 1] > 0)
                    if ok:
                        total += abs(float(image[ni, ci, hi, wi + 1]) - float(image[ni, ci, hi, wi]))
                        count += 1
    return total / count if count else 0.0


def gram_oracle(features):
    """features: (N, C, H, W) -> (N, C, C) with G = F F^T / (C H W)."""
    n, c, h, w = features.shape
    out = np.zeros((n, c, c), dtype=np.float64)
    for ni in range(n):
        for a in range(c):
            for b in range(c):
                acc = 0.0
                for hi in range(h):
                    for wi in range(w):
                        acc += float(features[ni, a, hi, wi]) * float(features[ni, b, hi, wi])
                out[ni, a, b] = acc / (c * h * w)
    return out


def mean_abs_oracle(a, b):
    flat_a, flat_b = np.ravel(a), np.ravel(b)
    return sum(abs(float(x) - float(y)) for x, y in zip(flat_a, flat_b)) / flat_a.size


def feature_matching_oracle(real_lists, fake_lists):
    layers_real = [f for scale in real_lists for f in scale]
    layers_fake = [f for scale in fake_lists for f in scale]
    per_layer = [mean_abs_oracle(r, f) for r, f in zip(layers_real, layers_fake)]
    return sum(per_layer) / len(per_layer)


def gan_oracle(real, fake, mode):
    real, fake = np.ravel(real), np.ravel(fake)
    if mode == "lsgan":
        d = 0.5 * np.mean((real - 1.0) ** 2) + 0.5 * np.mean(fake**2)
        g = np.mean((fake - 1.0) ** 2)
    elif mode == "hinge":
        d = np.mean(np.maximum(0.0, 1.0 - real)) + np.mean(np.maximum(0.0, 1.0 + fake))
        g = -np.mean(fake)
    else:
        raise ValueError(mode)
    return float(g), float(d)


def softmax_ce_oracle(logits, target):
    """logits: (N, C, H, W), target: (N, H, W) -> mean cross-entropy."""
    n, c, h, w = logits.shape
    total = 0.0
    for ni in range(n):
        for hi in range(h):
            for wi in range(w):
                vec = [float(logits[ni, ci, hi, wi]) for ci in range(c)]
                m = max(vec)
                logsum = m + math.log(sum(math.exp(v - m) for v in vec))
                total += logsum - vec[int(target[ni, hi, wi])]
    return total / (n * h * w)


def psnr_oracle(a, b):
    diff = np.ravel(np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64))
    mse = sum(d * d for d in diff) / diff.size
    if mse < 1e-10:
        return 100.0
    return 10.0 * math.log10(1.0 / mse)


def ssim_oracle(a, b, window=11, sigma=1.5, k1=0.01, k2=0.03):
    """Scalar-loop SSIM over valid windows of grayscale [0, 1] images."""
    h, w = a.shape
    half = (window - 1) / 2.0
    g = np.zeros((window, window), dtype=np.float64)
    for i in range(window):
        for j in range(window):
            g[i, j] = math.exp(-(((i - half) ** 2) + ((j - half) ** 2)) / (2 * sigma**2))
    g /= g.sum()
    c1, c2 = k1**2, k2**2
    values = []
    for top in range(h - window + 1):
        for left in range(w - window + 1):
            mu1 = mu2 = m11 = m22 = m12 = 0.0
            for i in range(window):
                for j in range(window):
                    va = float(a[top + i, left + j])
                    vb = float(b[top + i, left + j])
                    weight = g[i, j]
                    mu1 += weight * va
                    mu2 += weight * vb
                    m11 += weight * va * va
                    m22 += weight * vb * vb
                    m12 += weight * va * vb
            var1, var2, cov = m11 - mu1 * mu1, m22 - mu2 * mu2, m12 - mu1 * mu2
            values.append(
                ((2 * mu1 * mu2 + c1) * (2 * cov + c2))
                / ((mu1 * mu1 + mu2 * mu2 + c1) * (var1 + var2 + c2))
            )
    return sum(values) / len(values)


def frechet_oracle(mu1, sigma1, mu2, sigma2):
    """Eigendecomposition form: |dmu|^2 + tr(S1) + tr(S2) - 2 sum sqrt(eig(S1 S2))."""
    dmu = np.asarray(mu1, dtype=np.float64) - np.asarray(mu2, dtype=np.float64)
    eigvals = np.linalg.eigvals(np.asarray(sigma1) @ np.asarray(sigma2))
    roots = np.sqrt(np.clip(np.real(eigvals), 0.0, None))
    return float(dmu @ dmu + np.trace(sigma1) + np.trace(sigma2) - 2.0 * roots.sum())


def sobel_step_column(gray):
    """Column of maximal horizontal Sobel response; locates a vertical step."""
    h, w = gray.shape
    best_col, best_mag = 0, -1.0
    for x in range(1, w - 1):
        mag = 0.0
        for y in range(1, h - 1):
            gx = (
                (gray[y - 1, x + 1] + 2 * gray[y, x + 1] + gray[y + 1, x + 1])
                - (gray[y - 1, x - 1] + 2 * gray[y, x - 1] + gray[y + 1, x - 1])
            )
            mag += abs(gx)
        if mag > best_mag:
            best_mag, best_col = mag, x
    return best_col
