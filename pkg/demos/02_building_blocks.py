"""The two novel layers up close: attention normalization and foreground
partial convolution."""

import numpy as np
import torch

from fegan.layers import AttentionNorm, PartialConv2d, channel_stats, normalize_channels

torch.manual_seed(0)

# --- channel statistics and normalization -------------------------------
x = torch.randn(4, 8, 16, 16) * 3.0 + 1.5
mu, sigma = channel_stats(x)
print("raw per-channel mean  :", [f"{v:.2f}" for v in mu[:4].tolist()])
print("raw per-channel sigma :", [f"{v:.2f}" for v in sigma[:4].tolist()])
xhat = normalize_channels(x)
print("normalized mean ~ 0    :", float(xhat.mean(dim=(0, 2, 3)).abs().max()))
print("normalized var  ~ 1    :", float(xhat.var(dim=(0, 2, 3), unbiased=False).mean()))

# --- attention normalization ---------------------------------------------
# The attention map is sigmoid-bounded: the layer can only *select* from the
# normalized activations, while the bias adds conditioning content.
anl = AttentionNorm(channels=8, cond_channels=5)
cond = torch.zeros(4, 5, 16, 16)
cond[:, 0, 4:12, 4:12] = 1.0  # a sketch square
out = anl(x, cond)
print("ANL output channels = post(8) + normalized(8):", out.shape[1])

with torch.no_grad():
    emb = torch.relu(anl.embed(cond))
    alpha = torch.sigmoid(anl.attention(emb))
print("attention range: (%.3f, %.3f) - always inside (0, 1)" % (float(alpha.min()), float(alpha.max())))

# --- partial convolution --------------------------------------------------
# Valid pixels renormalize the kernel; fully-invalid windows emit the bias
# and stay invalid, so the valid region grows layer by layer.
pconv = PartialConv2d(1, 1, kernel_size=3, padding=1)
mask = torch.zeros(1, 1, 9, 9)
mask[..., 4, 4] = 1.0  # one valid pixel in the center
feat = torch.randn(1, 1, 9, 9)
for layer in range(3):
    feat, mask = pconv(feat, mask)
    print(f"after layer {layer + 1}: {int(mask.sum())} valid pixels of {mask.numel()}")
