"""Differentiable building blocks: attention normalization, foreground
partial convolution, and dilated residual blocks."""

from __future__ import annotations

import torch
import torch.nn.functional as F
from torch import nn

from .errors import InvalidArgument

STATS_EPS = 1e-5

# Channel layout of the conditioning bundle fed to attention normalization:
# sketch (binary, resized nearest) + 3 color channels + noise (resized
# bilinear, like color).
CONDITION_CHANNELS = 5
_CONDITION_NEAREST = 1  # leading channels resized with nearest-neighbor


def channel_stats(x: torch.Tensor, eps: float = STATS_EPS) -> tuple[torch.Tensor, torch.Tensor]:
    """Per-channel batch mean and standard deviation over (N, H, W).

    Population form: sigma_c = sqrt(E[x^2] - mu^2 + eps). The epsilon keeps
    the square root finite on constant channels.
    """
    mu = x.mean(dim=(0, 2, 3))
    second = (x * x).mean(dim=(0, 2, 3))
    sigma = torch.sqrt(second - mu * mu + eps)
    return mu, sigma


def normalize_channels(x: torch.Tensor, eps: float = STATS_EPS) -> torch.Tensor:
    """Channel-wise batch normalization without learned affine parameters."""
    mu, sigma = channel_stats(x, eps)
    return (x - mu[None, :, None, None]) / sigma[None, :, None, None]


def resize_condition(cond: torch.Tensor, size: tuple[int, int]) -> torch.Tensor:
    """Resize the conditioning bundle to a decoder scale.

    Binary channels (sketch) use nearest-neighbor so edges stay crisp; color
    and noise channels use bilinear interpolation.
    """
    if cond.shape[-2:] == tuple(size):
        return cond
    nearest = F.interpolate(cond[:, :_CONDITION_NEAREST], size=size, mode="nearest")
    smooth = F.interpolate(cond[:, _CONDITION_NEAREST:], size=size, mode="bilinear", align_corners=False)
    return torch.cat([nearest, smooth], dim=1)


class AttentionNorm(nn.Module):
    """Conditional normalization with a learned sigmoid attention map.

    Activations are normalized channel-wise with batch statistics, modulated
    by an attention map alpha (sigmoid-bounded) and bias beta inferred from
    the conditioning data, passed through ReLU and a convolution, and finally
    concatenated with the normalized activations. Output channel count is
    ``out_channels + channels``.
    """

    def __init__(
        self,
        channels: int,
        cond_channels: int = CONDITION_CHANNELS,
        embed_channels: int = 64,
        out_channels: int | None = None,
        kernel_size: int = 3,
        eps: float = STATS_EPS,
    ):
        super().__init__()
        if out_channels is None:
            out_channels = channels
        pad = kernel_size // 2
        self.eps = eps
        self.out_channels = out_channels + channels
        self.embed = nn.Conv2d(cond_channels, embed_channels, kernel_size, padding=pad)
        self.attention = nn.Conv2d(embed_channels, channels, kernel_size, padding=pad)
        self.bias = nn.Conv2d(embed_channels, channels, kernel_size, padding=pad)
        self.post = nn.Conv2d(channels, out_channels, kernel_size, padding=pad)

    def forward(self, x: torch.Tensor, cond: torch.Tensor) -> torch.Tensor:
        if cond.shape[-2:] != x.shape[-2:]:
            raise RuntimeError(
                f"conditioning spatial size {tuple(cond.shape[-2:])} does not match "
                f"activations {tuple(x.shape[-2:])}; resize before calling"
            )
        normalized = normalize_channels(x, self.eps)
        emb = F.relu(self.embed(cond))
        alpha = torch.sigmoid(self.attention(emb))
        beta = self.bias(emb)
        y = self.post(F.relu(alpha * normalized + beta))
        return torch.cat([y, normalized], dim=1)


class PartialConv2d(nn.Module):
    """Convolution over valid pixels only, with mask update.

    Windows containing at least one valid pixel produce
    ``W (x * m) * (k^2 / sum(m)) + b`` and stay valid; fully-invalid windows
    produce the bias alone and stay invalid. The mask is single-channel and
    broadcasts over input channels.
    """

    def __init__(
        self,
        in_channels: int,
        out_channels: int,
        kernel_size: int = 3,
        stride: int = 1,
        padding: int = 0,
    ):
        super().__init__()
        if kernel_size % 2 != 1:
            raise InvalidArgument(f"kernel_size must be odd, got {kernel_size}")
        if stride < 1:
            raise InvalidArgument(f"stride must be >= 1, got {stride}")
        self.stride = stride
        self.padding = padding
        self.kernel_size = kernel_size
        self.weight = nn.Parameter(torch.empty(out_channels, in_channels, kernel_size, kernel_size))
        self.bias = nn.Parameter(torch.zeros(out_channels))
        nn.init.kaiming_uniform_(self.weight, a=0.2)
        self.register_buffer(
            "window_ones", torch.ones(1, 1, kernel_size, kernel_size), persistent=False
        )

    def forward(self, x: torch.Tensor, mask: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        if mask.shape[-2:] != x.shape[-2:]:
            raise InvalidArgument(
                f"mask spatial size {tuple(mask.shape[-2:])} must equal input "
                f"{tuple(x.shape[-2:])}"
            )
        if mask.dim() == 3:
            mask = mask.unsqueeze(1)
        with torch.no_grad():
            valid = F.conv2d(
                mask.to(x.dtype), self.window_ones.to(x.dtype), stride=self.stride, padding=self.padding
            )
            any_valid = valid > 0
            scale = (self.kernel_size**2) / valid.clamp_min(1.0) * any_valid
            new_mask = any_valid.to(x.dtype)
        out = F.conv2d(x * mask.to(x.dtype), self.weight, None, stride=self.stride, padding=self.padding)
        out = out * scale + self.bias.view(1, -1, 1, 1)
        return out, new_mask


class DilatedResidualBlock(nn.Module):
    """x + F(x) with F two dilated 3x3 convolutions and a ReLU between them."""

    def __init__(self, channels: int, dilation: int = 2):
        super().__init__()
        if dilation < 1:
            raise InvalidArgument(f"dilation must be >= 1, got {dilation}")
        self.conv1 = nn.Conv2d(channels, channels, 3, padding=dilation, dilation=dilation)
        self.conv2 = nn.Conv2d(channels, channels, 3, padding=dilation, dilation=dilation)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return x + self.conv2(F.relu(self.conv1(x)))
