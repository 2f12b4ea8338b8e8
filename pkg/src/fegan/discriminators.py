"""Adversaries: a two-scale PatchGAN pair for the parsing stage and a
five-block spectral-norm discriminator for the inpainting stage."""

from __future__ import annotations

from dataclasses import dataclass, field

import torch
import torch.nn.functional as F
from torch import nn
from torch.nn.utils import spectral_norm


@dataclass
class DiscOutputs:
    """Per-scale patch logits plus intermediate features (shallow to deep)."""

    logits: list[torch.Tensor] = field(default_factory=list)
    features: list[list[torch.Tensor]] = field(default_factory=list)


class PatchDiscriminator(nn.Module):
    """70x70-receptive-field PatchGAN returning logits and the feature list."""

    def __init__(self, in_channels: int, base_channels: int = 64):
        super().__init__()
        b = base_channels
        self.blocks = nn.ModuleList(
            [
                nn.Sequential(nn.Conv2d(in_channels, b, 4, stride=2, padding=1), nn.LeakyReLU(0.2)),
                nn.Sequential(
                    nn.Conv2d(b, 2 * b, 4, stride=2, padding=1), nn.InstanceNorm2d(2 * b), nn.LeakyReLU(0.2)
                ),
                nn.Sequential(
                    nn.Conv2d(2 * b, 4 * b, 4, stride=2, padding=1), nn.InstanceNorm2d(4 * b), nn.LeakyReLU(0.2)
                ),
                nn.Sequential(
                    nn.Conv2d(4 * b, 8 * b, 4, stride=1, padding=1), nn.InstanceNorm2d(8 * b), nn.LeakyReLU(0.2)
                ),
            ]
        )
        self.head = nn.Conv2d(8 * b, 1, 4, stride=1, padding=1)

    def forward(self, x: torch.Tensor) -> tuple[torch.Tensor, list[torch.Tensor]]:
        features = []
        for block in self.blocks:
            x = block(x)
            features.append(x)
        return self.head(x), features


class MultiScalePatchDiscriminator(nn.Module):
    """Two PatchGAN discriminators; the second judges a 2x downsampled copy."""

    def __init__(self, in_channels: int, base_channels: int = 64, num_scales: int = 2):
        super().__init__()
        self.scales = nn.ModuleList(
            PatchDiscriminator(in_channels, base_channels) for _ in range(num_scales)
        )

    def forward(self, x: torch.Tensor) -> DiscOutputs:
        out = DiscOutputs()
        for i, disc in enumerate(self.scales):
            if i > 0:
                x = F.avg_pool2d(x, kernel_size=3, stride=2, padding=1, count_include_pad=False)
            logits, features = disc(x)
            out.logits.append(logits)
            out.features.append(features)
        return out


class SpectralNormDiscriminator(nn.Module):
    """Five spectral-normalized convolutions, strides 2,2,2,2,1.

    Power-iteration state lives in buffers and advances one step per
    training-mode forward.
    """

    def __init__(self, in_channels: int, base_channels: int = 64):
        super().__init__()
        b = base_channels
        self.convs = nn.ModuleList(
            [
                spectral_norm(nn.Conv2d(in_channels, b, 4, stride=2, padding=1)),
                spectral_norm(nn.Conv2d(b, 2 * b, 4, stride=2, padding=1)),
                spectral_norm(nn.Conv2d(2 * b, 4 * b, 4, stride=2, padding=1)),
                spectral_norm(nn.Conv2d(4 * b, 8 * b, 4, stride=2, padding=1)),
                spectral_norm(nn.Conv2d(8 * b, 1, 4, stride=1, padding=1)),
            ]
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        for i, conv in enumerate(self.convs):
            x = conv(x)
            if i < len(self.convs) - 1:
                x = F.leaky_relu(x, 0.2)
        return x


def conv_output_size(size: int, kernel: int, stride: int, padding: int) -> int:
    """Spatial arithmetic for one convolution layer."""
    return (size + 2 * padding - kernel) // stride + 1


def receptive_field(layers: list[tuple[int, int]]) -> int:
    """Receptive field of a stack of (kernel, stride) layers."""
    rf, jump = 1, 1
    for kernel, stride in layers:
        rf += (kernel - 1) * jump
        jump *= stride
    return rf
