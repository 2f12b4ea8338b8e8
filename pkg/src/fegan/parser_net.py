"""Free-form parsing network: a U-net mapping incomplete parsing + sketch +
color strokes + mask + noise to logits over parsing classes."""

from __future__ import annotations

from dataclasses import dataclass

import torch
import torch.nn.functional as F
from torch import nn

from .errors import InvalidArgument
from .layers import AttentionNorm, resize_condition


@dataclass(frozen=True)
class ParserConfig:
    num_classes: int = 20
    depth: int = 5
    base_channels: int = 64
    max_channels: int = 512
    noise_channels: int = 1
    # Attention normalization in the parser decoder is off by default; the
    # conditioning (sketch, color, noise) is sliced from the input stack.
    use_attention_norm: bool = False

    def __post_init__(self):
        if self.depth < 3:
            raise InvalidArgument(f"parser depth must be >= 3, got {self.depth}")

    @property
    def in_channels(self) -> int:
        # one-hot parsing + sketch + color + mask + noise
        return self.num_classes + 1 + 3 + 1 + self.noise_channels

    def width(self, level: int) -> int:
        return min(self.base_channels * (2**level), self.max_channels)


class _Down(nn.Module):
    def __init__(self, in_ch: int, out_ch: int):
        super().__init__()
        self.conv = nn.Conv2d(in_ch, out_ch, 3, stride=2, padding=1)
        self.norm = nn.InstanceNorm2d(out_ch)
        self.act = nn.LeakyReLU(0.2)

    def forward(self, x):
        return self.act(self.norm(self.conv(x)))


class _Up(nn.Module):
    """Nearest-neighbor upsampling followed by convolution (avoids the
    checkerboard artifacts of transposed convolutions)."""

    def __init__(self, in_ch: int, skip_ch: int, out_ch: int):
        super().__init__()
        self.conv = nn.Conv2d(in_ch + skip_ch, out_ch, 3, padding=1)
        self.norm = nn.InstanceNorm2d(out_ch)
        self.act = nn.ReLU()

    def forward(self, x, skip):
        x = F.interpolate(x, size=skip.shape[-2:], mode="nearest")
        return self.act(self.norm(self.conv(torch.cat([x, skip], dim=1))))


class FreeFormParser(nn.Module):
    """Encoder-decoder with skip connections at every resolution; outputs raw
    logits at the input resolution (softmax lives in the loss)."""

    def __init__(self, config: ParserConfig = ParserConfig()):
        super().__init__()
        self.config = config
        widths = [config.width(i) for i in range(config.depth)]
        downs, in_ch = [], config.in_channels
        for w in widths:
            downs.append(_Down(in_ch, w))
            in_ch = w
        self.downs = nn.ModuleList(downs)
        # an AttentionNorm before an up step doubles its input channels
        anl_factor = 2 if config.use_attention_norm else 1
        ups, anls = [], []
        for i in range(config.depth - 1, 0, -1):
            ups.append(_Up(anl_factor * widths[i], widths[i - 1], widths[i - 1]))
            anls.append(AttentionNorm(widths[i], out_channels=widths[i]) if config.use_attention_norm else None)
        self.ups = nn.ModuleList(ups)
        self.head_up = _Up(anl_factor * widths[0], config.in_channels, config.base_channels)
        if config.use_attention_norm:
            anls.append(AttentionNorm(widths[0], out_channels=widths[0]))
            self.anls = nn.ModuleList(anls)
        else:
            self.anls = None
        self.head = nn.Conv2d(config.base_channels, config.num_classes, 3, padding=1)

    def _condition(self, inputs: torch.Tensor) -> torch.Tensor:
        c = self.config.num_classes
        sketch_color = inputs[:, c : c + 4]
        noise = inputs[:, c + 5 : c + 5 + self.config.noise_channels]
        return torch.cat([sketch_color, noise], dim=1)

    def forward(self, inputs: torch.Tensor) -> torch.Tensor:
        if inputs.shape[1] != self.config.in_channels:
            raise InvalidArgument(
                f"expected {self.config.in_channels} input channels "
                f"(one-hot parsing + sketch + color + mask + noise), got {inputs.shape[1]}"
            )
        cond = self._condition(inputs) if self.config.use_attention_norm else None
        skips = [inputs]
        x = inputs
        for down in self.downs:
            x = down(x)
            skips.append(x)
        for i, up in enumerate(self.ups):
            if self.anls is not None:
                x = self.anls[i](x, resize_condition(cond, x.shape[-2:]))
            x = up(x, skips[-(i + 2)])
        if self.anls is not None:
            x = self.anls[-1](x, resize_condition(cond, x.shape[-2:]))
        x = self.head_up(x, skips[0])
        return self.head(x)


def logits_to_parsing(logits: torch.Tensor) -> torch.Tensor:
    """Per-pixel argmax over classes; ties break toward the lowest label."""
    return torch.argmax(logits, dim=1)


def parsing_loss(logits: torch.Tensor, target: torch.Tensor) -> torch.Tensor:
    """Mean per-pixel softmax cross-entropy against integer labels."""
    num_classes = logits.shape[1]
    if target.min() < 0 or target.max() >= num_classes:
        raise InvalidArgument(
            f"target labels must lie in [0, {num_classes - 1}], got range "
            f"[{int(target.min())}, {int(target.max())}]"
        )
    return F.cross_entropy(logits, target.long(), reduction="mean")
