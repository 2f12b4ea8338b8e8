"""Parsing-aware inpainting network: a partial-convolution image encoder and
a standard parsing encoder feeding a dilated residual trunk, decoded with
attention normalization at every scale."""

from __future__ import annotations

from dataclasses import dataclass

import torch
import torch.nn.functional as F
from torch import nn

from .errors import InvalidArgument
from .layers import CONDITION_CHANNELS, AttentionNorm, DilatedResidualBlock, PartialConv2d, resize_condition


@dataclass(frozen=True)
class InpainterConfig:
    num_classes: int = 20
    encoder_depth: int = 4
    base_channels: int = 64
    max_channels: int = 512
    dilations: tuple[int, ...] = (2, 2, 4, 4)
    cond_channels: int = CONDITION_CHANNELS
    embed_channels: int = 64

    def __post_init__(self):
        if self.encoder_depth < 2:
            raise InvalidArgument(f"encoder depth must be >= 2, got {self.encoder_depth}")
        if any(d < 1 for d in self.dilations):
            raise InvalidArgument(f"dilations must be >= 1, got {self.dilations}")

    def width(self, level: int) -> int:
        return min(self.base_channels * (2**level), self.max_channels)


class _ParsingDown(nn.Module):
    def __init__(self, in_ch: int, out_ch: int):
        super().__init__()
        self.conv = nn.Conv2d(in_ch, out_ch, 3, stride=2, padding=1)
        self.norm = nn.InstanceNorm2d(out_ch)
        self.act = nn.LeakyReLU(0.2)

    def forward(self, x):
        return self.act(self.norm(self.conv(x)))


class ParsingAwareInpainter(nn.Module):
    """Image and parsing encoders share one downsampling schedule so their
    features concatenate at the trunk; the decoder applies an attention
    normalization before each upsampling convolution and finishes with tanh.
    """

    def __init__(self, config: InpainterConfig = InpainterConfig()):
        super().__init__()
        self.config = config
        widths = [config.width(i) for i in range(config.encoder_depth)]

        image_convs, in_ch = [], 3
        for w in widths:
            image_convs.append(PartialConv2d(in_ch, w, kernel_size=3, stride=2, padding=1))
            in_ch = w
        self.image_encoder = nn.ModuleList(image_convs)

        parsing_convs, in_ch = [], config.num_classes
        for w in widths:
            parsing_convs.append(_ParsingDown(in_ch, w))
            in_ch = w
        self.parsing_encoder = nn.ModuleList(parsing_convs)

        trunk_ch = widths[-1]
        self.fuse = nn.Conv2d(2 * trunk_ch, trunk_ch, 1)
        self.trunk = nn.ModuleList(DilatedResidualBlock(trunk_ch, d) for d in config.dilations)

        anls, up_convs = [], []
        for i in range(config.encoder_depth - 1, -1, -1):
            w = widths[i]
            target = widths[i - 1] if i > 0 else config.base_channels
            anls.append(
                AttentionNorm(w, config.cond_channels, config.embed_channels, out_channels=w)
            )
            up_convs.append(nn.Conv2d(2 * w, target, 3, padding=1))
        self.decoder_anls = nn.ModuleList(anls)
        self.decoder_convs = nn.ModuleList(up_convs)
        self.head = nn.Conv2d(config.base_channels, 3, 3, padding=1)

    def forward(
        self,
        incomplete_image: torch.Tensor,
        composed_mask: torch.Tensor,
        parsing_onehot: torch.Tensor,
        condition: torch.Tensor,
    ) -> torch.Tensor:
        size = incomplete_image.shape[-2:]
        for name, tensor in (
            ("composed_mask", composed_mask),
            ("parsing_onehot", parsing_onehot),
            ("condition", condition),
        ):
            if tensor.shape[-2:] != size:
                raise InvalidArgument(
                    f"{name} spatial size {tuple(tensor.shape[-2:])} does not match "
                    f"incomplete_image {tuple(size)}"
                )
        if composed_mask.dim() == 3:
            composed_mask = composed_mask.unsqueeze(1)

        x, mask = incomplete_image, composed_mask
        for pconv in self.image_encoder:
            x, mask = pconv(x, mask)
            x = F.leaky_relu(x, 0.2)
        p = parsing_onehot
        for down in self.parsing_encoder:
            p = down(p)

        x = F.relu(self.fuse(torch.cat([x, p], dim=1)))
        for block in self.trunk:
            x = block(x)

        for anl, conv in zip(self.decoder_anls, self.decoder_convs):
            cond = resize_condition(condition, x.shape[-2:])
            x = anl(x, cond)
            x = F.interpolate(x, scale_factor=2, mode="nearest")
            x = F.leaky_relu(conv(x), 0.2)
        if x.shape[-2:] != size:
            x = F.interpolate(x, size=size, mode="nearest")
        return torch.tanh(self.head(x))


def composite_output(generated: torch.Tensor, original: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
    """Paste generated content into the original: gen * M + orig * (1 - M)."""
    if generated.shape != original.shape:
        raise InvalidArgument(
            f"generated {tuple(generated.shape)} and original {tuple(original.shape)} differ"
        )
    if mask.dim() == generated.dim() - 1:
        mask = mask.unsqueeze(-3)
    return generated * mask + original * (1.0 - mask)
