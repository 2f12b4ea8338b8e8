"""Every training loss term and the two weighted objectives.

Reduction convention: every L1-style loss is the mean over all elements (or
over all difference terms for total variation), never a sum. The default
objective weights are only meaningful under one fixed convention, and a mean
keeps them resolution-independent.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import torch
import torch.nn.functional as F
from torch import nn

from .errors import ConfigurationError, InvalidArgument


@dataclass(frozen=True)
class LossWeights:
    """Objective weights for both training stages."""

    # parsing stage
    parsing: float = 10.0
    feature_matching: float = 10.0
    parser_adversarial: float = 1.0
    # inpainting stage
    mask: float = 5.0
    foreground: float = 50.0
    face: float = 1.0
    face_tv: float = 0.1
    perceptual: float = 0.05
    style: float = 200.0
    adversarial: float = 0.001


@dataclass
class LossReport:
    """Named scalar per term plus the weighted total."""

    terms: dict = field(default_factory=dict)
    weighted: dict = field(default_factory=dict)
    total: object = 0.0

    def floats(self) -> dict:
        out = {name: _scalar(value) for name, value in self.terms.items()}
        out["total"] = _scalar(self.total)
        return out


def _scalar(value) -> float:
    if isinstance(value, torch.Tensor):
        return float(value.detach())
    return float(value)


def _as_mask(mask: torch.Tensor, like: torch.Tensor) -> torch.Tensor:
    if mask.dim() == like.dim() - 1:
        mask = mask.unsqueeze(-3)
    return mask


def mask_loss(gen: torch.Tensor, real: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
    """Mean absolute difference restricted to the edit mask."""
    if gen.shape != real.shape:
        raise InvalidArgument(f"shape mismatch: {tuple(gen.shape)} vs {tuple(real.shape)}")
    mask = _as_mask(mask, gen)
    return torch.mean(torch.abs(gen * mask - real * mask))


def region_l1_loss(gen: torch.Tensor, real: torch.Tensor, region_mask: torch.Tensor) -> torch.Tensor:
    """Mean absolute difference restricted to an arbitrary region (serves the
    foreground and face terms)."""
    return mask_loss(gen, real, region_mask)


def tv_loss(image: torch.Tensor, region_mask: torch.Tensor | None = None) -> torch.Tensor:
    """Mean absolute difference of vertical and horizontal neighbors.

    With a region mask, a difference term is counted only when both of its
    endpoint pixels lie inside the region; an empty region yields 0.
    """
    dv = torch.abs(image[..., 1:, :] - image[..., :-1, :])
    dh = torch.abs(image[..., :, 1:] - image[..., :, :-1])
    if region_mask is None:
        total = dv.sum() + dh.sum()
        count = dv.numel() + dh.numel()
        if count == 0:
            return image.sum() * 0.0
        return total / count
    region_mask = _as_mask(region_mask, image)
    mv = region_mask[..., 1:, :] * region_mask[..., :-1, :]
    mh = region_mask[..., :, 1:] * region_mask[..., :, :-1]
    mv = mv.expand_as(dv)
    mh = mh.expand_as(dh)
    count = mv.sum() + mh.sum()
    if float(count) == 0.0:
        return image.sum() * 0.0
    return ((dv * mv).sum() + (dh * mh).sum()) / count


def perceptual_loss(gen: torch.Tensor, real: torch.Tensor, extractor: Callable) -> torch.Tensor:
    """Sum over designated layers of the mean absolute feature difference."""
    if extractor is None:
        raise ConfigurationError("perceptual loss requires a feature extractor")
    total = 0.0
    for fg, fr in zip(extractor(gen), extractor(real)):
        total = total + torch.mean(torch.abs(fg - fr))
    return total


def gram_matrix(features: torch.Tensor) -> torch.Tensor:
    """G[c, c'] = sum_hw F_c F_c' / (C * H * W) per sample."""
    n, c, h, w = features.shape
    flat = features.reshape(n, c, h * w)
    return torch.bmm(flat, flat.transpose(1, 2)) / (c * h * w)


def style_loss(gen: torch.Tensor, real: torch.Tensor, extractor: Callable) -> torch.Tensor:
    """Sum over designated layers of the mean absolute Gram-matrix difference."""
    if extractor is None:
        raise ConfigurationError("style loss requires a feature extractor")
    total = 0.0
    for fg, fr in zip(extractor(gen), extractor(real)):
        total = total + torch.mean(torch.abs(gram_matrix(fg) - gram_matrix(fr)))
    return total


def _flatten_features(feats) -> list:
    if isinstance(feats, torch.Tensor):
        return [feats]
    out = []
    for item in feats:
        out.extend(_flatten_features(item))
    return out


def feature_matching_loss(disc_feats_real, disc_feats_fake) -> torch.Tensor:
    """Mean over all discriminator layers and scales of the per-layer mean
    absolute difference."""
    real = _flatten_features(disc_feats_real)
    fake = _flatten_features(disc_feats_fake)
    if len(real) != len(fake):
        raise InvalidArgument(f"feature list lengths differ: {len(real)} vs {len(fake)}")
    if not real:
        raise InvalidArgument("feature lists must be nonempty")
    total = 0.0
    for fr, ff in zip(real, fake):
        if fr.shape != ff.shape:
            raise InvalidArgument(f"feature shape mismatch: {tuple(fr.shape)} vs {tuple(ff.shape)}")
        total = total + torch.mean(torch.abs(fr - ff))
    return total / len(real)


def gan_losses(
    logits_real: torch.Tensor, logits_fake: torch.Tensor, mode: str = "lsgan"
) -> tuple[torch.Tensor, torch.Tensor]:
    """Generator and discriminator adversarial losses.

    lsgan:  d = 0.5 mean[(r-1)^2] + 0.5 mean[f^2],  g = mean[(f-1)^2]
    hinge:  d = mean[relu(1-r)] + mean[relu(1+f)],  g = -mean[f]

    The hinge generator loss may be negative; every other term here is
    nonnegative.
    """
    if mode == "lsgan":
        d_loss = 0.5 * torch.mean((logits_real - 1.0) ** 2) + 0.5 * torch.mean(logits_fake**2)
        g_loss = torch.mean((logits_fake - 1.0) ** 2)
    elif mode == "hinge":
        d_loss = torch.mean(F.relu(1.0 - logits_real)) + torch.mean(F.relu(1.0 + logits_fake))
        g_loss = -torch.mean(logits_fake)
    else:
        raise InvalidArgument(f"unknown adversarial mode {mode!r}; use 'lsgan' or 'hinge'")
    return g_loss, d_loss


PARSER_TERMS = ("parsing", "feature_matching", "adversarial")
INPAINTER_TERMS = ("mask", "foreground", "face", "face_tv", "perceptual", "style", "adversarial")


def parser_objective(terms: Mapping, weights: LossWeights = LossWeights()) -> LossReport:
    """Weighted parsing-stage objective over {parsing, feature_matching,
    adversarial}."""
    w = {
        "parsing": weights.parsing,
        "feature_matching": weights.feature_matching,
        "adversarial": weights.parser_adversarial,
    }
    return _combine(terms, w, PARSER_TERMS)


def inpainter_objective(terms: Mapping, weights: LossWeights = LossWeights()) -> LossReport:
    """Weighted inpainting-stage objective over {mask, foreground, face,
    face_tv, perceptual, style, adversarial}."""
    w = {
        "mask": weights.mask,
        "foreground": weights.foreground,
        "face": weights.face,
        "face_tv": weights.face_tv,
        "perceptual": weights.perceptual,
        "style": weights.style,
        "adversarial": weights.adversarial,
    }
    return _combine(terms, w, INPAINTER_TERMS)


def _combine(terms: Mapping, weights: Mapping, expected: Sequence[str]) -> LossReport:
    unknown = set(terms) - set(expected)
    if unknown:
        raise InvalidArgument(f"unknown loss terms {sorted(unknown)}; expected {list(expected)}")
    report = LossReport()
    total = 0.0
    for name in expected:
        value = terms.get(name, 0.0)
        weighted = weights[name] * value
        report.terms[name] = value
        report.weighted[name] = weighted
        total = weighted + total
    report.total = total
    return report


VGG_PERCEPTUAL_LAYERS = ("relu1_2", "relu2_2", "relu3_2", "relu4_2")
VGG_STYLE_LAYERS = ("relu1_2", "relu2_2", "relu3_2", "relu4_2", "relu5_2")
_VGG19_LAYER_INDEX = {"relu1_2": 3, "relu2_2": 8, "relu3_2": 13, "relu4_2": 22, "relu5_2": 31}


class VggFeatureExtractor(nn.Module):
    """Fixed pretrained VGG-19 feature extractor for perceptual/style terms.

    Requires torchvision and its pretrained weights; raises
    ConfigurationError when either is unavailable so the terms can be
    disabled instead.
    """

    def __init__(self, layers: Sequence[str] = VGG_PERCEPTUAL_LAYERS):
        super().__init__()
        try:
            from torchvision import models
        except ImportError as exc:
            raise ConfigurationError("torchvision is required for the VGG extractor") from exc
        try:
            vgg = models.vgg19(weights=models.VGG19_Weights.IMAGENET1K_V1)
        except Exception as exc:
            raise ConfigurationError(f"could not load pretrained VGG-19 weights: {exc}") from exc
        indices = [_VGG19_LAYER_INDEX[name] for name in layers]
        self.features = vgg.features[: max(indices) + 1].eval()
        for param in self.features.parameters():
            param.requires_grad_(False)
        self.indices = set(indices)
        self.register_buffer("mean", torch.tensor([0.485, 0.456, 0.406]).view(1, 3, 1, 1))
        self.register_buffer("std", torch.tensor([0.229, 0.224, 0.225]).view(1, 3, 1, 1))

    def forward(self, image: torch.Tensor) -> list[torch.Tensor]:
        x = ((image + 1.0) / 2.0 - self.mean) / self.std
        out = []
        for i, layer in enumerate(self.features):
            x = layer(x)
            if i in self.indices:
                out.append(x)
        return out
