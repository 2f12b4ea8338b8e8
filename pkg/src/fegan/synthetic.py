"""Deterministic synthetic person-like images with exact parsing maps.

These stand in for real fashion photographs wherever a small, self-contained
dataset is needed: toy training runs, demos, and the test suite. Regions are
piecewise-smooth color patches whose boundaries coincide exactly with the
parsing labels.
"""

from __future__ import annotations

import os

import numpy as np

from . import imageio

SYNTHETIC_NUM_CLASSES = 8

BACKGROUND, HAIR, FACE, UPPER, PANTS, SKIN, SHOES, SPARE = range(8)

# Base color per label; items jitter around these, so region appearance is
# predictable from the parsing while items remain distinct.
_BASE_COLORS = np.array(
    [
        [0.0, 0.0, 0.0],  # background (unused; background is a gradient)
        [-0.55, -0.72, -0.80],  # hair
        [0.72, 0.38, 0.12],  # face
        [0.10, -0.25, 0.65],  # upper clothes
        [-0.30, -0.48, -0.10],  # pants
        [0.78, 0.45, 0.25],  # skin
        [-0.70, -0.65, -0.58],  # shoes
        [0.50, 0.50, -0.40],  # spare
    ],
    dtype=np.float32,
)
# The background gradient is identical across items: the foreground-focused
# composed mask hides background pixels from the image encoder, so per-item
# background variation would be unlearnable by construction.
_BG_TOP = np.array([-0.10, 0.15, 0.35], dtype=np.float32)
_BG_BOTTOM = np.array([-0.35, -0.15, 0.05], dtype=np.float32)
_COLOR_JITTER = 0.10


def _ellipse(h: int, w: int, cy: float, cx: float, ry: float, rx: float) -> np.ndarray:
    yy, xx = np.mgrid[0:h, 0:w]
    return ((yy - cy) / ry) ** 2 + ((xx - cx) / rx) ** 2 <= 1.0


def _rect(h: int, w: int, y0: float, y1: float, x0: float, x1: float) -> np.ndarray:
    out = np.zeros((h, w), dtype=bool)
    out[int(y0 * h) : int(y1 * h), int(x0 * w) : int(x1 * w)] = True
    return out


def synthesize_example(seed: int, height: int = 96, width: int = 64) -> tuple[np.ndarray, np.ndarray]:
    """One synthetic (image, parsing) pair; purely a function of the seed."""
    rng = np.random.default_rng(seed)
    h, w = height, width
    parsing = np.zeros((h, w), dtype=np.int64)

    # Small per-seed jitter so dataset items differ in layout, not only color.
    dx = float(rng.uniform(-0.05, 0.05))
    head_cy, head_cx = 0.20 + float(rng.uniform(-0.02, 0.02)), 0.5 + dx
    head_r = 0.085 + float(rng.uniform(-0.01, 0.01))

    hair = _ellipse(h, w, (head_cy - 0.02) * h, head_cx * w, (head_r + 0.035) * h, (head_r + 0.035) * h)
    face = _ellipse(h, w, head_cy * h, head_cx * w, head_r * h, head_r * h)
    torso = _rect(h, w, 0.30, 0.60, 0.32 + dx, 0.68 + dx)
    arm_l = _rect(h, w, 0.32, 0.58, 0.22 + dx, 0.31 + dx)
    arm_r = _rect(h, w, 0.32, 0.58, 0.69 + dx, 0.78 + dx)
    leg_l = _rect(h, w, 0.60, 0.88, 0.36 + dx, 0.48 + dx)
    leg_r = _rect(h, w, 0.60, 0.88, 0.52 + dx, 0.64 + dx)
    shoe_l = _rect(h, w, 0.88, 0.93, 0.35 + dx, 0.49 + dx)
    shoe_r = _rect(h, w, 0.88, 0.93, 0.51 + dx, 0.65 + dx)

    parsing[hair] = HAIR
    parsing[face] = FACE
    parsing[torso] = UPPER
    parsing[arm_l | arm_r] = SKIN
    parsing[leg_l | leg_r] = PANTS
    parsing[shoe_l | shoe_r] = SHOES

    colors = _BASE_COLORS + rng.uniform(-_COLOR_JITTER, _COLOR_JITTER, (SYNTHETIC_NUM_CLASSES, 3)).astype(np.float32)
    bg_top, bg_bot = _BG_TOP, _BG_BOTTOM
    ramp = np.linspace(0.0, 1.0, h, dtype=np.float32)[:, None, None]
    image = bg_top * (1.0 - ramp) + bg_bot * ramp
    image = np.broadcast_to(image, (h, w, 3)).copy()
    for label in range(1, SYNTHETIC_NUM_CLASSES):
        image[parsing == label] = colors[label]
    # Mild vertical shading keeps regions non-constant without moving medians
    # away from the assigned colors by much.
    shading = 0.08 * np.sin(np.linspace(0.0, 3.1, h, dtype=np.float32))[:, None, None]
    image = np.clip(image + shading, -1.0, 1.0)
    return image.astype(np.float32), parsing


def write_synthetic_dataset(
    out_dir: str,
    count: int = 8,
    height: int = 96,
    width: int = 64,
    seed: int = 0,
) -> str:
    """Write ``count`` synthetic pairs plus a manifest; returns the manifest path."""
    image_dir = os.path.join(out_dir, "images")
    parsing_dir = os.path.join(out_dir, "parsings")
    os.makedirs(image_dir, exist_ok=True)
    os.makedirs(parsing_dir, exist_ok=True)
    entries = []
    for i in range(count):
        image, parsing = synthesize_example(seed + i, height, width)
        image_path = os.path.join(image_dir, f"im_{i:04d}.png")
        parsing_path = os.path.join(parsing_dir, f"ps_{i:04d}.png")
        imageio.save_image(image, image_path)
        imageio.save_parsing(parsing, parsing_path)
        entries.append(
            imageio.ManifestEntry(
                os.path.join("images", f"im_{i:04d}.png"),
                os.path.join("parsings", f"ps_{i:04d}.png"),
            )
        )
    manifest_path = os.path.join(out_dir, "manifest.jsonl")
    imageio.write_manifest(entries, manifest_path)
    return manifest_path
