"""Model-input manufacturing: sketches, color domains, masks, and assembled
training/inference examples.

Conventions used throughout the package:
  * images are float32 arrays of shape (H, W, 3) with values in [-1, 1]
  * parsing maps are integer arrays of shape (H, W), background label is 0
  * binary masks are float32 arrays of shape (H, W) with values in {0, 1}

Every function here is pure; randomness only enters through explicit seeds,
so the pipeline is safe for parallel data-loading workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from skimage.feature import canny

from .errors import InvalidArgument

DEFAULT_NUM_CLASSES = 20
DEFAULT_CANNY_LOW = 0.1
DEFAULT_CANNY_HIGH = 0.2
DEFAULT_CANNY_SIGMA = 1.0
HOLE_FILL_VALUE = -1.0

# Default label ids treated as the face region (face + hair in the default
# 20-class layout); configurable wherever a face mask is derived.
DEFAULT_FACE_LABELS = (1, 2)

# Luma weights for RGB -> grayscale (ITU-R BT.601).
_LUMA = np.array([0.299, 0.587, 0.114], dtype=np.float64)


def _check_image(image: np.ndarray) -> np.ndarray:
    if image.ndim != 3 or image.shape[2] != 3:
        raise InvalidArgument(f"image must have shape (H, W, 3), got {image.shape}")
    return np.asarray(image, dtype=np.float32)


def _check_same_hw(a: np.ndarray, b: np.ndarray, what: str) -> None:
    if a.shape[:2] != b.shape[:2]:
        raise InvalidArgument(f"{what}: spatial sizes differ, {a.shape[:2]} vs {b.shape[:2]}")


def _check_binary(mask: np.ndarray, name: str) -> np.ndarray:
    mask = np.asarray(mask)
    if mask.ndim != 2:
        raise InvalidArgument(f"{name} must be 2-D, got shape {mask.shape}")
    if not np.isin(mask, (0, 1)).all():
        raise InvalidArgument(f"{name} must be strictly binary")
    return mask.astype(np.float32)


def luminance(image: np.ndarray) -> np.ndarray:
    """Map an RGB image in [-1, 1] to grayscale luminance in [0, 1]."""
    image = _check_image(image)
    gray = (image.astype(np.float64) + 1.0) / 2.0 @ _LUMA
    return np.clip(gray, 0.0, 1.0)


def extract_sketch(
    image: np.ndarray,
    low: float = DEFAULT_CANNY_LOW,
    high: float = DEFAULT_CANNY_HIGH,
    sigma: float = DEFAULT_CANNY_SIGMA,
) -> np.ndarray:
    """Binary edge map of an image via Canny on [0, 1] luminance.

    Thresholds are gradient magnitudes on the [0, 1] luminance scale; a
    Gaussian pre-blur of ``sigma`` is applied before gradient estimation.
    """
    if not (0 <= low < high):
        raise InvalidArgument(f"require 0 <= low < high, got low={low}, high={high}")
    gray = luminance(image)
    edges = canny(gray, sigma=sigma, low_threshold=low, high_threshold=high)
    return edges.astype(np.float32)


def extract_color_domain(image: np.ndarray, parsing: np.ndarray) -> np.ndarray:
    """Fill each parsing region with its per-channel median color.

    The background region (label 0) is filled with -1 (black). For regions
    with an even pixel count the median is the mean of the two central
    values.
    """
    image = _check_image(image)
    _check_same_hw(image, parsing, "extract_color_domain")
    out = np.full_like(image, HOLE_FILL_VALUE)
    for label in np.unique(parsing):
        if label == 0:
            continue
        region = parsing == label
        out[region] = np.median(image[region], axis=0)
    return out


def compose_mask(mask: np.ndarray, foreground: np.ndarray) -> np.ndarray:
    """Valid-pixel mask for the partial-conv encoder: (1 - mask) * foreground."""
    mask = _check_binary(mask, "mask")
    foreground = _check_binary(foreground, "foreground")
    _check_same_hw(mask, foreground, "compose_mask")
    return (1.0 - mask) * foreground


def foreground_mask_from_parsing(parsing: np.ndarray) -> np.ndarray:
    """1 wherever the parsing label is not background."""
    return (np.asarray(parsing) != 0).astype(np.float32)


def face_mask_from_parsing(parsing: np.ndarray, face_labels: Iterable[int] = DEFAULT_FACE_LABELS) -> np.ndarray:
    """Union indicator of the given (non-background) labels."""
    labels = sorted(set(int(l) for l in face_labels))
    if not labels:
        raise InvalidArgument("face_labels must not be empty")
    if labels[0] < 1:
        raise InvalidArgument("face_labels must not include the background label 0")
    return np.isin(np.asarray(parsing), labels).astype(np.float32)


def one_hot_parsing(parsing: np.ndarray, num_classes: int = DEFAULT_NUM_CLASSES) -> np.ndarray:
    """Expand an (H, W) label map to a (C, H, W) one-hot float32 array."""
    parsing = np.asarray(parsing)
    if parsing.min() < 0 or parsing.max() >= num_classes:
        raise InvalidArgument(
            f"parsing labels must lie in [0, {num_classes - 1}], got range "
            f"[{parsing.min()}, {parsing.max()}]"
        )
    onehot = np.zeros((num_classes,) + parsing.shape, dtype=np.float32)
    np.put_along_axis(onehot, parsing[None].astype(np.int64), 1.0, axis=0)
    return onehot


def noise_map(height: int, width: int, seed: int) -> np.ndarray:
    """Reproducible i.i.d. standard-normal map of shape (H, W)."""
    rng = np.random.default_rng(seed)
    return rng.standard_normal((height, width)).astype(np.float32)


@dataclass(frozen=True)
class MaskParams:
    """Knobs of the procedural free-form mask generator."""

    num_strokes: int = 4
    max_vertices: int = 8
    brush_width_range: tuple[int, int] = (12, 40)
    angle_range: tuple[float, float] = (0.0, 2.0 * math.pi)
    coverage_range: tuple[float, float] = (0.05, 0.5)


def _paint_disc(mask: np.ndarray, cy: float, cx: float, radius: float) -> None:
    h, w = mask.shape
    r = int(math.ceil(radius))
    y0, y1 = max(0, int(cy) - r), min(h, int(cy) + r + 1)
    x0, x1 = max(0, int(cx) - r), min(w, int(cx) + r + 1)
    if y0 >= y1 or x0 >= x1:
        return
    yy, xx = np.ogrid[y0:y1, x0:x1]
    mask[y0:y1, x0:x1][(yy - cy) ** 2 + (xx - cx) ** 2 <= radius**2] = 1.0


def _draw_stroke(mask: np.ndarray, rng: np.random.Generator, params: MaskParams) -> None:
    h, w = mask.shape
    num_vertices = int(rng.integers(1, params.max_vertices + 1))
    brush = float(rng.uniform(*params.brush_width_range))
    radius = brush / 2.0
    max_len = max(min(h, w) / 2.0, brush)
    y = float(rng.uniform(0, h))
    x = float(rng.uniform(0, w))
    _paint_disc(mask, y, x, radius)
    for _ in range(num_vertices):
        angle = float(rng.uniform(*params.angle_range))
        length = float(rng.uniform(brush, max_len))
        ny = float(np.clip(y + length * math.sin(angle), 0, h - 1))
        nx = float(np.clip(x + length * math.cos(angle), 0, w - 1))
        steps = max(2, int(math.hypot(ny - y, nx - x) / max(1.0, radius / 2.0)) + 1)
        for t in np.linspace(0.0, 1.0, steps):
            _paint_disc(mask, y + (ny - y) * t, x + (nx - x) * t, radius)
        y, x = ny, nx


def generate_freeform_mask(
    height: int,
    width: int,
    seed: int,
    params: MaskParams = MaskParams(),
    max_attempts: int = 1000,
) -> np.ndarray:
    """Random brush-stroke mask, deterministic per seed.

    Strokes are random polylines painted with a round brush. Masks are
    regenerated internally until the coverage ratio falls inside
    ``params.coverage_range``.
    """
    if height <= 0 or width <= 0:
        raise InvalidArgument("mask dimensions must be positive")
    if params.num_strokes < 1:
        raise InvalidArgument("num_strokes must be >= 1 (coverage would be 0)")
    if params.max_vertices < 1:
        raise InvalidArgument("max_vertices must be >= 1")
    lo, hi = params.brush_width_range
    if not (0 < lo <= hi):
        raise InvalidArgument(f"invalid brush_width_range {params.brush_width_range}")
    if hi >= min(height, width):
        raise InvalidArgument(
            f"brush width {hi} must be smaller than min(H, W) = {min(height, width)}"
        )
    rng = np.random.default_rng(seed)
    cov_lo, cov_hi = params.coverage_range
    for _ in range(max_attempts):
        mask = np.zeros((height, width), dtype=np.float32)
        for _ in range(params.num_strokes):
            _draw_stroke(mask, rng, params)
        coverage = float(mask.mean())
        if cov_lo <= coverage <= cov_hi:
            return mask
    raise InvalidArgument(
        f"could not reach coverage in [{cov_lo}, {cov_hi}] after {max_attempts} attempts; "
        "mask parameters are unsatisfiable for this size"
    )


# Sparser strokes used to simulate where a user would place color marks.
STROKE_SIM_PARAMS = MaskParams(num_strokes=6, max_vertices=4, brush_width_range=(6, 18))


@dataclass
class EditInputs:
    """The assembled conditioning bundle consumed by both networks.

    All masked channels are identically zero where ``mask`` is 0; the
    incomplete image equals the source outside the mask and -1 inside.
    """

    incomplete_image: np.ndarray  # (H, W, 3) in [-1, 1]
    incomplete_parsing: np.ndarray  # (C, H, W) one-hot, zeroed inside mask
    sketch_masked: np.ndarray  # (H, W) binary
    color_masked: np.ndarray  # (H, W, 3) in [-1, 1]
    mask: np.ndarray  # (H, W) binary edit mask M
    composed_mask: np.ndarray  # (H, W) binary (1 - M) * M_f
    noise: np.ndarray  # (H, W) standard normal
    seed: int = 0

    @property
    def height(self) -> int:
        return self.mask.shape[0]

    @property
    def width(self) -> int:
        return self.mask.shape[1]

    def parser_channels(self) -> np.ndarray:
        """Stack the free-form parser input: one-hot parsing, sketch, color,
        mask, noise -> (C + 6, H, W)."""
        return np.concatenate(
            [
                self.incomplete_parsing,
                self.sketch_masked[None],
                np.moveaxis(self.color_masked, -1, 0),
                self.mask[None],
                self.noise[None],
            ],
            axis=0,
        )

    def condition_channels(self) -> np.ndarray:
        """Stack the normalization-layer conditioning: sketch, color, noise
        -> (5, H, W)."""
        return np.concatenate(
            [self.sketch_masked[None], np.moveaxis(self.color_masked, -1, 0), self.noise[None]],
            axis=0,
        )


def make_training_example(
    image: np.ndarray,
    parsing: np.ndarray,
    mask: np.ndarray,
    stroke_mask: np.ndarray,
    seed: int,
    num_classes: int = DEFAULT_NUM_CLASSES,
    canny_low: float = DEFAULT_CANNY_LOW,
    canny_high: float = DEFAULT_CANNY_HIGH,
    sketch: np.ndarray | None = None,
    color_domain: np.ndarray | None = None,
) -> EditInputs:
    """Assemble every conditioning channel for one training item.

    The ground-truth sketch and color domain stand in for user input: both
    are restricted to the edit mask, and color is additionally intersected
    with ``stroke_mask`` to mimic sparse strokes. ``sketch`` and
    ``color_domain`` may be passed precomputed (data loaders cache them per
    item); they default to extraction from the ground truth.
    """
    image = _check_image(image)
    _check_same_hw(image, parsing, "make_training_example")
    mask = _check_binary(mask, "mask")
    _check_same_hw(image, mask, "make_training_example")
    stroke_mask = _check_binary(stroke_mask, "stroke_mask")
    _check_same_hw(image, stroke_mask, "make_training_example")

    hole = mask[..., None]
    incomplete_image = image * (1.0 - hole) + HOLE_FILL_VALUE * hole
    incomplete_parsing = one_hot_parsing(parsing, num_classes) * (1.0 - mask)[None]
    if sketch is None:
        sketch = extract_sketch(image, canny_low, canny_high)
    sketch_masked = sketch * mask
    color = extract_color_domain(image, parsing) if color_domain is None else color_domain
    color_masked = color * (stroke_mask * mask)[..., None]
    composed = compose_mask(mask, foreground_mask_from_parsing(parsing))
    return EditInputs(
        incomplete_image=incomplete_image.astype(np.float32),
        incomplete_parsing=incomplete_parsing.astype(np.float32),
        sketch_masked=sketch_masked.astype(np.float32),
        color_masked=color_masked.astype(np.float32),
        mask=mask,
        composed_mask=composed,
        noise=noise_map(image.shape[0], image.shape[1], seed),
        seed=seed,
    )
