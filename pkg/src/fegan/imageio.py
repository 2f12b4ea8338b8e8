"""File formats: 8-bit PNG/JPEG images mapped to [-1, 1], indexed parsing
PNGs, 0/255 mask PNGs, and JSON-lines dataset manifests."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np
from PIL import Image as PILImage

from .errors import InvalidArgument

MASK_THRESHOLD = 128


def load_image(path: str) -> np.ndarray:
    """Read an 8-bit image file into a float32 (H, W, 3) array in [-1, 1]."""
    with PILImage.open(path) as im:
        arr = np.asarray(im.convert("RGB"), dtype=np.float32)
    return arr / 127.5 - 1.0


def save_image(image: np.ndarray, path: str) -> None:
    arr = np.clip((np.asarray(image, dtype=np.float32) + 1.0) * 127.5, 0, 255)
    PILImage.fromarray(np.round(arr).astype(np.uint8)).save(path)


def image_to_bytes(image: np.ndarray) -> bytes:
    """PNG-encode a [-1, 1] image; used by the service and CLI."""
    import io

    arr = np.clip((np.asarray(image, dtype=np.float32) + 1.0) * 127.5, 0, 255)
    buf = io.BytesIO()
    PILImage.fromarray(np.round(arr).astype(np.uint8)).save(buf, format="PNG")
    return buf.getvalue()


def load_parsing(path: str) -> np.ndarray:
    """Read a single-channel indexed PNG of label values into int64 (H, W)."""
    with PILImage.open(path) as im:
        if im.mode not in ("P", "L", "I"):
            im = im.convert("L")
        arr = np.asarray(im)
    return arr.astype(np.int64)


def save_parsing(parsing: np.ndarray, path: str, num_classes: int | None = None) -> None:
    """Write a label map as an indexed PNG carrying the standard palette."""
    arr = np.asarray(parsing)
    if arr.min() < 0 or arr.max() > 255:
        raise InvalidArgument("parsing labels must fit in uint8 for PNG storage")
    im = PILImage.fromarray(arr.astype(np.uint8), mode="P")
    im.putpalette(make_palette(256).reshape(-1).tolist())
    im.save(path)


def load_mask(path: str) -> np.ndarray:
    """Read a mask PNG, thresholding grayscale values at 128."""
    with PILImage.open(path) as im:
        arr = np.asarray(im.convert("L"))
    return (arr >= MASK_THRESHOLD).astype(np.float32)


def save_mask(mask: np.ndarray, path: str) -> None:
    PILImage.fromarray((np.asarray(mask) > 0.5).astype(np.uint8) * 255).save(path)


def make_palette(num_classes: int = 20) -> np.ndarray:
    """Fixed label palette (the bit-reversal colormap used by segmentation
    datasets); returns (num_classes, 3) uint8."""
    palette = np.zeros((num_classes, 3), dtype=np.uint8)
    for label in range(num_classes):
        value = label
        r = g = b = 0
        for shift in range(8):
            r |= ((value >> 0) & 1) << (7 - shift)
            g |= ((value >> 1) & 1) << (7 - shift)
            b |= ((value >> 2) & 1) << (7 - shift)
            value >>= 3
        palette[label] = (r, g, b)
    return palette


def parsing_to_rgb(parsing: np.ndarray, num_classes: int = 20) -> np.ndarray:
    """Colorize a label map with the fixed palette; returns (H, W, 3) uint8."""
    palette = make_palette(max(num_classes, int(np.max(parsing)) + 1))
    return palette[np.asarray(parsing)]


def save_parsing_visualization(parsing: np.ndarray, path: str, num_classes: int = 20) -> None:
    PILImage.fromarray(parsing_to_rgb(parsing, num_classes)).save(path)


@dataclass(frozen=True)
class ManifestEntry:
    image_path: str
    parsing_path: str


def write_manifest(entries: list[ManifestEntry], path: str) -> None:
    with open(path, "w") as fh:
        for entry in entries:
            fh.write(json.dumps({"image_path": entry.image_path, "parsing_path": entry.parsing_path}) + "\n")


def read_manifest(path: str) -> list[ManifestEntry]:
    """Read a JSON-lines manifest; relative paths resolve against the
    manifest's directory."""
    base = os.path.dirname(os.path.abspath(path))
    entries = []
    with open(path) as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                image_path, parsing_path = record["image_path"], record["parsing_path"]
            except (json.JSONDecodeError, KeyError) as exc:
                raise InvalidArgument(f"{path}:{line_no}: bad manifest line: {exc}") from exc
            if not os.path.isabs(image_path):
                image_path = os.path.join(base, image_path)
            if not os.path.isabs(parsing_path):
                parsing_path = os.path.join(base, parsing_path)
            entries.append(ManifestEntry(image_path, parsing_path))
    return entries
