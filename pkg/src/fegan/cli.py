"""Command-line interface.

Subcommands: preprocess, train-parser, train-inpainter, eval, edit, serve.
Training reads a key=value config file (one ``key = value`` per line, values
in JSON syntax, ``#`` comments); every key must be a TrainConfig field.
"""

from __future__ import annotations

import dataclasses
import json
import os
import sys

import click
import numpy as np

from . import imageio, synthetic, training
from .errors import ConfigurationError, InvalidArgument
from .pipeline import MaskParams
from .training import TrainConfig

EXIT_MISSING_FILE = 2
EXIT_DIMENSION_MISMATCH = 3

_TRAIN_FIELDS = {f.name: f for f in dataclasses.fields(TrainConfig)}


def parse_config_file(path: str) -> dict:
    """Parse ``key = value`` lines; values use JSON syntax (bare strings ok)."""
    values: dict = {}
    with open(path) as fh:
        for line_no, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigurationError(f"{path}:{line_no}: expected 'key = value', got {raw!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in _TRAIN_FIELDS:
                raise ConfigurationError(f"{path}:{line_no}: unknown config key {key!r}")
            text = value.strip()
            try:
                values[key] = json.loads(text)
            except json.JSONDecodeError:
                values[key] = text
    return values


def build_train_config(values: dict, **overrides) -> TrainConfig:
    merged = dict(values)
    for key, value in overrides.items():
        if value is not None:
            merged[key] = value
    unknown = set(merged) - set(_TRAIN_FIELDS)
    if unknown:
        raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
    for key in ("image_size", "dilations", "face_labels"):
        if key in merged and isinstance(merged[key], list):
            merged[key] = tuple(merged[key])
    for key in ("mask_params", "stroke_params"):
        if key in merged and isinstance(merged[key], dict):
            merged[key] = MaskParams(
                **{k: tuple(v) if isinstance(v, list) else v for k, v in merged[key].items()}
            )
    try:
        return TrainConfig(**merged)
    except TypeError as exc:
        raise ConfigurationError(str(exc)) from exc


@click.group()
def main():
    """Fashion image editing: data prep, training, evaluation, editing, serving."""


@main.command()
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--synthetic", "synthetic_count", type=int, default=None,
              help="Generate N synthetic examples instead of scanning directories.")
@click.option("--images", "image_dir", type=click.Path(exists=True, file_okay=False), default=None)
@click.option("--parsings", "parsing_dir", type=click.Path(exists=True, file_okay=False), default=None)
@click.option("--height", type=int, default=96)
@click.option("--width", type=int, default=64)
@click.option("--seed", type=int, default=0)
def preprocess(out_dir, synthetic_count, image_dir, parsing_dir, height, width, seed):
    """Build a dataset manifest (and optionally a synthetic dataset)."""
    if synthetic_count is not None:
        manifest = synthetic.write_synthetic_dataset(out_dir, synthetic_count, height, width, seed)
        click.echo(f"wrote {synthetic_count} synthetic examples, manifest at {manifest}")
        return
    if not image_dir or not parsing_dir:
        raise click.UsageError("either --synthetic N or both --images and --parsings are required")
    names = sorted(n for n in os.listdir(image_dir) if n.lower().endswith((".png", ".jpg", ".jpeg")))
    entries = []
    for name in names:
        stem = os.path.splitext(name)[0]
        parsing_path = os.path.join(parsing_dir, stem + ".png")
        if not os.path.exists(parsing_path):
            raise click.ClickException(f"no parsing map for {name} (expected {parsing_path})")
        entries.append(imageio.ManifestEntry(os.path.join(image_dir, name), parsing_path))
    os.makedirs(out_dir, exist_ok=True)
    manifest = os.path.join(out_dir, "manifest.jsonl")
    imageio.write_manifest(entries, manifest)
    click.echo(f"manifest with {len(entries)} items at {manifest}")


def _train(stage: str, config_path, manifest, out_dir, resume_from, **overrides):
    try:
        values = parse_config_file(config_path) if config_path else {}
        values["stage"] = stage
        config = build_train_config(values, manifest=manifest, out_dir=out_dir, **overrides)
        if resume_from:
            path = training.resume(resume_from, config)
        else:
            path = training.train_stage(config)
    except (ConfigurationError, InvalidArgument) as exc:
        raise click.ClickException(str(exc))
    click.echo(f"checkpoint written to {path}")


@main.command("train-parser")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--manifest", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--out-dir", type=click.Path(file_okay=False), default=None)
@click.option("--max-steps", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--resume", "resume_from", type=click.Path(exists=True, dir_okay=False), default=None)
def train_parser(config_path, manifest, out_dir, max_steps, seed, resume_from):
    """Stage 1: train the free-form parsing network."""
    _train("parser", config_path, manifest, out_dir, resume_from, max_steps=max_steps, seed=seed)


@main.command("train-inpainter")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--manifest", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--out-dir", type=click.Path(file_okay=False), default=None)
@click.option("--parser-checkpoint", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--max-steps", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--resume", "resume_from", type=click.Path(exists=True, dir_okay=False), default=None)
def train_inpainter(config_path, manifest, out_dir, parser_checkpoint, max_steps, seed, resume_from):
    """Stage 2: train the parsing-aware inpainting network."""
    _train(
        "inpainter", config_path, manifest, out_dir, resume_from,
        parser_checkpoint=parser_checkpoint, max_steps=max_steps, seed=seed,
    )


@main.command("eval")
@click.option("--inpainter-checkpoint", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--manifest", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--parser-checkpoint", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--seed", type=int, default=0)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None)
def eval_cmd(inpainter_checkpoint, manifest, parser_checkpoint, seed, out_path):
    """Evaluate a trained pipeline on a test manifest."""
    try:
        report = training.evaluate(inpainter_checkpoint, manifest, parser_checkpoint, seed)
    except (ConfigurationError, InvalidArgument) as exc:
        raise click.ClickException(str(exc))
    text = json.dumps(report, indent=2)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text + "\n")
        click.echo(f"metrics report written to {out_path}")
    click.echo(
        f"psnr {report['mean_psnr']:.3f}  ssim {report['mean_ssim']:.4f}  "
        f"masked psnr {report['mean_masked_psnr']:.3f}  over {report['num_images']} images"
    )


@main.command()
@click.argument("image_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("mask_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--sketch", "sketch_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--strokes", "strokes_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--parsing", "parsing_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--parsing-out", type=click.Path(dir_okay=False), default=None)
@click.option("--parser-checkpoint", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--inpainter-checkpoint", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--seed", type=int, default=0)
def edit(image_path, mask_path, sketch_path, strokes_path, parsing_path, out_path,
         parsing_out, parser_checkpoint, inpainter_checkpoint, seed):
    """One-shot edit from files on disk (exit 2: missing file, 3: size mismatch)."""
    from PIL import Image as PILImage

    from .service import EditEngine, ServiceConfig, ServiceError

    config = ServiceConfig.from_env()
    if parser_checkpoint:
        config.parser_checkpoint = parser_checkpoint
    if inpainter_checkpoint:
        config.inpainter_checkpoint = inpainter_checkpoint
    engine = EditEngine(config)
    if not engine.ready:
        raise click.ClickException(
            "checkpoints not found; pass --parser-checkpoint/--inpainter-checkpoint "
            "or set FEGAN_CHECKPOINT_DIR"
        )

    image = imageio.load_image(image_path)
    h, w = image.shape[:2]
    mask = imageio.load_mask(mask_path)
    sketch = imageio.load_mask(sketch_path) if sketch_path else np.zeros((h, w), dtype=np.float32)
    if strokes_path:
        with PILImage.open(strokes_path) as st:
            rgba = np.asarray(st.convert("RGBA"))
        stroke_rgb = rgba[..., :3].astype(np.float32) / 127.5 - 1.0
        stroke_mask = (rgba[..., 3] > 0).astype(np.float32)
    else:
        stroke_rgb = np.zeros((h, w, 3), dtype=np.float32)
        stroke_mask = np.zeros((h, w), dtype=np.float32)
    parsing = imageio.load_parsing(parsing_path) if parsing_path else None

    for name, layer in (("mask", mask), ("sketch", sketch), ("strokes", stroke_mask)):
        if layer.shape[:2] != (h, w):
            click.echo(f"error: {name} is {layer.shape[1]}x{layer.shape[0]}, image is {w}x{h}", err=True)
            sys.exit(EXIT_DIMENSION_MISMATCH)
    if parsing is not None and parsing.shape != (h, w):
        click.echo(f"error: parsing is {parsing.shape[1]}x{parsing.shape[0]}, image is {w}x{h}", err=True)
        sys.exit(EXIT_DIMENSION_MISMATCH)

    try:
        result = engine.edit(image, mask, sketch, stroke_rgb, stroke_mask, parsing, seed)
    except ServiceError as exc:
        if exc.code == "dimension_mismatch":
            sys.exit(EXIT_DIMENSION_MISMATCH)
        raise click.ClickException(exc.message)
    imageio.save_image(result["edited"], out_path)
    if parsing_out:
        imageio.save_parsing_visualization(result["parsing"], parsing_out)
    click.echo(f"edited image written to {out_path}")


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
@click.option("--parser-checkpoint", type=click.Path(dir_okay=False), default=None)
@click.option("--inpainter-checkpoint", type=click.Path(dir_okay=False), default=None)
@click.option("--max-side", type=int, default=1024)
@click.option("--max-concurrency", type=int, default=2)
def serve(host, port, parser_checkpoint, inpainter_checkpoint, max_side, max_concurrency):
    """Run the HTTP editing service."""
    import uvicorn

    from .service import ServiceConfig, create_app

    config = ServiceConfig.from_env()
    if parser_checkpoint:
        config.parser_checkpoint = parser_checkpoint
    if inpainter_checkpoint:
        config.inpainter_checkpoint = inpainter_checkpoint
    config.max_side = max_side
    config.max_concurrency = max_concurrency
    uvicorn.run(create_app(config), host=host, port=port)


if __name__ == "__main__":
    main()
