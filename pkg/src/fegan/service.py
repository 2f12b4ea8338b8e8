"""HTTP editing service.

Endpoints:
  POST /v1/edit    run a full edit (mask + sketch + color strokes)
  POST /v1/parse   run only the parsing network
  GET  /v1/health  readiness and model fingerprints

Every image layer travels as a base64 PNG. Color strokes are RGBA: any
pixel with alpha > 0 counts as a stroke, its RGB is the requested color.
Inference resizes inputs to the model's training resolution and pastes the
(resized-back) edit into the original frame, so output dimensions always
equal the request's. Model weights are immutable after load; a bounded
worker semaphore guards memory under concurrent requests.
"""

from __future__ import annotations

import base64
import binascii
import io
import os
import threading
import time
from dataclasses import dataclass

import numpy as np
import torch
import torch.nn.functional as F
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from PIL import Image as PILImage
from pydantic import BaseModel

from . import imageio, pipeline, training
from .errors import InvalidArgument
from .inpaint_net import composite_output
from .parser_net import logits_to_parsing

CHECKPOINT_DIR_ENV = "FEGAN_CHECKPOINT_DIR"
DEFAULT_MAX_SIDE = 1024


class ServiceError(Exception):
    """Error with a stable machine-readable code and HTTP status."""

    def __init__(self, code: str, message: str, status: int = 400):
        super().__init__(message)
        self.code = code
        self.message = message
        self.status = status


@dataclass
class ServiceConfig:
    parser_checkpoint: str | None = None
    inpainter_checkpoint: str | None = None
    max_side: int = DEFAULT_MAX_SIDE
    max_concurrency: int = 2
    device: str = "cpu"

    @classmethod
    def from_env(cls) -> "ServiceConfig":
        config = cls()
        ckpt_dir = os.environ.get(CHECKPOINT_DIR_ENV)
        if ckpt_dir:
            config.parser_checkpoint = os.path.join(ckpt_dir, "parser.ckpt")
            config.inpainter_checkpoint = os.path.join(ckpt_dir, "inpainter.ckpt")
        return config


class EditEngine:
    """Loads both networks once and serves deterministic, seedable edits."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.parser = None
        self.inpainter = None
        self.train_config = None
        self.parser_fingerprint = None
        self.inpainter_fingerprint = None
        self._semaphore = threading.Semaphore(config.max_concurrency)
        self.try_load()

    def try_load(self) -> bool:
        cfg = self.config
        if self.ready:
            return True
        if not cfg.parser_checkpoint or not cfg.inpainter_checkpoint:
            return False
        if not (os.path.exists(cfg.parser_checkpoint) and os.path.exists(cfg.inpainter_checkpoint)):
            return False
        self.inpainter, self.train_config = training.load_inpainter(cfg.inpainter_checkpoint, cfg.device)
        self.parser = training.load_parser(cfg.parser_checkpoint, cfg.device)
        self.parser_fingerprint = training.checkpoint_fingerprint(cfg.parser_checkpoint)
        self.inpainter_fingerprint = training.checkpoint_fingerprint(cfg.inpainter_checkpoint)
        return True

    @property
    def ready(self) -> bool:
        return self.inpainter is not None and self.parser is not None

    # ------------------------------------------------------------- inference

    def _prepare(self, image, mask, sketch, stroke_rgb, stroke_mask, parsing, seed) -> dict:
        """Resize everything to model resolution and assemble the inputs."""
        model_h, model_w = self.train_config.image_size
        num_classes = self.train_config.num_classes

        image_s = _resize_image(image, model_h, model_w)
        mask_s = _resize_nearest(mask, model_h, model_w)
        sketch_s = _resize_nearest(sketch, model_h, model_w)
        stroke_rgb_s = _resize_image(stroke_rgb, model_h, model_w, smooth=False)
        stroke_mask_s = _resize_nearest(stroke_mask, model_h, model_w)
        if parsing is None:
            # No parsing supplied: unknown layout. Treat the whole frame as
            # foreground for the partial-conv encoder and let the parser
            # synthesize labels inside the mask.
            parsing_s = np.zeros((model_h, model_w), dtype=np.int64)
            foreground = np.ones((model_h, model_w), dtype=np.float32)
        else:
            parsing_s = _resize_labels(parsing, model_h, model_w)
            if parsing_s.max() >= num_classes:
                raise ServiceError("bad_parsing", f"parsing labels exceed model classes ({num_classes})")
            foreground = pipeline.foreground_mask_from_parsing(parsing_s)

        incomplete = image_s * (1.0 - mask_s[..., None]) + pipeline.HOLE_FILL_VALUE * mask_s[..., None]
        onehot = pipeline.one_hot_parsing(parsing_s, num_classes) * (1.0 - mask_s)[None]
        sketch_masked = sketch_s * mask_s
        color_masked = stroke_rgb_s * (stroke_mask_s * mask_s)[..., None]
        noise = pipeline.noise_map(model_h, model_w, seed)
        return {
            "incomplete": incomplete,
            "onehot": onehot,
            "sketch_masked": sketch_masked,
            "color_masked": color_masked,
            "mask": mask_s,
            "composed": pipeline.compose_mask(mask_s, foreground),
            "noise": noise,
        }

    def _run_parser(self, prepared: dict) -> torch.Tensor:
        parser_in = np.concatenate(
            [
                prepared["onehot"],
                prepared["sketch_masked"][None],
                np.moveaxis(prepared["color_masked"], -1, 0),
                prepared["mask"][None],
                prepared["noise"][None],
            ],
            axis=0,
        )
        logits = self.parser(torch.from_numpy(parser_in).unsqueeze(0))
        return logits_to_parsing(logits)

    def edit(
        self,
        image: np.ndarray,
        mask: np.ndarray,
        sketch: np.ndarray,
        stroke_rgb: np.ndarray,
        stroke_mask: np.ndarray,
        parsing: np.ndarray | None,
        seed: int,
    ) -> dict:
        """Run the two networks and composite at native resolution.

        Returns {"edited": (H, W, 3) in [-1, 1], "parsing": (H, W) labels}.
        """
        if not self.ready:
            raise ServiceError("not_ready", "model checkpoints are not loaded", status=503)
        with self._semaphore, torch.no_grad():
            native_h, native_w = image.shape[:2]
            model_h, model_w = self.train_config.image_size
            num_classes = self.train_config.num_classes
            prepared = self._prepare(image, mask, sketch, stroke_rgb, stroke_mask, parsing, seed)

            predicted = self._run_parser(prepared)
            pred_onehot = F.one_hot(predicted, num_classes).permute(0, 3, 1, 2).float()

            condition = np.concatenate(
                [
                    prepared["sketch_masked"][None],
                    np.moveaxis(prepared["color_masked"], -1, 0),
                    prepared["noise"][None],
                ],
                axis=0,
            )
            generated = self.inpainter(
                torch.from_numpy(np.moveaxis(prepared["incomplete"], -1, 0)).unsqueeze(0),
                torch.from_numpy(prepared["composed"]).reshape(1, 1, model_h, model_w),
                pred_onehot,
                torch.from_numpy(condition).unsqueeze(0),
            )
            gen_native = F.interpolate(
                generated, size=(native_h, native_w), mode="bilinear", align_corners=False
            )
            original = torch.from_numpy(np.moveaxis(image, -1, 0)).unsqueeze(0)
            mask_native = torch.from_numpy(mask).reshape(1, 1, native_h, native_w)
            edited = composite_output(gen_native, original, mask_native)
            edited_np = np.moveaxis(edited.squeeze(0).numpy(), 0, -1)
            parsing_np = _resize_labels(predicted.squeeze(0).numpy().astype(np.int64), native_h, native_w)
            return {"edited": edited_np, "parsing": parsing_np}

    def parse(self, image, mask, sketch, stroke_rgb, stroke_mask, parsing, seed) -> np.ndarray:
        """Parsing-only endpoint: runs just the free-form parsing network."""
        if not self.ready:
            raise ServiceError("not_ready", "model checkpoints are not loaded", status=503)
        with self._semaphore, torch.no_grad():
            native_h, native_w = image.shape[:2]
            prepared = self._prepare(image, mask, sketch, stroke_rgb, stroke_mask, parsing, seed)
            predicted = self._run_parser(prepared)
            return _resize_labels(predicted.squeeze(0).numpy().astype(np.int64), native_h, native_w)


def _resize_image(image: np.ndarray, h: int, w: int, smooth: bool = True) -> np.ndarray:
    if image.shape[:2] == (h, w):
        return image.astype(np.float32)
    arr = np.clip((image + 1.0) * 127.5, 0, 255).astype(np.uint8)
    resample = PILImage.BILINEAR if smooth else PILImage.NEAREST
    out = np.asarray(PILImage.fromarray(arr).resize((w, h), resample), dtype=np.float32)
    return out / 127.5 - 1.0


def _resize_nearest(mask: np.ndarray, h: int, w: int) -> np.ndarray:
    if mask.shape == (h, w):
        return mask.astype(np.float32)
    arr = (np.asarray(mask) > 0.5).astype(np.uint8) * 255
    out = np.asarray(PILImage.fromarray(arr).resize((w, h), PILImage.NEAREST))
    return (out >= imageio.MASK_THRESHOLD).astype(np.float32)


def _resize_labels(parsing: np.ndarray, h: int, w: int) -> np.ndarray:
    if parsing.shape == (h, w):
        return parsing.astype(np.int64)
    im = PILImage.fromarray(parsing.astype(np.int32), mode="I")
    return np.asarray(im.resize((w, h), PILImage.NEAREST)).astype(np.int64)


# ----------------------------------------------------------------- HTTP app


class EditOptions(BaseModel):
    return_parsing: bool = False


class EditRequestModel(BaseModel):
    image: str
    mask: str
    sketch: str | None = None
    color_strokes: str | None = None
    parsing: str | None = None
    seed: int = 0
    options: EditOptions = EditOptions()


def _decode_png(b64: str, field: str) -> PILImage.Image:
    try:
        raw = base64.b64decode(b64, validate=True)
        return PILImage.open(io.BytesIO(raw))
    except (binascii.Error, ValueError, OSError) as exc:
        raise ServiceError("bad_image", f"field {field!r} is not a valid base64 PNG: {exc}") from exc


def _encode_png(array_uint8: np.ndarray) -> str:
    buf = io.BytesIO()
    PILImage.fromarray(array_uint8).save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")


def _decode_request(body: EditRequestModel, max_side: int) -> dict:
    with _decode_png(body.image, "image") as im:
        if max(im.size) > max_side:
            raise ServiceError(
                "image_too_large", f"image exceeds the configured maximum of {max_side}px", status=413
            )
        image = np.asarray(im.convert("RGB"), dtype=np.float32) / 127.5 - 1.0
    h, w = image.shape[:2]

    def check_dims(arr: np.ndarray, field: str) -> np.ndarray:
        if arr.shape[:2] != (h, w):
            raise ServiceError(
                "dimension_mismatch",
                f"layer {field!r} is {arr.shape[1]}x{arr.shape[0]}, image is {w}x{h}",
            )
        return arr

    with _decode_png(body.mask, "mask") as mm:
        mask = check_dims(np.asarray(mm.convert("L")), "mask")
    mask = (mask >= imageio.MASK_THRESHOLD).astype(np.float32)

    if body.sketch is not None:
        with _decode_png(body.sketch, "sketch") as sk:
            sketch = check_dims(np.asarray(sk.convert("L")), "sketch")
        sketch = (sketch >= imageio.MASK_THRESHOLD).astype(np.float32)
    else:
        sketch = np.zeros((h, w), dtype=np.float32)

    if body.color_strokes is not None:
        with _decode_png(body.color_strokes, "color_strokes") as st:
            rgba = check_dims(np.asarray(st.convert("RGBA")), "color_strokes")
        stroke_rgb = rgba[..., :3].astype(np.float32) / 127.5 - 1.0
        stroke_mask = (rgba[..., 3] > 0).astype(np.float32)
    else:
        stroke_rgb = np.zeros((h, w, 3), dtype=np.float32)
        stroke_mask = np.zeros((h, w), dtype=np.float32)

    parsing = None
    if body.parsing is not None:
        with _decode_png(body.parsing, "parsing") as pp:
            if pp.mode not in ("P", "L", "I"):
                pp = pp.convert("L")
            parsing = check_dims(np.asarray(pp), "parsing").astype(np.int64)

    return {
        "image": image,
        "mask": mask,
        "sketch": sketch,
        "stroke_rgb": stroke_rgb,
        "stroke_mask": stroke_mask,
        "parsing": parsing,
        "seed": body.seed,
    }


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig.from_env()
    app = FastAPI(title="fegan editing service", version="1")
    engine = EditEngine(config)
    app.state.engine = engine

    @app.exception_handler(ServiceError)
    async def service_error_handler(request: Request, exc: ServiceError):
        return JSONResponse(
            status_code=exc.status, content={"error": {"code": exc.code, "message": exc.message}}
        )

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"error": {"code": "invalid_payload", "message": str(exc.errors()[:3])}},
        )

    @app.get("/v1/health")
    def health():
        engine.try_load()
        return {
            "status": "ready" if engine.ready else "not_ready",
            "parser_fingerprint": engine.parser_fingerprint,
            "inpainter_fingerprint": engine.inpainter_fingerprint,
        }

    @app.post("/v1/edit")
    def edit(body: EditRequestModel):
        # Timing travels in a header so identical requests produce
        # byte-identical bodies.
        engine.try_load()
        started = time.monotonic()
        inputs = _decode_request(body, config.max_side)
        result = engine.edit(
            inputs["image"], inputs["mask"], inputs["sketch"], inputs["stroke_rgb"],
            inputs["stroke_mask"], inputs["parsing"], inputs["seed"],
        )
        edited = np.round(np.clip((result["edited"] + 1.0) * 127.5, 0, 255)).astype(np.uint8)
        content = {
            "edited_image": _encode_png(edited),
            "model_fingerprint": engine.inpainter_fingerprint,
        }
        if body.options.return_parsing:
            content["parsing_visualization"] = _encode_png(
                imageio.parsing_to_rgb(result["parsing"], engine.train_config.num_classes)
            )
        return JSONResponse(content, headers=_timing_header(started))

    @app.post("/v1/parse")
    def parse(body: EditRequestModel):
        engine.try_load()
        started = time.monotonic()
        inputs = _decode_request(body, config.max_side)
        parsing = engine.parse(
            inputs["image"], inputs["mask"], inputs["sketch"], inputs["stroke_rgb"],
            inputs["stroke_mask"], inputs["parsing"], inputs["seed"],
        )
        content = {
            "parsing": _encode_png(parsing.astype(np.uint8)),
            "parsing_visualization": _encode_png(
                imageio.parsing_to_rgb(parsing, engine.train_config.num_classes)
            ),
            "model_fingerprint": engine.parser_fingerprint,
        }
        return JSONResponse(content, headers=_timing_header(started))

    return app


def _timing_header(started: float) -> dict:
    return {"X-Timing-Ms": str(round((time.monotonic() - started) * 1000.0, 3))}
