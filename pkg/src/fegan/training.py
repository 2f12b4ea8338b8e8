"""Two-stage training harness.

Stage "parser" trains the free-form parsing network against a two-scale
PatchGAN; stage "inpainter" trains the parsing-aware inpainting network
against a spectral-norm discriminator, consuming a frozen parser checkpoint.
Each cycle runs exactly one generator step followed by one discriminator
step.

Determinism: model initialization is seeded from the config, and all
per-step randomness (batch indices, masks, strokes, noise, teacher-mixing
coins) is derived functionally from (seed, step). A run resumed from a
checkpoint therefore continues bit-identically to an uninterrupted one.
"""

from __future__ import annotations

import dataclasses
import hashlib
import io
import json
import os
import struct
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import torch
import torch.nn.functional as F
from PIL import Image as PILImage

from . import imageio, losses, metrics, pipeline
from .discriminators import MultiScalePatchDiscriminator, SpectralNormDiscriminator
from .errors import ConfigurationError, InvalidArgument
from .inpaint_net import InpainterConfig, ParsingAwareInpainter, composite_output
from .losses import LossWeights
from .parser_net import FreeFormParser, ParserConfig, logits_to_parsing, parsing_loss
from .pipeline import MaskParams

CHECKPOINT_MAGIC = b"FEGAN1"
CHECKPOINT_VERSION = 1

STAGE_BATCH_DEFAULTS = {"parser": 20, "inpainter": 8}


@dataclass(frozen=True)
class TrainConfig:
    stage: str
    manifest: str
    out_dir: str = "runs"
    image_size: tuple[int, int] = (512, 320)  # (height, width)
    num_classes: int = 20
    lr: float = 2e-4
    beta1: float = 0.5
    beta2: float = 0.999
    batch_size: int | None = None  # stage default: 20 (parser) / 8 (inpainter)
    max_steps: int | None = None
    epochs: int | None = None
    seed: int = 0
    # architecture scale (defaults match full-resolution training; toy runs shrink them)
    parser_depth: int = 5
    parser_base_channels: int = 64
    inpaint_depth: int = 4
    inpaint_base_channels: int = 64
    dilations: tuple[int, ...] = (2, 2, 4, 4)
    disc_base_channels: int = 64
    # data pipeline
    canny_low: float = pipeline.DEFAULT_CANNY_LOW
    canny_high: float = pipeline.DEFAULT_CANNY_HIGH
    mask_params: MaskParams = field(default_factory=MaskParams)
    stroke_params: MaskParams = field(default_factory=lambda: pipeline.STROKE_SIM_PARAMS)
    mask_dir: str | None = None
    face_labels: tuple[int, ...] = pipeline.DEFAULT_FACE_LABELS
    # stage 2
    parser_checkpoint: str | None = None
    teacher_mix_prob: float = 0.5
    use_perceptual: bool = False
    # bookkeeping
    weights: LossWeights = field(default_factory=LossWeights)
    checkpoint_every: int = 500
    log_every: int = 10
    grad_clip: float | None = None
    device: str = "cpu"

    def __post_init__(self):
        if self.stage not in STAGE_BATCH_DEFAULTS:
            raise ConfigurationError(f"stage must be one of {sorted(STAGE_BATCH_DEFAULTS)}, got {self.stage!r}")
        if self.image_size[0] <= 0 or self.image_size[1] <= 0:
            raise ConfigurationError(f"image_size must be positive, got {self.image_size}")
        if self.max_steps is None and self.epochs is None:
            raise ConfigurationError("one of max_steps or epochs must be set")

    @property
    def effective_batch_size(self) -> int:
        return self.batch_size or STAGE_BATCH_DEFAULTS[self.stage]


def config_fingerprint(config: TrainConfig) -> str:
    """Hash of every semantically relevant config field (out_dir and logging
    cadence excluded)."""
    record = dataclasses.asdict(config)
    for transient in ("out_dir", "checkpoint_every", "log_every"):
        record.pop(transient, None)
    blob = json.dumps(record, sort_keys=True, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def save_checkpoint(payload: dict, path: str) -> None:
    """Single-file archive: magic 'FEGAN1', version, then a torch payload."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    buf = io.BytesIO()
    torch.save(payload, buf)
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<I", CHECKPOINT_VERSION))
        fh.write(buf.getvalue())


def load_checkpoint(path: str) -> dict:
    with open(path, "rb") as fh:
        magic = fh.read(len(CHECKPOINT_MAGIC))
        if magic != CHECKPOINT_MAGIC:
            raise ConfigurationError(f"{path}: not a checkpoint file (bad magic {magic!r})")
        (version,) = struct.unpack("<I", fh.read(4))
        if version != CHECKPOINT_VERSION:
            raise ConfigurationError(f"{path}: unsupported checkpoint version {version}")
        return torch.load(io.BytesIO(fh.read()), map_location="cpu", weights_only=False)


class Dataset:
    """Images + parsing maps listed in a JSON-lines manifest, resized to the
    training resolution and cached in memory with per-item sketch and color
    domain."""

    def __init__(self, manifest_path: str, image_size: tuple[int, int], num_classes: int,
                 canny_low: float = pipeline.DEFAULT_CANNY_LOW,
                 canny_high: float = pipeline.DEFAULT_CANNY_HIGH):
        self.entries = imageio.read_manifest(manifest_path)
        if not self.entries:
            raise ConfigurationError(f"manifest {manifest_path} lists no items")
        self.image_size = image_size
        self.num_classes = num_classes
        self.canny_low = canny_low
        self.canny_high = canny_high
        self._cache: dict[int, tuple] = {}

    def __len__(self) -> int:
        return len(self.entries)

    def get(self, idx: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Returns (image, parsing, sketch, color_domain) at training size."""
        if idx not in self._cache:
            entry = self.entries[idx]
            h, w = self.image_size
            with PILImage.open(entry.image_path) as im:
                image = np.asarray(im.convert("RGB").resize((w, h), PILImage.BILINEAR), dtype=np.float32)
            image = image / 127.5 - 1.0
            with PILImage.open(entry.parsing_path) as pm:
                if pm.mode not in ("P", "L", "I"):
                    pm = pm.convert("L")
                parsing = np.asarray(pm.resize((w, h), PILImage.NEAREST)).astype(np.int64)
            if parsing.max() >= self.num_classes:
                raise InvalidArgument(
                    f"{entry.parsing_path}: label {parsing.max()} out of range for "
                    f"{self.num_classes} classes"
                )
            sketch = pipeline.extract_sketch(image, self.canny_low, self.canny_high)
            color = pipeline.extract_color_domain(image, parsing)
            self._cache[idx] = (image, parsing, sketch, color)
        return self._cache[idx]


class MaskSource:
    """Procedural free-form masks by default; an on-disk corpus when a
    directory of mask PNGs is configured."""

    def __init__(self, image_size: tuple[int, int], params: MaskParams, mask_dir: str | None = None):
        self.image_size = image_size
        self.params = params
        self.files: list[str] = []
        if mask_dir is not None:
            self.files = sorted(
                os.path.join(mask_dir, name)
                for name in os.listdir(mask_dir)
                if name.lower().endswith((".png", ".jpg", ".jpeg"))
            )
            if not self.files:
                raise ConfigurationError(f"mask_dir {mask_dir} contains no mask images")

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        h, w = self.image_size
        if self.files:
            path = self.files[int(rng.integers(len(self.files)))]
            with PILImage.open(path) as im:
                arr = np.asarray(im.convert("L").resize((w, h), PILImage.NEAREST))
            return (arr >= imageio.MASK_THRESHOLD).astype(np.float32)
        return pipeline.generate_freeform_mask(h, w, int(rng.integers(2**31)), self.params)


def _batch_tensor(arrays: list[np.ndarray], device: str) -> torch.Tensor:
    return torch.from_numpy(np.stack(arrays)).to(device)


class Trainer:
    """Owns the networks, optimizers, data, and the G/D step cycle for one
    training stage."""

    def __init__(self, config: TrainConfig):
        self.config = config
        self.fingerprint = config_fingerprint(config)
        self.step = 0
        self.device = config.device
        self.dataset = Dataset(
            config.manifest, config.image_size, config.num_classes, config.canny_low, config.canny_high
        )
        self.mask_source = MaskSource(config.image_size, config.mask_params, config.mask_dir)
        self.stroke_source = MaskSource(config.image_size, config.stroke_params)

        torch.manual_seed(config.seed)
        if config.stage == "parser":
            self.generator = FreeFormParser(
                ParserConfig(config.num_classes, config.parser_depth, config.parser_base_channels)
            ).to(self.device)
            disc_in = 2 * config.num_classes + 6
            self.discriminator = MultiScalePatchDiscriminator(disc_in, config.disc_base_channels).to(self.device)
            self.frozen_parser = None
        else:
            if config.parser_checkpoint is None:
                raise ConfigurationError("inpainter stage requires parser_checkpoint")
            self.generator = ParsingAwareInpainter(
                InpainterConfig(
                    config.num_classes,
                    config.inpaint_depth,
                    config.inpaint_base_channels,
                    dilations=tuple(config.dilations),
                )
            ).to(self.device)
            self.discriminator = SpectralNormDiscriminator(3 + 5, config.disc_base_channels).to(self.device)
            self.frozen_parser = load_parser(config.parser_checkpoint, self.device)
            self.frozen_parser.eval()
            for param in self.frozen_parser.parameters():
                param.requires_grad_(False)
        self.extractor = None
        if config.stage == "inpainter" and config.use_perceptual:
            self.extractor = losses.VggFeatureExtractor(losses.VGG_STYLE_LAYERS).to(self.device)

        betas = (config.beta1, config.beta2)
        self.opt_g = torch.optim.Adam(self.generator.parameters(), lr=config.lr, betas=betas)
        self.opt_d = torch.optim.Adam(self.discriminator.parameters(), lr=config.lr, betas=betas)
        self._log_fh = None

    # ------------------------------------------------------------------ data

    def _step_rng(self, step: int) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence([self.config.seed, step]))

    def build_batch(self, step: int) -> dict:
        """Assemble one batch; a pure function of (config, step)."""
        cfg = self.config
        rng = self._step_rng(step)
        indices = rng.integers(0, len(self.dataset), size=cfg.effective_batch_size)
        examples, images, parsings, coins = [], [], [], []
        for idx in indices:
            image, parsing, sketch, color = self.dataset.get(int(idx))
            mask = self.mask_source.sample(rng)
            stroke = self.stroke_source.sample(rng)
            noise_seed = int(rng.integers(2**31))
            coins.append(float(rng.random()))
            examples.append(
                pipeline.make_training_example(
                    image, parsing, mask, stroke, noise_seed,
                    num_classes=cfg.num_classes,
                    canny_low=cfg.canny_low, canny_high=cfg.canny_high,
                    sketch=sketch, color_domain=color,
                )
            )
            images.append(image)
            parsings.append(parsing)
        device = self.device
        batch = {
            "image": _batch_tensor([np.moveaxis(im, -1, 0) for im in images], device),
            "target": torch.from_numpy(np.stack(parsings)).to(device),
            "gt_onehot": _batch_tensor(
                [pipeline.one_hot_parsing(p, cfg.num_classes) for p in parsings], device
            ),
            "parser_in": _batch_tensor([ex.parser_channels() for ex in examples], device),
            "condition": _batch_tensor([ex.condition_channels() for ex in examples], device),
            "incomplete_image": _batch_tensor(
                [np.moveaxis(ex.incomplete_image, -1, 0) for ex in examples], device
            ),
            "mask": _batch_tensor([ex.mask[None] for ex in examples], device),
            "composed_mask": _batch_tensor([ex.composed_mask[None] for ex in examples], device),
            "foreground": _batch_tensor(
                [pipeline.foreground_mask_from_parsing(p)[None] for p in parsings], device
            ),
            "face": _batch_tensor(
                [pipeline.face_mask_from_parsing(p, cfg.face_labels)[None] for p in parsings], device
            ),
            "teacher_coins": coins,
        }
        return batch

    # ----------------------------------------------------------------- steps

    def train_step(self) -> dict:
        """One generator step followed by one discriminator step."""
        batch = self.build_batch(self.step)
        if self.config.stage == "parser":
            record = self._parser_cycle(batch)
        else:
            record = self._inpainter_cycle(batch)
        self.step += 1
        record["step"] = self.step
        record["stage"] = self.config.stage
        return record

    def _parser_cycle(self, batch: dict) -> dict:
        gen, disc = self.generator, self.discriminator
        cond = batch["parser_in"]

        gen.train()
        disc.train()
        logits = gen(cond)
        fake_soft = torch.softmax(logits, dim=1)
        fake_out = disc(torch.cat([fake_soft, cond], dim=1))
        with torch.no_grad():
            real_out = disc(torch.cat([batch["gt_onehot"], cond], dim=1))
        g_adv = sum(losses.gan_losses(r, f, "lsgan")[0] for r, f in zip(real_out.logits, fake_out.logits))
        g_adv = g_adv / len(fake_out.logits)
        report = losses.parser_objective(
            {
                "parsing": parsing_loss(logits, batch["target"]),
                "feature_matching": losses.feature_matching_loss(real_out.features, fake_out.features),
                "adversarial": g_adv,
            },
            self.config.weights,
        )
        self._optimize(self.opt_g, report.total, self.generator)

        fake_detached = fake_soft.detach()
        real_out = disc(torch.cat([batch["gt_onehot"], cond], dim=1))
        fake_out = disc(torch.cat([fake_detached, cond], dim=1))
        d_loss = sum(losses.gan_losses(r, f, "lsgan")[1] for r, f in zip(real_out.logits, fake_out.logits))
        d_loss = d_loss / len(fake_out.logits)
        self._optimize(self.opt_d, d_loss, self.discriminator)

        record = report.floats()
        record["d_loss"] = float(d_loss.detach())
        return record

    def _select_parsing(self, batch: dict) -> torch.Tensor:
        """Teacher mixing: ground-truth one-hot with probability
        teacher_mix_prob, frozen-parser prediction otherwise."""
        cfg = self.config
        with torch.no_grad():
            logits = self.frozen_parser(batch["parser_in"])
            predicted = F.one_hot(logits_to_parsing(logits), cfg.num_classes)
            predicted = predicted.permute(0, 3, 1, 2).to(batch["gt_onehot"].dtype)
        chosen = []
        for i, coin in enumerate(batch["teacher_coins"]):
            use_gt = coin < cfg.teacher_mix_prob
            chosen.append(batch["gt_onehot"][i] if use_gt else predicted[i])
        return torch.stack(chosen)

    def _inpainter_cycle(self, batch: dict) -> dict:
        gen, disc = self.generator, self.discriminator
        cfg = self.config
        parsing_onehot = self._select_parsing(batch)
        # discriminator conditioning: sketch + color strokes + edit mask
        disc_cond = torch.cat([batch["condition"][:, :4], batch["mask"]], dim=1)

        gen.train()
        disc.train()
        out = gen(batch["incomplete_image"], batch["composed_mask"], parsing_onehot, batch["condition"])
        fake_logits = disc(torch.cat([out, disc_cond], dim=1))
        terms = {
            "mask": losses.mask_loss(out, batch["image"], batch["mask"]),
            "foreground": losses.region_l1_loss(out, batch["image"], batch["foreground"]),
            "face": losses.region_l1_loss(out, batch["image"], batch["face"]),
            "face_tv": losses.tv_loss(out, batch["face"]),
            "adversarial": losses.gan_losses(fake_logits.detach(), fake_logits, "hinge")[0],
        }
        if self.extractor is not None:
            terms["perceptual"] = losses.perceptual_loss(out, batch["image"], self.extractor)
            terms["style"] = losses.style_loss(out, batch["image"], self.extractor)
        report = losses.inpainter_objective(terms, cfg.weights)
        self._optimize(self.opt_g, report.total, self.generator)

        real_logits = disc(torch.cat([batch["image"], disc_cond], dim=1))
        fake_logits = disc(torch.cat([out.detach(), disc_cond], dim=1))
        d_loss = losses.gan_losses(real_logits, fake_logits, "hinge")[1]
        self._optimize(self.opt_d, d_loss, self.discriminator)

        record = report.floats()
        record["d_loss"] = float(d_loss.detach())
        return record

    def _optimize(self, optimizer: torch.optim.Optimizer, loss: torch.Tensor, module) -> None:
        optimizer.zero_grad(set_to_none=True)
        loss.backward()
        if self.config.grad_clip is not None:
            torch.nn.utils.clip_grad_norm_(module.parameters(), self.config.grad_clip)
        optimizer.step()

    # ------------------------------------------------------------ run / save

    def total_steps(self) -> int:
        cfg = self.config
        if cfg.max_steps is not None:
            return cfg.max_steps
        per_epoch = max(1, -(-len(self.dataset) // cfg.effective_batch_size))
        return cfg.epochs * per_epoch

    def train(self, callback: Callable[[int, dict], bool] | None = None) -> str:
        """Run to the configured budget; returns the final checkpoint path.

        ``callback(step, record)`` runs after every cycle; returning True
        stops training early (the final checkpoint is still written).
        """
        cfg = self.config
        os.makedirs(cfg.out_dir, exist_ok=True)
        log_path = os.path.join(cfg.out_dir, "train_log.jsonl")
        final_path = os.path.join(cfg.out_dir, f"{cfg.stage}.ckpt")
        budget = self.total_steps()
        with open(log_path, "a") as log_fh:
            while self.step < budget:
                record = self.train_step()
                if self.step % cfg.log_every == 0 or self.step == budget:
                    log_fh.write(json.dumps(record) + "\n")
                if cfg.checkpoint_every and self.step % cfg.checkpoint_every == 0:
                    self.save(final_path)
                if callback is not None and callback(self.step, record):
                    break
        self.save(final_path)
        return final_path

    def save(self, path: str) -> None:
        save_checkpoint(
            {
                "stage": self.config.stage,
                "step": self.step,
                "config": dataclasses.asdict(self.config),
                "fingerprint": self.fingerprint,
                "generator": self.generator.state_dict(),
                "discriminator": self.discriminator.state_dict(),
                "opt_g": self.opt_g.state_dict(),
                "opt_d": self.opt_d.state_dict(),
            },
            path,
        )

    @classmethod
    def from_checkpoint(cls, path: str, config: TrainConfig) -> "Trainer":
        payload = load_checkpoint(path)
        if payload["fingerprint"] != config_fingerprint(config):
            raise ConfigurationError(
                f"{path}: checkpoint fingerprint {payload['fingerprint']} does not match "
                f"this config ({config_fingerprint(config)})"
            )
        trainer = cls(config)
        trainer.generator.load_state_dict(payload["generator"])
        trainer.discriminator.load_state_dict(payload["discriminator"])
        trainer.opt_g.load_state_dict(payload["opt_g"])
        trainer.opt_d.load_state_dict(payload["opt_d"])
        trainer.step = payload["step"]
        return trainer


def train_stage(config: TrainConfig, callback: Callable[[int, dict], bool] | None = None) -> str:
    """Train one stage from scratch; returns the final checkpoint path."""
    return Trainer(config).train(callback)


def resume(checkpoint_path: str, config: TrainConfig,
           callback: Callable[[int, dict], bool] | None = None) -> str:
    """Continue a run from a checkpoint (fingerprint must match)."""
    return Trainer.from_checkpoint(checkpoint_path, config).train(callback)


# --------------------------------------------------------------- inference


def _rebuild_config(record: dict) -> TrainConfig:
    record = dict(record)
    record["image_size"] = tuple(record["image_size"])
    record["dilations"] = tuple(record["dilations"])
    record["face_labels"] = tuple(record["face_labels"])
    record["mask_params"] = MaskParams(**_tupled(record["mask_params"]))
    record["stroke_params"] = MaskParams(**_tupled(record["stroke_params"]))
    record["weights"] = LossWeights(**record["weights"])
    return TrainConfig(**record)


def _tupled(params: dict) -> dict:
    return {k: tuple(v) if isinstance(v, list) else v for k, v in params.items()}


def load_parser(path: str, device: str = "cpu") -> FreeFormParser:
    payload = load_checkpoint(path)
    if payload["stage"] != "parser":
        raise ConfigurationError(f"{path} is a {payload['stage']} checkpoint, expected parser")
    cfg = _rebuild_config(payload["config"])
    net = FreeFormParser(ParserConfig(cfg.num_classes, cfg.parser_depth, cfg.parser_base_channels))
    net.load_state_dict(payload["generator"])
    net.to(device).eval()
    return net


def load_inpainter(path: str, device: str = "cpu") -> tuple[ParsingAwareInpainter, TrainConfig]:
    payload = load_checkpoint(path)
    if payload["stage"] != "inpainter":
        raise ConfigurationError(f"{path} is a {payload['stage']} checkpoint, expected inpainter")
    cfg = _rebuild_config(payload["config"])
    net = ParsingAwareInpainter(
        InpainterConfig(cfg.num_classes, cfg.inpaint_depth, cfg.inpaint_base_channels,
                        dilations=tuple(cfg.dilations))
    )
    net.load_state_dict(payload["generator"])
    net.to(device).eval()
    return net, cfg


def checkpoint_fingerprint(path: str) -> str:
    return load_checkpoint(path)["fingerprint"]


def evaluate(
    inpainter_checkpoint: str,
    manifest: str,
    parser_checkpoint: str | None = None,
    seed: int = 0,
    fid_extractor: Callable | None = None,
    device: str = "cpu",
) -> dict:
    """Run the full pipeline over a test manifest and report metrics.

    PSNR/SSIM are computed on composited outputs mapped to [0, 1]; the
    masked-region PSNR is reported alongside. FID is included only when a
    feature extractor is supplied.
    """
    inpainter, cfg = load_inpainter(inpainter_checkpoint, device)
    parser = load_parser(parser_checkpoint or cfg.parser_checkpoint, device)
    dataset = Dataset(manifest, cfg.image_size, cfg.num_classes, cfg.canny_low, cfg.canny_high)
    mask_source = MaskSource(cfg.image_size, cfg.mask_params, cfg.mask_dir)
    stroke_source = MaskSource(cfg.image_size, cfg.stroke_params)

    per_image = []
    real_feats, fake_feats = [], []
    rng = np.random.default_rng(np.random.SeedSequence([seed]))
    with torch.no_grad():
        for idx in range(len(dataset)):
            image, parsing, sketch, color = dataset.get(idx)
            mask = mask_source.sample(rng)
            stroke = stroke_source.sample(rng)
            example = pipeline.make_training_example(
                image, parsing, mask, stroke, int(rng.integers(2**31)),
                num_classes=cfg.num_classes, canny_low=cfg.canny_low, canny_high=cfg.canny_high,
                sketch=sketch, color_domain=color,
            )
            parser_in = torch.from_numpy(example.parser_channels()).unsqueeze(0).to(device)
            predicted = logits_to_parsing(parser(parser_in))
            onehot = F.one_hot(predicted, cfg.num_classes).permute(0, 3, 1, 2).float()
            out = inpainter(
                torch.from_numpy(np.moveaxis(example.incomplete_image, -1, 0)).unsqueeze(0).to(device),
                torch.from_numpy(example.composed_mask).reshape(1, 1, *example.composed_mask.shape).to(device),
                onehot,
                torch.from_numpy(example.condition_channels()).unsqueeze(0).to(device),
            )
            original = torch.from_numpy(np.moveaxis(image, -1, 0)).unsqueeze(0)
            mask_t = torch.from_numpy(mask).reshape(1, 1, *mask.shape)
            composite = composite_output(out.cpu(), original, mask_t)
            comp_np = np.moveaxis(composite.squeeze(0).numpy(), 0, -1)
            a = metrics.to_unit_range(comp_np)
            b = metrics.to_unit_range(image)
            per_image.append(
                {
                    "index": idx,
                    "psnr": metrics.psnr(a, b),
                    "ssim": metrics.ssim(a, b),
                    "masked_psnr": metrics.masked_psnr(a, b, mask),
                    "mask_coverage": float(mask.mean()),
                }
            )
            if fid_extractor is not None:
                real_feats.append(np.asarray(fid_extractor(image)).reshape(-1))
                fake_feats.append(np.asarray(fid_extractor(comp_np)).reshape(-1))

    report = {
        "per_image": per_image,
        "mean_psnr": float(np.mean([r["psnr"] for r in per_image])),
        "mean_ssim": float(np.mean([r["ssim"] for r in per_image])),
        "mean_masked_psnr": float(np.mean([r["masked_psnr"] for r in per_image])),
        "num_images": len(per_image),
        "inpainter_checkpoint": inpainter_checkpoint,
    }
    if fid_extractor is not None:
        s_real = metrics.fit_gaussian(np.stack(real_feats))
        s_fake = metrics.fit_gaussian(np.stack(fake_feats))
        report["fid"] = metrics.frechet_distance(s_real, s_fake)
    return report
