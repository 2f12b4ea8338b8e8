import os
import sys

import numpy as np
import pytest
import torch

sys.path.insert(0, os.path.dirname(__file__))

from fegan import pipeline, synthetic, training


@pytest.fixture(autouse=True)
def _deterministic_torch():
    torch.manual_seed(0)


@pytest.fixture()
def toy_pair():
    """One synthetic (image, parsing) pair at 96x64."""
    return synthetic.synthesize_example(seed=7, height=96, width=64)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def tiny_checkpoints(tmp_path_factory):
    """Briefly-trained parser + inpainter checkpoints at 64x48 shared by the
    service/CLI tests (quality is irrelevant there, only the contracts)."""
    root = tmp_path_factory.mktemp("tiny_ckpts")
    manifest = synthetic.write_synthetic_dataset(str(root / "data"), count=4, height=64, width=48, seed=0)
    mask_params = pipeline.MaskParams(num_strokes=2, max_vertices=3, brush_width_range=(4, 10))
    stroke_params = pipeline.MaskParams(num_strokes=2, max_vertices=2, brush_width_range=(3, 8))
    common = dict(
        manifest=manifest, image_size=(64, 48), num_classes=8, batch_size=2, max_steps=2,
        seed=0, parser_depth=3, parser_base_channels=8, inpaint_depth=2,
        inpaint_base_channels=8, dilations=(2,), disc_base_channels=8,
        mask_params=mask_params, stroke_params=stroke_params,
        checkpoint_every=0, log_every=10,
    )
    parser_ckpt = training.train_stage(
        training.TrainConfig(stage="parser", out_dir=str(root / "p"), **common)
    )
    inpainter_ckpt = training.train_stage(
        training.TrainConfig(
            stage="inpainter", out_dir=str(root / "i"), parser_checkpoint=parser_ckpt, **common
        )
    )
    return {"parser": parser_ckpt, "inpainter": inpainter_ckpt, "manifest": manifest, "root": str(root)}
