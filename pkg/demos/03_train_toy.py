"""Train both stages end to end on a small synthetic dataset, then evaluate.

Pass --steps to trade time for quality (the defaults run in a couple of
minutes on a CPU and produce recognizable edits; a few thousand steps
produce clean toy overfits).
"""

import argparse
import json
import os
import tempfile

from fegan import pipeline, synthetic, training

parser = argparse.ArgumentParser()
parser.add_argument("--steps", type=int, default=200)
parser.add_argument("--out", default=None)
args = parser.parse_args()

root = args.out or tempfile.mkdtemp(prefix="fegan_toy_")
manifest = synthetic.write_synthetic_dataset(os.path.join(root, "data"), count=8, height=96, width=64, seed=0)
print("dataset:", manifest)

toy_mask = pipeline.MaskParams(num_strokes=3, max_vertices=5, brush_width_range=(8, 18))
toy_stroke = pipeline.MaskParams(num_strokes=4, max_vertices=3, brush_width_range=(4, 10))
common = dict(
    manifest=manifest, image_size=(96, 64), num_classes=8, batch_size=8,
    max_steps=args.steps, seed=0, mask_params=toy_mask, stroke_params=toy_stroke,
    parser_depth=4, parser_base_channels=24, inpaint_depth=3, inpaint_base_channels=24,
    dilations=(2, 2), disc_base_channels=16, checkpoint_every=0, log_every=25,
)

print(f"stage 1: training the free-form parsing network for {args.steps} steps")
parser_ckpt = training.train_stage(
    training.TrainConfig(stage="parser", out_dir=os.path.join(root, "stage1"), **common)
)
print("parser checkpoint:", parser_ckpt)

print(f"stage 2: training the parsing-aware inpainter for {args.steps} steps")
inpainter_ckpt = training.train_stage(
    training.TrainConfig(
        stage="inpainter", out_dir=os.path.join(root, "stage2"),
        parser_checkpoint=parser_ckpt, **common,
    )
)
print("inpainter checkpoint:", inpainter_ckpt)

report = training.evaluate(inpainter_ckpt, manifest, seed=123)
print(json.dumps({k: v for k, v in report.items() if k != "per_image"}, indent=2))
print("training logs:", os.path.join(root, "stage1", "train_log.jsonl"))
