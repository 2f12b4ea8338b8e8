"""Drive the HTTP editing service end to end, in process.

Trains (briefly) if no checkpoints are given, starts the FastAPI app with a
test client, and submits an edit request exactly as the browser editor
would: base64 PNG layers, RGBA color strokes, a seed.
"""

import argparse
import base64
import io
import os
import tempfile

import numpy as np
from fastapi.testclient import TestClient
from PIL import Image as PILImage

from fegan import imageio, pipeline, synthetic, training
from fegan.service import ServiceConfig, create_app

parser = argparse.ArgumentParser()
parser.add_argument("--parser-checkpoint")
parser.add_argument("--inpainter-checkpoint")
parser.add_argument("--steps", type=int, default=60, help="training steps when no checkpoints are given")
args = parser.parse_args()

if not args.parser_checkpoint:
    root = tempfile.mkdtemp(prefix="fegan_service_demo_")
    manifest = synthetic.write_synthetic_dataset(os.path.join(root, "data"), count=8, height=96, width=64, seed=0)
    toy_mask = pipeline.MaskParams(num_strokes=3, max_vertices=5, brush_width_range=(8, 18))
    toy_stroke = pipeline.MaskParams(num_strokes=4, max_vertices=3, brush_width_range=(4, 10))
    common = dict(
        manifest=manifest, image_size=(96, 64), num_classes=8, batch_size=8,
        max_steps=args.steps, seed=0, mask_params=toy_mask, stroke_params=toy_stroke,
        parser_depth=4, parser_base_channels=24, inpaint_depth=3, inpaint_base_channels=24,
        dilations=(2, 2), disc_base_channels=16, checkpoint_every=0, log_every=100,
    )
    print(f"no checkpoints given: training {args.steps} quick steps per stage")
    args.parser_checkpoint = training.train_stage(
        training.TrainConfig(stage="parser", out_dir=os.path.join(root, "s1"), **common))
    args.inpainter_checkpoint = training.train_stage(
        training.TrainConfig(stage="inpainter", out_dir=os.path.join(root, "s2"),
                             parser_checkpoint=args.parser_checkpoint, **common))

config = ServiceConfig(
    parser_checkpoint=args.parser_checkpoint, inpainter_checkpoint=args.inpainter_checkpoint
)
app = create_app(config)


def b64_png(array, mode=None):
    buf = io.BytesIO()
    PILImage.fromarray(array, mode=mode).save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")


out_dir = os.path.join(os.path.dirname(__file__), "out", "05_service_edit")
os.makedirs(out_dir, exist_ok=True)

with TestClient(app) as client:
    print("health:", client.get("/v1/health").json())

    image, parsing = synthetic.synthesize_example(seed=4, height=96, width=64)
    image_u8 = np.round((image + 1) * 127.5).astype(np.uint8)

    # erase the torso, sketch a box outline, and ask for hair-colored fill
    mask = np.zeros((96, 64), dtype=np.uint8)
    mask[30:58, 18:46] = 255
    sketch = np.zeros((96, 64), dtype=np.uint8)
    sketch[32, 20:44] = 255
    sketch[56, 20:44] = 255
    strokes = np.zeros((96, 64, 4), dtype=np.uint8)
    strokes[40:48, 26:38] = (30, 30, 160, 255)

    request = {
        "image": b64_png(image_u8),
        "mask": b64_png(mask),
        "sketch": b64_png(sketch),
        "color_strokes": b64_png(strokes, mode="RGBA"),
        "parsing": b64_png(parsing.astype(np.uint8)),
        "seed": 9,
        "options": {"return_parsing": True},
    }
    response = client.post("/v1/edit", json=request)
    print("edit status:", response.status_code, "timing:", response.headers["x-timing-ms"], "ms")
    payload = response.json()
    for name in ("edited_image", "parsing_visualization"):
        with open(os.path.join(out_dir, f"{name}.png"), "wb") as fh:
            fh.write(base64.b64decode(payload[name]))
    print("outputs in", out_dir)
