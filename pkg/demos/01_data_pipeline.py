"""Walk through the data pipeline: from an (image, parsing) pair to the full
conditioning bundle both networks consume.

Writes visualizations into demos/out/01_data_pipeline/.
"""

import os

import numpy as np

from fegan import imageio, pipeline, synthetic

OUT = os.path.join(os.path.dirname(__file__), "out", "01_data_pipeline")
os.makedirs(OUT, exist_ok=True)

# A synthetic person stands in for a fashion photograph; its parsing map is
# exact by construction.
image, parsing = synthetic.synthesize_example(seed=3, height=192, width=128)
imageio.save_image(image, f"{OUT}/image.png")
imageio.save_parsing_visualization(parsing, f"{OUT}/parsing.png", num_classes=8)

# The sketch is a Canny edge map on [0, 1] luminance; the color domain fills
# each parsing region with its per-channel median color.
sketch = pipeline.extract_sketch(image)
color = pipeline.extract_color_domain(image, parsing)
imageio.save_mask(sketch, f"{OUT}/sketch.png")
imageio.save_image(color, f"{OUT}/color_domain.png")

# Free-form edit mask and a sparser stroke mask that mimics where a user
# would place color marks.
mask = pipeline.generate_freeform_mask(192, 128, seed=11, params=pipeline.MaskParams(brush_width_range=(10, 28)))
stroke = pipeline.generate_freeform_mask(192, 128, seed=12, params=pipeline.STROKE_SIM_PARAMS)
imageio.save_mask(mask, f"{OUT}/mask.png")
print(f"mask coverage: {mask.mean():.3f}")

# Foreground and composed masks (the partial-conv encoder trusts only the
# composed mask: foreground pixels outside the hole).
foreground = pipeline.foreground_mask_from_parsing(parsing)
composed = pipeline.compose_mask(mask, foreground)
imageio.save_mask(composed, f"{OUT}/composed_mask.png")

# The fully assembled example.
example = pipeline.make_training_example(image, parsing, mask, stroke, seed=7, num_classes=8)
imageio.save_image(example.incomplete_image, f"{OUT}/incomplete_image.png")
imageio.save_mask(example.sketch_masked, f"{OUT}/sketch_masked.png")
imageio.save_image(example.color_masked, f"{OUT}/color_masked.png")
print("parser input channels:", example.parser_channels().shape)
print("normalization conditioning channels:", example.condition_channels().shape)
print("noise moments: mean %.4f var %.4f" % (example.noise.mean(), example.noise.var()))
print(f"outputs in {OUT}")
