"""Sketch- and color-guided fashion image editing.

A free-form parsing network predicts a complete human parsing map from an
incomplete one plus user sketch/color strokes; a parsing-aware inpainting
network renders the edited image under that semantic layout. The package
also ships the full training harness, evaluation metrics, an HTTP editing
service, and a CLI.
"""

__version__ = "0.1.0"
