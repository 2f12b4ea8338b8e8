/** Editing state: the base image plus mask / sketch / color-stroke layers,
 * brush settings, and snapshot-based undo/redo.
 *
 * Layer semantics match the service contract: the mask layer marks erased
 * pixels, the sketch layer holds binary structure hints, the color layer
 * holds RGBA strokes whose alpha marks stroke presence. The UI never runs
 * model math; it only prepares these layers.
 */

import { Bitmap } from "./bitmap.js";
import { paintStroke, Rgba, StrokeEvent, StrokePoint } from "./raster.js";

export type Tool = "mask" | "mask-erase" | "sketch" | "sketch-erase" | "color" | "color-erase";

export interface BrushState {
  tool: Tool;
  size: number;
  color: Rgba;
}

export const LAYER_NAMES = ["mask", "sketch", "color"] as const;
export type LayerName = (typeof LAYER_NAMES)[number];

const MASK_PAINT: Rgba = [255, 255, 255, 255];
const UNDO_DEPTH = 50;

interface Snapshot {
  mask: Bitmap;
  sketch: Bitmap;
  color: Bitmap;
}

export class CanvasLayers {
  readonly width: number;
  readonly height: number;
  base: Bitmap;
  layers: Record<LayerName, Bitmap>;
  brush: BrushState = { tool: "mask", size: 16, color: [220, 40, 40, 255] };

  private undoStack: Snapshot[] = [];
  private redoStack: Snapshot[] = [];
  private activeStroke: StrokeEvent | null = null;

  constructor(base: Bitmap) {
    this.width = base.width;
    this.height = base.height;
    this.base = base;
    this.layers = {
      mask: Bitmap.blank(base.width, base.height),
      sketch: Bitmap.blank(base.width, base.height),
      color: Bitmap.blank(base.width, base.height),
    };
  }

  private snapshot(): Snapshot {
    return {
      mask: this.layers.mask.clone(),
      sketch: this.layers.sketch.clone(),
      color: this.layers.color.clone(),
    };
  }

  private restore(snapshot: Snapshot): void {
    this.layers.mask = snapshot.mask.clone();
    this.layers.sketch = snapshot.sketch.clone();
    this.layers.color = snapshot.color.clone();
  }

  targetLayer(tool: Tool = this.brush.tool): LayerName {
    if (tool.startsWith("mask")) return "mask";
    if (tool.startsWith("sketch")) return "sketch";
    return "color";
  }

  /** Begin a stroke at a point; pushes an undo snapshot. */
  beginStroke(point: StrokePoint): void {
    const tool = this.brush.tool;
    const erase = tool.endsWith("erase");
    const color: Rgba = this.targetLayer() === "color" ? this.brush.color : MASK_PAINT;
    this.undoStack.push(this.snapshot());
    if (this.undoStack.length > UNDO_DEPTH) this.undoStack.shift();
    this.redoStack = [];
    this.activeStroke = { points: [point], brushSize: this.brush.size, color, erase };
    paintStroke(this.layers[this.targetLayer()], this.activeStroke);
  }

  /** Extend the active stroke; repaints incrementally (deterministic: the
   * result equals rasterizing the full event). */
  extendStroke(point: StrokePoint): void {
    if (!this.activeStroke) return;
    const previous = this.activeStroke.points[this.activeStroke.points.length - 1];
    this.activeStroke.points.push(point);
    paintStroke(this.layers[this.targetLayer()], {
      ...this.activeStroke,
      points: [previous, point],
    });
  }

  endStroke(): StrokeEvent | null {
    const finished = this.activeStroke;
    this.activeStroke = null;
    return finished;
  }

  /** Apply a complete stroke event in one call (used by replay and tests). */
  applyStroke(event: StrokeEvent, tool: Tool): void {
    this.undoStack.push(this.snapshot());
    if (this.undoStack.length > UNDO_DEPTH) this.undoStack.shift();
    this.redoStack = [];
    paintStroke(this.layers[this.targetLayer(tool)], event);
  }

  get undoDepth(): number {
    return this.undoStack.length;
  }

  canUndo(): boolean {
    return this.undoStack.length > 0;
  }

  canRedo(): boolean {
    return this.redoStack.length > 0;
  }

  undo(): boolean {
    const snapshot = this.undoStack.pop();
    if (!snapshot) return false;
    this.redoStack.push(this.snapshot());
    this.restore(snapshot);
    return true;
  }

  redo(): boolean {
    const snapshot = this.redoStack.pop();
    if (!snapshot) return false;
    this.undoStack.push(this.snapshot());
    this.restore(snapshot);
    return true;
  }

  clearLayer(name: LayerName): void {
    this.undoStack.push(this.snapshot());
    if (this.undoStack.length > UNDO_DEPTH) this.undoStack.shift();
    this.redoStack = [];
    this.layers[name] = Bitmap.blank(this.width, this.height);
  }
}
