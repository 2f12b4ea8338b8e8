/** Deterministic stroke rasterization: round-capped polylines at brush size.
 *
 * Painting is pure: the same event list always produces the same bitmap, so
 * strokes can be replayed for undo/redo and re-encoding.
 */

import { Bitmap } from "./bitmap.js";

export interface StrokePoint {
  x: number;
  y: number;
}

export type Rgba = readonly [number, number, number, number];

export interface StrokeEvent {
  points: StrokePoint[];
  brushSize: number; // diameter in pixels
  color: Rgba;
  erase?: boolean;
}

/** Squared distance from pixel center p to segment [a, b]. */
function distSqToSegment(px: number, py: number, a: StrokePoint, b: StrokePoint): number {
  const vx = b.x - a.x;
  const vy = b.y - a.y;
  const wx = px - a.x;
  const wy = py - a.y;
  const lenSq = vx * vx + vy * vy;
  let t = lenSq > 0 ? (wx * vx + wy * vy) / lenSq : 0;
  t = Math.max(0, Math.min(1, t));
  const dx = px - (a.x + t * vx);
  const dy = py - (a.y + t * vy);
  return dx * dx + dy * dy;
}

function paintSegment(bitmap: Bitmap, a: StrokePoint, b: StrokePoint, radius: number, color: Rgba, erase: boolean): void {
  const rSq = radius * radius;
  const x0 = Math.max(0, Math.floor(Math.min(a.x, b.x) - radius));
  const x1 = Math.min(bitmap.width - 1, Math.ceil(Math.max(a.x, b.x) + radius));
  const y0 = Math.max(0, Math.floor(Math.min(a.y, b.y) - radius));
  const y1 = Math.min(bitmap.height - 1, Math.ceil(Math.max(a.y, b.y) + radius));
  const value: Rgba = erase ? [0, 0, 0, 0] : color;
  for (let y = y0; y <= y1; y++) {
    for (let x = x0; x <= x1; x++) {
      if (distSqToSegment(x, y, a, b) <= rSq) {
        bitmap.setPixel(x, y, value);
      }
    }
  }
}

/** Paint one stroke onto an existing bitmap (mutates). */
export function paintStroke(bitmap: Bitmap, stroke: StrokeEvent): void {
  if (stroke.points.length === 0) return;
  const radius = stroke.brushSize / 2;
  const erase = stroke.erase === true;
  if (stroke.points.length === 1) {
    paintSegment(bitmap, stroke.points[0], stroke.points[0], radius, stroke.color, erase);
    return;
  }
  for (let i = 0; i + 1 < stroke.points.length; i++) {
    paintSegment(bitmap, stroke.points[i], stroke.points[i + 1], radius, stroke.color, erase);
  }
}

/** Rasterize an event list onto a blank bitmap. */
export function rasterizeStrokes(width: number, height: number, events: readonly StrokeEvent[]): Bitmap {
  const bitmap = Bitmap.blank(width, height);
  for (const event of events) {
    paintStroke(bitmap, event);
  }
  return bitmap;
}
