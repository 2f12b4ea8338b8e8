/** Result presentation model, free of DOM concerns so it is fully testable:
 * a history strip of recent results, a before/after toggle, and a parsing
 * overlay with adjustable opacity. */

import { Bitmap, meanAbsDiffRgb } from "./bitmap.js";

export const HISTORY_LIMIT = 10;

/** Mean-abs-diff threshold (0..255 scale) under which an edit counts as a
 * no-op, e.g. submitted with a blank mask. */
export const NOOP_HINT_THRESHOLD = 2.0;

export interface EditResult {
  edited: Bitmap;
  parsingOverlay: Bitmap | null;
  fingerprint: string;
  seed: number;
}

export class ResultView {
  readonly original: Bitmap;
  history: EditResult[] = [];
  current: EditResult | null = null;
  showBefore = false;
  overlayOpacity = 0;

  constructor(original: Bitmap) {
    this.original = original;
  }

  /** Record a service response; keeps the last HISTORY_LIMIT results.
   * Returns true when the result is visually a no-op (hint-worthy). */
  addResult(result: EditResult): boolean {
    this.current = result;
    this.history.push(result);
    if (this.history.length > HISTORY_LIMIT) {
      this.history.shift();
    }
    return meanAbsDiffRgb(this.original, result.edited) < NOOP_HINT_THRESHOLD;
  }

  selectFromHistory(index: number): void {
    if (index < 0 || index >= this.history.length) {
      throw new Error(`history index ${index} out of range`);
    }
    this.current = this.history[index];
  }

  toggleBeforeAfter(): void {
    this.showBefore = !this.showBefore;
  }

  /** The bitmap the viewport should display right now. */
  composeView(): Bitmap {
    if (this.showBefore || this.current === null) {
      return this.original;
    }
    const base = this.current.edited;
    const overlay = this.current.parsingOverlay;
    if (!overlay || this.overlayOpacity <= 0) {
      return base;
    }
    const alpha = Math.min(1, this.overlayOpacity);
    const out = base.clone();
    for (let i = 0; i < out.data.length; i += 4) {
      out.data[i] = Math.round(base.data[i] * (1 - alpha) + overlay.data[i] * alpha);
      out.data[i + 1] = Math.round(base.data[i + 1] * (1 - alpha) + overlay.data[i + 1] * alpha);
      out.data[i + 2] = Math.round(base.data[i + 2] * (1 - alpha) + overlay.data[i + 2] * alpha);
    }
    return out;
  }
}
