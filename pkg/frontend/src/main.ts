/** Browser wiring: canvas stack, pointer handling, toolbar, and the submit
 * loop. All editing semantics live in the DOM-free modules. */

import { Bitmap } from "./bitmap.js";
import { ApiClient } from "./client.js";
import { CanvasLayers, Tool } from "./layers.js";
import { base64ToBytes } from "./png.js";
import { EditResult, ResultView } from "./render.js";
import { buildEditRequest } from "./request.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

const viewport = $<HTMLCanvasElement>("viewport");
const statusLine = $<HTMLElement>("status");
const historyStrip = $<HTMLElement>("history");
const client = new ApiClient($<HTMLInputElement>("server-url").value || window.location.origin);

let layers: CanvasLayers | null = null;
let resultView: ResultView | null = null;
let drawing = false;

function bitmapFromImage(img: HTMLImageElement): Bitmap {
  const canvas = document.createElement("canvas");
  canvas.width = img.naturalWidth;
  canvas.height = img.naturalHeight;
  const ctx = canvas.getContext("2d")!;
  ctx.drawImage(img, 0, 0);
  const data = ctx.getImageData(0, 0, canvas.width, canvas.height);
  return new Bitmap(canvas.width, canvas.height, data.data);
}

async function bitmapFromPngB64(b64: string): Promise<Bitmap> {
  const bytes = base64ToBytes(b64);
  const copy = new Uint8Array(new ArrayBuffer(bytes.length));
  copy.set(bytes);
  const blob = new Blob([copy.buffer], { type: "image/png" });
  const img = await createImageBitmap(blob);
  const canvas = document.createElement("canvas");
  canvas.width = img.width;
  canvas.height = img.height;
  const ctx = canvas.getContext("2d")!;
  ctx.drawImage(img, 0, 0);
  return new Bitmap(img.width, img.height, ctx.getImageData(0, 0, img.width, img.height).data);
}

function redraw(): void {
  if (!layers) return;
  const ctx = viewport.getContext("2d")!;
  const view = resultView && !resultView.showBefore && resultView.current
    ? resultView.composeView()
    : layers.base;
  ctx.putImageData(new ImageData(new Uint8ClampedArray(view.data), view.width, view.height), 0, 0);

  // editing layers are drawn translucently above the image
  const overlay = ctx.getImageData(0, 0, layers.width, layers.height);
  for (const [name, tint] of [
    ["mask", [255, 80, 80]],
    ["sketch", [40, 255, 120]],
  ] as const) {
    const layer = layers.layers[name];
    for (let i = 0; i < layer.data.length; i += 4) {
      if (layer.data[i + 3] > 0) {
        overlay.data[i] = (overlay.data[i] + tint[0] * 2) / 3;
        overlay.data[i + 1] = (overlay.data[i + 1] + tint[1] * 2) / 3;
        overlay.data[i + 2] = (overlay.data[i + 2] + tint[2] * 2) / 3;
      }
    }
  }
  const color = layers.layers.color;
  for (let i = 0; i < color.data.length; i += 4) {
    if (color.data[i + 3] > 0) {
      overlay.data[i] = color.data[i];
      overlay.data[i + 1] = color.data[i + 1];
      overlay.data[i + 2] = color.data[i + 2];
    }
  }
  ctx.putImageData(overlay, 0, 0);
  historyStrip.textContent = resultView ? `history: ${resultView.history.length}/10` : "";
}

function canvasPoint(event: PointerEvent): { x: number; y: number } {
  const rect = viewport.getBoundingClientRect();
  return {
    x: ((event.clientX - rect.left) / rect.width) * viewport.width,
    y: ((event.clientY - rect.top) / rect.height) * viewport.height,
  };
}

viewport.addEventListener("pointerdown", (event) => {
  if (!layers) return;
  drawing = true;
  viewport.setPointerCapture(event.pointerId);
  layers.beginStroke(canvasPoint(event));
  redraw();
});
viewport.addEventListener("pointermove", (event) => {
  if (!layers || !drawing) return;
  layers.extendStroke(canvasPoint(event));
  redraw();
});
viewport.addEventListener("pointerup", () => {
  drawing = false;
  layers?.endStroke();
});

$<HTMLInputElement>("file-input").addEventListener("change", (event) => {
  const file = (event.target as HTMLInputElement).files?.[0];
  if (!file) return;
  const img = new Image();
  img.onload = () => {
    const base = bitmapFromImage(img);
    layers = new CanvasLayers(base);
    resultView = new ResultView(base);
    viewport.width = base.width;
    viewport.height = base.height;
    statusLine.textContent = `loaded ${base.width}x${base.height}`;
    redraw();
  };
  img.src = URL.createObjectURL(file);
});

for (const tool of ["mask", "mask-erase", "sketch", "sketch-erase", "color", "color-erase"] as Tool[]) {
  $<HTMLButtonElement>(`tool-${tool}`).addEventListener("click", () => {
    if (layers) layers.brush.tool = tool;
    statusLine.textContent = `tool: ${tool}`;
  });
}
$<HTMLInputElement>("brush-size").addEventListener("input", (event) => {
  if (layers) layers.brush.size = Number((event.target as HTMLInputElement).value);
});
$<HTMLInputElement>("brush-color").addEventListener("input", (event) => {
  const hex = (event.target as HTMLInputElement).value;
  if (layers) {
    layers.brush.color = [
      parseInt(hex.slice(1, 3), 16),
      parseInt(hex.slice(3, 5), 16),
      parseInt(hex.slice(5, 7), 16),
      255,
    ];
  }
});
$<HTMLButtonElement>("undo").addEventListener("click", () => {
  layers?.undo();
  redraw();
});
$<HTMLButtonElement>("redo").addEventListener("click", () => {
  layers?.redo();
  redraw();
});
$<HTMLButtonElement>("toggle").addEventListener("click", () => {
  resultView?.toggleBeforeAfter();
  redraw();
});
$<HTMLInputElement>("overlay-opacity").addEventListener("input", (event) => {
  if (resultView) {
    resultView.overlayOpacity = Number((event.target as HTMLInputElement).value) / 100;
    redraw();
  }
});

$<HTMLButtonElement>("submit").addEventListener("click", async () => {
  if (!layers || !resultView) return;
  statusLine.textContent = "editing...";
  try {
    const request = buildEditRequest(layers, Number($<HTMLInputElement>("seed").value) || 0, {
      returnParsing: true,
    });
    const response = await client.submitEdit(request);
    const result: EditResult = {
      edited: await bitmapFromPngB64(response.edited_image),
      parsingOverlay: response.parsing_visualization
        ? await bitmapFromPngB64(response.parsing_visualization)
        : null,
      fingerprint: response.model_fingerprint,
      seed: Number($<HTMLInputElement>("seed").value) || 0,
    };
    const noop = resultView.addResult(result);
    statusLine.textContent = noop
      ? "edit returned the input unchanged - draw a mask to select a region"
      : `edited (model ${response.model_fingerprint})`;
    resultView.showBefore = false;
    redraw();
  } catch (error) {
    if ((error as Error).name === "AbortError") return; // replaced by a newer submit
    statusLine.textContent = String(error);
  }
});
