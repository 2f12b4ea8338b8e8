/** Build service requests from canvas layers: every layer becomes a base64
 * PNG exactly matching the HTTP contract. */

import { Bitmap } from "./bitmap.js";
import { CanvasLayers } from "./layers.js";
import { bytesToBase64, encodePng } from "./png.js";

export interface EditRequest {
  image: string;
  mask: string;
  sketch: string;
  color_strokes: string;
  parsing?: string;
  seed: number;
  options: { return_parsing: boolean };
}

/** Base image as 8-bit RGB. */
export function encodeImageLayer(bitmap: Bitmap): Uint8Array {
  const rgb = new Uint8Array(bitmap.width * bitmap.height * 3);
  for (let i = 0, j = 0; i < bitmap.data.length; i += 4, j += 3) {
    rgb[j] = bitmap.data[i];
    rgb[j + 1] = bitmap.data[i + 1];
    rgb[j + 2] = bitmap.data[i + 2];
  }
  return encodePng(bitmap.width, bitmap.height, "rgb", rgb);
}

/** Mask/sketch layers as grayscale 0/255: painted wherever alpha > 0. */
export function encodeBinaryLayer(bitmap: Bitmap): Uint8Array {
  const gray = new Uint8Array(bitmap.width * bitmap.height);
  for (let i = 0, j = 0; i < bitmap.data.length; i += 4, j += 1) {
    gray[j] = bitmap.data[i + 3] > 0 ? 255 : 0;
  }
  return encodePng(bitmap.width, bitmap.height, "gray", gray);
}

/** Color strokes as RGBA, alpha marking stroke presence. */
export function encodeColorLayer(bitmap: Bitmap): Uint8Array {
  return encodePng(bitmap.width, bitmap.height, "rgba", new Uint8Array(bitmap.data));
}

export function buildEditRequest(
  layers: CanvasLayers,
  seed: number,
  options: { returnParsing?: boolean; parsing?: Uint8Array } = {},
): EditRequest {
  const request: EditRequest = {
    image: bytesToBase64(encodeImageLayer(layers.base)),
    mask: bytesToBase64(encodeBinaryLayer(layers.layers.mask)),
    sketch: bytesToBase64(encodeBinaryLayer(layers.layers.sketch)),
    color_strokes: bytesToBase64(encodeColorLayer(layers.layers.color)),
    seed,
    options: { return_parsing: options.returnParsing === true },
  };
  if (options.parsing) {
    request.parsing = bytesToBase64(options.parsing);
  }
  return request;
}
