/** Minimal dependency-free PNG codec.
 *
 * The encoder emits standard-conformant PNGs using stored (type 0)
 * deflate blocks, which every PNG reader accepts. The decoder understands
 * exactly that subset (8-bit depth, gray/RGB/RGBA, filter 0, stored
 * blocks): enough to round-trip our own files; server responses are decoded
 * by the browser itself.
 */

export type PngColor = "gray" | "rgb" | "rgba";

const SIGNATURE = [0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a];
const COLOR_TYPE: Record<PngColor, number> = { gray: 0, rgb: 2, rgba: 6 };
const CHANNELS: Record<PngColor, number> = { gray: 1, rgb: 3, rgba: 4 };

const CRC_TABLE = (() => {
  const table = new Uint32Array(256);
  for (let n = 0; n < 256; n++) {
    let c = n;
    for (let k = 0; k < 8; k++) {
      c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    }
    table[n] = c >>> 0;
  }
  return table;
})();

function crc32(bytes: Uint8Array): number {
  let crc = 0xffffffff;
  for (let i = 0; i < bytes.length; i++) {
    crc = CRC_TABLE[(crc ^ bytes[i]) & 0xff] ^ (crc >>> 8);
  }
  return (crc ^ 0xffffffff) >>> 0;
}

function adler32(bytes: Uint8Array): number {
  let a = 1;
  let b = 0;
  for (let i = 0; i < bytes.length; i++) {
    a = (a + bytes[i]) % 65521;
    b = (b + a) % 65521;
  }
  return ((b << 16) | a) >>> 0;
}

function u32(value: number): number[] {
  return [(value >>> 24) & 0xff, (value >>> 16) & 0xff, (value >>> 8) & 0xff, value & 0xff];
}

function chunk(type: string, body: Uint8Array): number[] {
  const typed = new Uint8Array(4 + body.length);
  for (let i = 0; i < 4; i++) typed[i] = type.charCodeAt(i);
  typed.set(body, 4);
  return [...u32(body.length), ...typed, ...u32(crc32(typed))];
}

/** zlib wrapper around stored deflate blocks. */
function zlibStored(raw: Uint8Array): Uint8Array {
  const blocks: number[] = [0x78, 0x01];
  let offset = 0;
  do {
    const len = Math.min(65535, raw.length - offset);
    const final = offset + len >= raw.length ? 1 : 0;
    blocks.push(final, len & 0xff, (len >>> 8) & 0xff, ~len & 0xff, (~len >>> 8) & 0xff);
    for (let i = 0; i < len; i++) blocks.push(raw[offset + i]);
    offset += len;
  } while (offset < raw.length);
  const adler = adler32(raw);
  blocks.push(...u32(adler));
  return Uint8Array.from(blocks);
}

export function encodePng(width: number, height: number, color: PngColor, pixels: Uint8Array): Uint8Array {
  const channels = CHANNELS[color];
  if (pixels.length !== width * height * channels) {
    throw new Error(`pixel buffer length ${pixels.length} does not match ${width}x${height} ${color}`);
  }
  const stride = width * channels;
  const raw = new Uint8Array((stride + 1) * height);
  for (let y = 0; y < height; y++) {
    raw[y * (stride + 1)] = 0; // filter type 0 per scanline
    raw.set(pixels.subarray(y * stride, (y + 1) * stride), y * (stride + 1) + 1);
  }
  const ihdr = new Uint8Array([...u32(width), ...u32(height), 8, COLOR_TYPE[color], 0, 0, 0]);
  return Uint8Array.from([
    ...SIGNATURE,
    ...chunk("IHDR", ihdr),
    ...chunk("IDAT", zlibStored(raw)),
    ...chunk("IEND", new Uint8Array(0)),
  ]);
}

export interface DecodedPng {
  width: number;
  height: number;
  color: PngColor;
  pixels: Uint8Array;
}

function inflateStored(zlib: Uint8Array): Uint8Array {
  let pos = 2; // skip the zlib header
  const parts: Uint8Array[] = [];
  let total = 0;
  for (;;) {
    const header = zlib[pos];
    const btype = (header >>> 1) & 3;
    if (btype !== 0) {
      throw new Error("decoder supports only stored deflate blocks");
    }
    pos += 1;
    const len = zlib[pos] | (zlib[pos + 1] << 8);
    pos += 4; // LEN + NLEN
    parts.push(zlib.subarray(pos, pos + len));
    total += len;
    pos += len;
    if (header & 1) break;
  }
  const out = new Uint8Array(total);
  let offset = 0;
  for (const part of parts) {
    out.set(part, offset);
    offset += part.length;
  }
  return out;
}

export function decodePng(bytes: Uint8Array): DecodedPng {
  for (let i = 0; i < 8; i++) {
    if (bytes[i] !== SIGNATURE[i]) throw new Error("not a PNG file");
  }
  let pos = 8;
  let width = 0;
  let height = 0;
  let colorType = -1;
  const idat: Uint8Array[] = [];
  while (pos < bytes.length) {
    const length = (bytes[pos] << 24) | (bytes[pos + 1] << 16) | (bytes[pos + 2] << 8) | bytes[pos + 3];
    const type = String.fromCharCode(bytes[pos + 4], bytes[pos + 5], bytes[pos + 6], bytes[pos + 7]);
    const body = bytes.subarray(pos + 8, pos + 8 + length);
    if (type === "IHDR") {
      width = (body[0] << 24) | (body[1] << 16) | (body[2] << 8) | body[3];
      height = (body[4] << 24) | (body[5] << 16) | (body[6] << 8) | body[7];
      if (body[8] !== 8) throw new Error("decoder supports only 8-bit depth");
      colorType = body[9];
      if (body[12] !== 0) throw new Error("interlaced PNGs are not supported");
    } else if (type === "IDAT") {
      idat.push(body);
    } else if (type === "IEND") {
      break;
    }
    pos += 12 + length;
  }
  const color = (Object.keys(COLOR_TYPE) as PngColor[]).find((k) => COLOR_TYPE[k] === colorType);
  if (!color) throw new Error(`unsupported color type ${colorType}`);
  const zlib = new Uint8Array(idat.reduce((n, part) => n + part.length, 0));
  let offset = 0;
  for (const part of idat) {
    zlib.set(part, offset);
    offset += part.length;
  }
  const raw = inflateStored(zlib);
  const channels = CHANNELS[color];
  const stride = width * channels;
  const pixels = new Uint8Array(stride * height);
  for (let y = 0; y < height; y++) {
    if (raw[y * (stride + 1)] !== 0) throw new Error("decoder supports only filter type 0");
    pixels.set(raw.subarray(y * (stride + 1) + 1, (y + 1) * (stride + 1)), y * stride);
  }
  return { width, height, color, pixels };
}

export function bytesToBase64(bytes: Uint8Array): string {
  if (typeof Buffer !== "undefined") {
    return Buffer.from(bytes).toString("base64");
  }
  let binary = "";
  for (let i = 0; i < bytes.length; i++) binary += String.fromCharCode(bytes[i]);
  return btoa(binary);
}

export function base64ToBytes(b64: string): Uint8Array {
  if (typeof Buffer !== "undefined") {
    return new Uint8Array(Buffer.from(b64, "base64"));
  }
  const binary = atob(b64);
  const out = new Uint8Array(binary.length);
  for (let i = 0; i < binary.length; i++) out[i] = binary.charCodeAt(i);
  return out;
}
