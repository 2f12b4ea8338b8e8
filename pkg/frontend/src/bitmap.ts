/** RGBA pixel buffer shared by every drawing layer. */

export class Bitmap {
  readonly width: number;
  readonly height: number;
  readonly data: Uint8ClampedArray; // RGBA, row-major

  constructor(width: number, height: number, data?: Uint8ClampedArray) {
    if (width <= 0 || height <= 0) {
      throw new Error(`bitmap dimensions must be positive, got ${width}x${height}`);
    }
    this.width = width;
    this.height = height;
    if (data !== undefined) {
      if (data.length !== width * height * 4) {
        throw new Error(`buffer length ${data.length} does not match ${width}x${height} RGBA`);
      }
      this.data = data;
    } else {
      this.data = new Uint8ClampedArray(width * height * 4);
    }
  }

  static blank(width: number, height: number): Bitmap {
    return new Bitmap(width, height);
  }

  clone(): Bitmap {
    return new Bitmap(this.width, this.height, new Uint8ClampedArray(this.data));
  }

  equals(other: Bitmap): boolean {
    if (this.width !== other.width || this.height !== other.height) return false;
    for (let i = 0; i < this.data.length; i++) {
      if (this.data[i] !== other.data[i]) return false;
    }
    return true;
  }

  isBlank(): boolean {
    for (let i = 0; i < this.data.length; i++) {
      if (this.data[i] !== 0) return false;
    }
    return true;
  }

  getPixel(x: number, y: number): [number, number, number, number] {
    const i = (y * this.width + x) * 4;
    return [this.data[i], this.data[i + 1], this.data[i + 2], this.data[i + 3]];
  }

  setPixel(x: number, y: number, rgba: readonly [number, number, number, number]): void {
    const i = (y * this.width + x) * 4;
    this.data[i] = rgba[0];
    this.data[i + 1] = rgba[1];
    this.data[i + 2] = rgba[2];
    this.data[i + 3] = rgba[3];
  }
}

/** Mean absolute difference over RGB channels of two same-sized bitmaps,
 * in [0, 255] units. Used for the blank-mask no-op hint. */
export function meanAbsDiffRgb(a: Bitmap, b: Bitmap): number {
  if (a.width !== b.width || a.height !== b.height) {
    throw new Error("bitmaps must share dimensions");
  }
  let total = 0;
  let count = 0;
  for (let i = 0; i < a.data.length; i += 4) {
    total += Math.abs(a.data[i] - b.data[i]);
    total += Math.abs(a.data[i + 1] - b.data[i + 1]);
    total += Math.abs(a.data[i + 2] - b.data[i + 2]);
    count += 3;
  }
  return total / count;
}
