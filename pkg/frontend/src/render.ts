/** Pixel-perfect scaling: what the agent sees is what the human sees. */

/** Largest integer scale fitting (w, h) into (maxW, maxH), at least 1. */
export function chooseIntegerScale(
  w: number,
  h: number,
  maxW: number,
  maxH: number,
): number {
  const s = Math.floor(Math.min(maxW / w, maxH / h));
  return Math.max(1, s);
}

/** Nearest-neighbor upscale of row-major RGB into RGBA (alpha 255). */
export function scaleNearestRgbToRgba(
  src: Uint8ClampedArray,
  w: number,
  h: number,
  scale: number,
): Uint8ClampedArray {
  const ow = w * scale;
  const oh = h * scale;
  const out = new Uint8ClampedArray(ow * oh * 4);
  for (let y = 0; y < oh; y++) {
    const sy = Math.floor(y / scale);
    for (let x = 0; x < ow; x++) {
      const sx = Math.floor(x / scale);
      const si = (sy * w + sx) * 3;
      const di = (y * ow + x) * 4;
      out[di] = src[si];
      out[di + 1] = src[si + 1];
      out[di + 2] = src[si + 2];
      out[di + 3] = 255;
    }
  }
  return out;
}
