/**
 * Crop and Gaussian blur with the same conventions as the scoring core:
 * sigma = radius, 1-D kernel truncated at ceil(3*sigma) taps per side and
 * renormalized, clamp-to-edge borders, channels independent, float
 * accumulation through both separable passes with one final round
 * (floor(x + 0.5)).
 */

import { FormatError } from "./errors.js";
import { Raster, makeRaster } from "./ppm.js";

export interface BBox {
  x1: number;
  y1: number;
  x2: number;
  y2: number;
}

export function checkBox(box: BBox, img: Raster): void {
  if (!(box.x1 >= 0 && box.x1 < box.x2 && box.y1 >= 0 && box.y1 < box.y2)) {
    throw new FormatError(`degenerate box ${JSON.stringify(box)}`);
  }
  if (box.x2 > img.width || box.y2 > img.height) {
    throw new FormatError(`box ${JSON.stringify(box)} exceeds raster ${img.width}x${img.height}`);
  }
}

export function crop(img: Raster, box: BBox): Raster {
  checkBox(box, img);
  const w = box.x2 - box.x1;
  const h = box.y2 - box.y1;
  const out = new Uint8Array(w * h * 3);
  for (let y = 0; y < h; y++) {
    const srcStart = ((box.y1 + y) * img.width + box.x1) * 3;
    out.set(img.pixels.subarray(srcStart, srcStart + w * 3), y * w * 3);
  }
  return makeRaster(w, h, out);
}

export function gaussianKernel(sigma: number): Float64Array {
  if (!(sigma > 0) || !Number.isFinite(sigma)) {
    throw new FormatError(`blur radius must be positive, got ${sigma}`);
  }
  const taps = Math.ceil(3 * sigma);
  const kernel = new Float64Array(2 * taps + 1);
  let sum = 0;
  for (let i = -taps; i <= taps; i++) {
    const w = Math.exp(-0.5 * (i / sigma) ** 2);
    kernel[i + taps] = w;
    sum += w;
  }
  for (let i = 0; i < kernel.length; i++) kernel[i] /= sum;
  return kernel;
}

const clampIndex = (i: number, n: number) => (i < 0 ? 0 : i >= n ? n - 1 : i);

export function gaussianBlur(img: Raster, radius: number): Raster {
  const kernel = gaussianKernel(radius);
  const taps = (kernel.length - 1) >> 1;
  const { width, height } = img;
  const horizontal = new Float64Array(width * height * 3);
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      for (let c = 0; c < 3; c++) {
        let acc = 0;
        for (let k = -taps; k <= taps; k++) {
          const xx = clampIndex(x + k, width);
          acc += kernel[k + taps] * img.pixels[(y * width + xx) * 3 + c];
        }
        horizontal[(y * width + x) * 3 + c] = acc;
      }
    }
  }
  const out = new Uint8Array(width * height * 3);
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      for (let c = 0; c < 3; c++) {
        let acc = 0;
        for (let k = -taps; k <= taps; k++) {
          const yy = clampIndex(y + k, height);
          acc += kernel[k + taps] * horizontal[(yy * width + x) * 3 + c];
        }
        out[(y * width + x) * 3 + c] = Math.min(255, Math.max(0, Math.floor(acc + 0.5)));
      }
    }
  }
  return makeRaster(width, height, out);
}

/** Blur everything outside the box; box pixels stay bit-identical. */
export function backgroundBlur(img: Raster, box: BBox, radius: number): Raster {
  checkBox(box, img);
  const blurred = gaussianBlur(img, radius);
  const out = blurred.pixels;
  for (let y = box.y1; y < box.y2; y++) {
    const start = (y * img.width + box.x1) * 3;
    const end = (y * img.width + box.x2) * 3;
    out.set(img.pixels.subarray(start, end), start);
  }
  return makeRaster(img.width, img.height, out);
}
