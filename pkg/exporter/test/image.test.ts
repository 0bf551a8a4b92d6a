import { describe, expect, it } from "vitest";

import { backgroundBlur, crop, gaussianBlur, gaussianKernel } from "../src/image.js";
import { Raster, makeRaster } from "../src/ppm.js";

function solid(w: number, h: number, rgb: [number, number, number]): Raster {
  const pixels = new Uint8Array(w * h * 3);
  for (let p = 0; p < w * h; p++) pixels.set(rgb, p * 3);
  return makeRaster(w, h, pixels);
}

function randomRaster(w: number, h: number, seed = 7): Raster {
  const pixels = new Uint8Array(w * h * 3);
  let state = seed;
  for (let i = 0; i < pixels.length; i++) {
    state = (state * 1103515245 + 12345) & 0x7fffffff;
    pixels[i] = state % 256;
  }
  return makeRaster(w, h, pixels);
}

/** direct 2-D convolution with per-axis clamped indexing */
function blur2dOracle(img: Raster, sigma: number): Uint8Array {
  const kernel = gaussianKernel(sigma);
  const taps = (kernel.length - 1) >> 1;
  const out = new Uint8Array(img.pixels.length);
  const clamp = (v: number, n: number) => Math.min(Math.max(v, 0), n - 1);
  for (let y = 0; y < img.height; y++) {
    for (let x = 0; x < img.width; x++) {
      for (let c = 0; c < 3; c++) {
        let acc = 0;
        for (let dy = -taps; dy <= taps; dy++) {
          for (let dx = -taps; dx <= taps; dx++) {
            const yy = clamp(y + dy, img.height);
            const xx = clamp(x + dx, img.width);
            acc += kernel[dy + taps] * kernel[dx + taps] * img.pixels[(yy * img.width + xx) * 3 + c];
          }
        }
        out[(y * img.width + x) * 3 + c] = Math.min(255, Math.max(0, Math.floor(acc + 0.5)));
      }
    }
  }
  return out;
}

describe("crop", () => {
  it("extracts the exact box", () => {
    const img = randomRaster(6, 5);
    const out = crop(img, { x1: 2, y1: 1, x2: 5, y2: 4 });
    expect(out.width).toBe(3);
    expect(out.height).toBe(3);
    for (let y = 0; y < 3; y++) {
      for (let x = 0; x < 3; x++) {
        for (let c = 0; c < 3; c++) {
          expect(out.pixels[(y * 3 + x) * 3 + c]).toBe(img.pixels[((y + 1) * 6 + (x + 2)) * 3 + c]);
        }
      }
    }
  });

  it("rejects out-of-bounds boxes", () => {
    expect(() => crop(randomRaster(4, 4), { x1: 0, y1: 0, x2: 5, y2: 4 })).toThrow(/exceeds/);
  });
});

describe("gaussian blur", () => {
  it("kernel is normalized with ceil(3 sigma) taps per side", () => {
    const k = gaussianKernel(1.0);
    expect(k.length).toBe(7);
    expect([...k].reduce((a, b) => a + b, 0)).toBeCloseTo(1.0, 12);
  });

  it("leaves constant images unchanged", () => {
    const img = solid(6, 6, [120, 7, 201]);
    const out = gaussianBlur(img, 1.0);
    expect(Buffer.from(out.pixels).equals(Buffer.from(img.pixels))).toBe(true);
  });

  it("matches the direct 2-D convolution oracle", () => {
    const img = randomRaster(7, 6);
    for (const sigma of [1.0, 1.7]) {
      const got = gaussianBlur(img, sigma).pixels;
      const want = blur2dOracle(img, sigma);
      expect(Buffer.from(got).equals(Buffer.from(want))).toBe(true);
    }
  });

  it("rejects non-positive radius", () => {
    expect(() => gaussianBlur(randomRaster(3, 3), 0)).toThrow(/positive/);
  });
});

describe("background blur", () => {
  it("keeps box pixels bit-identical and blurs the rest", () => {
    const img = randomRaster(8, 8);
    const box = { x1: 2, y1: 2, x2: 5, y2: 5 };
    const out = backgroundBlur(img, box, 1.0);
    const blurred = blur2dOracle(img, 1.0);
    for (let y = 0; y < 8; y++) {
      for (let x = 0; x < 8; x++) {
        const inside = x >= 2 && x < 5 && y >= 2 && y < 5;
        for (let c = 0; c < 3; c++) {
          const idx = (y * 8 + x) * 3 + c;
          expect(out.pixels[idx]).toBe(inside ? img.pixels[idx] : blurred[idx]);
        }
      }
    }
  });

  it("is the identity for a full-image box", () => {
    const img = randomRaster(5, 5);
    const out = backgroundBlur(img, { x1: 0, y1: 0, x2: 5, y2: 5 }, 1.0);
    expect(Buffer.from(out.pixels).equals(Buffer.from(img.pixels))).toBe(true);
  });
});
