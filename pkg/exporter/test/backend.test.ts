import { describe, expect, it } from "vitest";

import { imageFeatures, l2Normalize, loadBackend } from "../src/backend.js";
import { ModelLoadError } from "../src/errors.js";
import { makeRaster } from "../src/ppm.js";
import { SplitMix64, fnv1a64 } from "../src/rng.js";

function randomRaster(w: number, h: number, seed = 3) {
  const pixels = new Uint8Array(w * h * 3);
  let state = seed;
  for (let i = 0; i < pixels.length; i++) {
    state = (state * 1103515245 + 12345) & 0x7fffffff;
    pixels[i] = state % 256;
  }
  return makeRaster(w, h, pixels);
}

function norm(v: Float64Array): number {
  return Math.sqrt([...v].reduce((a, x) => a + x * x, 0));
}

describe("splitmix64", () => {
  it("matches the published reference stream for seed 0", () => {
    const g = new SplitMix64(0n);
    expect(g.nextU64()).toBe(0xe220a8397b1dcdafn);
    expect(g.nextU64()).toBe(0x6e789e6aa1b965f4n);
  });

  it("fnv1a64 matches known vectors", () => {
    expect(fnv1a64(Buffer.from(""))).toBe(0xcbf29ce484222325n);
    expect(fnv1a64(Buffer.from("a"))).toBe(0xaf63dc4c8601ec8cn);
  });
});

describe("toy backend", () => {
  it("is deterministic and unit-norm", async () => {
    const a = await loadBackend("toy:dim=32,seed=9");
    const b = await loadBackend("toy:dim=32,seed=9");
    const img = randomRaster(16, 12);
    const ea = await a.embedImage(img);
    const eb = await b.embedImage(img);
    expect([...ea]).toEqual([...eb]);
    expect(norm(ea)).toBeCloseTo(1.0, 12);
  });

  it("varies with the seed and the prompt", async () => {
    const a = await loadBackend("toy:dim=32,seed=1");
    const b = await loadBackend("toy:dim=32,seed=2");
    const img = randomRaster(10, 10);
    expect([...(await a.embedImage(img))]).not.toEqual([...(await b.embedImage(img))]);
    const [dog, cat] = await a.embedTexts(["a photo of a dog", "a photo of a cat"]);
    expect([...dog]).not.toEqual([...cat]);
    expect(norm(dog)).toBeCloseTo(1.0, 12);
  });

  it("features: histogram sums to 1, grid in [0,1]", () => {
    const feats = imageFeatures(randomRaster(9, 7));
    const hist = [...feats.slice(0, 64)];
    expect(hist.reduce((a, b) => a + b, 0)).toBeCloseTo(1.0, 12);
    for (const g of feats.slice(64)) {
      expect(g).toBeGreaterThanOrEqual(0);
      expect(g).toBeLessThanOrEqual(1);
    }
  });

  it("rejects malformed specs", async () => {
    await expect(loadBackend("toy:bogus=1")).rejects.toThrow(ModelLoadError);
    await expect(loadBackend("toy:dim=4")).rejects.toThrow(ModelLoadError);
  });
});

describe("l2Normalize", () => {
  it("rejects the zero vector", () => {
    expect(() => l2Normalize(new Float64Array(4))).toThrow(ModelLoadError);
  });
});

const hfAvailable = await import("@huggingface/transformers").then(
  () => true,
  () => false,
);

describe("clip backend", () => {
  it.skipIf(hfAvailable)(
    "raises ModelLoadError when the optional ML stack is unavailable",
    async () => {
      await expect(loadBackend("Xenova/clip-vit-base-patch16")).rejects.toThrow(ModelLoadError);
    },
  );
});
