/**
 * Embedding backends behind one interface.
 *
 * `toy:dim=...,seed=...` is a deterministic built-in (histogram + luminance
 * grid features through a seeded random projection; seeded random unit
 * vectors for text) so the full export path runs with no ML stack. Any
 * other model id is treated as a transformers.js CLIP checkpoint and loaded
 * through the optional `@huggingface/transformers` peer dependency.
 */

import { ModelLoadError } from "./errors.js";
import { Raster } from "./ppm.js";
import { SplitMix64, textStreamSeed } from "./rng.js";

export interface EmbedBackend {
  readonly name: string;
  embedImage(img: Raster): Promise<Float64Array>;
  embedTexts(prompts: string[]): Promise<Float64Array[]>;
}

export function l2Normalize(v: Float64Array): Float64Array {
  let sq = 0;
  for (const x of v) sq += x * x;
  const norm = Math.sqrt(sq);
  if (norm === 0) throw new ModelLoadError("backend produced a zero embedding");
  return v.map((x) => x / norm) as Float64Array;
}

const HIST_BINS = 64;
const GRID = 8;
const FEATURE_DIM = HIST_BINS + GRID * GRID;

function cellBounds(size: number, cells: number): Array<[number, number]> {
  const bounds: Array<[number, number]> = [];
  for (let i = 0; i < cells; i++) {
    let lo = Math.floor((i * size) / cells);
    let hi = Math.floor(((i + 1) * size) / cells);
    if (hi <= lo) {
      lo = Math.min(lo, size - 1);
      hi = lo + 1;
    }
    bounds.push([lo, hi]);
  }
  return bounds;
}

export function imageFeatures(img: Raster): Float64Array {
  const features = new Float64Array(FEATURE_DIM);
  const n = img.width * img.height;
  for (let p = 0; p < n; p++) {
    const r = img.pixels[p * 3] >> 6;
    const g = img.pixels[p * 3 + 1] >> 6;
    const b = img.pixels[p * 3 + 2] >> 6;
    features[r * 16 + g * 4 + b] += 1;
  }
  for (let i = 0; i < HIST_BINS; i++) features[i] /= n;

  const rows = cellBounds(img.height, GRID);
  const cols = cellBounds(img.width, GRID);
  let k = HIST_BINS;
  for (const [r0, r1] of rows) {
    for (const [c0, c1] of cols) {
      let acc = 0;
      for (let y = r0; y < r1; y++) {
        for (let x = c0; x < c1; x++) {
          const p = (y * img.width + x) * 3;
          acc += (img.pixels[p] + img.pixels[p + 1] + img.pixels[p + 2]) / 3 / 255;
        }
      }
      features[k++] = acc / ((r1 - r0) * (c1 - c0));
    }
  }
  return features;
}

class ToyBackend implements EmbedBackend {
  readonly name: string;
  private readonly projection: Float64Array; // dim x FEATURE_DIM, row-major

  constructor(readonly dim: number, readonly seed: bigint) {
    if (dim < 8) throw new ModelLoadError(`toy backend dim must be >= 8, got ${dim}`);
    this.name = `toy:dim=${dim},seed=${seed}`;
    this.projection = new SplitMix64(seed).gaussVector(dim * FEATURE_DIM);
  }

  async embedImage(img: Raster): Promise<Float64Array> {
    const features = imageFeatures(img);
    const out = new Float64Array(this.dim);
    for (let i = 0; i < this.dim; i++) {
      let acc = 0;
      const base = i * FEATURE_DIM;
      for (let j = 0; j < FEATURE_DIM; j++) acc += this.projection[base + j] * features[j];
      out[i] = acc;
    }
    return l2Normalize(out);
  }

  async embedTexts(prompts: string[]): Promise<Float64Array[]> {
    return prompts.map((prompt) => {
      if (!prompt) throw new ModelLoadError("prompt must be non-empty");
      const rng = new SplitMix64(textStreamSeed(this.seed, prompt));
      return l2Normalize(rng.gaussVector(this.dim));
    });
  }
}

function parseToySpec(spec: string): ToyBackend {
  let dim = 256;
  let seed = 0n;
  const body = spec.slice("toy:".length);
  if (body) {
    for (const part of body.split(",")) {
      const [key, value] = part.split("=");
      if (key === "dim") dim = Number(value);
      else if (key === "seed") seed = BigInt(value);
      else throw new ModelLoadError(`unknown toy backend option ${part}`);
    }
  }
  return new ToyBackend(dim, seed);
}

class ClipBackend implements EmbedBackend {
  private constructor(
    readonly name: string,
    private readonly tokenizer: any,
    private readonly textModel: any,
    private readonly processor: any,
    private readonly visionModel: any,
    private readonly RawImage: any,
  ) {}

  static async load(modelId: string): Promise<ClipBackend> {
    let hf: any;
    try {
      hf = await import("@huggingface/transformers");
    } catch (err) {
      throw new ModelLoadError(
        `@huggingface/transformers is not installed (npm install @huggingface/transformers); ` +
          `cannot load model ${modelId}: ${(err as Error).message}`,
      );
    }
    try {
      const tokenizer = await hf.AutoTokenizer.from_pretrained(modelId);
      const textModel = await hf.CLIPTextModelWithProjection.from_pretrained(modelId);
      const processor = await hf.AutoProcessor.from_pretrained(modelId);
      const visionModel = await hf.CLIPVisionModelWithProjection.from_pretrained(modelId);
      return new ClipBackend(modelId, tokenizer, textModel, processor, visionModel, hf.RawImage);
    } catch (err) {
      throw new ModelLoadError(`failed to load model ${modelId}: ${(err as Error).message}`);
    }
  }

  async embedImage(img: Raster): Promise<Float64Array> {
    // RawImage takes raw RGB; the processor applies the checkpoint's own
    // resize / center-crop / normalization
    const raw = new this.RawImage(Uint8ClampedArray.from(img.pixels), img.width, img.height, 3);
    const inputs = await this.processor(raw);
    const output = await this.visionModel(inputs);
    return l2Normalize(Float64Array.from(output.image_embeds.data as Iterable<number>));
  }

  async embedTexts(prompts: string[]): Promise<Float64Array[]> {
    const inputs = await this.tokenizer(prompts, { padding: true, truncation: true });
    const output = await this.textModel(inputs);
    const [rows, cols] = output.text_embeds.dims as [number, number];
    const data = output.text_embeds.data as Float32Array;
    const out: Float64Array[] = [];
    for (let r = 0; r < rows; r++) {
      out.push(l2Normalize(Float64Array.from(data.slice(r * cols, (r + 1) * cols))));
    }
    return out;
  }
}

export async function loadBackend(modelId: string): Promise<EmbedBackend> {
  if (modelId.startsWith("toy:") || modelId === "toy") {
    return parseToySpec(modelId === "toy" ? "toy:" : modelId);
  }
  return ClipBackend.load(modelId);
}
