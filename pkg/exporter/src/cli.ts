#!/usr/bin/env node
/**
 * runa-export export --images <dir> --detections <csv> --model <id>
 *                    --out <manifest.tsv> [--bank-out <bank.tsv>]
 *                    [--radius 1.0] [--template "a photo of a {label}"]
 *
 * Model ids: `toy:dim=256,seed=0` (deterministic built-in, no ML stack) or a
 * transformers.js CLIP checkpoint such as `Xenova/clip-vit-base-patch16`.
 * Exit codes: 0 success, 2 usage, 3 data/format error, 4 model failure.
 */

import * as path from "node:path";

import { loadBackend } from "./backend.js";
import { FormatError, ImageNotFoundError, ModelLoadError } from "./errors.js";
import { DEFAULT_TEMPLATE, exportEmbeddings } from "./export.js";

interface CliArgs {
  images: string;
  detections: string;
  model: string;
  out: string;
  bankOut: string;
  radius: number;
  template: string;
}

const USAGE =
  "usage: runa-export export --images DIR --detections CSV --model ID --out MANIFEST " +
  "[--bank-out MANIFEST] [--radius R] [--template T]";

class UsageError extends Error {}

function parseArgs(argv: string[]): CliArgs {
  if (argv.length === 0 || argv[0] !== "export") {
    throw new UsageError(`unknown command ${argv[0] ?? "(none)"}`);
  }
  const flags = new Map<string, string>();
  for (let i = 1; i < argv.length; i += 2) {
    const key = argv[i];
    if (!key.startsWith("--") || i + 1 >= argv.length) {
      throw new UsageError(`bad or valueless flag ${key}`);
    }
    flags.set(key.slice(2), argv[i + 1]);
  }
  const required = (name: string): string => {
    const value = flags.get(name);
    if (value === undefined) throw new UsageError(`missing --${name}`);
    return value;
  };
  const out = required("out");
  const radius = Number(flags.get("radius") ?? "1.0");
  if (!Number.isFinite(radius)) throw new UsageError("--radius must be a number");
  const known = new Set(["images", "detections", "model", "out", "bank-out", "radius", "template"]);
  for (const key of flags.keys()) {
    if (!known.has(key)) throw new UsageError(`unknown flag --${key}`);
  }
  return {
    images: required("images"),
    detections: required("detections"),
    model: required("model"),
    out,
    bankOut: flags.get("bank-out") ?? path.join(path.dirname(out), "bank.tsv"),
    radius,
    template: flags.get("template") ?? DEFAULT_TEMPLATE,
  };
}

export async function main(argv: string[]): Promise<number> {
  let args: CliArgs;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    console.error(USAGE);
    return 2;
  }
  try {
    const model = await loadBackend(args.model);
    const summary = await exportEmbeddings({
      imagesDir: args.images,
      detectionsPath: args.detections,
      model,
      outManifest: args.out,
      bankManifest: args.bankOut,
      blurRadius: args.radius,
      template: args.template,
    });
    console.log(
      `exported ${summary.records} records from ${summary.images} images ` +
        `(${summary.labels.length} bank labels) -> ${summary.outManifest}, ${summary.bankManifest}`,
    );
    return 0;
  } catch (err) {
    if (err instanceof ModelLoadError) {
      console.error(`model error: ${err.message}`);
      return 4;
    }
    if (err instanceof FormatError || err instanceof ImageNotFoundError) {
      console.error(`error: ${err.message}`);
      return 3;
    }
    throw err;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${path.resolve(process.argv[1])}`).href;

if (invokedDirectly) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
