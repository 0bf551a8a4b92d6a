/**
 * Export flow: for every detection record write `{record_id}.global` (the
 * background-blurred full image) and `{record_id}.regional` (the crop),
 * both unit-normalized float32, plus one bank record per predicted label
 * built from the prompt template. Blur/crop semantics match the scoring
 * core: blur outside the record's own box, object pixels untouched.
 */

import { promises as fs } from "node:fs";
import * as path from "node:path";

import { EmbedBackend } from "./backend.js";
import { recordId, parseDetections, DetectionRecord } from "./detections.js";
import { FormatError, ImageNotFoundError } from "./errors.js";
import { backgroundBlur, checkBox, crop } from "./image.js";
import { EmbeddingRecord, blobPathFor, writeEmbeddings } from "./interchange.js";
import { Raster, readPpm } from "./ppm.js";

export const DEFAULT_TEMPLATE = "a photo of a {label}";

export interface ExportJob {
  imagesDir: string;
  detectionsPath: string;
  model: EmbedBackend;
  outManifest: string;
  bankManifest: string;
  blurRadius: number;
  template: string;
}

export interface ExportSummary {
  records: number;
  images: number;
  labels: string[];
  outManifest: string;
  outBlob: string;
  bankManifest: string;
  bankBlob: string;
}

export function expandTemplate(template: string, label: string): string {
  const occurrences = template.split("{label}").length - 1;
  if (occurrences !== 1) {
    throw new FormatError(`template must contain exactly one {label} placeholder: ${template}`);
  }
  return template.replace("{label}", label);
}

async function loadImage(imagesDir: string, imageId: string, cache: Map<string, Raster>): Promise<Raster> {
  const cached = cache.get(imageId);
  if (cached) return cached;
  const ppmPath = path.join(imagesDir, `${imageId}.ppm`);
  let data: Uint8Array;
  try {
    data = await fs.readFile(ppmPath);
  } catch {
    throw new ImageNotFoundError(`image not found: ${ppmPath}`);
  }
  const img = readPpm(data);
  cache.set(imageId, img);
  return img;
}

export async function exportEmbeddings(job: ExportJob): Promise<ExportSummary> {
  if (!(job.blurRadius > 0)) {
    throw new FormatError(`blur radius must be positive, got ${job.blurRadius}`);
  }
  let text: string;
  try {
    text = await fs.readFile(job.detectionsPath, "utf-8");
  } catch {
    throw new FormatError(`detections file not found: ${job.detectionsPath}`);
  }
  const detections = parseDetections(text, job.detectionsPath);

  const cache = new Map<string, Raster>();
  const records: EmbeddingRecord[] = [];
  for (let row = 0; row < detections.length; row++) {
    const rec: DetectionRecord = detections[row];
    const img = await loadImage(job.imagesDir, rec.imageId, cache);
    checkBox(rec.box, img);
    const rid = recordId(rec, row);
    const globalEmb = await job.model.embedImage(backgroundBlur(img, rec.box, job.blurRadius));
    const regionalEmb = await job.model.embedImage(crop(img, rec.box));
    records.push({ id: `${rid}.global`, vector: globalEmb });
    records.push({ id: `${rid}.regional`, vector: regionalEmb });
  }
  await writeEmbeddings(job.outManifest, records);

  const labels = [...new Set(detections.map((d) => d.predLabel))].sort();
  const prompts = labels.map((label) => expandTemplate(job.template, label));
  const vectors = await job.model.embedTexts(prompts);
  const bankRecords = labels.map((label, i) => {
    if (label.includes("|")) throw new FormatError(`label ${label} may not contain '|'`);
    return { id: `${label}|${prompts[i]}`, vector: vectors[i] };
  });
  await writeEmbeddings(job.bankManifest, bankRecords);

  return {
    records: detections.length,
    images: cache.size,
    labels,
    outManifest: job.outManifest,
    outBlob: blobPathFor(job.outManifest),
    bankManifest: job.bankManifest,
    bankBlob: blobPathFor(job.bankManifest),
  };
}
