/**
 * The embedding interchange format shared with the scoring core: a text
 * manifest of `id<TAB>offset<TAB>dim` lines plus a blob opening with the
 * 8-byte magic `RUNAEMB1` and holding little-endian float32 payloads at
 * the named byte offsets.
 */

import { promises as fs } from "node:fs";

import { FormatError } from "./errors.js";

export const BLOB_MAGIC = Buffer.from("RUNAEMB1", "ascii");

export function blobPathFor(manifestPath: string): string {
  const stripped = manifestPath.replace(/\.[^./\\]*$/, "");
  return `${stripped}.bin`;
}

export interface EmbeddingRecord {
  id: string;
  vector: Float64Array | Float32Array | number[];
}

export async function writeEmbeddings(
  manifestPath: string,
  records: Iterable<EmbeddingRecord>,
  blobPath?: string,
): Promise<void> {
  const blob = blobPath ?? blobPathFor(manifestPath);
  const chunks: Buffer[] = [BLOB_MAGIC];
  const lines: string[] = [];
  let offset = BLOB_MAGIC.length;
  const seen = new Set<string>();
  for (const { id, vector } of records) {
    if (!id || id.includes("\t") || id.includes("\n")) {
      throw new FormatError(`bad record id ${JSON.stringify(id)}`);
    }
    if (seen.has(id)) throw new FormatError(`duplicate record id ${id}`);
    seen.add(id);
    const payload = Buffer.alloc(vector.length * 4);
    for (let i = 0; i < vector.length; i++) payload.writeFloatLE(Number(vector[i]), i * 4);
    lines.push(`${id}\t${offset}\t${vector.length}\n`);
    chunks.push(payload);
    offset += payload.length;
  }
  await fs.writeFile(manifestPath, lines.join(""), "utf-8");
  await fs.writeFile(blob, Buffer.concat(chunks));
}

export async function readEmbeddings(
  manifestPath: string,
  blobPath?: string,
): Promise<Array<[string, Float64Array]>> {
  const blob = await fs.readFile(blobPath ?? blobPathFor(manifestPath));
  if (!blob.subarray(0, BLOB_MAGIC.length).equals(BLOB_MAGIC)) {
    throw new FormatError(`blob missing magic ${BLOB_MAGIC.toString("ascii")}`);
  }
  const text = await fs.readFile(manifestPath, "utf-8");
  const records: Array<[string, Float64Array]> = [];
  const lines = text.split("\n");
  for (let lineno = 0; lineno < lines.length; lineno++) {
    const line = lines[lineno];
    if (!line) continue;
    const parts = line.split("\t");
    if (parts.length !== 3) {
      throw new FormatError(`${manifestPath}:${lineno + 1}: expected 3 tab-separated fields`);
    }
    const offset = Number(parts[1]);
    const dim = Number(parts[2]);
    if (!Number.isInteger(offset) || !Number.isInteger(dim) || dim <= 0) {
      throw new FormatError(`${manifestPath}:${lineno + 1}: bad offset/dim`);
    }
    if (offset < BLOB_MAGIC.length || offset + 4 * dim > blob.length) {
      throw new FormatError(`${manifestPath}:${lineno + 1}: record outside blob`);
    }
    const vec = new Float64Array(dim);
    for (let i = 0; i < dim; i++) vec[i] = blob.readFloatLE(offset + 4 * i);
    records.push([parts[0], vec]);
  }
  return records;
}
