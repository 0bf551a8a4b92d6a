import { mkdtemp, readFile, writeFile } from "node:fs/promises";
import { tmpdir } from "node:os";
import * as path from "node:path";

import { describe, expect, it } from "vitest";

import { blobPathFor, readEmbeddings, writeEmbeddings } from "../src/interchange.js";

async function tempDir(): Promise<string> {
  return mkdtemp(path.join(tmpdir(), "runa-exporter-"));
}

describe("interchange", () => {
  it("round-trips records within float32 precision", async () => {
    const dir = await tempDir();
    const manifest = path.join(dir, "emb.tsv");
    const records = [
      { id: "a#0.global", vector: [0.25, -1.5, 3.75] },
      { id: "a#0.regional", vector: [1.0, 0.0] },
    ];
    await writeEmbeddings(manifest, records);
    const loaded = await readEmbeddings(manifest);
    expect(loaded.map(([id]) => id)).toEqual(["a#0.global", "a#0.regional"]);
    expect([...loaded[0][1]]).toEqual([0.25, -1.5, 3.75]); // representable in f32
    expect([...loaded[1][1]]).toEqual([1.0, 0.0]);
  });

  it("writes the RUNAEMB1 magic and tab manifest", async () => {
    const dir = await tempDir();
    const manifest = path.join(dir, "emb.tsv");
    await writeEmbeddings(manifest, [{ id: "x", vector: [0, 0, 0] }]);
    const blob = await readFile(blobPathFor(manifest));
    expect(blob.subarray(0, 8).toString("ascii")).toBe("RUNAEMB1");
    expect(await readFile(manifest, "utf-8")).toBe("x\t8\t3\n");
  });

  it("rejects duplicate ids", async () => {
    const dir = await tempDir();
    await expect(
      writeEmbeddings(path.join(dir, "emb.tsv"), [
        { id: "x", vector: [1] },
        { id: "x", vector: [2] },
      ]),
    ).rejects.toThrow(/duplicate/);
  });

  it("rejects a corrupted magic on read", async () => {
    const dir = await tempDir();
    const manifest = path.join(dir, "emb.tsv");
    await writeEmbeddings(manifest, [{ id: "x", vector: [1, 2] }]);
    const blobPath = blobPathFor(manifest);
    const blob = await readFile(blobPath);
    blob.write("BADMAGIC", 0, "ascii");
    await writeFile(blobPath, blob);
    await expect(readEmbeddings(manifest)).rejects.toThrow(/magic/);
  });

  it("derives blob paths by extension swap", () => {
    expect(blobPathFor("/tmp/foo/bank.tsv")).toBe("/tmp/foo/bank.bin");
    expect(blobPathFor("plain")).toBe("plain.bin");
  });
});
