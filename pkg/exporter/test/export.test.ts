import { spawnSync } from "node:child_process";
import { mkdtemp, readFile, writeFile } from "node:fs/promises";
import { tmpdir } from "node:os";
import * as path from "node:path";

import { describe, expect, it } from "vitest";

import { loadBackend } from "../src/backend.js";
import { main } from "../src/cli.js";
import { exportEmbeddings } from "../src/export.js";
import { readEmbeddings } from "../src/interchange.js";
import { makeRaster, writePpm } from "../src/ppm.js";

const LABELS = ["car", "person", "dog"];

function smokeImage(index: number, w: number, h: number) {
  const pixels = new Uint8Array(w * h * 3);
  let state = 7919 * (index + 1);
  for (let i = 0; i < pixels.length; i++) {
    state = (state * 1103515245 + 12345) & 0x7fffffff;
    pixels[i] = state % 256;
  }
  return makeRaster(w, h, pixels);
}

/** 10 images / 10 detections, deterministic content */
async function makeSmokeSet(dir: string): Promise<{ imagesDir: string; detections: string }> {
  const imagesDir = path.join(dir, "images");
  await (await import("node:fs/promises")).mkdir(imagesDir, { recursive: true });
  const rows = ["image_id,x1,y1,x2,y2,pred_label,truth"];
  for (let i = 0; i < 10; i++) {
    const w = 32 + (i % 3) * 4;
    const h = 28 + (i % 2) * 6;
    await writeFile(path.join(imagesDir, `smoke${i}.ppm`), writePpm(smokeImage(i, w, h)));
    const label = LABELS[i % LABELS.length];
    const truth = i % 3 === 0 ? "OOD" : "ID";
    rows.push(`smoke${i},${2 + (i % 4)},${1 + (i % 3)},${12 + (i % 4)},${11 + (i % 3)},${label},${truth}`);
  }
  const detections = path.join(dir, "detections.csv");
  await writeFile(detections, rows.join("\n") + "\n");
  return { imagesDir, detections };
}

async function runExport(dir: string, imagesDir: string, detections: string, tag: string) {
  const out = path.join(dir, `emb_${tag}.tsv`);
  const bankOut = path.join(dir, `bank_${tag}.tsv`);
  const model = await loadBackend("toy:dim=64,seed=5");
  const summary = await exportEmbeddings({
    imagesDir,
    detectionsPath: detections,
    model,
    outManifest: out,
    bankManifest: bankOut,
    blurRadius: 1.0,
    template: "a photo of a {label}",
  });
  return { out, bankOut, summary };
}

describe("export flow", () => {
  it("writes 2 embeddings per record plus one bank record per label, all unit-norm", async () => {
    const dir = await mkdtemp(path.join(tmpdir(), "runa-export-"));
    const { imagesDir, detections } = await makeSmokeSet(dir);
    const { out, bankOut, summary } = await runExport(dir, imagesDir, detections, "a");

    expect(summary.records).toBe(10);
    expect(summary.images).toBe(10);
    expect(summary.labels).toEqual([...LABELS].sort());

    const embRecords = await readEmbeddings(out);
    expect(embRecords.length).toBe(20); // 2 per detection
    expect(embRecords[0][0]).toBe("smoke0#0.global");
    expect(embRecords[1][0]).toBe("smoke0#0.regional");
    const bankRecords = await readEmbeddings(bankOut);
    expect(bankRecords.length).toBe(3); // one per label
    expect(bankRecords.map(([id]) => id)).toEqual([
      "car|a photo of a car",
      "dog|a photo of a dog",
      "person|a photo of a person",
    ]);
    for (const [, vec] of [...embRecords, ...bankRecords]) {
      const norm = Math.sqrt([...vec].reduce((a, x) => a + x * x, 0));
      expect(Math.abs(norm - 1.0)).toBeLessThan(1e-3); // float32 storage tolerance
    }
  });

  it("re-running with the same model and inputs reproduces the vectors", async () => {
    const dir = await mkdtemp(path.join(tmpdir(), "runa-export-"));
    const { imagesDir, detections } = await makeSmokeSet(dir);
    const first = await runExport(dir, imagesDir, detections, "a");
    const second = await runExport(dir, imagesDir, detections, "b");
    const recsA = await readEmbeddings(first.out);
    const recsB = await readEmbeddings(second.out);
    for (let i = 0; i < recsA.length; i++) {
      let dot = 0;
      for (let j = 0; j < recsA[i][1].length; j++) dot += recsA[i][1][j] * recsB[i][1][j];
      expect(dot).toBeGreaterThanOrEqual(0.999); // toy backend is bit-exact
    }
  });

  it("fails with ImageNotFound for a missing image", async () => {
    const dir = await mkdtemp(path.join(tmpdir(), "runa-export-"));
    const { imagesDir, detections } = await makeSmokeSet(dir);
    await writeFile(
      detections,
      "image_id,x1,y1,x2,y2,pred_label,truth\nmissing,0,0,4,4,car,ID\n",
    );
    await expect(runExport(dir, imagesDir, detections, "x")).rejects.toThrow(/image not found/);
  });

  it("exported files evaluate cleanly in the scoring harness (eval --method max-sim)", async () => {
    const dir = await mkdtemp(path.join(tmpdir(), "runa-export-"));
    const { imagesDir, detections } = await makeSmokeSet(dir);
    const { out, bankOut } = await runExport(dir, imagesDir, detections, "a");

    const report = path.join(dir, "report.txt");
    const proc = spawnSync(
      "python3",
      [
        "-m", "runa.cli", "eval",
        "--bank", bankOut,
        "--embeddings", out,
        "--detections", detections,
        "--method", "max-sim",
        "--out", report,
      ],
      { encoding: "utf-8" },
    );
    expect(proc.error).toBeUndefined();
    expect(proc.status, proc.stderr).toBe(0);
    expect(proc.stderr).not.toMatch(/warning/i);
    const body = await readFile(report, "utf-8");
    expect(body).toContain("records=10");
    expect(body).toContain("[method:max-sim]");
  }, 60_000);
});

describe("cli", () => {
  it("usage errors exit 2", async () => {
    expect(await main([])).toBe(2);
    expect(await main(["export", "--images"])).toBe(2);
    expect(await main(["export", "--images", "x", "--detections", "y", "--model", "toy:",
                       "--out", "z", "--bogus", "1"])).toBe(2);
  });

  it("data errors exit 3, model errors exit 4", async () => {
    const dir = await mkdtemp(path.join(tmpdir(), "runa-export-"));
    const { imagesDir } = await makeSmokeSet(dir);
    expect(
      await main([
        "export", "--images", imagesDir, "--detections", path.join(dir, "nope.csv"),
        "--model", "toy:", "--out", path.join(dir, "o.tsv"),
      ]),
    ).toBe(3);
    expect(
      await main([
        "export", "--images", imagesDir, "--detections", path.join(dir, "detections.csv"),
        "--model", "toy:dim=2", "--out", path.join(dir, "o.tsv"),
      ]),
    ).toBe(4);
  });

  it("export subcommand runs end to end with the toy backend", async () => {
    const dir = await mkdtemp(path.join(tmpdir(), "runa-export-"));
    const { imagesDir, detections } = await makeSmokeSet(dir);
    const out = path.join(dir, "cli.tsv");
    const code = await main([
      "export", "--images", imagesDir, "--detections", detections,
      "--model", "toy:dim=32,seed=1", "--out", out,
      "--bank-out", path.join(dir, "clibank.tsv"), "--radius", "1.0",
    ]);
    expect(code).toBe(0);
    expect((await readEmbeddings(out)).length).toBe(20);
  });
});
