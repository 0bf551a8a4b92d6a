/** Detections CSV: header-first, `image_id,x1,y1,x2,y2,pred_label,truth[,truth_label]`. */

import { FormatError } from "./errors.js";
import { BBox } from "./image.js";

export interface DetectionRecord {
  imageId: string;
  box: BBox;
  predLabel: string;
  truth: "ID" | "OOD";
  truthLabel?: string;
}

const REQUIRED = ["image_id", "x1", "y1", "x2", "y2", "pred_label", "truth"];

export function recordId(rec: DetectionRecord, row: number): string {
  return `${rec.imageId}#${row}`;
}

export function parseDetections(text: string, source = "detections"): DetectionRecord[] {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) throw new FormatError(`${source}: empty detections file`);
  const header = lines[0].split(",").map((h) => h.trim());
  const headerOk =
    (header.length === 7 || (header.length === 8 && header[7] === "truth_label")) &&
    REQUIRED.every((name, i) => header[i] === name);
  if (!headerOk) throw new FormatError(`${source}: bad header ${JSON.stringify(header)}`);
  const hasTruthLabel = header.length === 8;

  const records: DetectionRecord[] = [];
  for (let row = 0; row < lines.length - 1; row++) {
    const fields = lines[row + 1].split(",").map((f) => f.trim());
    const want = hasTruthLabel ? 8 : 7;
    if (fields.length !== want) {
      throw new FormatError(`${source}: record ${row}: expected ${want} fields, got ${fields.length}`);
    }
    const [imageId, x1, y1, x2, y2, predLabel, truth] = fields;
    if (truth !== "ID" && truth !== "OOD") {
      throw new FormatError(`${source}: record ${row}: truth must be ID or OOD, got ${truth}`);
    }
    const box = { x1: Number(x1), y1: Number(y1), x2: Number(x2), y2: Number(y2) };
    if ([box.x1, box.y1, box.x2, box.y2].some((v) => !Number.isInteger(v))) {
      throw new FormatError(`${source}: record ${row}: non-integer box`);
    }
    if (!(box.x1 >= 0 && box.x1 < box.x2 && box.y1 >= 0 && box.y1 < box.y2)) {
      throw new FormatError(`${source}: record ${row}: degenerate box`);
    }
    records.push({
      imageId,
      box,
      predLabel,
      truth,
      truthLabel: hasTruthLabel && fields[7] ? fields[7] : undefined,
    });
  }
  return records;
}
