"""On-disk interchange formats.

Embeddings travel as a manifest/blob pair: the manifest is a text file of
``id<TAB>offset<TAB>dim`` lines; the blob opens with the 8-byte magic
``RUNAEMB1`` followed by little-endian float32 payloads at the byte
offsets the manifest names. Detections travel as a header-first CSV with
columns ``image_id,x1,y1,x2,y2,pred_label,truth[,truth_label]``.

Record identity: data row ``i`` of a detections file is addressed as
``{image_id}#{i}``, and its embeddings live under ``{record_id}.global``
and ``{record_id}.regional``. A trained projection is a single record
named ``projection`` holding dim*dim floats, row-major.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FormatError, MissingEmbedding, UnknownLabel
from .raster import BBox

BLOB_MAGIC = b"RUNAEMB1"

DETECTIONS_COLUMNS = ("image_id", "x1", "y1", "x2", "y2", "pred_label", "truth")
TRUTH_ID = "ID"
TRUTH_OOD = "OOD"

PROJECTION_RECORD_ID = "projection"


def blob_path_for(manifest_path: str | Path) -> Path:
    return Path(manifest_path).with_suffix(".bin")


# --- embeddings ------------------------------------------------------------

def write_embeddings(manifest_path, records, blob_path=None) -> None:
    """Write (id, vector) records; float32 storage, manifest order preserved."""
    manifest_path = Path(manifest_path)
    blob_path = blob_path_for(manifest_path) if blob_path is None else Path(blob_path)
    lines = []
    payload = bytearray(BLOB_MAGIC)
    seen = set()
    for rec_id, vec in records:
        if "\t" in rec_id or "\n" in rec_id or not rec_id:
            raise FormatError(f"bad record id {rec_id!r}")
        if rec_id in seen:
            raise FormatError(f"duplicate record id {rec_id!r}")
        seen.add(rec_id)
        arr = np.asarray(vec, dtype=np.float64).ravel()
        offset = len(payload)
        payload += arr.astype("<f4").tobytes()
        lines.append(f"{rec_id}\t{offset}\t{arr.size}\n")
    manifest_path.write_text("".join(lines), encoding="utf-8")
    blob_path.write_bytes(bytes(payload))


def read_embeddings(manifest_path, blob_path=None) -> list[tuple[str, np.ndarray]]:
    """Read all records in manifest order; float32 promoted to float64."""
    manifest_path = Path(manifest_path)
    blob_path = blob_path_for(manifest_path) if blob_path is None else Path(blob_path)
    if not manifest_path.exists():
        raise FormatError(f"manifest not found: {manifest_path}")
    if not blob_path.exists():
        raise FormatError(f"blob not found: {blob_path}")
    blob = blob_path.read_bytes()
    if blob[: len(BLOB_MAGIC)] != BLOB_MAGIC:
        raise FormatError(f"blob {blob_path} missing magic {BLOB_MAGIC!r}")

    records: list[tuple[str, np.ndarray]] = []
    seen = set()
    text = manifest_path.read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise FormatError(f"{manifest_path}:{lineno}: expected 3 tab-separated fields")
        rec_id, offset_s, dim_s = parts
        try:
            offset, dim = int(offset_s), int(dim_s)
        except ValueError:
            raise FormatError(f"{manifest_path}:{lineno}: non-integer offset/dim") from None
        if rec_id in seen:
            raise FormatError(f"{manifest_path}:{lineno}: duplicate id {rec_id!r}")
        seen.add(rec_id)
        if dim <= 0 or offset < len(BLOB_MAGIC) or offset + 4 * dim > len(blob):
            raise FormatError(f"{manifest_path}:{lineno}: record {rec_id!r} outside blob")
        vec = np.frombuffer(blob, dtype="<f4", count=dim, offset=offset).astype(np.float64)
        records.append((rec_id, vec))
    return records


class EmbeddingTable:
    """Order-preserving id -> vector map with checked lookups."""

    def __init__(self, records: list[tuple[str, np.ndarray]]):
        self.records = records
        self._by_id = dict(records)

    @classmethod
    def load(cls, manifest_path, blob_path=None) -> "EmbeddingTable":
        return cls(read_embeddings(manifest_path, blob_path=blob_path))

    def __len__(self) -> int:
        return len(self.records)

    def __contains__(self, rec_id: str) -> bool:
        return rec_id in self._by_id

    def get(self, rec_id: str) -> np.ndarray:
        try:
            return self._by_id[rec_id]
        except KeyError:
            raise MissingEmbedding(f"no embedding record {rec_id!r}") from None


def save_projection(weight: np.ndarray, manifest_path, blob_path=None) -> None:
    w = np.asarray(weight, dtype=np.float64)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise FormatError(f"projection must be square, got shape {w.shape}")
    write_embeddings(manifest_path, [(PROJECTION_RECORD_ID, w.ravel())], blob_path=blob_path)


def load_projection(manifest_path, blob_path=None) -> np.ndarray:
    table = EmbeddingTable.load(manifest_path, blob_path=blob_path)
    flat = table.get(PROJECTION_RECORD_ID)
    side = math.isqrt(flat.size)
    if side * side != flat.size:
        raise FormatError(f"projection record holds {flat.size} floats, not a square")
    return flat.reshape(side, side)


# --- detections ------------------------------------------------------------

@dataclass(frozen=True)
class DetectionRecord:
    image_id: str
    box: BBox
    pred_label: str
    truth: str  # TRUTH_ID or TRUTH_OOD
    truth_label: str | None = None

    @property
    def is_id(self) -> bool:
        return self.truth == TRUTH_ID


def record_id(rec: DetectionRecord, row: int) -> str:
    return f"{rec.image_id}#{row}"


def read_detections(path) -> list[DetectionRecord]:
    path = Path(path)
    if not path.exists():
        raise FormatError(f"detections file not found: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FormatError(f"{path}: empty detections file") from None
        header = [h.strip() for h in header]
        if tuple(header[:7]) != DETECTIONS_COLUMNS or len(header) > 8 or (
            len(header) == 8 and header[7] != "truth_label"
        ):
            raise FormatError(f"{path}: bad header {header!r}")
        has_truth_label = len(header) == 8

        records = []
        for row_no, row in enumerate(reader):
            if not row:
                continue
            want = 8 if has_truth_label else 7
            if len(row) != want:
                raise FormatError(f"{path}: record {row_no}: expected {want} fields, got {len(row)}")
            image_id, x1, y1, x2, y2, pred_label, truth = (f.strip() for f in row[:7])
            if truth not in (TRUTH_ID, TRUTH_OOD):
                raise FormatError(f"{path}: record {row_no}: truth must be ID or OOD, got {truth!r}")
            try:
                box = BBox(int(x1), int(y1), int(x2), int(y2))
            except ValueError as exc:
                raise FormatError(f"{path}: record {row_no}: {exc}") from None
            truth_label = row[7].strip() if has_truth_label and row[7].strip() else None
            records.append(
                DetectionRecord(
                    image_id=image_id,
                    box=box,
                    pred_label=pred_label,
                    truth=truth,
                    truth_label=truth_label,
                )
            )
    return records


def write_detections(path, records: list[DetectionRecord]) -> None:
    path = Path(path)
    has_truth_label = any(r.truth_label is not None for r in records)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        header = list(DETECTIONS_COLUMNS) + (["truth_label"] if has_truth_label else [])
        writer.writerow(header)
        for rec in records:
            row = [
                rec.image_id,
                rec.box.x1,
                rec.box.y1,
                rec.box.x2,
                rec.box.y2,
                rec.pred_label,
                rec.truth,
            ]
            if has_truth_label:
                row.append(rec.truth_label or "")
            writer.writerow(row)


def check_labels_known(records: list[DetectionRecord], labels) -> None:
    known = set(labels)
    for row_no, rec in enumerate(records):
        if rec.pred_label not in known:
            raise UnknownLabel(
                f"record {row_no} ({rec.image_id!r}) predicts unknown label {rec.pred_label!r}"
            )
