"""Deterministic demo dataset: small PPM images plus a detections file.

Gives the end-to-end toy pipeline something to chew on without shipping
binary fixtures: images are seeded color-block collages, detections point
at in-bounds boxes with a fixed ID/OOD mix.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .interchange import DetectionRecord, write_detections
from .raster import BBox, Raster, write_ppm

DEMO_LABELS = ("car", "person", "dog", "bicycle")


def _demo_image(rng: np.random.Generator, width: int, height: int) -> Raster:
    arr = np.zeros((height, width, 3), dtype=np.uint8)
    # horizontal gradient base
    ramp = np.linspace(0, 255, width, dtype=np.uint8)
    arr[:, :, 0] = ramp[None, :]
    arr[:, :, 1] = rng.integers(0, 256)
    arr[:, :, 2] = np.linspace(0, 255, height, dtype=np.uint8)[:, None]
    # a few solid color blocks
    for _ in range(4):
        x1 = int(rng.integers(0, width - 4))
        y1 = int(rng.integers(0, height - 4))
        x2 = int(rng.integers(x1 + 2, min(x1 + 14, width)))
        y2 = int(rng.integers(y1 + 2, min(y1 + 14, height)))
        arr[y1:y2, x1:x2] = rng.integers(0, 256, size=3)
    return Raster.from_array(arr)


def _demo_box(rng: np.random.Generator, width: int, height: int) -> BBox:
    x1 = int(rng.integers(0, width - 6))
    y1 = int(rng.integers(0, height - 6))
    x2 = int(rng.integers(x1 + 4, min(x1 + 20, width)))
    y2 = int(rng.integers(y1 + 4, min(y1 + 20, height)))
    return BBox(x1, y1, x2, y2)


def make_demo_dataset(
    out_dir: str | Path,
    n_images: int = 16,
    n_detections: int = 40,
    seed: int = 7,
) -> tuple[Path, Path]:
    """Write PPM images and a detections CSV; returns (images_dir, detections_path)."""
    out_dir = Path(out_dir)
    images_dir = out_dir / "images"
    images_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)

    sizes = {}
    for i in range(n_images):
        width = 40 + 2 * (i % 5)
        height = 32 + 3 * (i % 4)
        img = _demo_image(rng, width, height)
        (images_dir / f"img{i:03d}.ppm").write_bytes(write_ppm(img))
        sizes[f"img{i:03d}"] = (width, height)

    records = []
    image_ids = sorted(sizes)
    for d in range(n_detections):
        image_id = image_ids[d % n_images]
        width, height = sizes[image_id]
        label = DEMO_LABELS[int(rng.integers(0, len(DEMO_LABELS)))]
        is_id = rng.random() < 0.6
        records.append(
            DetectionRecord(
                image_id=image_id,
                box=_demo_box(rng, width, height),
                pred_label=label,
                truth="ID" if is_id else "OOD",
                truth_label=label if is_id else None,
            )
        )
    detections_path = out_dir / "detections.csv"
    write_detections(detections_path, records)
    return images_dir, detections_path
