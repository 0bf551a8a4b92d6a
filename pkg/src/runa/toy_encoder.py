"""Deterministic stand-in encoders.

These replace pretrained image/text towers so the full scoring and
fine-tuning pipeline can run on plain PPM files with zero model weights.
They are intentionally semantically weak: image features are a color
histogram plus a coarse luminance grid pushed through a fixed random
projection, text features are seeded random unit vectors. Determinism is
the contract, semantics are not.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import EmptyPrompt, EmptyRaster
from .linalg import l2_normalize
from .raster import Raster
from .rng import SplitMix64, text_stream_seed

HIST_BINS = 64          # 4 levels per RGB channel
GRID_CELLS = 8          # 8x8 mean-luminance grid
FEATURE_DIM = HIST_BINS + GRID_CELLS * GRID_CELLS


@dataclass(frozen=True)
class ToyEncoderConfig:
    dim: int = 256
    seed: int = 0

    def __post_init__(self):
        if self.dim < 8:
            raise ValueError(f"embedding dim must be >= 8, got {self.dim}")


def _cell_bounds(size: int, cells: int) -> list[tuple[int, int]]:
    # Integer cell edges; degenerate cells (size < cells) fall back to the
    # single nearest row/column so every cell mean is defined.
    bounds = []
    for i in range(cells):
        lo = (i * size) // cells
        hi = ((i + 1) * size) // cells
        if hi <= lo:
            lo = min(lo, size - 1)
            hi = lo + 1
        bounds.append((lo, hi))
    return bounds


def image_features(img: Raster) -> np.ndarray:
    """128-dim feature: 64-bin RGB histogram (sums to 1) then 8x8 luma grid in [0,1]."""
    if img.width <= 0 or img.height <= 0 or len(img.pixels) == 0:
        raise EmptyRaster("cannot encode an empty raster")
    arr = img.to_array()
    quant = (arr >> 6).astype(np.int64)  # 4 levels per channel
    bin_idx = quant[:, :, 0] * 16 + quant[:, :, 1] * 4 + quant[:, :, 2]
    hist = np.bincount(bin_idx.ravel(), minlength=HIST_BINS).astype(np.float64)
    hist /= hist.sum()

    luma = arr.astype(np.float64).mean(axis=2) / 255.0
    rows = _cell_bounds(img.height, GRID_CELLS)
    cols = _cell_bounds(img.width, GRID_CELLS)
    grid = np.empty(GRID_CELLS * GRID_CELLS, dtype=np.float64)
    k = 0
    for r0, r1 in rows:
        for c0, c1 in cols:
            grid[k] = luma[r0:r1, c0:c1].mean()
            k += 1
    return np.concatenate([hist, grid])


class ToyImageEncoder:
    """Fixed random projection of hand-crafted image features onto the unit sphere."""

    def __init__(self, cfg: ToyEncoderConfig):
        self.cfg = cfg

    @cached_property
    def projection(self) -> np.ndarray:
        # dim x 128 standard-normal entries, drawn row-major from SplitMix64(seed).
        rng = SplitMix64(self.cfg.seed)
        flat = rng.gauss_vector(self.cfg.dim * FEATURE_DIM)
        return np.array(flat, dtype=np.float64).reshape(self.cfg.dim, FEATURE_DIM)

    def encode(self, img: Raster) -> np.ndarray:
        return l2_normalize(self.projection @ image_features(img))


class ToyTextEncoder:
    """Seeded random unit vector per prompt; the stream seed hashes (seed, prompt)."""

    def __init__(self, cfg: ToyEncoderConfig):
        self.cfg = cfg

    def encode(self, prompt: str) -> np.ndarray:
        if not prompt:
            raise EmptyPrompt("prompt must be non-empty")
        rng = SplitMix64(text_stream_seed(self.cfg.seed, prompt))
        return l2_normalize(np.array(rng.gauss_vector(self.cfg.dim), dtype=np.float64))
