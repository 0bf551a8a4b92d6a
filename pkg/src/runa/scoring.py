"""The forward scoring path: fuse, project, compare to the bank, score.

All three uncertainty scores negate a confidence so that higher sigma
means more out-of-distribution, and one inclusive threshold rule
(sigma <= gamma -> ID) covers every method.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .concept_bank import ConceptBank
from .errors import DimMismatch, EmptySims, NonPositiveTau, ZeroVector
from .linalg import as_vec, l2_normalize
from .raster import BBox, Raster, background_blur, crop

LABEL_ID = "ID"
LABEL_OOD = "OOD"


@dataclass(frozen=True)
class FusionConfig:
    """Convex blend of the two encoder paths; lam weights the regional embedding."""

    lam: float = 0.5

    def __post_init__(self):
        if not (0.0 <= self.lam <= 1.0):
            raise ValueError(f"lambda must be in [0, 1], got {self.lam}")


@dataclass(frozen=True)
class ProjectionLayer:
    """Square linear map applied to the fused embedding; the only trainable part."""

    weight: np.ndarray

    def __post_init__(self):
        w = self.weight
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise DimMismatch(f"projection must be square, got shape {w.shape}")
        if not np.all(np.isfinite(w)):
            raise ValueError("projection weights must be finite")

    @classmethod
    def identity(cls, dim: int) -> "ProjectionLayer":
        return cls(weight=np.eye(dim))

    @property
    def dim(self) -> int:
        return int(self.weight.shape[0])


class ScoreMethod(str, Enum):
    DIRECT_SUM = "direct-sum"
    MCM = "mcm"
    MAX_SIM = "max-sim"


def fuse(global_emb, regional_emb, cfg: FusionConfig) -> np.ndarray:
    """lam*regional + (1-lam)*global. Deliberately NOT re-normalized; the
    single normalization happens after projection."""
    g = as_vec(global_emb, "global embedding")
    r = as_vec(regional_emb, "regional embedding")
    if g.shape[0] != r.shape[0]:
        raise DimMismatch(f"global dim {g.shape[0]} != regional dim {r.shape[0]}")
    return cfg.lam * r + (1.0 - cfg.lam) * g


def project(layer: ProjectionLayer, v) -> np.ndarray:
    v = as_vec(v)
    if layer.dim != v.shape[0]:
        raise DimMismatch(f"projection dim {layer.dim} != vector dim {v.shape[0]}")
    z = layer.weight @ v
    if not np.any(z):
        raise ZeroVector("projection annihilated the input")
    return l2_normalize(z)


def similarities(emb, bank: ConceptBank) -> np.ndarray:
    """Cosine similarity against every bank concept, in bank order."""
    e = as_vec(emb, "embedding")
    if e.shape[0] != bank.dim:
        raise DimMismatch(f"embedding dim {e.shape[0]} != bank dim {bank.dim}")
    norm = float(np.linalg.norm(e))
    if norm == 0.0:
        raise ZeroVector("cannot score the zero embedding")
    row_norms = np.linalg.norm(bank.vectors, axis=1)
    return (bank.vectors @ e) / (norm * row_norms)


def score_direct_sum(sims) -> float:
    s = np.asarray(sims, dtype=np.float64)
    if s.size == 0:
        raise EmptySims("need at least one similarity")
    return -float(np.sum(s))


def score_mcm(sims, tau: float) -> float:
    """Negative max softmax of temperature-scaled similarities.

    Computed with max-subtraction: the max entry's exponential is exactly 1,
    so the score is -1/sum(exp((s - max)/tau)).
    """
    if not (tau > 0):
        raise NonPositiveTau(f"tau must be positive, got {tau}")
    s = np.asarray(sims, dtype=np.float64)
    if s.size == 0:
        raise EmptySims("need at least one similarity")
    shifted = (s - s.max()) / tau
    return -1.0 / float(np.sum(np.exp(shifted)))


def score_max_sim(sims) -> float:
    s = np.asarray(sims, dtype=np.float64)
    if s.size == 0:
        raise EmptySims("need at least one similarity")
    return -float(np.max(s))


def score_sims(sims, method: ScoreMethod, tau: float | None = None) -> float:
    method = ScoreMethod(method)
    if method is ScoreMethod.DIRECT_SUM:
        return score_direct_sum(sims)
    if method is ScoreMethod.MCM:
        if tau is None:
            raise NonPositiveTau("mcm scoring requires tau")
        return score_mcm(sims, tau)
    return score_max_sim(sims)


def classify(sigma: float, gamma: float) -> str:
    """Inclusive threshold rule: the boundary sigma == gamma counts as ID."""
    return LABEL_ID if sigma <= gamma else LABEL_OOD


def score_embeddings(
    global_emb,
    regional_emb,
    projection: ProjectionLayer,
    bank: ConceptBank,
    fusion: FusionConfig,
    method: ScoreMethod,
    tau: float | None = None,
) -> float:
    """Import path: fuse precomputed embeddings, project, score."""
    fused = fuse(global_emb, regional_emb, fusion)
    emb = project(projection, fused)
    return score_sims(similarities(emb, bank), method, tau)


def score_raster(
    img: Raster,
    box: BBox,
    image_encoder,
    projection: ProjectionLayer,
    bank: ConceptBank,
    fusion: FusionConfig,
    method: ScoreMethod,
    tau: float | None = None,
    blur_radius: float = 1.0,
) -> float:
    """Toy-encoder path: regional = encode(crop), global = encode(background blur)."""
    regional = image_encoder.encode(crop(img, box))
    global_emb = image_encoder.encode(background_blur(img, box, blur_radius))
    return score_embeddings(global_emb, regional, projection, bank, fusion, method, tau)
