"""Synthetic embedding benchmark generator.

Builds a desk-scale stand-in for a detection OOD benchmark: K orthonormal
concept vectors, per-class visual prototypes rotated off their concepts
by a configurable angle, per-class scene prototypes feeding the global
path, Gaussian sample noise, and an optional shared rotation of all
visual prototypes that a trained linear projection can undo. Everything
derives from one seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .concept_bank import DEFAULT_TEMPLATE, ConceptBank, expand_template
from .errors import BadConfig
from .training import LabeledShot


@dataclass(frozen=True)
class SynthConfig:
    classes: int
    dim: int
    n_id: int
    n_ood: int
    align_noise_deg: float = 15.0
    spread: float = 0.25
    concept_margin: float = 0.05
    rotation_misalignment_deg: float = 0.0
    scene_align_deg: float = 45.0
    ood_regional_from_id: bool = False
    n_train_per_class: int = 20
    seed: int = 0

    def __post_init__(self):
        if self.classes < 2:
            raise BadConfig(f"need at least 2 classes, got {self.classes}")
        if self.dim < 8:
            raise BadConfig(f"dim must be >= 8, got {self.dim}")
        if self.classes > self.dim:
            raise BadConfig(f"classes ({self.classes}) cannot exceed dim ({self.dim})")
        if self.n_id < 1 or self.n_ood < 1 or self.n_train_per_class < 1:
            raise BadConfig("sample counts must be >= 1")
        if self.spread < 0:
            raise BadConfig(f"spread must be >= 0, got {self.spread}")
        for name in ("align_noise_deg", "scene_align_deg"):
            angle = getattr(self, name)
            if not (0.0 <= angle < 90.0):
                raise BadConfig(f"{name} must be in [0, 90), got {angle}")
        if not (0.0 <= self.rotation_misalignment_deg <= 180.0):
            raise BadConfig("rotation_misalignment_deg must be in [0, 180]")


@dataclass(frozen=True)
class SynthRecord:
    """One evaluation record: precomputed dual embeddings plus ground truth."""

    record_id: str
    global_emb: np.ndarray
    regional_emb: np.ndarray
    truth: str  # "ID" / "OOD"
    pred_label: str
    truth_label: str | None


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def _rotate_from(base: np.ndarray, angle_deg: float, rng: np.random.Generator) -> np.ndarray:
    """Unit vector at the given angle from `base`, random direction."""
    if angle_deg == 0.0:
        return base.copy()
    g = rng.standard_normal(base.shape[0])
    orth = g - np.dot(g, base) * base
    norm = np.linalg.norm(orth)
    if norm == 0.0:  # astronomically unlikely; redraw deterministically
        return _rotate_from(base, angle_deg, rng)
    theta = math.radians(angle_deg)
    return math.cos(theta) * base + math.sin(theta) * (orth / norm)


def _rotation_matrix(dim: int, angle_deg: float, rng: np.random.Generator) -> np.ndarray:
    """Orthogonal map rotating every vector by angle_deg: equal 2x2 blocks in a
    random basis (the last axis is fixed when dim is odd)."""
    theta = math.radians(angle_deg)
    q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    block = np.eye(dim)
    c, s = math.cos(theta), math.sin(theta)
    for i in range(0, dim - 1, 2):
        block[i, i] = c
        block[i, i + 1] = -s
        block[i + 1, i] = s
        block[i + 1, i + 1] = c
    return q @ block @ q.T


def _noisy_sample(prototype: np.ndarray, spread: float, rng: np.random.Generator) -> np.ndarray:
    return _unit(prototype + spread * rng.standard_normal(prototype.shape[0]))


def generate_synthetic(
    cfg: SynthConfig, template: str = DEFAULT_TEMPLATE
) -> tuple[ConceptBank, list[LabeledShot], list[SynthRecord]]:
    """Returns (concept bank, few-shot train pool, evaluation records)."""
    rng = np.random.default_rng(cfg.seed)
    k, dim = cfg.classes, cfg.dim

    # Orthonormal concepts via QR: non-matching similarity is exactly 0 pre-noise.
    concepts = np.linalg.qr(rng.standard_normal((dim, k)))[0].T  # (K, dim)

    labels = tuple(f"class_{i:03d}" for i in range(k))
    prompts = tuple(expand_template(template, label) for label in labels)
    bank = ConceptBank(labels=labels, prompts=prompts, vectors=concepts.copy())

    visual = np.stack([_rotate_from(concepts[i], cfg.align_noise_deg, rng) for i in range(k)])
    scene = np.stack([_rotate_from(concepts[i], cfg.scene_align_deg, rng) for i in range(k)])

    # Concept margin guard, checked before any deliberate misalignment.
    sims = visual @ concepts.T
    diag = np.diag(sims)
    off = sims - np.diag(diag) - np.eye(k)  # push diagonal below any off-diag
    margin = float(np.min(diag - off.max(axis=1)))
    if margin < cfg.concept_margin:
        raise BadConfig(
            f"prototype/concept margin {margin:.4f} below required {cfg.concept_margin}"
        )

    if cfg.rotation_misalignment_deg > 0.0:
        rot = _rotation_matrix(dim, cfg.rotation_misalignment_deg, rng)
        visual = visual @ rot.T

    train_pool = [
        LabeledShot(embedding=_noisy_sample(visual[c], cfg.spread, rng), label=c)
        for c in range(k)
        for _ in range(cfg.n_train_per_class)
    ]

    # OOD pseudo-classes: regional prototypes either independent of every
    # concept or borrowed from the ID classes (scene prototypes always differ).
    if cfg.ood_regional_from_id:
        ood_visual = visual.copy()
    else:
        ood_visual = np.stack([_unit(rng.standard_normal(dim)) for _ in range(k)])
    ood_scene = np.stack([_unit(rng.standard_normal(dim)) for _ in range(k)])

    records: list[SynthRecord] = []
    for i in range(cfg.n_id):
        c = i % k
        regional = _noisy_sample(visual[c], cfg.spread, rng)
        global_emb = _noisy_sample(scene[c], cfg.spread, rng)
        records.append(
            SynthRecord(
                record_id=f"obj{i:06d}",
                global_emb=global_emb,
                regional_emb=regional,
                truth="ID",
                pred_label=labels[c],
                truth_label=labels[c],
            )
        )
    for j in range(cfg.n_ood):
        c = j % k
        regional = _noisy_sample(ood_visual[c], cfg.spread, rng)
        global_emb = _noisy_sample(ood_scene[c], cfg.spread, rng)
        # the "detector" assigns the closest ID concept as its prediction
        pred = labels[int(np.argmax(concepts @ regional))]
        records.append(
            SynthRecord(
                record_id=f"obj{cfg.n_id + j:06d}",
                global_emb=global_emb,
                regional_emb=regional,
                truth="OOD",
                pred_label=pred,
                truth_label=None,
            )
        )
    return bank, train_pool, records
