"""Few-shot contrastive fine-tuning of the projection layer.

The loss consumes regional embeddings only (the regional-only path of the
fusion rule), pushes each projected embedding toward its label's concept
vector via a temperature-scaled softmax over the whole bank, and is
summed (not averaged) over the batch. Only the projection weights train;
bank vectors and input embeddings are frozen.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .concept_bank import ConceptBank
from .errors import (
    DimMismatch,
    EmptyBatch,
    InsufficientShots,
    NonPositiveTau,
    ShapeMismatch,
)
from .scoring import ProjectionLayer


@dataclass(frozen=True)
class FewShotConfig:
    shots: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.shots < 1:
            raise ValueError(f"shots must be >= 1, got {self.shots}")


@dataclass(frozen=True)
class AdamWConfig:
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    weight_decay: float = 0.01

    def __post_init__(self):
        if not (0.0 < self.beta1 < 1.0 and 0.0 < self.beta2 < 1.0):
            raise ValueError("betas must lie in (0, 1)")
        if self.eps <= 0 or self.weight_decay < 0:
            raise ValueError("eps must be positive, weight_decay non-negative")


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 256
    epochs: int = 100
    learning_rate: float = 5e-6
    loss_tau: float = 0.01
    adamw: AdamWConfig = field(default_factory=AdamWConfig)
    seed: int = 0

    def __post_init__(self):
        if self.batch_size < 1 or self.epochs < 1:
            raise ValueError("batch_size and epochs must be positive")
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be non-negative")
        if self.loss_tau <= 0:
            raise NonPositiveTau(f"loss_tau must be positive, got {self.loss_tau}")


@dataclass(frozen=True)
class LabeledShot:
    """Regional embedding (unit-norm, pre-projection) with its class index."""

    embedding: np.ndarray
    label: int


def sample_few_shot(pool, cfg: FewShotConfig, num_classes: int) -> list[LabeledShot]:
    """Draw exactly N shots per class without replacement, seeded.

    Output is class-major (class 0 first); within a class, samples appear in
    draw order. Raises InsufficientShots naming the first class that is short.
    """
    by_class: dict[int, list[LabeledShot]] = {c: [] for c in range(num_classes)}
    for shot in pool:
        if not (0 <= shot.label < num_classes):
            raise InsufficientShots(shot.label, 0, cfg.shots)
        by_class[shot.label].append(shot)

    rng = np.random.default_rng(cfg.seed)
    chosen: list[LabeledShot] = []
    for c in range(num_classes):
        candidates = by_class[c]
        if len(candidates) < cfg.shots:
            raise InsufficientShots(c, len(candidates), cfg.shots)
        order = rng.permutation(len(candidates))[: cfg.shots]
        chosen.extend(candidates[i] for i in order)
    return chosen


def _batch_arrays(batch, bank: ConceptBank) -> tuple[np.ndarray, np.ndarray]:
    if len(batch) == 0:
        raise EmptyBatch("batch must hold at least one shot")
    embs = np.stack([np.asarray(s.embedding, dtype=np.float64) for s in batch])
    labels = np.array([s.label for s in batch], dtype=np.int64)
    if embs.shape[1] != bank.dim:
        raise DimMismatch(f"shot dim {embs.shape[1]} != bank dim {bank.dim}")
    if labels.min() < 0 or labels.max() >= bank.size:
        raise DimMismatch("shot label outside bank range")
    return embs, labels


def _forward(batch, projection: ProjectionLayer, bank: ConceptBank, tau: float):
    if not (tau > 0):
        raise NonPositiveTau(f"tau must be positive, got {tau}")
    embs, labels = _batch_arrays(batch, bank)
    z = embs @ projection.weight.T                      # (B, dim)
    norms = np.linalg.norm(z, axis=1, keepdims=True)
    if np.any(norms == 0.0):
        raise ZeroDivisionError("projection annihilated a shot embedding")
    zhat = z / norms                                    # unit rows
    logits = (zhat @ bank.vectors.T) / tau              # (B, K)
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    return embs, labels, z, norms, zhat, logits, log_probs


def contrastive_loss(batch, projection: ProjectionLayer, bank: ConceptBank, tau: float) -> float:
    """Summed cross-entropy of projected shots against their concept vectors."""
    _, labels, _, _, _, _, log_probs = _forward(batch, projection, bank, tau)
    return -float(log_probs[np.arange(len(labels)), labels].sum())


def loss_gradient(batch, projection: ProjectionLayer, bank: ConceptBank, tau: float) -> np.ndarray:
    """Analytic dL/dW, including the chain rule through the post-projection
    normalization: with z = W u and zhat = z/|z|, dzhat/dz = (I - zhat zhat^T)/|z|."""
    embs, labels, _, norms, zhat, _, log_probs = _forward(batch, projection, bank, tau)
    probs = np.exp(log_probs)
    probs[np.arange(len(labels)), labels] -= 1.0        # softmax minus one-hot
    g_zhat = (probs @ bank.vectors) / tau               # (B, dim)
    radial = np.sum(g_zhat * zhat, axis=1, keepdims=True)
    g_z = (g_zhat - radial * zhat) / norms
    return g_z.T @ embs                                 # (dim, dim)


@dataclass
class AdamWState:
    m: np.ndarray
    v: np.ndarray
    t: int = 0

    @classmethod
    def zeros(cls, shape) -> "AdamWState":
        return cls(m=np.zeros(shape), v=np.zeros(shape))


def adamw_step(
    weight: np.ndarray,
    grad: np.ndarray,
    state: AdamWState,
    lr: float,
    cfg: AdamWConfig,
) -> np.ndarray:
    """One decoupled-weight-decay Adam step; mutates state, returns new weights."""
    if grad.shape != weight.shape:
        raise ShapeMismatch(f"grad shape {grad.shape} != weight shape {weight.shape}")
    state.t += 1
    state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grad
    state.v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * grad * grad
    m_hat = state.m / (1.0 - cfg.beta1**state.t)
    v_hat = state.v / (1.0 - cfg.beta2**state.t)
    return weight - lr * m_hat / (np.sqrt(v_hat) + cfg.eps) - lr * cfg.weight_decay * weight


def train(
    shots: list[LabeledShot],
    bank: ConceptBank,
    cfg: TrainConfig,
    init_projection: ProjectionLayer | None = None,
) -> tuple[ProjectionLayer, list[float]]:
    """Mini-batch training loop; returns the final layer and per-epoch loss sums.

    The shuffle order is drawn from one seeded stream, the last short batch is
    kept, and the loss history records the summed loss over each full epoch.
    """
    if not shots:
        raise EmptyBatch("no training shots")
    if init_projection is None:
        init_projection = ProjectionLayer.identity(bank.dim)
    weight = init_projection.weight.astype(np.float64).copy()
    state = AdamWState.zeros(weight.shape)
    rng = np.random.default_rng(cfg.seed)

    history: list[float] = []
    n = len(shots)
    for _ in range(cfg.epochs):
        order = rng.permutation(n)
        epoch_loss = 0.0
        for start in range(0, n, cfg.batch_size):
            batch = [shots[i] for i in order[start : start + cfg.batch_size]]
            layer = ProjectionLayer(weight=weight)
            epoch_loss += contrastive_loss(batch, layer, bank, cfg.loss_tau)
            grad = loss_gradient(batch, layer, bank, cfg.loss_tau)
            weight = adamw_step(weight, grad, state, cfg.learning_rate, cfg.adamw)
        history.append(epoch_loss)
    return ProjectionLayer(weight=weight), history
