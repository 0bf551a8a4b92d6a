"""Object-level out-of-distribution detection toolkit.

Dual global/regional embeddings are fused, pushed through a trainable
projection, and compared against a bank of text-concept vectors; the
resulting uncertainty score drives an inclusive-threshold ID/OOD decision
evaluated with FPR95 and AUROC.
"""

from .concept_bank import DEFAULT_TEMPLATE, ConceptBank, build_bank, load_bank, save_bank
from .interchange import DetectionRecord, EmbeddingTable, read_detections, write_detections
from .metrics import auroc, calibrate_threshold, fpr_at_tpr
from .raster import BBox, Raster, background_blur, crop, gaussian_blur, read_ppm, write_ppm
from .scoring import (
    FusionConfig,
    ProjectionLayer,
    ScoreMethod,
    classify,
    fuse,
    project,
    score_direct_sum,
    score_max_sim,
    score_mcm,
    score_sims,
    similarities,
)
from .synthetic import SynthConfig, SynthRecord, generate_synthetic
from .toy_encoder import ToyEncoderConfig, ToyImageEncoder, ToyTextEncoder
from .training import (
    AdamWConfig,
    FewShotConfig,
    LabeledShot,
    TrainConfig,
    adamw_step,
    contrastive_loss,
    loss_gradient,
    sample_few_shot,
    train,
)

__version__ = "0.1.0"

__all__ = [
    "AdamWConfig",
    "BBox",
    "ConceptBank",
    "DEFAULT_TEMPLATE",
    "DetectionRecord",
    "EmbeddingTable",
    "FewShotConfig",
    "FusionConfig",
    "LabeledShot",
    "ProjectionLayer",
    "Raster",
    "ScoreMethod",
    "SynthConfig",
    "SynthRecord",
    "ToyEncoderConfig",
    "ToyImageEncoder",
    "ToyTextEncoder",
    "TrainConfig",
    "adamw_step",
    "auroc",
    "background_blur",
    "build_bank",
    "calibrate_threshold",
    "classify",
    "contrastive_loss",
    "crop",
    "fpr_at_tpr",
    "fuse",
    "gaussian_blur",
    "generate_synthetic",
    "load_bank",
    "loss_gradient",
    "project",
    "read_detections",
    "read_ppm",
    "sample_few_shot",
    "save_bank",
    "score_direct_sum",
    "score_max_sim",
    "score_mcm",
    "score_sims",
    "similarities",
    "train",
    "write_detections",
    "write_ppm",
]
