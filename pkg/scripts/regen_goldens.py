#!/usr/bin/env python3
"""Recompute the pinned-seed golden values used by the acceptance tests.

The committed tests/golden/synthetic_goldens.json was produced by this
script; re-run it (python scripts/regen_goldens.py) only when the
generator or scoring semantics deliberately change, and review the diff.
"""

import json
import sys
from pathlib import Path

from runa.metrics import auroc, fpr_at_tpr
from runa.scoring import (
    FusionConfig,
    ProjectionLayer,
    ScoreMethod,
    fuse,
    project,
    score_sims,
    similarities,
)
from runa.synthetic import SynthConfig, generate_synthetic
from runa.training import FewShotConfig, TrainConfig, sample_few_shot, train

FIGURE4_CONFIG = dict(
    classes=20, dim=256, n_id=2000, n_ood=2000, spread=0.35,
    align_noise_deg=15.0, scene_align_deg=45.0, concept_margin=0.05,
    seed=20240817,
)
FIGURE4_MCM_TAU = 1.0

ABLATION_CONFIG = dict(
    classes=12, dim=128, n_id=1500, n_ood=1500, spread=0.3,
    align_noise_deg=15.0, scene_align_deg=35.0, concept_margin=0.05,
    ood_regional_from_id=True, seed=777,
)

FINETUNE_CONFIG = dict(
    classes=32, dim=64, n_id=1000, n_ood=1000, spread=0.15,
    align_noise_deg=45.0, rotation_misalignment_deg=30.0, concept_margin=0.05,
    n_train_per_class=30, seed=4242,
)
# Desk-scale training settings: optimizer constants and batch size stay at
# their defaults, epochs are halved to 50 per the acceptance setup, and
# lr/loss_tau are rescaled so 50 epochs of AdamW can actually move a
# dim^2-parameter identity-initialized projection (the full-scale defaults
# move each weight by at most lr*steps ~ 2.5e-4, far below any score change).
FINETUNE_TRAIN = dict(batch_size=256, epochs=50, learning_rate=3e-3, loss_tau=0.05, seed=4242)
FINETUNE_SHOTS = 10


def eval_records(records, bank, method, tau=None, lam=0.5, projection=None):
    projection = projection or ProjectionLayer.identity(bank.dim)
    fusion = FusionConfig(lam=lam)
    id_scores, ood_scores = [], []
    for rec in records:
        fused = fuse(rec.global_emb, rec.regional_emb, fusion)
        sigma = score_sims(similarities(project(projection, fused), bank), method, tau)
        (id_scores if rec.truth == "ID" else ood_scores).append(sigma)
    return auroc(id_scores, ood_scores), fpr_at_tpr(id_scores, ood_scores)


def figure4_goldens():
    bank, _, records = generate_synthetic(SynthConfig(**FIGURE4_CONFIG))
    out = {}
    for name, method, tau in (
        ("direct_sum", ScoreMethod.DIRECT_SUM, None),
        ("mcm", ScoreMethod.MCM, FIGURE4_MCM_TAU),
        ("max_sim", ScoreMethod.MAX_SIM, None),
    ):
        a, f = eval_records(records, bank, method, tau)
        out[name] = {"auroc": a, "fpr95": f}
    return out


def ablation_goldens():
    bank, _, records = generate_synthetic(SynthConfig(**ABLATION_CONFIG))
    out = {}
    for lam in (1.0, 0.5):
        a, f = eval_records(records, bank, ScoreMethod.MAX_SIM, lam=lam)
        out[f"lambda_{lam}"] = {"auroc": a, "fpr95": f}
    return out


def finetune_goldens():
    cfg = SynthConfig(**FINETUNE_CONFIG)
    bank, pool, records = generate_synthetic(cfg)
    shots = sample_few_shot(pool, FewShotConfig(shots=FINETUNE_SHOTS, seed=cfg.seed), bank.size)
    a0, f0 = eval_records(records, bank, ScoreMethod.MAX_SIM, lam=1.0)
    trained, history = train(shots, bank, TrainConfig(**FINETUNE_TRAIN))
    a1, f1 = eval_records(records, bank, ScoreMethod.MAX_SIM, lam=1.0, projection=trained)
    return {
        "zero_shot": {"auroc": a0, "fpr95": f0},
        "finetuned": {"auroc": a1, "fpr95": f1},
        "first_epoch_loss": history[0],
        "last_epoch_loss": history[-1],
    }


def main() -> int:
    goldens = {
        "figure4": {"config": FIGURE4_CONFIG, "mcm_tau": FIGURE4_MCM_TAU, "results": figure4_goldens()},
        "dual_encoder": {"config": ABLATION_CONFIG, "results": ablation_goldens()},
        "finetune": {
            "config": FINETUNE_CONFIG,
            "train": FINETUNE_TRAIN,
            "shots": FINETUNE_SHOTS,
            "results": finetune_goldens(),
        },
    }
    out_path = Path(__file__).resolve().parent.parent / "tests" / "golden" / "synthetic_goldens.json"
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(json.dumps(goldens, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {out_path}")
    for section, payload in goldens.items():
        print(f"  {section}: {json.dumps(payload['results'])}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
