#!/usr/bin/env python3
"""Fusion-weight ablation: sweep lambda over a synthetic benchmark and print
AUROC/FPR95 per method. Record identity and ordering stay fixed across the
sweep; only the scores move.

Usage: python scripts/lambda_sweep.py [seed]
"""

import sys

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

LAMBDAS = (0.0, 0.25, 0.5, 0.75, 1.0)


def main() -> int:
    seed = int(sys.argv[1]) if len(sys.argv) > 1 else 777
    cfg = SynthConfig(
        classes=12, dim=128, n_id=1500, n_ood=1500, spread=0.3,
        scene_align_deg=35.0, ood_regional_from_id=True, seed=seed,
    )
    bank, _, records = generate_synthetic(cfg)
    identity = ProjectionLayer.identity(bank.dim)
    print(f"{'lambda':>7} {'method':<11} {'AUROC':>8} {'FPR95':>8}")
    for lam in LAMBDAS:
        fusion = FusionConfig(lam=lam)
        for method, tau in ((ScoreMethod.DIRECT_SUM, None), (ScoreMethod.MCM, 1.0),
                            (ScoreMethod.MAX_SIM, None)):
            id_scores, ood_scores = [], []
            for rec in records:
                fused = fuse(rec.global_emb, rec.regional_emb, fusion)
                sigma = score_sims(similarities(project(identity, fused), bank), method, tau)
                (id_scores if rec.truth == "ID" else ood_scores).append(sigma)
            a = auroc(id_scores, ood_scores)
            f = fpr_at_tpr(id_scores, ood_scores)
            print(f"{lam:>7.2f} {method.value:<11} {a:>8.4f} {f:>8.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
