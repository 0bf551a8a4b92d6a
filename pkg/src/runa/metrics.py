"""Threshold calibration, FPR at fixed TPR, and rank-based AUROC.

Scores follow the "higher = more OOD" convention, so the ID side of the
threshold is inclusive (sigma <= gamma accepts as ID) and AUROC is the
probability that a random ID sample scores strictly below a random OOD
sample, with ties half-credited.
"""

from __future__ import annotations

import numpy as np

from .errors import EmptyScores


def calibrate_threshold(id_scores, tpr: float = 0.95) -> float:
    """Smallest observed ID score at or below which at least `tpr` of the ID
    sample falls (empirical quantile, no interpolation)."""
    scores = np.asarray(id_scores, dtype=np.float64)
    if scores.size == 0:
        raise EmptyScores("no ID scores to calibrate on")
    if not (0.0 < tpr <= 1.0):
        raise ValueError(f"tpr must be in (0, 1], got {tpr}")
    xs = np.sort(scores)
    n = scores.size
    # smallest k with k/n >= tpr, using the same division the definition uses
    k = max(1, int(np.floor(tpr * n)))
    while k / n < tpr:
        k += 1
    while k > 1 and (k - 1) / n >= tpr:
        k -= 1
    return float(xs[k - 1])


def fpr_at_tpr(id_scores, ood_scores, tpr: float = 0.95) -> float:
    """Fraction of OOD scores accepted as ID at the calibrated threshold.
    An OOD score exactly at the threshold counts as a false positive."""
    ood = np.asarray(ood_scores, dtype=np.float64)
    if ood.size == 0:
        raise EmptyScores("no OOD scores")
    gamma = calibrate_threshold(id_scores, tpr)
    return float(np.count_nonzero(ood <= gamma)) / ood.size


def auroc(id_scores, ood_scores) -> float:
    """Mann-Whitney AUROC: P(sigma_id < sigma_ood) with ties credited 0.5.

    Computed via midranks in O(n log n); exhaustive pair counting gives the
    identical value (both sums are exact in float64 below 2^53).
    """
    id_arr = np.asarray(id_scores, dtype=np.float64)
    ood_arr = np.asarray(ood_scores, dtype=np.float64)
    if id_arr.size == 0 or ood_arr.size == 0:
        raise EmptyScores("need both ID and OOD scores")
    combined = np.concatenate([id_arr, ood_arr])
    order = np.argsort(combined, kind="mergesort")
    ranks = np.empty(combined.size, dtype=np.float64)
    sorted_scores = combined[order]
    i = 0
    while i < combined.size:
        j = i
        while j + 1 < combined.size and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        # midrank for the tie group [i, j], 1-based
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    n_ood = ood_arr.size
    rank_sum_ood = float(ranks[id_arr.size :].sum())
    u = rank_sum_ood - n_ood * (n_ood + 1) / 2.0
    return u / (id_arr.size * n_ood)
