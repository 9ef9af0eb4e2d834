"""Shared test machinery: decision-equivalence counting between procedures."""

import numpy as np


def mismatches_outside_ties(procedure_a, procedure_b, matrix, tie_eps=1e-12):
    """Count decision mismatches on a replication matrix, excluding rows whose
    statistic sits within ``tie_eps`` of either procedure's threshold.

    Returns (mismatches, compared, excluded).
    """
    stats_a = np.asarray(procedure_a.row_statistic(matrix), dtype=np.float64)
    stats_b = np.asarray(procedure_b.row_statistic(matrix), dtype=np.float64)
    near_a = np.abs(stats_a - procedure_a.threshold) < tie_eps
    near_b = np.abs(stats_b - procedure_b.threshold) < tie_eps
    keep = ~(near_a | near_b)
    mask_a = procedure_a.rejection_mask(matrix)[keep]
    mask_b = procedure_b.rejection_mask(matrix)[keep]
    mismatches = int((mask_a != mask_b).sum())
    return mismatches, int(keep.sum()), int((~keep).sum())


def mixed_sample_matrix(model0, model1, n, reps, seed):
    """Replication matrix drawn half under each hypothesis, so decisions are
    exercised on both sides of the threshold."""
    half = reps // 2
    m0 = model0.sample_matrix(seed, 0, half, n)
    m1 = model1.sample_matrix(seed, 1, reps - half, n)
    return np.vstack([m0, m1])
