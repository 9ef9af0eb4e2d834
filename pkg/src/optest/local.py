"""Locally optimum (score) tests and the locally optimum unbiased test.

The one-sided rule thresholds the score d/dtheta log L at theta0 against the
constant 1; the two-sided unbiased rule thresholds L''/L against 1.  Note the
constant 1 carries units of 1/theta (and 1/theta^2 for the unbiased rule), so
these regions are not invariant under rescaling the parameter; the rules are
implemented exactly as stated rather than "fixed".

For the side ``less`` two readings are available:

* ``variant="paper"`` thresholds the score at +1 from below, the mirror-image
  of the printed display.  As printed it rejects even when the sample sits
  exactly at theta0 (score 0 <= 1), which is suspicious but reproduced
  faithfully;
* ``variant="symmetric"`` thresholds at -1, the construction mirrored through
  theta0.  Monte Carlo comparison of the two error profiles is left to the
  caller; neither reading is silently substituted for the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from optest.models import ModelSpec, SampleLike, as_batch
from optest.procedures import Direction, TestProcedure

__all__ = [
    "locally_optimum_test",
    "normal_mean_score_test",
    "locally_optimum_unbiased_test",
    "normal_mean_lou_test",
    "unbiasedness_defect",
    "UnbiasednessReport",
]

SIDES = ("greater", "less")
VARIANTS = ("paper", "symmetric")

# Stream domain for null draws; matches error_eval so one seed names one
# dataset across all H0 evaluations.
_DOMAIN_NULL = 0


def locally_optimum_test(model: ModelSpec, theta0: float, side: str = "greater",
                         variant: str = "paper") -> TestProcedure:
    """Score rule: reject when the score at theta0 clears the constant 1.

    ``side="greater"`` rejects on score >= 1.  ``side="less"`` rejects on
    score <= 1 (variant "paper") or score <= -1 (variant "symmetric"); see
    the module docstring.  Two-sided alternatives belong to
    :func:`locally_optimum_unbiased_test`.
    """
    if side == "two-sided":
        raise ValueError(
            "two-sided alternatives use locally_optimum_unbiased_test")
    if side not in SIDES:
        raise ValueError(f"side must be one of {SIDES}, got {side!r}")
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    if side == "greater":
        threshold, direction, provenance = 1.0, Direction.GE, "lemma2"
    elif variant == "paper":
        threshold, direction, provenance = 1.0, Direction.LE, "lemma2"
    else:
        threshold, direction, provenance = -1.0, Direction.LE, "lemma2-symmetric-variant"
    return TestProcedure(
        statistic_name="score",
        statistic=lambda b: model.score_ratio(theta0, b),
        threshold=threshold,
        direction=direction,
        provenance=provenance,
        row_statistic=lambda m: model.row_score_ratio(theta0, m),
    )


def normal_mean_score_test(theta0: float, sigma: float, n: int,
                           side: str = "greater",
                           variant: str = "paper") -> TestProcedure:
    """Closed form of the score rule for the normal mean: a threshold on the
    sample mean at theta0 + sigma^2/n (mirrored to theta0 - sigma^2/n for the
    symmetric less-side variant)."""
    if not sigma > 0.0:
        raise ValueError(f"sigma must be positive, got {sigma!r}")
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n!r}")
    if side not in SIDES:
        raise ValueError(f"side must be one of {SIDES}, got {side!r}")
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    offset = sigma**2 / n
    if side == "greater":
        threshold, direction, provenance = theta0 + offset, Direction.GE, "example5"
    elif variant == "paper":
        threshold, direction, provenance = theta0 + offset, Direction.LE, "example5"
    else:
        threshold, direction, provenance = (
            theta0 - offset, Direction.LE, "example5-symmetric-variant")
    return TestProcedure(
        statistic_name="sample_mean",
        statistic=lambda b: b.mean,
        threshold=threshold,
        direction=direction,
        provenance=provenance,
        row_statistic=lambda m: m.mean(axis=1),
    )


def locally_optimum_unbiased_test(model: ModelSpec, theta0: float) -> TestProcedure:
    """Two-sided rule: reject when L''/L at theta0 is >= 1."""
    return TestProcedure(
        statistic_name="second_derivative_ratio",
        statistic=lambda b: model.second_ratio(theta0, b),
        threshold=1.0,
        direction=Direction.GE,
        provenance="lemma3",
        row_statistic=lambda m: model.row_second_ratio(theta0, m),
    )


def normal_mean_lou_test(theta0: float, sigma: float, n: int) -> TestProcedure:
    """Closed form of the unbiased rule for the normal mean:
    n*(mean - theta0)^2/sigma^2 >= 1 + sigma^2/n, two-sided in the mean."""
    if not sigma > 0.0:
        raise ValueError(f"sigma must be positive, got {sigma!r}")
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n!r}")
    var = sigma**2

    def statistic(b):
        return b.n * (b.mean - theta0) ** 2 / var

    return TestProcedure(
        statistic_name="scaled_sq_mean_deviation",
        statistic=statistic,
        threshold=1.0 + var / n,
        direction=Direction.GE,
        provenance="example6",
        row_statistic=lambda m: m.shape[1] * (m.mean(axis=1) - theta0) ** 2 / var,
    )


@dataclass(frozen=True)
class UnbiasednessReport:
    """Monte Carlo estimate of the power function's slope at theta0 over the
    rejection region (zero certifies unbiasedness)."""

    defect: float
    se: float
    reps: int
    seed: int

    def within(self, k_se: float) -> bool:
        return abs(self.defect) <= k_se * self.se

    def to_dict(self) -> dict:
        return {"defect": self.defect, "se": self.se,
                "reps": self.reps, "seed": self.seed}


def unbiasedness_defect(test: TestProcedure, model: ModelSpec, theta0: float,
                        n: int, reps: int, seed: int) -> UnbiasednessReport:
    """Estimate E_theta0[score * 1{reject}] with its standard error.

    The expectation equals the slope of the power function at theta0, so a
    value indistinguishable from zero certifies the unbiasedness constraint.
    """
    if reps < 10_000:
        raise ValueError(f"reps must be at least 10000, got {reps!r}")
    null_model = model.with_param(theta0)
    matrix = null_model.sample_matrix(seed, _DOMAIN_NULL, reps, n)
    contributions = np.where(
        test.rejection_mask(matrix),
        null_model.row_score_ratio(theta0, matrix),
        0.0,
    )
    estimate = float(contributions.mean())
    spread = float(contributions.std(ddof=1)) if reps > 1 else 0.0
    return UnbiasednessReport(
        defect=estimate,
        se=spread / math.sqrt(reps),
        reps=reps,
        seed=seed,
    )
