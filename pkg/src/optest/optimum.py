"""Minimum error-sum tests.

The generic rule rejects when the alternative's likelihood is at least the
null's, i.e. when the log likelihood ratio is >= 0; that region maximizes
power minus size over all critical regions.  The closed forms below reduce
the same comparison to a threshold on a scalar statistic per family:

* normal mean (known sigma): sample mean against the midpoint of the two
  hypothesized means, direction following the sign of theta1 - theta0;
* normal variance (known mean): sum of squared standardized deviations
  against n * c with c = s1/(s1-s0) * log(s1/s0) for variances s0, s1;
* exponential family: sum of the sufficient statistic against
  n * log(c(theta0)/c(theta1)) / (Q(theta1) - Q(theta0)), direction given
  by the sign of Q(theta1) - Q(theta0).

All comparisons happen in log space; the raw ratio would underflow for
large n.  ``fixed_alpha_comparator`` is the conventional one-sided z-test
kept only for power-minus-size comparisons.
"""

from __future__ import annotations

import math

import numpy as np

from optest.dist import std_normal_quantile
from optest.exceptions import DegenerateProblemError
from optest.models import ExpFamilyModel, ModelSpec, as_batch
from optest.procedures import Direction, TestProcedure

__all__ = [
    "build_lr_test",
    "normal_mean_test",
    "normal_variance_test",
    "log_ratio_constant",
    "expfam_test",
    "fixed_alpha_comparator",
]


def _models_comparable(model0: ModelSpec, model1: ModelSpec) -> None:
    if type(model0) is not type(model1) or model0.family != model1.family:
        raise ValueError(
            f"models must come from one family with a shared support, got "
            f"{model0.family!r} and {model1.family!r}")
    if isinstance(model0, ExpFamilyModel):
        identical = model0.theta == model1.theta
    else:
        identical = model0 == model1
    if identical:
        raise DegenerateProblemError("the two models are identical")


def build_lr_test(model0: ModelSpec, model1: ModelSpec) -> TestProcedure:
    """Reference rule: reject when log L1 - log L0 >= 0.

    Every closed-form construction in this module is checked against this
    procedure in the test suite.
    """
    _models_comparable(model0, model1)
    return TestProcedure(
        statistic_name="log_likelihood_ratio",
        statistic=lambda b: model1.log_likelihood(b) - model0.log_likelihood(b),
        threshold=0.0,
        direction=Direction.GE,
        provenance="lemma1",
        row_statistic=lambda m: model1.row_log_likelihood(m) - model0.row_log_likelihood(m),
    )


def normal_mean_test(theta0: float, theta1: float, sigma: float) -> TestProcedure:
    """Midpoint rule for the normal mean with known sigma."""
    if not sigma > 0.0:
        raise ValueError(f"sigma must be positive, got {sigma!r}")
    if theta0 == theta1:
        raise DegenerateProblemError("theta0 and theta1 must differ")
    increasing = theta1 > theta0
    return TestProcedure(
        statistic_name="sample_mean",
        statistic=lambda b: b.mean,
        threshold=0.5 * (theta0 + theta1),
        direction=Direction.GE if increasing else Direction.LE,
        provenance="example1" if increasing else "example2",
        row_statistic=lambda m: m.mean(axis=1),
    )


def log_ratio_constant(sigma0_sq: float, sigma1_sq: float) -> float:
    """c = s1/(s1 - s0) * log(s1/s0); per-observation threshold constant."""
    if not (sigma0_sq > 0.0 and sigma1_sq > 0.0):
        raise ValueError("both variances must be positive")
    if sigma0_sq == sigma1_sq:
        raise DegenerateProblemError("the two variances must differ")
    return (sigma1_sq / (sigma1_sq - sigma0_sq)
            * (math.log(sigma1_sq) - math.log(sigma0_sq)))


def normal_variance_test(theta: float, sigma0_sq: float, sigma1_sq: float,
                         n: int) -> TestProcedure:
    """Threshold rule on sum((x - theta)/sigma0)^2 for the normal variance.

    Rejects above n*c when sigma1^2 > sigma0^2; dividing the log ratio
    comparison by the then-negative variance gap flips the inequality, so
    the opposite ordering rejects below the same threshold.
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n!r}")
    c = log_ratio_constant(sigma0_sq, sigma1_sq)
    sigma0 = math.sqrt(sigma0_sq)

    def statistic(b):
        return math.fsum(((x - theta) / sigma0) ** 2 for x in b.observations)

    return TestProcedure(
        statistic_name="scaled_sq_deviation_sum",
        statistic=statistic,
        threshold=n * c,
        direction=Direction.GE if sigma1_sq > sigma0_sq else Direction.LE,
        provenance="example3",
        row_statistic=lambda m: ((m - theta) ** 2).sum(axis=1) / sigma0_sq,
    )


def expfam_test(model: ExpFamilyModel, theta0: float, theta1: float,
                n: int) -> TestProcedure:
    """Threshold rule on the sufficient-statistic sum for an exponential family.

    ``model`` supplies the family's structure (c, Q, T); its own parameter
    value is irrelevant here.
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n!r}")
    dq = model.Q(theta1) - model.Q(theta0)
    if dq == 0.0:
        raise DegenerateProblemError(
            "Q(theta1) equals Q(theta0); the hypotheses are indistinguishable")
    threshold = n * (math.log(model.c(theta0)) - math.log(model.c(theta1))) / dq
    return TestProcedure(
        statistic_name="sufficient_statistic_sum",
        statistic=lambda b: math.fsum(float(model.T(x)) for x in b.observations),
        threshold=threshold,
        direction=Direction.GE if dq > 0.0 else Direction.LE,
        provenance="example4",
        row_statistic=lambda m: np.asarray(model.T(m)).sum(axis=1),
    )


def fixed_alpha_comparator(theta0: float, sigma: float, n: int, alpha: float,
                           critical_z: float | None = None) -> TestProcedure:
    """Conventional level-alpha z-test: reject when (mean - theta0)/(sigma/sqrt n)
    clears the upper alpha quantile.

    ``critical_z`` overrides the exact quantile (e.g. the rounded 1.64 used
    in printed tables); the reported size then follows the override, not the
    nominal alpha.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    if not sigma > 0.0:
        raise ValueError(f"sigma must be positive, got {sigma!r}")
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n!r}")
    z = float(critical_z) if critical_z is not None else std_normal_quantile(1.0 - alpha)
    scale = sigma / math.sqrt(n)
    return TestProcedure(
        statistic_name="z_score",
        statistic=lambda b: (b.mean - theta0) / scale,
        threshold=z,
        direction=Direction.GE,
        provenance="fixed-alpha",
        row_statistic=lambda m: (m.mean(axis=1) - theta0) / scale,
    )
