"""Unknown-variance plug-in test for the normal mean.

When sigma^2 is unknown, each hypothesis gets the likelihood maximized over
the variance: the MLE under theta_i is the mean squared deviation about
theta_i, and the profiled log likelihood collapses to
``-(n/2) * (log(2*pi*s2_hat) + 1)``.  Rejecting when the profiled likelihood
under theta1 is at least the one under theta0 reduces, after simplification,
to the same midpoint rule on the sample mean as the known-variance optimum
test; :func:`check_plugin_equivalence` verifies that reduction empirically
rather than taking the algebra on faith.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from optest import rng
from optest.exceptions import DegenerateProblemError, DegenerateSampleError
from optest.models import SampleLike, as_batch
from optest.procedures import Direction, TestProcedure

__all__ = [
    "mle_sigma2",
    "ProfileLikelihood",
    "profile_log_likelihood",
    "plugin_test",
    "check_plugin_equivalence",
    "PluginEquivalenceReport",
]

_LOG_2PI = math.log(2.0 * math.pi)

# Stream domains for the equivalence sweep: one for trial parameters, one
# for the standard-normal data pool.
_DOMAIN_TRIAL_PARAMS = 2
_DOMAIN_TRIAL_DATA = 3

_TRIAL_SIGMAS = (0.1, 1.0, 10.0)
_TRIAL_MAX_N = 20


def mle_sigma2(sample: SampleLike, theta_i: float) -> float:
    """Maximum likelihood variance under a fixed mean: mean((x - theta_i)^2)."""
    b = as_batch(sample)
    return math.fsum((x - theta_i) ** 2 for x in b.observations) / b.n


@dataclass(frozen=True)
class ProfileLikelihood:
    """A profiled (variance-maximized) log likelihood and its maximizer."""

    log_value: float
    sigma2_hat: float


def profile_log_likelihood(sample: SampleLike, theta_i: float) -> ProfileLikelihood:
    """log of the likelihood maximized over the variance, under mean theta_i."""
    b = as_batch(sample)
    s2 = mle_sigma2(b, theta_i)
    if s2 == 0.0:
        raise DegenerateSampleError(
            "zero variance estimate: every observation equals the hypothesized "
            "mean, so the profiled likelihood is unbounded")
    return ProfileLikelihood(
        log_value=-0.5 * b.n * (_LOG_2PI + math.log(s2) + 1.0),
        sigma2_hat=s2,
    )


def plugin_test(theta0: float, theta1: float) -> TestProcedure:
    """Reject when the profiled likelihood under theta1 is >= the one under
    theta0; equivalently when (n/2) log(s2_hat0 / s2_hat1) >= 0.

    A one-sided zero variance estimate decides for that hypothesis (its
    profiled likelihood is unbounded); with theta0 != theta1 both estimates
    cannot vanish at once, but the guard stays for defensive clarity.
    """
    if theta0 == theta1:
        raise DegenerateProblemError("theta0 and theta1 must differ")

    def statistic(b) -> float:
        s2_0 = mle_sigma2(b, theta0)
        s2_1 = mle_sigma2(b, theta1)
        if s2_0 == 0.0 and s2_1 == 0.0:
            raise DegenerateSampleError("both variance estimates are zero")
        if s2_1 == 0.0:
            return math.inf
        if s2_0 == 0.0:
            return -math.inf
        return 0.5 * b.n * math.log(s2_0 / s2_1)

    def row_statistic(matrix: np.ndarray) -> np.ndarray:
        n = matrix.shape[1]
        s2_0 = ((matrix - theta0) ** 2).mean(axis=1)
        s2_1 = ((matrix - theta1) ** 2).mean(axis=1)
        if np.any((s2_0 == 0.0) & (s2_1 == 0.0)):
            raise DegenerateSampleError("both variance estimates are zero")
        with np.errstate(divide="ignore"):
            # one-sided zeros become +/- inf, which the threshold handles
            return 0.5 * n * (np.log(s2_0) - np.log(s2_1))

    return TestProcedure(
        statistic_name="profile_log_likelihood_ratio",
        statistic=statistic,
        threshold=0.0,
        direction=Direction.GE,
        provenance="plugin",
        row_statistic=row_statistic,
    )


@dataclass(frozen=True)
class PluginEquivalenceReport:
    """Outcome of comparing the plug-in rule against the midpoint rule."""

    trials: int
    mismatches: int
    excluded_ties: int

    def to_dict(self) -> dict:
        return {"trials": self.trials, "mismatches": self.mismatches,
                "excluded_ties": self.excluded_ties}


def check_plugin_equivalence(theta0: float, theta1: float, trials: int,
                             seed: int) -> PluginEquivalenceReport:
    """Compare plug-in decisions against the known-variance midpoint rule on
    randomized samples (varied n, data scale, and true mean).

    Samples whose mean lands within 1e-12 of the midpoint are excluded as
    tie neighborhoods and counted separately.
    """
    if trials < 0:
        raise ValueError(f"trials must be nonnegative, got {trials!r}")
    if theta0 == theta1:
        raise DegenerateProblemError("theta0 and theta1 must differ")
    if trials == 0:
        return PluginEquivalenceReport(trials=0, mismatches=0, excluded_ties=0)

    test = plugin_test(theta0, theta1)
    midpoint = 0.5 * (theta0 + theta1)
    increasing = theta1 > theta0

    params = rng.uniform_matrix(seed, _DOMAIN_TRIAL_PARAMS, trials, 3)
    pool = rng.normal_matrix(seed, _DOMAIN_TRIAL_DATA, trials, _TRIAL_MAX_N)
    lo = min(theta0, theta1) - 2.0
    span = abs(theta1 - theta0) + 4.0

    mismatches = 0
    excluded = 0
    for t in range(trials):
        n_t = 1 + int(params[t, 0] * _TRIAL_MAX_N)
        sigma_t = _TRIAL_SIGMAS[int(params[t, 1] * len(_TRIAL_SIGMAS))]
        mu_t = lo + params[t, 2] * span
        x = mu_t + sigma_t * pool[t, :n_t]
        mean = float(x.mean())
        if abs(mean - midpoint) < 1e-12:
            excluded += 1
            continue
        midpoint_rejects = mean >= midpoint if increasing else mean <= midpoint
        if test.rejects(x) != midpoint_rejects:
            mismatches += 1
    return PluginEquivalenceReport(
        trials=trials, mismatches=mismatches, excluded_ties=excluded)
