"""Error probabilities: analytic formulas, Monte Carlo estimation, convergence
sweeps, and the exhaustive-region optimality oracle.

Analytic formulas cover the closed-form rules (normal mean midpoint, normal
variance threshold, one-sided score rule, the unbiased rule's size, and the
fixed-alpha comparator).  ``monte_carlo_errors`` estimates alpha and beta for
any procedure by simulation under the seeded-stream contract, so a report is
a pure function of (seed, reps, problem).  ``brute_force_certify`` checks the
likelihood-ratio region against every subset of a small discrete sample
space; it is the independent oracle for the optimality claim, so it
enumerates rather than reasoning about the region's structure.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from optest.dist import chi2_sf, std_normal_cdf, std_normal_quantile
from optest.exceptions import (
    CapacityError,
    DegenerateProblemError,
    UnsupportedFamilyError,
)
from optest.models import ExpFamilyModel, ModelSpec, SimpleTestProblem
from optest.optimum import log_ratio_constant
from optest.procedures import TestProcedure

__all__ = [
    "DOMAIN_NULL",
    "DOMAIN_ALT",
    "ErrorReport",
    "analytic_errors_normal_mean",
    "analytic_errors_normal_variance",
    "analytic_errors_locally_optimum",
    "analytic_alpha_lou",
    "analytic_errors_fixed_alpha",
    "monte_carlo_errors",
    "DiscreteSpace",
    "discrete_space_from_models",
    "brute_force_certify",
    "CertificationReport",
    "convergence_sweep",
    "SweepResult",
]

# Stream domains: replication i under H0 reads substream (DOMAIN_NULL, i),
# under H1 substream (DOMAIN_ALT, i).
DOMAIN_NULL = 0
DOMAIN_ALT = 1

_ENUMERATION_CAP = 20  # 2**20 regions stay comfortably under a second

_REPORT_COLUMNS = ("alpha", "beta", "power", "power_minus_size", "method",
                   "se_alpha", "se_beta", "reps", "seed")


def _check_probability(name: str, value: float) -> float:
    value = float(value)
    if not (0.0 <= value <= 1.0) or not math.isfinite(value):
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
    return value


@dataclass(frozen=True)
class ErrorReport:
    """Size, type II error, power, and their difference, with provenance.

    ``power`` and ``power_minus_size`` are derived in the constructors, so
    the identities power = 1 - beta and power_minus_size = power - alpha
    hold exactly.
    """

    alpha: float
    beta: float
    power: float
    power_minus_size: float
    method: str
    se_alpha: float | None = None
    se_beta: float | None = None
    reps: int | None = None
    seed: int | None = None

    @classmethod
    def analytic(cls, alpha: float, beta: float) -> "ErrorReport":
        alpha = _check_probability("alpha", alpha)
        beta = _check_probability("beta", beta)
        return cls(alpha=alpha, beta=beta, power=1.0 - beta,
                   power_minus_size=(1.0 - beta) - alpha, method="analytic")

    @classmethod
    def monte_carlo(cls, alpha: float, beta: float, se_alpha: float,
                    se_beta: float, reps: int, seed: int) -> "ErrorReport":
        alpha = _check_probability("alpha", alpha)
        beta = _check_probability("beta", beta)
        return cls(alpha=alpha, beta=beta, power=1.0 - beta,
                   power_minus_size=(1.0 - beta) - alpha, method="monte-carlo",
                   se_alpha=float(se_alpha), se_beta=float(se_beta),
                   reps=int(reps), seed=int(seed))

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in _REPORT_COLUMNS}


def analytic_errors_normal_mean(theta0: float, theta1: float, sigma: float,
                                n: int) -> ErrorReport:
    """Errors of the midpoint rule: alpha = beta = 1 - Phi(sqrt(n)|dtheta|/(2 sigma)).

    The expression is evaluated once and reused, so alpha == beta exactly.
    """
    if theta0 == theta1:
        raise DegenerateProblemError("theta0 and theta1 must differ")
    if not sigma > 0.0:
        raise ValueError(f"sigma must be positive, got {sigma!r}")
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n!r}")
    both = 1.0 - std_normal_cdf(math.sqrt(n) * abs(theta1 - theta0) / (2.0 * sigma))
    return ErrorReport.analytic(alpha=both, beta=both)


def analytic_errors_normal_variance(theta: float, sigma0_sq: float,
                                    sigma1_sq: float, n: int) -> ErrorReport:
    """Errors of the variance threshold rule via the chi-square law with n d.f.

    For sigma1^2 > sigma0^2: alpha = P[X >= n c] and power = P[X >= n c
    sigma0^2/sigma1^2]; the opposite ordering rejects below the threshold,
    so both probabilities complement.
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n!r}")
    c = log_ratio_constant(sigma0_sq, sigma1_sq)  # validates the variances
    upper_null = chi2_sf(n * c, n)
    upper_alt = chi2_sf(n * c * sigma0_sq / sigma1_sq, n)
    if sigma1_sq > sigma0_sq:
        alpha, power = upper_null, upper_alt
    else:
        alpha, power = 1.0 - upper_null, 1.0 - upper_alt
    return ErrorReport.analytic(alpha=alpha, beta=1.0 - power)


def analytic_errors_locally_optimum(theta0: float, theta1: float, sigma: float,
                                    n: int) -> ErrorReport:
    """Errors of the one-sided score rule (mean threshold theta0 + sigma^2/n):
    alpha = 1 - Phi(sigma/sqrt n), power = 1 - Phi(-(theta1-theta0) sqrt n / sigma
    + sigma/sqrt n).  Defined for theta1 > theta0 only."""
    if theta1 < theta0:
        raise UnsupportedFamilyError(
            "the one-sided formula needs theta1 > theta0; for the other side "
            "build a less-side variant and simulate")
    if not sigma > 0.0:
        raise ValueError(f"sigma must be positive, got {sigma!r}")
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n!r}")
    root_n = math.sqrt(n)
    alpha = 1.0 - std_normal_cdf(sigma / root_n)
    power = 1.0 - std_normal_cdf(
        -(theta1 - theta0) * root_n / sigma + sigma / root_n)
    return ErrorReport.analytic(alpha=alpha, beta=1.0 - power)


def analytic_alpha_lou(theta0: float, sigma: float, n: int) -> float:
    """Size of the locally optimum unbiased rule: P[chi2_1 >= 1 + sigma^2/n].

    The statistic n(mean - theta0)^2/sigma^2 is chi-square with 1 d.f. under
    the null.  Note the n -> infinity limit is P[chi2_1 >= 1] ~ 0.317, not
    zero: the fixed constant 1 in the rule keeps the size from vanishing.
    """
    if not sigma > 0.0:
        raise ValueError(f"sigma must be positive, got {sigma!r}")
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n!r}")
    return chi2_sf(1.0 + sigma**2 / n, 1)


def analytic_errors_fixed_alpha(theta0: float, theta1: float, sigma: float,
                                n: int, alpha: float,
                                critical_z: float | None = None) -> ErrorReport:
    """Errors of the conventional one-sided z-test.

    With ``critical_z`` given (e.g. a rounded table value), the reported
    size is the actual 1 - Phi(z) rather than the nominal alpha.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    if not sigma > 0.0:
        raise ValueError(f"sigma must be positive, got {sigma!r}")
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n!r}")
    z = float(critical_z) if critical_z is not None else std_normal_quantile(1.0 - alpha)
    size = 1.0 - std_normal_cdf(z)
    power = 1.0 - std_normal_cdf(z - (theta1 - theta0) * math.sqrt(n) / sigma)
    return ErrorReport.analytic(alpha=size, beta=1.0 - power)


def monte_carlo_errors(test: TestProcedure, model0: ModelSpec, model1: ModelSpec,
                       n: int, reps: int, seed: int) -> ErrorReport:
    """Estimate alpha and beta by simulation with binomial standard errors.

    Replication i draws substream (DOMAIN_NULL, i) under model0 and
    (DOMAIN_ALT, i) under model1, so the report is deterministic in
    (seed, reps) and independent of evaluation order.
    """
    if reps < 100:
        raise ValueError(f"reps must be at least 100, got {reps!r}")
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n!r}")
    null_rejects = test.rejection_mask(model0.sample_matrix(seed, DOMAIN_NULL, reps, n))
    alt_rejects = test.rejection_mask(model1.sample_matrix(seed, DOMAIN_ALT, reps, n))
    alpha = float(null_rejects.mean())
    beta = 1.0 - float(alt_rejects.mean())
    return ErrorReport.monte_carlo(
        alpha=alpha,
        beta=beta,
        se_alpha=math.sqrt(alpha * (1.0 - alpha) / reps),
        se_beta=math.sqrt(beta * (1.0 - beta) / reps),
        reps=reps,
        seed=seed,
    )


@dataclass(frozen=True, eq=False)
class DiscreteSpace:
    """A finite sample space with per-point probabilities under each hypothesis."""

    points: tuple
    p0: np.ndarray
    p1: np.ndarray

    def __post_init__(self):
        p0 = np.asarray(self.p0, dtype=np.float64)
        p1 = np.asarray(self.p1, dtype=np.float64)
        if len(self.points) != len(p0) or len(p0) != len(p1):
            raise ValueError("points, p0, and p1 must have matching lengths")
        if (p0 < 0.0).any() or (p1 < 0.0).any():
            raise ValueError("probability masses must be nonnegative")
        for name, masses in (("p0", p0), ("p1", p1)):
            if abs(masses.sum() - 1.0) > 1e-9:
                raise ValueError(f"{name} must sum to 1 within 1e-9")
        object.__setattr__(self, "p0", p0)
        object.__setattr__(self, "p1", p1)

    @property
    def size(self) -> int:
        return len(self.points)


def discrete_space_from_models(model0: ExpFamilyModel, model1: ExpFamilyModel,
                               n: int, cap: int = _ENUMERATION_CAP) -> DiscreteSpace:
    """Enumerate the n-fold product sample space of a finite discrete family."""
    if model0.support.points is None or model0.support.kind != "discrete":
        raise UnsupportedFamilyError(
            f"family {model0.family!r} has no finite discrete support to enumerate")
    base = model0.support.points
    total = len(base) ** n
    if total > cap:
        raise CapacityError(
            f"product space has {total} points, above the cap of {cap}")
    points = tuple(itertools.product(base, repeat=n))
    p0 = np.array([math.exp(model0.log_likelihood(pt)) for pt in points])
    p1 = np.array([math.exp(model1.log_likelihood(pt)) for pt in points])
    return DiscreteSpace(points=points, p0=p0, p1=p1)


@dataclass(frozen=True, eq=False)
class CertificationReport:
    """Outcome of exhaustively checking the likelihood-ratio region."""

    n_points: int
    n_regions: int
    region_indices: tuple[int, ...]
    region_value: float
    max_value: float
    n_cooptimal: int
    alpha: float
    beta: float
    certified: bool

    def to_dict(self) -> dict:
        return {
            "n_points": self.n_points,
            "n_regions": self.n_regions,
            "region_indices": list(self.region_indices),
            "region_value": self.region_value,
            "max_value": self.max_value,
            "n_cooptimal": self.n_cooptimal,
            "alpha": self.alpha,
            "beta": self.beta,
            "certified": self.certified,
        }


def brute_force_certify(space: DiscreteSpace) -> CertificationReport:
    """Check that the region {L1 >= L0} attains the maximum of power minus
    size over all 2^|S| regions of a small discrete space.

    The maximum is found by evaluating every region's value, not by using
    the region's structure, so this is an independent oracle.  Ties within
    1e-12 of the maximum count as co-optimal.
    """
    m = space.size
    if m > _ENUMERATION_CAP:
        raise CapacityError(
            f"space has {m} points; enumeration is capped at {_ENUMERATION_CAP}")
    gain = space.p1 - space.p0
    # subset sums of `gain` over all 2^m regions, built by doubling
    values = np.zeros(1, dtype=np.float64)
    for g in gain:
        values = np.concatenate([values, values + g])
    max_value = float(values.max())
    n_cooptimal = int((values >= max_value - 1e-12).sum())

    member = space.p1 >= space.p0  # ties reject, matching the closed regions
    region_value = float(gain[member].sum())
    alpha = float(space.p0[member].sum())
    power = float(space.p1[member].sum())
    return CertificationReport(
        n_points=m,
        n_regions=int(values.size),
        region_indices=tuple(int(i) for i in np.flatnonzero(member)),
        region_value=region_value,
        max_value=max_value,
        n_cooptimal=n_cooptimal,
        alpha=alpha,
        beta=1.0 - power,
        certified=region_value >= max_value - 1e-12,
    )


@dataclass(frozen=True)
class SweepResult:
    """Analytic error reports along a sample-size grid."""

    rows: tuple[tuple[int, ErrorReport], ...]
    alpha_beta_decreasing: bool | None  # None when the grid has one point

    def to_rows(self) -> list[dict]:
        out = []
        for n, report in self.rows:
            row = {"n": n}
            row.update(report.to_dict())
            out.append(row)
        return out


def convergence_sweep(problem: SimpleTestProblem,
                      n_grid: Sequence[int]) -> SweepResult:
    """Analytic alpha and beta along an increasing grid of sample sizes.

    Reports whether alpha + beta decreases strictly along the grid (None for
    singleton grids, where the question is vacuous).
    """
    grid = [int(n) for n in n_grid]
    if not grid:
        raise ValueError("n_grid must be nonempty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("n_grid must be strictly increasing")
    if problem.family == "normal-mean":
        reports = [
            analytic_errors_normal_mean(problem.theta0, problem.theta1,
                                        problem.sigma, n)
            for n in grid
        ]
    elif problem.family == "normal-variance":
        reports = [
            analytic_errors_normal_variance(problem.theta, problem.theta0,
                                            problem.theta1, n)
            for n in grid
        ]
    else:
        raise UnsupportedFamilyError(
            f"no analytic sweep for family {problem.family!r}; use simulation")
    sums = [r.alpha + r.beta for r in reports]
    decreasing = None
    if len(grid) > 1:
        decreasing = all(b < a for a, b in zip(sums, sums[1:]))
    return SweepResult(rows=tuple(zip(grid, reports)),
                       alpha_beta_decreasing=decreasing)
