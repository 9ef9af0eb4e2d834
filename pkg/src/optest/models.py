"""Likelihood models: normal mean, normal variance, and exponential families.

Every model exposes the same quartet used throughout the package:

* ``log_likelihood(sample)``, evaluated at the model's own parameter;
* ``score_ratio(theta0, sample)``, the score d/dtheta log L at theta0;
* ``second_ratio(theta0, sample)``, the ratio L''/L at theta0, computed from
  the registered closed forms as score^2 + d(score)/dtheta (finite
  differences live in the tests as an independent oracle, never here);
* ``sample_matrix(seed, domain, reps, n)``, seeded i.i.d. draws with one
  replication per row, honoring the stream contract of ``optest.rng``.

``row_*`` variants evaluate a whole replication matrix at once.  Models are
frozen dataclasses, pure after construction, and safe to share across
threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Protocol, Sequence, Union

import numpy as np

from optest import rng
from optest.exceptions import DegenerateProblemError, UnsupportedFamilyError

__all__ = [
    "SampleBatch",
    "as_batch",
    "Support",
    "NormalMeanModel",
    "NormalVarianceModel",
    "ExpFamilyModel",
    "SimpleTestProblem",
    "bernoulli",
    "poisson",
    "exponential_rate",
    "normal_mean_expfam",
    "log_likelihood",
    "score_ratio",
    "second_ratio",
    "FAMILY_NAMES",
]

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class SampleBatch:
    """An ordered batch of n i.i.d. observations."""

    observations: tuple[float, ...]

    def __post_init__(self):
        obs = tuple(float(x) for x in self.observations)
        if len(obs) < 1:
            raise ValueError("a sample needs at least one observation")
        if not all(math.isfinite(x) for x in obs):
            raise ValueError("all observations must be finite")
        object.__setattr__(self, "observations", obs)

    @property
    def n(self) -> int:
        return len(self.observations)

    @property
    def mean(self) -> float:
        return math.fsum(self.observations) / self.n

    def as_array(self) -> np.ndarray:
        return np.asarray(self.observations, dtype=np.float64)


SampleLike = Union[SampleBatch, Sequence[float], np.ndarray]


def as_batch(sample: SampleLike) -> SampleBatch:
    if isinstance(sample, SampleBatch):
        return sample
    return SampleBatch(tuple(sample))


@dataclass(frozen=True)
class Support:
    """Where a model's observations may live."""

    kind: str  # "continuous" or "discrete"
    points: tuple[float, ...] | None = None  # finite discrete support, else None
    lower: float = -math.inf
    upper: float = math.inf
    integer: bool = False

    def contains(self, x: float) -> bool:
        if self.kind == "discrete":
            if self.points is not None:
                return x in self.points
            if self.integer and x != int(x):
                return False
        return self.lower <= x <= self.upper


_REAL_LINE = Support("continuous")
_NONNEG_REALS = Support("continuous", lower=0.0)


class ModelSpec(Protocol):
    """Duck-typed interface every model family implements."""

    family: str
    support: Support

    def log_likelihood(self, sample: SampleLike) -> float: ...
    def row_log_likelihood(self, matrix: np.ndarray) -> np.ndarray: ...
    def score_ratio(self, theta0: float, sample: SampleLike) -> float: ...
    def row_score_ratio(self, theta0: float, matrix: np.ndarray) -> np.ndarray: ...
    def second_ratio(self, theta0: float, sample: SampleLike) -> float: ...
    def with_param(self, value: float) -> "ModelSpec": ...
    def sample_matrix(self, seed: int, domain: int, reps: int, n: int) -> np.ndarray: ...


@dataclass(frozen=True)
class NormalMeanModel:
    """N(theta, sigma^2) with known sigma; the mean theta is under test."""

    theta: float
    sigma: float

    family = "normal-mean"
    support = _REAL_LINE

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma > 0.0):
            raise ValueError(f"sigma must be positive and finite, got {self.sigma!r}")
        if not math.isfinite(self.theta):
            raise ValueError(f"theta must be finite, got {self.theta!r}")

    @property
    def param(self) -> float:
        return self.theta

    def with_param(self, value: float) -> "NormalMeanModel":
        return replace(self, theta=float(value))

    def log_likelihood(self, sample: SampleLike) -> float:
        b = as_batch(sample)
        var = self.sigma**2
        ss = math.fsum((x - self.theta) ** 2 for x in b.observations)
        return -0.5 * b.n * (_LOG_2PI + math.log(var)) - ss / (2.0 * var)

    def row_log_likelihood(self, matrix: np.ndarray) -> np.ndarray:
        var = self.sigma**2
        ss = ((matrix - self.theta) ** 2).sum(axis=1)
        return -0.5 * matrix.shape[1] * (_LOG_2PI + math.log(var)) - ss / (2.0 * var)

    def score_ratio(self, theta0: float, sample: SampleLike) -> float:
        b = as_batch(sample)
        return b.n * (b.mean - theta0) / self.sigma**2

    def row_score_ratio(self, theta0: float, matrix: np.ndarray) -> np.ndarray:
        n = matrix.shape[1]
        return n * (matrix.mean(axis=1) - theta0) / self.sigma**2

    def second_ratio(self, theta0: float, sample: SampleLike) -> float:
        s = self.score_ratio(theta0, sample)
        return s * s - as_batch(sample).n / self.sigma**2

    def row_second_ratio(self, theta0: float, matrix: np.ndarray) -> np.ndarray:
        s = self.row_score_ratio(theta0, matrix)
        return s * s - matrix.shape[1] / self.sigma**2

    def sample_matrix(self, seed: int, domain: int, reps: int, n: int) -> np.ndarray:
        return rng.normal_matrix(seed, domain, reps, n, mu=self.theta, sigma=self.sigma)


@dataclass(frozen=True)
class NormalVarianceModel:
    """N(theta, sigma2) with known mean theta; the variance sigma2 is under test.

    The free parameter handed to ``score_ratio``/``with_param`` is the
    variance, not the mean.
    """

    theta: float
    sigma2: float

    family = "normal-variance"
    support = _REAL_LINE

    def __post_init__(self):
        if not (math.isfinite(self.sigma2) and self.sigma2 > 0.0):
            raise ValueError(f"sigma2 must be positive and finite, got {self.sigma2!r}")
        if not math.isfinite(self.theta):
            raise ValueError(f"theta must be finite, got {self.theta!r}")

    @property
    def param(self) -> float:
        return self.sigma2

    def with_param(self, value: float) -> "NormalVarianceModel":
        return replace(self, sigma2=float(value))

    def _sq_dev_sum(self, b: SampleBatch) -> float:
        return math.fsum((x - self.theta) ** 2 for x in b.observations)

    def log_likelihood(self, sample: SampleLike) -> float:
        b = as_batch(sample)
        return (-0.5 * b.n * (_LOG_2PI + math.log(self.sigma2))
                - self._sq_dev_sum(b) / (2.0 * self.sigma2))

    def row_log_likelihood(self, matrix: np.ndarray) -> np.ndarray:
        ss = ((matrix - self.theta) ** 2).sum(axis=1)
        return (-0.5 * matrix.shape[1] * (_LOG_2PI + math.log(self.sigma2))
                - ss / (2.0 * self.sigma2))

    def score_ratio(self, theta0: float, sample: SampleLike) -> float:
        b = as_batch(sample)
        v = float(theta0)
        return -b.n / (2.0 * v) + self._sq_dev_sum(b) / (2.0 * v * v)

    def row_score_ratio(self, theta0: float, matrix: np.ndarray) -> np.ndarray:
        v = float(theta0)
        ss = ((matrix - self.theta) ** 2).sum(axis=1)
        return -matrix.shape[1] / (2.0 * v) + ss / (2.0 * v * v)

    def second_ratio(self, theta0: float, sample: SampleLike) -> float:
        b = as_batch(sample)
        v = float(theta0)
        s = self.score_ratio(theta0, b)
        s_prime = b.n / (2.0 * v * v) - self._sq_dev_sum(b) / (v**3)
        return s * s + s_prime

    def row_second_ratio(self, theta0: float, matrix: np.ndarray) -> np.ndarray:
        v = float(theta0)
        ss = ((matrix - self.theta) ** 2).sum(axis=1)
        s = -matrix.shape[1] / (2.0 * v) + ss / (2.0 * v * v)
        s_prime = matrix.shape[1] / (2.0 * v * v) - ss / (v**3)
        return s * s + s_prime

    def sample_matrix(self, seed: int, domain: int, reps: int, n: int) -> np.ndarray:
        return rng.normal_matrix(
            seed, domain, reps, n, mu=self.theta, sigma=math.sqrt(self.sigma2))


ArrayFunc = Callable[..., object]  # numpy-aware: scalar -> scalar, array -> array


@dataclass(frozen=True)
class ExpFamilyModel:
    """Density c(theta) * exp(Q(theta) T(x)) * h(x); the carrier is kept in logs.

    ``T`` and ``log_h`` must accept scalars and numpy arrays alike.
    Derivative callables are optional: families without them reject
    ``score_ratio``/``second_ratio`` with :class:`UnsupportedFamilyError`,
    and families without a sampler reject ``sample_matrix`` the same way.
    """

    c: Callable[[float], float]
    Q: Callable[[float], float]
    T: ArrayFunc
    log_h: ArrayFunc
    theta: float
    support: Support
    family: str = "exp-family"
    c_prime: Callable[[float], float] | None = None
    c_prime2: Callable[[float], float] | None = None
    Q_prime: Callable[[float], float] | None = None
    Q_prime2: Callable[[float], float] | None = None
    sampler: Callable[[int, int, int, int, float], np.ndarray] | None = None

    @property
    def param(self) -> float:
        return self.theta

    def with_param(self, value: float) -> "ExpFamilyModel":
        return replace(self, theta=float(value))

    def _check_support(self, b: SampleBatch) -> None:
        for x in b.observations:
            if not self.support.contains(x):
                raise ValueError(
                    f"observation {x!r} lies outside the support of family "
                    f"{self.family!r}")

    def log_likelihood(self, sample: SampleLike) -> float:
        b = as_batch(sample)
        self._check_support(b)
        sum_t = math.fsum(float(self.T(x)) for x in b.observations)
        sum_log_h = math.fsum(float(self.log_h(x)) for x in b.observations)
        return b.n * math.log(self.c(self.theta)) + self.Q(self.theta) * sum_t + sum_log_h

    def row_log_likelihood(self, matrix: np.ndarray) -> np.ndarray:
        # Hot path: generated samples are in support by construction, so the
        # per-observation membership check is skipped here.
        n = matrix.shape[1]
        sum_t = np.asarray(self.T(matrix)).sum(axis=1)
        sum_log_h = np.asarray(self.log_h(matrix)).sum(axis=1)
        return n * math.log(self.c(self.theta)) + self.Q(self.theta) * sum_t + sum_log_h

    def _require_first_derivatives(self) -> None:
        if self.c_prime is None or self.Q_prime is None:
            raise UnsupportedFamilyError(
                f"family {self.family!r} has no registered derivatives for the score")

    def _require_second_derivatives(self) -> None:
        self._require_first_derivatives()
        if self.c_prime2 is None or self.Q_prime2 is None:
            raise UnsupportedFamilyError(
                f"family {self.family!r} has no registered second derivatives")

    def _score_terms(self, theta0: float) -> tuple[float, float]:
        c0 = self.c(theta0)
        return self.c_prime(theta0) / c0, self.Q_prime(theta0)

    def _score_slope_terms(self, theta0: float) -> tuple[float, float]:
        c0 = self.c(theta0)
        dc = self.c_prime(theta0)
        return (self.c_prime2(theta0) * c0 - dc * dc) / (c0 * c0), self.Q_prime2(theta0)

    def score_ratio(self, theta0: float, sample: SampleLike) -> float:
        self._require_first_derivatives()
        b = as_batch(sample)
        self._check_support(b)
        dlog_c, dq = self._score_terms(theta0)
        sum_t = math.fsum(float(self.T(x)) for x in b.observations)
        return b.n * dlog_c + dq * sum_t

    def row_score_ratio(self, theta0: float, matrix: np.ndarray) -> np.ndarray:
        self._require_first_derivatives()
        dlog_c, dq = self._score_terms(theta0)
        sum_t = np.asarray(self.T(matrix)).sum(axis=1)
        return matrix.shape[1] * dlog_c + dq * sum_t

    def second_ratio(self, theta0: float, sample: SampleLike) -> float:
        self._require_second_derivatives()
        b = as_batch(sample)
        s = self.score_ratio(theta0, b)
        ddlog_c, ddq = self._score_slope_terms(theta0)
        sum_t = math.fsum(float(self.T(x)) for x in b.observations)
        return s * s + b.n * ddlog_c + ddq * sum_t

    def row_second_ratio(self, theta0: float, matrix: np.ndarray) -> np.ndarray:
        self._require_second_derivatives()
        s = self.row_score_ratio(theta0, matrix)
        ddlog_c, ddq = self._score_slope_terms(theta0)
        sum_t = np.asarray(self.T(matrix)).sum(axis=1)
        return s * s + matrix.shape[1] * ddlog_c + ddq * sum_t

    def sample_matrix(self, seed: int, domain: int, reps: int, n: int) -> np.ndarray:
        if self.sampler is None:
            raise UnsupportedFamilyError(
                f"family {self.family!r} has no registered sampler")
        return self.sampler(seed, domain, reps, n, self.theta)

    def pmf(self, x: float) -> float:
        """Point mass at x (meaningful for discrete supports)."""
        return float(
            self.c(self.theta)
            * math.exp(self.Q(self.theta) * float(self.T(x)) + float(self.log_h(x))))


def _identity(x):
    return x


def _zero_like(x):
    return np.multiply(x, 0.0)


def bernoulli(theta: float) -> ExpFamilyModel:
    """Bernoulli(theta) written as c(t)=1-t, Q(t)=log(t/(1-t)), T(x)=x, h=1."""
    if not 0.0 < theta < 1.0:
        raise ValueError(f"bernoulli needs 0 < theta < 1, got {theta!r}")
    return ExpFamilyModel(
        c=lambda t: 1.0 - t,
        Q=lambda t: math.log(t / (1.0 - t)),
        T=_identity,
        log_h=_zero_like,
        theta=theta,
        support=Support("discrete", points=(0.0, 1.0)),
        family="bernoulli",
        c_prime=lambda t: -1.0,
        c_prime2=lambda t: 0.0,
        Q_prime=lambda t: 1.0 / (t * (1.0 - t)),
        Q_prime2=lambda t: 1.0 / (1.0 - t) ** 2 - 1.0 / t**2,
        sampler=_bernoulli_sampler,
    )


def poisson(theta: float) -> ExpFamilyModel:
    """Poisson(theta) written as c(t)=e^{-t}, Q(t)=log t, T(x)=x, h(x)=1/x!."""
    if not theta > 0.0:
        raise ValueError(f"poisson needs theta > 0, got {theta!r}")
    return ExpFamilyModel(
        c=lambda t: math.exp(-t),
        Q=math.log,
        T=_identity,
        log_h=_neg_log_factorial,
        theta=theta,
        support=Support("discrete", lower=0.0, integer=True),
        family="poisson",
        c_prime=lambda t: -math.exp(-t),
        c_prime2=lambda t: math.exp(-t),
        Q_prime=lambda t: 1.0 / t,
        Q_prime2=lambda t: -1.0 / (t * t),
        sampler=_poisson_sampler,
    )


def exponential_rate(theta: float) -> ExpFamilyModel:
    """Exponential with rate theta: c(t)=t, Q(t)=-t (decreasing), T(x)=x, h=1."""
    if not theta > 0.0:
        raise ValueError(f"exponential_rate needs theta > 0, got {theta!r}")
    return ExpFamilyModel(
        c=_identity,
        Q=lambda t: -t,
        T=_identity,
        log_h=_zero_like,
        theta=theta,
        support=_NONNEG_REALS,
        family="exponential",
        c_prime=lambda t: 1.0,
        c_prime2=lambda t: 0.0,
        Q_prime=lambda t: -1.0,
        Q_prime2=lambda t: 0.0,
        sampler=_exponential_sampler,
    )


def normal_mean_expfam(theta: float, sigma: float) -> ExpFamilyModel:
    """The known-variance normal mean family in exponential-family form."""
    if not sigma > 0.0:
        raise ValueError(f"sigma must be positive, got {sigma!r}")
    var = float(sigma) ** 2
    norm = 1.0 / (sigma * math.sqrt(2.0 * math.pi))

    def c(t: float) -> float:
        return norm * math.exp(-t * t / (2.0 * var))

    return ExpFamilyModel(
        c=c,
        Q=lambda t: t / var,
        T=_identity,
        log_h=lambda x: -np.multiply(x, x) / (2.0 * var),
        theta=theta,
        support=_REAL_LINE,
        family="normal-mean-expfam",
        c_prime=lambda t: c(t) * (-t / var),
        c_prime2=lambda t: c(t) * (t * t / var**2 - 1.0 / var),
        Q_prime=lambda t: 1.0 / var,
        Q_prime2=lambda t: 0.0,
        sampler=lambda seed, domain, reps, n, t: rng.normal_matrix(
            seed, domain, reps, n, mu=t, sigma=sigma),
    )


_LOG_FACTORIAL_CACHE = np.zeros(1)


def _log_factorial_table(kmax: int) -> np.ndarray:
    global _LOG_FACTORIAL_CACHE
    if kmax >= len(_LOG_FACTORIAL_CACHE):
        _LOG_FACTORIAL_CACHE = np.concatenate(
            [[0.0], np.cumsum(np.log(np.arange(1, kmax + 1, dtype=np.float64)))])
    return _LOG_FACTORIAL_CACHE


def _neg_log_factorial(x):
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 0:
        return -math.lgamma(float(arr) + 1.0)
    k = arr.astype(np.int64)
    return -_log_factorial_table(int(k.max(initial=0)))[k]


def _bernoulli_sampler(seed, domain, reps, n, theta):
    u = rng.uniform_matrix(seed, domain, reps, n)
    # inverse c.d.f.: 0 when u <= 1 - theta, else 1
    return (u > 1.0 - theta).astype(np.float64)


def _poisson_sampler(seed, domain, reps, n, theta):
    u = rng.uniform_matrix(seed, domain, reps, n)
    cap = int(theta + 40.0 * math.sqrt(theta) + 25.0)
    pmf = np.empty(cap + 1, dtype=np.float64)
    pmf[0] = math.exp(-theta)
    for k in range(1, cap + 1):
        pmf[k] = pmf[k - 1] * theta / k
    cdf = np.cumsum(pmf)
    # inverse c.d.f.: the smallest k with F(k) >= u; the tail beyond cap has
    # negligible mass (< 1e-200 for the supported parameter range)
    draws = np.searchsorted(cdf, u, side="left")
    return np.minimum(draws, cap).astype(np.float64)


def _exponential_sampler(seed, domain, reps, n, theta):
    u = rng.uniform_matrix(seed, domain, reps, n)
    return -np.log1p(-u) / theta


def log_likelihood(model: ModelSpec, sample: SampleLike) -> float:
    """log L(sample | model's parameter)."""
    return model.log_likelihood(sample)


def score_ratio(model: ModelSpec, theta0: float, sample: SampleLike) -> float:
    """d/dtheta log L evaluated at theta0."""
    return model.score_ratio(theta0, sample)


def second_ratio(model: ModelSpec, theta0: float, sample: SampleLike) -> float:
    """L''/L evaluated at theta0."""
    return model.second_ratio(theta0, sample)


_EXPFAM_BUILDERS: dict[str, Callable[[float], ExpFamilyModel]] = {
    "bernoulli": bernoulli,
    "poisson": poisson,
    "exponential": exponential_rate,
}

FAMILY_NAMES = ("normal-mean", "normal-variance") + tuple(_EXPFAM_BUILDERS)


@dataclass(frozen=True)
class SimpleTestProblem:
    """A simple-vs-simple testing problem: family, the two parameter values,
    fixed nuisance values, and the sample size.

    For ``normal-variance`` the tested parameters theta0/theta1 are the two
    variances and ``theta`` is the known mean; for ``normal-mean``, ``sigma``
    is the known standard deviation.
    """

    family: str
    theta0: float
    theta1: float
    n: int
    sigma: float | None = None
    theta: float | None = None

    def __post_init__(self):
        if self.family not in FAMILY_NAMES:
            raise ValueError(
                f"unknown family {self.family!r}; expected one of {FAMILY_NAMES}")
        if self.theta0 == self.theta1:
            raise DegenerateProblemError(
                "theta0 and theta1 must differ; the hypotheses coincide")
        if self.n < 1:
            raise ValueError(f"n must be at least 1, got {self.n!r}")
        if self.family == "normal-mean" and self.sigma is None:
            raise ValueError("normal-mean problems need sigma")
        if self.family == "normal-variance" and self.theta is None:
            raise ValueError("normal-variance problems need the known mean theta")

    def _model(self, value: float) -> ModelSpec:
        if self.family == "normal-mean":
            return NormalMeanModel(theta=value, sigma=self.sigma)
        if self.family == "normal-variance":
            return NormalVarianceModel(theta=self.theta, sigma2=value)
        return _EXPFAM_BUILDERS[self.family](value)

    def model_pair(self) -> tuple[ModelSpec, ModelSpec]:
        return self._model(self.theta0), self._model(self.theta1)
