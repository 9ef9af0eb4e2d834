"""Seeded, splittable random streams behind every Monte Carlo routine.

Generator contract (fixed for a given release; reproducibility is promised
per version, not across versions):

* Stream addressing.  Each (master seed, domain, row) triple names an
  independent substream, ``stream = domain * 2**32 + row``.  Domains keep
  distinct purposes apart (null-hypothesis draws, alternative draws, trial
  parameters, ...); rows index replications.  Replication i therefore sees
  the same data regardless of worker count or completion order, so results
  reduce deterministically.

* Bitstream.  Per-stream xoshiro256++ (Blackman and Vigna).  The four state
  words come from the SplitMix64 sequence seeded at
  ``key = mix64(seed XOR mix64(stream * GOLDEN + GOLDEN))``, where ``mix64``
  is the SplitMix64 finalizer and ``GOLDEN = 0x9E3779B97F4A7C15``; the
  all-zero state (probability ~2**-256) is patched to a nonzero one.

* Uniforms.  ``((out >> 11) + 0.5) * 2**-53``: exact float arithmetic,
  strictly inside (0, 1).

* Normals.  Box-Muller pairs, exact in distribution (no CLT summation):
  consecutive uniforms u1, u2 give radius sqrt(-2 ln u1) and angle
  2*pi*u2; odd row lengths discard the trailing sine variate.

Two interchangeable backends implement the contract: the compiled module
``optest._rng_cy`` (preferred when it imported cleanly) and the vectorized
numpy module ``optest._rng_py``.  Their uint64 streams and uniform matrices
are bit-identical; normal variates may differ by a few ulps because libm and
numpy round log/cos/sin differently.  Set ``OPTEST_BACKEND=python`` or
``OPTEST_BACKEND=native`` to force the choice at import time.
"""

from __future__ import annotations

import os

import numpy as np

from optest import _rng_py

try:
    from optest import _rng_cy
except ImportError:  # pure-Python install or failed extension build
    _rng_cy = None

__all__ = [
    "uniform_matrix",
    "normal_matrix",
    "backend_name",
    "available_backends",
    "get_backend",
]

_MASK64 = 2**64 - 1
_LIMIT32 = 2**32


def _select_backend():
    requested = os.environ.get("OPTEST_BACKEND", "auto").strip().lower()
    if requested in ("", "auto"):
        return _rng_cy if _rng_cy is not None else _rng_py
    if requested in ("native", "cython"):
        if _rng_cy is None:
            raise ImportError(
                "OPTEST_BACKEND=native requested but the compiled backend is "
                "not importable; rebuild the extension or unset the variable")
        return _rng_cy
    if requested in ("python", "numpy"):
        return _rng_py
    raise ValueError(f"unknown OPTEST_BACKEND value {requested!r}")


_ACTIVE = _select_backend()


def backend_name() -> str:
    """Name of the backend selected at import: 'native' or 'python'."""
    return "native" if _ACTIVE is _rng_cy else "python"


def available_backends() -> dict[str, object]:
    backends: dict[str, object] = {"python": _rng_py}
    if _rng_cy is not None:
        backends["native"] = _rng_cy
    return backends


def get_backend(name: str):
    try:
        return available_backends()[name]
    except KeyError:
        raise ValueError(f"backend {name!r} is not available") from None


def _checked(seed: int, domain: int, reps: int, n: int) -> int:
    if not 0 <= domain < _LIMIT32:
        raise ValueError(f"domain must lie in [0, 2**32), got {domain!r}")
    if not 0 <= reps < _LIMIT32:
        raise ValueError(f"reps must lie in [0, 2**32), got {reps!r}")
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n!r}")
    return int(seed) & _MASK64


def uniform_matrix(seed: int, domain: int, reps: int, n: int) -> np.ndarray:
    """(reps, n) matrix of uniforms in (0, 1); row i is substream (domain, i)."""
    return _ACTIVE.uniform_matrix(_checked(seed, domain, reps, n), domain, reps, n)


def normal_matrix(seed: int, domain: int, reps: int, n: int,
                  mu: float = 0.0, sigma: float = 1.0) -> np.ndarray:
    """(reps, n) matrix of N(mu, sigma^2) draws; row i is substream (domain, i)."""
    if not sigma > 0.0:
        raise ValueError(f"sigma must be positive, got {sigma!r}")
    return _ACTIVE.normal_matrix(
        _checked(seed, domain, reps, n), domain, reps, n, mu, sigma)
