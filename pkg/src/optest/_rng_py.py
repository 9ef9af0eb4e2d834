"""Vectorized numpy backend for the seeded stream generator.

Produces the same bitstream as the compiled backend: per-stream xoshiro256++
states derived with the SplitMix64 finalizer (see ``optest.rng`` for the full
contract).  All streams of one matrix are stepped in lockstep, one column per
draw, so cell (row, col) holds draw ``col`` of stream ``row`` exactly as the
scalar per-row loop would produce it.
"""

from __future__ import annotations

import numpy as np

_U64 = np.uint64
_GOLDEN = _U64(0x9E3779B97F4A7C15)
_MIX_A = _U64(0xBF58476D1CE4E5B9)
_MIX_B = _U64(0x94D049BB133111EB)
_TWO_PI = 2.0 * np.pi
_SCALE = 2.0 ** -53


def _mix(z: np.ndarray) -> np.ndarray:
    # SplitMix64 finalizer; uint64 arithmetic wraps mod 2**64 by design.
    z = (z ^ (z >> _U64(30))) * _MIX_A
    z = (z ^ (z >> _U64(27))) * _MIX_B
    return z ^ (z >> _U64(31))


def _rotl(x: np.ndarray, k: int) -> np.ndarray:
    return (x << _U64(k)) | (x >> _U64(64 - k))


# j * GOLDEN mod 2**64 for j = 1..4; precomputed so numpy never sees a
# scalar multiply that would warn on the intended wraparound
_STATE_OFFSETS = tuple(_U64((j * 0x9E3779B97F4A7C15) % 2**64) for j in (1, 2, 3, 4))


def _init_states(seed: int, domain: int, reps: int) -> list[np.ndarray]:
    stream = (_U64(domain) << _U64(32)) + np.arange(reps, dtype=np.uint64)
    key = _mix(_U64(seed) ^ _mix(stream * _GOLDEN + _GOLDEN))
    state = [_mix(key + offset) for offset in _STATE_OFFSETS]
    dead = (state[0] | state[1] | state[2] | state[3]) == _U64(0)
    if dead.any():
        state[3] = np.where(dead, _GOLDEN, state[3])
    return state


def _next(state: list[np.ndarray]) -> np.ndarray:
    s0, s1, s2, s3 = state
    out = _rotl(s0 + s3, 23) + s0
    t = s1 << _U64(17)
    s2 = s2 ^ s0
    s3 = s3 ^ s1
    s1 = s1 ^ s2
    s0 = s0 ^ s3
    s2 = s2 ^ t
    s3 = _rotl(s3, 45)
    state[0], state[1], state[2], state[3] = s0, s1, s2, s3
    return out


def _next_uniform(state: list[np.ndarray]) -> np.ndarray:
    # ((out >> 11) + 0.5) * 2**-53 is exact and lands strictly inside (0, 1).
    return ((_next(state) >> _U64(11)).astype(np.float64) + 0.5) * _SCALE


def uniform_matrix(seed: int, domain: int, reps: int, n: int) -> np.ndarray:
    state = _init_states(seed, domain, reps)
    out = np.empty((reps, n), dtype=np.float64)
    for j in range(n):
        out[:, j] = _next_uniform(state)
    return out


def normal_matrix(seed: int, domain: int, reps: int, n: int,
                  mu: float = 0.0, sigma: float = 1.0) -> np.ndarray:
    state = _init_states(seed, domain, reps)
    out = np.empty((reps, n), dtype=np.float64)
    for j in range(0, n, 2):
        u1 = _next_uniform(state)
        u2 = _next_uniform(state)
        radius = np.sqrt(-2.0 * np.log(u1))
        angle = _TWO_PI * u2
        out[:, j] = mu + sigma * (radius * np.cos(angle))
        if j + 1 < n:
            out[:, j + 1] = mu + sigma * (radius * np.sin(angle))
    return out
