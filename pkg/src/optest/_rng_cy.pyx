# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled backend for the seeded stream generator.

Same bitstream as ``optest._rng_py``; see ``optest.rng`` for the contract.
Each matrix row is one xoshiro256++ stream, generated in a tight C loop.
"""

from libc.math cimport cos, log, sin, sqrt
from libc.stdint cimport uint64_t

import numpy as np

cdef uint64_t _GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t _MIX_A = 0xBF58476D1CE4E5B9ULL
cdef uint64_t _MIX_B = 0x94D049BB133111EBULL
cdef double _TWO_PI = 6.283185307179586476925287
cdef double _SCALE = 1.0 / 9007199254740992.0  # 2**-53


cdef inline uint64_t _mix(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * _MIX_A
    z = (z ^ (z >> 27)) * _MIX_B
    return z ^ (z >> 31)


cdef inline uint64_t _rotl(uint64_t x, int k) nogil:
    return (x << k) | (x >> (64 - k))


cdef struct _State:
    uint64_t s0
    uint64_t s1
    uint64_t s2
    uint64_t s3


cdef inline void _seed_state(_State *st, uint64_t seed, uint64_t stream) nogil:
    cdef uint64_t key = _mix(seed ^ _mix(stream * _GOLDEN + _GOLDEN))
    st.s0 = _mix(key + _GOLDEN)
    st.s1 = _mix(key + 2 * _GOLDEN)
    st.s2 = _mix(key + 3 * _GOLDEN)
    st.s3 = _mix(key + 4 * _GOLDEN)
    if (st.s0 | st.s1 | st.s2 | st.s3) == 0:
        st.s3 = _GOLDEN


cdef inline uint64_t _next(_State *st) nogil:
    cdef uint64_t out = _rotl(st.s0 + st.s3, 23) + st.s0
    cdef uint64_t t = st.s1 << 17
    st.s2 ^= st.s0
    st.s3 ^= st.s1
    st.s1 ^= st.s2
    st.s0 ^= st.s3
    st.s2 ^= t
    st.s3 = _rotl(st.s3, 45)
    return out


cdef inline double _next_uniform(_State *st) nogil:
    return (<double> (_next(st) >> 11) + 0.5) * _SCALE


def uniform_matrix(seed, domain, reps, n):
    out = np.empty((reps, n), dtype=np.float64)
    cdef double[:, ::1] view = out
    cdef uint64_t useed = <uint64_t> seed
    cdef uint64_t base = (<uint64_t> domain) << 32
    cdef Py_ssize_t rr = reps, nn = n, r, j
    cdef _State st
    with nogil:
        for r in range(rr):
            _seed_state(&st, useed, base + <uint64_t> r)
            for j in range(nn):
                view[r, j] = _next_uniform(&st)
    return out


def normal_matrix(seed, domain, reps, n, double mu=0.0, double sigma=1.0):
    out = np.empty((reps, n), dtype=np.float64)
    cdef double[:, ::1] view = out
    cdef uint64_t useed = <uint64_t> seed
    cdef uint64_t base = (<uint64_t> domain) << 32
    cdef Py_ssize_t rr = reps, nn = n, r, j
    cdef double u1, u2, radius, angle
    cdef _State st
    with nogil:
        for r in range(rr):
            _seed_state(&st, useed, base + <uint64_t> r)
            j = 0
            while j < nn:
                u1 = _next_uniform(&st)
                u2 = _next_uniform(&st)
                radius = sqrt(-2.0 * log(u1))
                angle = _TWO_PI * u2
                view[r, j] = mu + sigma * (radius * cos(angle))
                if j + 1 < nn:
                    view[r, j + 1] = mu + sigma * (radius * sin(angle))
                j += 2
    return out
