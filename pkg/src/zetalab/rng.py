"""Counter-based random numbers keyed by ``(seed, counter)``.

The generator is SplitMix64 evaluated at an arbitrary position: output number
``c`` of the stream whose state starts at ``key`` is ``mix(key + c * GAMMA)``.
Random phases use the prime itself as the counter, so a phase never depends
on which other primes are drawn or in what order.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit, uint64

__all__ = ["GAMMA", "mix64", "stream_key", "uniform", "uniforms", "derive_seeds", "GAUSS_COUNTER"]

GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_KEY_SALT = 0x5A6574614C616221
_MASK = (1 << 64) - 1
# counters at and above this value are reserved for non-prime draws
GAUSS_COUNTER = 1 << 62


@njit(cache=True, inline="always")
def _mix(z):
    z = (z ^ (z >> uint64(30))) * uint64(_M1)
    z = (z ^ (z >> uint64(27))) * uint64(_M2)
    return z ^ (z >> uint64(31))


@njit(cache=True, inline="always")
def _u01(key, counter):
    z = _mix(key + (counter + uint64(1)) * uint64(GAMMA))
    # 53 random bits -> [0, 1)
    return float(z >> uint64(11)) * (1.0 / 9007199254740992.0)


def mix64(z):
    """SplitMix64 finalizer on a Python int (reference implementation)."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * _M1) & _MASK
    z = ((z ^ (z >> 27)) * _M2) & _MASK
    return z ^ (z >> 31)


def stream_key(seed):
    return mix64((int(seed) & _MASK) ^ _KEY_SALT)


def uniform(seed, counter):
    """Uniform in ``[0, 1)`` at stream position ``counter`` (pure Python)."""
    z = mix64(stream_key(seed) + ((int(counter) + 1) * GAMMA))
    return (z >> 11) / 9007199254740992.0


@njit(cache=True)
def _uniforms(key, counters):
    out = np.empty(len(counters))
    for i in range(len(counters)):
        out[i] = _u01(key, counters[i])
    return out


def uniforms(seed, counters):
    """Vectorized :func:`uniform` for an integer array of counters."""
    return _uniforms(np.uint64(stream_key(seed)), np.asarray(counters, dtype=np.uint64))


def derive_seeds(base_seed, n):
    """``n`` per-sample 64-bit seeds from one base seed (SplitMix64 outputs 1..n)."""
    key = stream_key(base_seed)
    return np.array([mix64(key + (i + 1) * GAMMA) for i in range(n)], dtype=np.uint64)


@njit(cache=True, inline="always")
def _gauss_pair(key):
    # Box-Muller on two reserved stream positions
    u1 = _u01(key, uint64(GAUSS_COUNTER))
    u2 = _u01(key, uint64(GAUSS_COUNTER + 1))
    r = math.sqrt(-2.0 * math.log1p(-u1))
    return r * math.cos(2 * math.pi * u2), r * math.sin(2 * math.pi * u2)


@njit(cache=True, inline="always")
def _key(seed):
    return _mix(seed ^ uint64(_KEY_SALT))
