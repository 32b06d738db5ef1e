"""64-bit mixing and counter-based uniforms.

All randomness in the package is derived from the SplitMix64 output function
(``mix64``) applied to a Weyl sequence.  The exact construction is part of the
reproducibility contract: two processes that agree on a seed agree on every
pool value, every ICWS draw and every b-bit bucket.

    state_i  = seed + (i + 1) * GOLDEN         (mod 2**64)
    u64_i    = mix64(state_i)
    uniform  = (u64_i >> 11) * 2**-53          in [0, 1); zeros are skipped

ICWS draws for feature ``z`` at hash index ``k`` use a stream whose seed is
``mix64(mix64(z ^ base_seed) + (k + 1) * GOLDEN)``.
"""
from __future__ import annotations

import numpy as np
from numba import njit

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_INV53 = 1.0 / (1 << 53)

# numba sees these as uint64 constants
_U_GOLDEN = np.uint64(GOLDEN)
_U_M1 = np.uint64(_M1)
_U_M2 = np.uint64(_M2)
_U_ONE = np.uint64(1)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)


def mix64(x: int) -> int:
    """SplitMix64 finalizer on a Python int (taken mod 2**64)."""
    x &= MASK64
    x = ((x ^ (x >> 30)) * _M1) & MASK64
    x = ((x ^ (x >> 27)) * _M2) & MASK64
    return x ^ (x >> 31)


def derive_seed(seed: int, i: int) -> int:
    """The ``i``-th output of a SplitMix64 stream started at ``seed``."""
    return mix64(seed + (i + 1) * GOLDEN)


class SplitMix64:
    """Sequential SplitMix64 generator.

    Exposes ``random()`` so it can stand in wherever a uniform source is
    needed (``pool.gamma21`` accepts any object with that method).
    """

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & MASK64
        return mix64(self.state)

    def random(self) -> float:
        return (self.next_u64() >> 11) * _INV53

    def positive_uniform(self) -> float:
        while True:
            u = self.random()
            if u > 0.0:
                return u


def icws_stream_seed(z: int, k: int, base_seed: int) -> int:
    return mix64(mix64((z ^ base_seed) & MASK64) + (k + 1) * GOLDEN)


def icws_uniforms(z: int, k: int, base_seed: int) -> tuple[float, float, float, float, float]:
    """The five positive uniforms consumed by one ICWS (feature, hash) step."""
    g = SplitMix64(icws_stream_seed(z, k, base_seed))
    return tuple(g.positive_uniform() for _ in range(5))  # type: ignore[return-value]


def mix64_array(x: np.ndarray) -> np.ndarray:
    """Vectorised ``mix64`` over a uint64 array."""
    x = np.asarray(x, dtype=np.uint64)
    x = (x ^ (x >> _S30)) * _U_M1
    x = (x ^ (x >> _S27)) * _U_M2
    return x ^ (x >> _S31)


# --- numba kernels -------------------------------------------------------

@njit(inline="always", cache=True)
def nb_mix64(x):
    x = (x ^ (x >> _S30)) * _U_M1
    x = (x ^ (x >> _S27)) * _U_M2
    return x ^ (x >> _S31)


@njit(inline="always", cache=True)
def nb_positive_uniform(state):
    """Advance ``state`` until a nonzero uniform appears; returns (u, state)."""
    while True:
        state = state + _U_GOLDEN
        u = np.float64(nb_mix64(state) >> _S11) * _INV53
        if u > 0.0:
            return u, state


@njit(inline="always", cache=True)
def nb_icws_stream_seed(z, k, base_seed):
    return nb_mix64(nb_mix64(z ^ base_seed) + (k + _U_ONE) * _U_GOLDEN)


@njit(cache=True)
def nb_uniform_block(seed, n):
    """``n`` positive uniforms from the stream at ``seed`` (test helper)."""
    out = np.empty(n, dtype=np.float64)
    state = np.uint64(seed)
    for i in range(n):
        u, state = nb_positive_uniform(state)
        out[i] = u
    return out


def uniform_block(seed: int, n: int) -> np.ndarray:
    return nb_uniform_block(np.uint64(seed & MASK64), n)

