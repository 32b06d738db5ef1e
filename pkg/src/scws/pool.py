"""The pre-sampled value pool used by simplified CWS.

A pool is a fixed array ``T`` of draws of ``c * exp(-r)`` with ``c`` and ``r``
independent Gamma(2, 1).  Feature ``z`` at hash index ``k`` reads slot
``(z*p1 + k*p2) mod |T|`` (products wrap at 2**64).
"""
from __future__ import annotations

import math
import struct
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numba import njit

from .errors import EmptyPoolError, SketchFormatError, ZeroSizeError
from .hashing import MASK64, nb_positive_uniform

DEFAULT_SIZE = 4000
DEFAULT_P1 = 1073741827
DEFAULT_P2 = 1073741831
DEFAULT_SEED = 0x5EED_C0FF_EE15_2018

_MAGIC = b"SCWSPOOL"
_VERSION = 1
# magic, version, precision bytes, size, seed, p1, p2
_HEADER = struct.Struct("<8sII4Q")


def gamma21_from_uniforms(u1: float, u2: float) -> float:
    """Gamma(2, 1) variate from two uniforms in (0, 1]."""
    return -math.log(u1) - math.log(u2)


def gamma21(rng) -> float:
    """Draw Gamma(2, 1) as ``-ln u1 - ln u2`` from ``rng.random()``.

    Uniforms equal to exactly 0 are re-drawn.
    """
    def u() -> float:
        while True:
            x = rng.random()
            if x > 0.0:
                return x

    return gamma21_from_uniforms(u(), u())


@njit(cache=True)
def _gamma21_block(seed, n):
    out = np.empty(n, dtype=np.float64)
    state = seed
    for i in range(n):
        u1, state = nb_positive_uniform(state)
        u2, state = nb_positive_uniform(state)
        out[i] = -math.log(u1) - math.log(u2)
    return out


def gamma21_block(seed: int, n: int) -> np.ndarray:
    """``n`` Gamma(2, 1) draws from the SplitMix64 stream at ``seed``."""
    return _gamma21_block(np.uint64(seed & MASK64), n)


@njit(cache=True)
def _pool_values(seed, n):
    out = np.empty(n, dtype=np.float64)
    state = seed
    for i in range(n):
        u1, state = nb_positive_uniform(state)
        u2, state = nb_positive_uniform(state)
        u3, state = nb_positive_uniform(state)
        u4, state = nb_positive_uniform(state)
        c = -math.log(u1) - math.log(u2)
        r = -math.log(u3) - math.log(u4)
        out[i] = c * math.exp(-r)
    return out


@dataclass(frozen=True, eq=False)
class SamplePool:
    values: np.ndarray
    seed: int | None = None
    p1: int = DEFAULT_P1
    p2: int = DEFAULT_P2
    _fingerprint: tuple = field(init=False, repr=False)

    def __post_init__(self):
        v = np.ascontiguousarray(self.values)
        if v.dtype not in (np.float32, np.float64):
            v = v.astype(np.float64)
        if v.ndim != 1 or v.size == 0:
            raise EmptyPoolError("pool must be a non-empty 1-d array")
        if not (np.all(np.isfinite(v)) and np.all(v > 0)):
            raise ValueError("pool values must be finite and > 0")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        fp = (
            self.seed,
            int(v.size),
            int(self.p1),
            int(self.p2),
            v.dtype.itemsize,
            zlib.crc32(v.tobytes()),
        )
        object.__setattr__(self, "_fingerprint", fp)

    @property
    def size(self) -> int:
        return int(self.values.size)

    @property
    def precision(self) -> str:
        return "single" if self.values.dtype == np.float32 else "double"

    @property
    def fingerprint(self) -> tuple:
        """(seed, size, p1, p2, bytes per value, crc32 of the values)."""
        return self._fingerprint

    def __len__(self) -> int:
        return self.size

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SamplePool):
            return NotImplemented
        return self.fingerprint == other.fingerprint

    def __hash__(self) -> int:
        return hash(self.fingerprint)


def build_pool(
    size: int = DEFAULT_SIZE,
    seed: int = DEFAULT_SEED,
    *,
    precision: str = "single",
    p1: int = DEFAULT_P1,
    p2: int = DEFAULT_P2,
) -> SamplePool:
    """Sample ``size`` values of ``c * exp(-r)`` from a SplitMix64 stream.

    Values are computed in double precision; ``precision="single"`` stores
    them as float32 (4000 of them fit in 16 KB).
    """
    if size < 1:
        raise ZeroSizeError(f"pool size must be >= 1, got {size}")
    if precision not in ("single", "double"):
        raise ValueError("precision must be 'single' or 'double'")
    vals = _pool_values(np.uint64(seed & MASK64), int(size))
    if precision == "single":
        vals = vals.astype(np.float32)
        # float32 rounding can underflow a tiny draw to 0; keep positivity
        vals[vals == 0] = np.finfo(np.float32).tiny
    return SamplePool(vals, seed=seed & MASK64, p1=p1, p2=p2)


def pool_index(z: int, k: int, pool: SamplePool | int) -> int:
    """Slot read by feature ``z`` at hash index ``k``."""
    size = pool if isinstance(pool, int) else pool.size
    p1 = DEFAULT_P1 if isinstance(pool, int) else pool.p1
    p2 = DEFAULT_P2 if isinstance(pool, int) else pool.p2
    if size < 1:
        raise EmptyPoolError("empty pool")
    return ((z * p1 + k * p2) & MASK64) % size


def pool_index_array(z: np.ndarray, k: int, pool: SamplePool) -> np.ndarray:
    z = np.asarray(z, dtype=np.uint64)
    b = np.uint64((k * pool.p2) & MASK64)
    return ((z * np.uint64(pool.p1) + b) % np.uint64(pool.size)).astype(np.int64)


# --- snapshot files ----------------------------------------------------------

def save_pool(pool: SamplePool, path: str | Path) -> None:
    """Write ``pool`` as a little-endian snapshot.

    Layout: ``b"SCWSPOOL"``, u32 version, u32 bytes-per-value (4 or 8),
    u64 size, u64 seed, u64 p1, u64 p2, then the raw values.  A pool with no
    seed (values injected by hand) stores seed ``2**64 - 1``.
    """
    seed = MASK64 if pool.seed is None else pool.seed
    v = pool.values
    header = _HEADER.pack(_MAGIC, _VERSION, v.dtype.itemsize, v.size, seed, pool.p1, pool.p2)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(v.astype(v.dtype.newbyteorder("<"), copy=False).tobytes())


def load_pool(path: str | Path) -> SamplePool:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise SketchFormatError("pool snapshot truncated")
    magic, version, width, size, seed, p1, p2 = _HEADER.unpack_from(data)
    if magic != _MAGIC or version != _VERSION:
        raise SketchFormatError("not a pool snapshot (bad magic or version)")
    if width not in (4, 8):
        raise SketchFormatError(f"bad value width {width}")
    dtype = np.dtype("<f4" if width == 4 else "<f8")
    body = data[_HEADER.size:]
    if len(body) != size * width:
        raise SketchFormatError("pool snapshot length does not match its header")
    vals = np.frombuffer(body, dtype=dtype).astype(dtype.newbyteorder("="))
    return SamplePool(vals, seed=None if seed == MASK64 else seed, p1=p1, p2=p2)
