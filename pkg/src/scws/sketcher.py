"""Weighted min-hash sketches: ICWS, 0-bit ICWS and simplified CWS.

Per-hash functions (``icws_minhash``, ``scws_minhash``, ...) are written
plainly and serve as the reference.  ``build_sketch`` / ``sketch_dataset``
run the same computation in compiled kernels over all K hash indices at once;
the two paths agree bit for bit.

Ties in the argmin go to the smallest feature id.
"""
from __future__ import annotations

import enum
import math
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, NamedTuple

import numba
import numpy as np
from numba import njit, prange

from .errors import (
    EmptySetError,
    SketchFormatError,
)
from .hashing import MASK64, icws_uniforms, nb_icws_stream_seed, nb_positive_uniform
from .pool import SamplePool, pool_index_array
from .weighted_set import Dataset, WeightedSet

_NO_ID = np.uint64(MASK64)


class Scheme(str, enum.Enum):
    ICWS = "icws"
    ICWS0 = "icws0"
    SCWS = "scws"

    @property
    def zero_bit(self) -> bool:
        return self is not Scheme.ICWS


class IcwsDraw(NamedTuple):
    r: float
    c: float
    beta: float


class IcwsHash(NamedTuple):
    z_star: int
    t_star: int


@dataclass(frozen=True)
class IcwsPerFeatureDraw:
    r: float
    c: float
    beta: float
    t: int
    y: float
    a: float

    def bound_holds(self, w: float) -> bool:
        """``log w / r + beta - 1 < t <= log w / r + beta``."""
        x = math.log(w) / self.r + self.beta
        return x - 1 < self.t <= x


def icws_draw(z: int, k: int, base_seed: int = 0) -> IcwsDraw:
    u1, u2, u3, u4, u5 = icws_uniforms(z, k, base_seed)
    r = -math.log(u1) - math.log(u2)
    c = -math.log(u3) - math.log(u4)
    return IcwsDraw(r, c, u5)


def icws_feature(w: float, draw: IcwsDraw) -> IcwsPerFeatureDraw:
    r, c, beta = draw
    t = math.floor(math.log(w) / r + beta)
    y = math.exp(r * (t - beta))
    a = c / (y * math.exp(r))
    return IcwsPerFeatureDraw(r, c, beta, t, y, a)


DrawFn = Callable[[int, int, int], IcwsDraw]


def icws_minhash(S: WeightedSet, k: int, base_seed: int = 0, draw: DrawFn = icws_draw) -> IcwsHash:
    """One ICWS hash of ``S`` at index ``k``; ``draw`` supplies (r, c, beta)."""
    if len(S) == 0:
        raise EmptySetError("cannot min-hash an empty set")
    best = None
    for z, w in S:
        f = icws_feature(w, draw(z, k, base_seed))
        assert f.bound_holds(w), (z, k, f)
        if best is None or f.a < best[0] or (f.a == best[0] and z < best[1]):
            best = (f.a, z, f.t)
    return IcwsHash(best[1], best[2])


def icws0_minhash(S: WeightedSet, k: int, base_seed: int = 0, draw: DrawFn = icws_draw) -> int:
    return icws_minhash(S, k, base_seed, draw).z_star


def scws_minhash(S: WeightedSet, k: int, pool: SamplePool) -> int:
    if len(S) == 0:
        raise EmptySetError("cannot min-hash an empty set")
    inv_w = 1.0 / S.weights
    a = inv_w * pool.values[pool_index_array(S.ids, k, pool)].astype(np.float64)
    # ids are sorted, so argmin's first-occurrence rule is the smallest-id rule
    return int(S.ids[np.argmin(a)])


# --- compiled kernels ----------------------------------------------------------

@njit(parallel=True, cache=True)
def _scws_rows(indptr, ids, inv_w, table, p1, p2, k0, K, out):
    T = np.uint64(table.size)
    step = p2 % T
    # 2**64 mod T
    wrap = (np.uint64(MASK64) % T + np.uint64(1)) % T
    n_rows = indptr.size - 1
    for row in prange(n_rows):
        amin = np.full(K, np.inf)
        zmin = np.full(K, _NO_ID)
        for j in range(indptr[row], indptr[row + 1]):
            z = ids[j]
            iw = inv_w[j]
            s = z * p1 + k0 * p2
            g = s % T
            for k in range(K):
                a = iw * np.float64(table[g])
                if a < amin[k] or (a == amin[k] and z < zmin[k]):
                    amin[k] = a
                    zmin[k] = z
                # advance to hash index k+1 without a division
                s_next = s + p2
                g = g + step
                if s_next < s:
                    g = g + T - wrap
                while g >= T:
                    g = g - T
                s = s_next
        out[row, :] = zmin


@njit(parallel=True, cache=True)
def _icws_rows(indptr, ids, weights, base_seed, k0, K, out_z, out_t):
    n_rows = indptr.size - 1
    for row in prange(n_rows):
        amin = np.full(K, np.inf)
        zmin = np.full(K, _NO_ID)
        tmin = np.zeros(K, dtype=np.int64)
        for j in range(indptr[row], indptr[row + 1]):
            z = ids[j]
            lw = math.log(weights[j])
            for k in range(K):
                state = nb_icws_stream_seed(z, k0 + np.uint64(k), base_seed)
                u1, state = nb_positive_uniform(state)
                u2, state = nb_positive_uniform(state)
                u3, state = nb_positive_uniform(state)
                u4, state = nb_positive_uniform(state)
                beta, state = nb_positive_uniform(state)
                r = -math.log(u1) - math.log(u2)
                c = -math.log(u3) - math.log(u4)
                t = math.floor(lw / r + beta)
                y = math.exp(r * (t - beta))
                a = c / (y * math.exp(r))
                if a < amin[k] or (a == amin[k] and z < zmin[k]):
                    amin[k] = a
                    zmin[k] = z
                    tmin[k] = np.int64(t)
        out_z[row, :] = zmin
        out_t[row, :] = tmin


# --- sketches ------------------------------------------------------------------

@dataclass(frozen=True)
class SketchConfig:
    scheme: Scheme
    K: int
    pool: SamplePool | None = None
    base_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        if int(self.K) < 1:
            raise ValueError(f"K must be >= 1, got {self.K}")
        if self.scheme is Scheme.SCWS and self.pool is None:
            raise ValueError("SCWS needs a pool")
        if not 0 <= self.base_seed <= MASK64:
            raise ValueError("base_seed must fit in 64 unsigned bits")

    @property
    def fingerprint(self) -> tuple:
        if self.scheme is Scheme.SCWS:
            return ("pool",) + self.pool.fingerprint
        return ("seed", self.base_seed)


@dataclass(frozen=True, eq=False)
class Sketch:
    """A length-K sketch.  ``t`` is present only for full ICWS."""

    scheme: Scheme
    ids: np.ndarray
    t: np.ndarray | None = None
    fingerprint: tuple = ()

    @property
    def K(self) -> int:
        return int(self.ids.size)

    @property
    def hashes(self) -> list:
        if self.t is None:
            return self.ids.tolist()
        return [IcwsHash(z, t) for z, t in zip(self.ids.tolist(), self.t.tolist())]

    def __len__(self) -> int:
        return self.K

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Sketch):
            return NotImplemented
        return (
            self.scheme is other.scheme
            and self.fingerprint == other.fingerprint
            and np.array_equal(self.ids, other.ids)
            and (self.t is None) == (other.t is None)
            and (self.t is None or np.array_equal(self.t, other.t))
        )

    def prefix(self, K: int) -> "Sketch":
        return Sketch(self.scheme, self.ids[:K], None if self.t is None else self.t[:K], self.fingerprint)

    def to_zero_bit(self) -> "Sketch":
        """Drop ``t``; a full ICWS sketch becomes its 0-bit projection."""
        if self.scheme is not Scheme.ICWS:
            return self
        return Sketch(Scheme.ICWS0, self.ids, None, self.fingerprint)


@dataclass(frozen=True, eq=False)
class SketchBatch:
    """Sketches for many rows: ``ids`` has shape (N, K)."""

    scheme: Scheme
    ids: np.ndarray
    t: np.ndarray | None = None
    fingerprint: tuple = ()

    @property
    def K(self) -> int:
        return int(self.ids.shape[1])

    def __len__(self) -> int:
        return int(self.ids.shape[0])

    def __getitem__(self, i: int) -> Sketch:
        return Sketch(self.scheme, self.ids[i], None if self.t is None else self.t[i], self.fingerprint)

    def prefix(self, K: int) -> "SketchBatch":
        return SketchBatch(self.scheme, self.ids[:, :K], None if self.t is None else self.t[:, :K], self.fingerprint)

    def to_zero_bit(self) -> "SketchBatch":
        if self.scheme is not Scheme.ICWS:
            return self
        return SketchBatch(Scheme.ICWS0, self.ids, None, self.fingerprint)


def sketch_csr(indptr, ids, w, config: SketchConfig, k0: int = 0) -> SketchBatch:
    n = indptr.size - 1
    K = int(config.K)
    lens = np.diff(indptr)
    if np.any(lens == 0):
        raise EmptySetError(f"row {int(np.argmax(lens == 0))} is empty; filter empty rows first")
    ids = np.ascontiguousarray(ids, dtype=np.uint64)
    out = np.empty((n, K), dtype=np.uint64)
    if config.scheme is Scheme.SCWS:
        pool = config.pool
        _scws_rows(indptr, ids, 1.0 / w, pool.values, np.uint64(pool.p1), np.uint64(pool.p2),
                   np.uint64(k0), K, out)
        return SketchBatch(config.scheme, out, None, config.fingerprint)
    t = np.empty((n, K), dtype=np.int64)
    _icws_rows(indptr, ids, w, np.uint64(config.base_seed), np.uint64(k0), K, out, t)
    return SketchBatch(config.scheme, out, t if config.scheme is Scheme.ICWS else None, config.fingerprint)


def build_sketch(S: WeightedSet, config: SketchConfig) -> Sketch:
    if len(S) == 0:
        raise EmptySetError("cannot sketch an empty set")
    indptr = np.array([0, len(S)], dtype=np.int64)
    return sketch_csr(indptr, S.ids, S.weights, config)[0]


def sketch_dataset(data: Dataset, config: SketchConfig, threads: int | None = None) -> SketchBatch:
    """Sketch every row; rows are processed in parallel on ``threads`` threads."""
    indptr, ids, w = data.csr()
    if threads is not None:
        with numba_threads(threads):
            return sketch_csr(indptr, ids, w, config)
    return sketch_csr(indptr, ids, w, config)


class numba_threads:
    """Context manager pinning the compiled kernels to ``n`` threads."""

    def __init__(self, n: int):
        self.n = max(1, min(int(n), numba.config.NUMBA_NUM_THREADS))

    def __enter__(self):
        self.prev = numba.get_num_threads()
        numba.set_num_threads(self.n)
        return self

    def __exit__(self, *exc):
        numba.set_num_threads(self.prev)


# --- sketch files --------------------------------------------------------------

_MAGIC = b"SCWSSKCH"
_VERSION = 1
_TAGS = {Scheme.ICWS: 0, Scheme.ICWS0: 1, Scheme.SCWS: 2}
# magic, version, scheme tag, K, N, seed, pool size, p1, p2, value width, crc32
_HEADER = struct.Struct("<8sIIQQQQQQII")
_PAIR = np.dtype([("z", "<u8"), ("t", "<i8")])


def _fp_fields(scheme: Scheme, fp: tuple) -> tuple[int, int, int, int, int, int]:
    if scheme is Scheme.SCWS:
        _, seed, size, p1, p2, width, crc = fp
        return (MASK64 if seed is None else seed), size, p1, p2, width, crc
    return fp[1], 0, 0, 0, 0, 0


def save_sketches(batch: SketchBatch, path: str | Path) -> None:
    """Write ``batch`` to a little-endian sketch file.

    Header (see ``_HEADER``) then, per row, K u64 ids (0-bit schemes) or K
    interleaved (u64 id, i64 t) pairs (ICWS).  For ICWS the seed field holds
    the base seed and the pool fields are zero.
    """
    header = _HEADER.pack(_MAGIC, _VERSION, _TAGS[batch.scheme], batch.K, len(batch),
                          *_fp_fields(batch.scheme, batch.fingerprint))
    if batch.scheme is Scheme.ICWS:
        body = np.empty(batch.ids.shape, dtype=_PAIR)
        body["z"] = batch.ids
        body["t"] = batch.t
    else:
        body = batch.ids.astype("<u8")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(body.tobytes())


def load_sketches(path: str | Path) -> SketchBatch:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise SketchFormatError("sketch file truncated")
    magic, version, tag, K, N, seed, size, p1, p2, width, crc = _HEADER.unpack_from(data)
    if magic != _MAGIC or version != _VERSION:
        raise SketchFormatError("not a sketch file (bad magic or version)")
    try:
        scheme = {v: k for k, v in _TAGS.items()}[tag]
    except KeyError:
        raise SketchFormatError(f"unknown scheme tag {tag}") from None
    body = data[_HEADER.size:]
    if scheme is Scheme.SCWS:
        fp = ("pool", None if seed == MASK64 else seed, size, p1, p2, width, crc)
    else:
        fp = ("seed", seed)
    if scheme is Scheme.ICWS:
        if len(body) != N * K * _PAIR.itemsize:
            raise SketchFormatError("sketch file length does not match its header")
        arr = np.frombuffer(body, dtype=_PAIR).reshape(N, K)
        return SketchBatch(scheme, arr["z"].astype(np.uint64), arr["t"].astype(np.int64), fp)
    if len(body) != N * K * 8:
        raise SketchFormatError("sketch file length does not match its header")
    ids = np.frombuffer(body, dtype="<u8").reshape(N, K).astype(np.uint64)
    return SketchBatch(scheme, ids, None, fp)
