"""b-bit one-hot vectorisation of 0-bit sketches for linear learners.

Slot ``k`` of a sketch with selected id ``z`` turns on coordinate
``k * 2**b + (mix64(z) mod 2**b)``.  Mixing before truncation keeps bucket
collisions between different ids at rate ``2**-b`` regardless of how feature
ids were numbered.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import WrongSchemeError
from .hashing import mix64_array
from .sketcher import Scheme, Sketch, SketchBatch


@dataclass(frozen=True, eq=False)
class BBitVector:
    b: int
    K: int
    indices: np.ndarray  # sorted, one per slot

    @property
    def dimension(self) -> int:
        return self.K << self.b

    @property
    def nnz(self) -> int:
        return int(self.indices.size)

    def dot(self, other: "BBitVector") -> int:
        return int(np.intersect1d(self.indices, other.indices, assume_unique=True).size)

    def to_dense(self) -> np.ndarray:
        v = np.zeros(self.dimension, dtype=np.uint8)
        v[self.indices] = 1
        return v

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BBitVector):
            return NotImplemented
        return self.b == other.b and self.K == other.K and np.array_equal(self.indices, other.indices)


def _check_bits(b: int) -> None:
    if not 1 <= b <= 16:
        raise ValueError(f"b must be in 1..16, got {b}")


def bbit_indices(ids: np.ndarray, b: int) -> np.ndarray:
    """Coordinates for an (..., K) array of selected ids."""
    _check_bits(b)
    K = ids.shape[-1]
    bucket = (mix64_array(ids) & np.uint64((1 << b) - 1)).astype(np.int64)
    return bucket + (np.arange(K, dtype=np.int64) << b)


def vectorize(s: Sketch, b: int) -> BBitVector:
    if s.scheme is Scheme.ICWS:
        raise WrongSchemeError("project full ICWS sketches with to_zero_bit() first")
    return BBitVector(b, s.K, bbit_indices(s.ids, b))


def vectorize_batch(batch: SketchBatch, b: int) -> np.ndarray:
    """(N, K) coordinate matrix, one row per sketch."""
    if batch.scheme is Scheme.ICWS:
        raise WrongSchemeError("project full ICWS sketches with to_zero_bit() first")
    return bbit_indices(batch.ids, b)


def header_comment(batch: SketchBatch, b: int) -> str:
    fp = " ".join(str(x) for x in batch.fingerprint)
    return f"K={batch.K} b={b} scheme={batch.scheme.value} fingerprint={fp}"


def write_bbit_libsvm(
    path: str | Path,
    batch: SketchBatch,
    b: int,
    labels: Sequence[int] | None = None,
    normalize: bool = False,
) -> None:
    """Emit LIBSVM lines with 1-based coordinates.

    Values are 1, or ``1/sqrt(K)`` with ``normalize`` so every row has unit
    norm.  The first line is a ``#`` comment recording K, b, scheme and the
    pool/seed fingerprint.
    """
    coords = vectorize_batch(batch, b) + 1
    val = repr(1.0 / math.sqrt(batch.K)) if normalize else "1"
    labels = labels if labels is not None else [0] * len(batch)
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"# {header_comment(batch, b)}\n")
        for y, row in zip(labels, coords):
            fh.write(str(int(y)))
            fh.write("".join(f" {c}:{val}" for c in row.tolist()))
            fh.write("\n")
