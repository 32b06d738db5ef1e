"""Exact weighted Jaccard similarity and the sketch-match estimator."""
from __future__ import annotations

import numpy as np
from numba import njit

from .errors import (
    BothEmptyError,
    LengthMismatchError,
    PoolMismatchError,
    SchemeMismatchError,
)
from .sketcher import Scheme, Sketch, SketchBatch
from .weighted_set import WeightedSet


@njit(cache=True)
def _minmax_merge(ia, wa, ib, wb):
    """Sum of elementwise min and max over the union of two sorted supports."""
    i = 0
    j = 0
    lo = 0.0
    hi = 0.0
    na = ia.size
    nb = ib.size
    while i < na and j < nb:
        if ia[i] == ib[j]:
            x = wa[i]
            y = wb[j]
            if x < y:
                lo += x
                hi += y
            else:
                lo += y
                hi += x
            i += 1
            j += 1
        elif ia[i] < ib[j]:
            hi += wa[i]
            i += 1
        else:
            hi += wb[j]
            j += 1
    while i < na:
        hi += wa[i]
        i += 1
    while j < nb:
        hi += wb[j]
        j += 1
    return lo, hi


@njit(cache=True)
def _wjs_rows(q_ids, q_w, indptr, ids, w):
    n = indptr.size - 1
    out = np.empty(n)
    for r in range(n):
        a, b = indptr[r], indptr[r + 1]
        lo, hi = _minmax_merge(q_ids, q_w, ids[a:b], w[a:b])
        out[r] = lo / hi if hi > 0 else np.nan
    return out


def wjs_exact(S: WeightedSet, O: WeightedSet) -> float:
    """Sum of per-feature minima over sum of maxima, absent weights as 0."""
    if len(S) == 0 and len(O) == 0:
        raise BothEmptyError("similarity of two empty sets is undefined")
    lo, hi = _minmax_merge(S.ids, S.weights, O.ids, O.weights)
    return lo / hi


def wjs_to_rows(query: WeightedSet, indptr: np.ndarray, ids: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """``wjs_exact(query, row)`` for every row of a CSR corpus."""
    if len(query) == 0:
        raise BothEmptyError("empty query")
    return _wjs_rows(query.ids, query.weights, indptr, ids, weights)


def check_compatible(a: Sketch | SketchBatch, b: Sketch | SketchBatch) -> None:
    if a.scheme is not b.scheme:
        raise SchemeMismatchError(f"{a.scheme.value} vs {b.scheme.value}")
    if a.K != b.K:
        raise LengthMismatchError(f"K={a.K} vs K={b.K}")
    if a.fingerprint != b.fingerprint:
        raise PoolMismatchError(
            "sketches were built with different pools or seeds and are not comparable"
        )


def match_vector(a: Sketch, b: Sketch) -> np.ndarray:
    """Boolean per-slot match; ICWS slots match only if both id and t agree."""
    check_compatible(a, b)
    m = a.ids == b.ids
    if a.scheme is Scheme.ICWS:
        m &= a.t == b.t
    return m


def estimate(a: Sketch, b: Sketch) -> float:
    """Fraction of the K slots on which the two sketches agree."""
    return float(np.count_nonzero(match_vector(a, b))) / a.K


def estimate_rows(query: Sketch, batch: SketchBatch) -> np.ndarray:
    """``estimate(query, batch[i])`` for every row at once."""
    check_compatible(query, batch)
    m = batch.ids == query.ids[None, :]
    if query.scheme is Scheme.ICWS:
        m &= batch.t == query.t[None, :]
    return np.count_nonzero(m, axis=1) / query.K
