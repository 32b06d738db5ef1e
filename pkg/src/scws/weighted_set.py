"""Sparse weighted sets, LIBSVM ingestion and per-feature rescaling."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    DuplicateFeatureError,
    EmptyDatasetError,
    MalformedLineError,
    NegativeWeightError,
    NonFiniteWeightError,
    NonMonotonicIndexError,
)

_ID_DTYPE = np.uint64
_MAX_ID = (1 << 64) - 1


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class WeightedSet:
    """Immutable map ``feature id -> weight`` with strictly positive weights.

    Entries are stored sorted by id, so iteration order of the input never
    leaks into anything computed from the set.
    """

    __slots__ = ("ids", "weights")

    def __init__(self, ids: np.ndarray, weights: np.ndarray, *, _trusted: bool = False):
        if not _trusted:
            ids = np.asarray(ids, dtype=_ID_DTYPE)
            weights = np.asarray(weights, dtype=np.float64)
            if ids.ndim != 1 or ids.shape != weights.shape:
                raise ValueError("ids and weights must be 1-d arrays of equal length")
            _check_weights(weights)
            keep = weights > 0
            ids, weights = ids[keep], weights[keep]
            order = np.argsort(ids, kind="stable")
            ids, weights = ids[order], weights[order]
            if ids.size > 1 and np.any(ids[1:] == ids[:-1]):
                dup = ids[1:][ids[1:] == ids[:-1]][0]
                raise DuplicateFeatureError(f"feature {int(dup)} appears more than once")
            ids, weights = ids.copy(), weights.copy()
        self.ids = _frozen(ids)
        self.weights = _frozen(weights)

    @classmethod
    def from_dict(cls, mapping: dict[int, float]) -> "WeightedSet":
        return from_pairs(mapping.items())

    def __len__(self) -> int:
        return int(self.ids.size)

    def __iter__(self) -> Iterator[tuple[int, float]]:
        return zip(self.ids.tolist(), self.weights.tolist())

    def __contains__(self, z: int) -> bool:
        i = np.searchsorted(self.ids, np.uint64(z))
        return bool(i < self.ids.size and self.ids[i] == z)

    def __getitem__(self, z: int) -> float:
        i = np.searchsorted(self.ids, np.uint64(z))
        if i < self.ids.size and self.ids[i] == z:
            return float(self.weights[i])
        return 0.0

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightedSet):
            return NotImplemented
        return np.array_equal(self.ids, other.ids) and np.array_equal(self.weights, other.weights)

    def __hash__(self) -> int:
        return hash((self.ids.tobytes(), self.weights.tobytes()))

    def __repr__(self) -> str:
        body = ", ".join(f"{z}: {w:g}" for z, w in list(self)[:6])
        more = ", ..." if len(self) > 6 else ""
        return f"WeightedSet({{{body}{more}}})"

    def to_dict(self) -> dict[int, float]:
        return dict(self)

    def scaled(self, alpha: float) -> "WeightedSet":
        """Every weight multiplied by ``alpha`` (> 0)."""
        if not (alpha > 0 and math.isfinite(alpha)):
            raise ValueError("scale factor must be finite and > 0")
        return WeightedSet(self.ids.copy(), self.weights * alpha, _trusted=True)

    @property
    def total(self) -> float:
        return float(self.weights.sum())


def _check_weights(weights: np.ndarray) -> None:
    if not np.all(np.isfinite(weights)):
        raise NonFiniteWeightError("weights must be finite")
    if np.any(weights < 0):
        raise NegativeWeightError(f"negative weight {float(weights[weights < 0][0])!r}")


def from_pairs(pairs: Iterable[tuple[int, float]]) -> WeightedSet:
    """Build a set from ``(feature_id, weight)`` pairs.

    Zero weights mean "absent" and are dropped; negative or non-finite values
    and repeated ids raise.
    """
    pairs = list(pairs)
    ids = []
    for z, _ in pairs:
        z = int(z)
        if z < 0 or z > _MAX_ID:
            raise ValueError(f"feature id {z} outside the unsigned 64-bit range")
        ids.append(z)
    weights = np.array([float(w) for _, w in pairs], dtype=np.float64)
    _check_weights(weights)
    # duplicates are an error even when one copy has weight zero
    if len(set(ids)) != len(ids):
        seen: set[int] = set()
        for z in ids:
            if z in seen:
                raise DuplicateFeatureError(f"feature {z} appears more than once")
            seen.add(z)
    return WeightedSet(np.array(ids, dtype=_ID_DTYPE), weights)


# --- LIBSVM ------------------------------------------------------------------

def _parse_label(tok: str) -> int:
    try:
        return int(tok)
    except ValueError:
        pass
    try:
        v = float(tok)
    except ValueError:
        raise MalformedLineError(f"bad label {tok!r}") from None
    if not v.is_integer():
        raise MalformedLineError(f"label {tok!r} is not an integer")
    return int(v)


def parse_libsvm_line(line: str) -> tuple[int, WeightedSet]:
    """Parse ``<label> <idx>:<val> ...``; text after ``#`` is ignored."""
    body = line.split("#", 1)[0]
    toks = body.split()
    if not toks:
        raise MalformedLineError("empty line")
    label = _parse_label(toks[0])
    ids: list[int] = []
    vals: list[float] = []
    prev = -1
    for tok in toks[1:]:
        idx_s, sep, val_s = tok.partition(":")
        if not sep:
            raise MalformedLineError(f"expected idx:val, got {tok!r}")
        try:
            idx = int(idx_s)
            val = float(val_s)
        except ValueError:
            raise MalformedLineError(f"expected idx:val, got {tok!r}") from None
        if idx < 0:
            raise MalformedLineError(f"negative feature index {idx}")
        if idx <= prev:
            raise NonMonotonicIndexError(f"index {idx} follows {prev}")
        prev = idx
        if val < 0:
            raise NegativeWeightError(f"negative value {val!r} at index {idx}")
        if not math.isfinite(val):
            raise NonFiniteWeightError(f"non-finite value at index {idx}")
        if val > 0:
            ids.append(idx)
            vals.append(val)
    ws = WeightedSet(np.array(ids, dtype=_ID_DTYPE), np.array(vals, dtype=np.float64), _trusted=True)
    return label, ws


def _fmt_value(v: float) -> str:
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def format_libsvm_line(label: int, ws: WeightedSet) -> str:
    parts = [str(int(label))]
    parts.extend(f"{z}:{_fmt_value(w)}" for z, w in ws)
    return " ".join(parts)


# --- datasets ----------------------------------------------------------------

@dataclass(frozen=True)
class Dataset:
    """An ordered collection of weighted sets with optional integer labels.

    ``feature_max`` is set by :func:`rescale_unit` and holds the per-feature
    divisor (sorted ids, maxima) so queries can be rescaled identically.
    """

    rows: tuple[WeightedSet, ...]
    labels: tuple[int, ...] | None = None
    feature_max: tuple[np.ndarray, np.ndarray] | None = field(default=None, compare=False)
    name: str = field(default="dataset", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(int(y) for y in self.labels))
            if len(self.labels) != len(self.rows):
                raise ValueError("labels and rows differ in length")

    def __len__(self) -> int:
        return len(self.rows)

    def __getitem__(self, i: int) -> WeightedSet:
        return self.rows[i]

    def csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(indptr, ids, weights) arrays over all rows, cached."""
        cached = self.__dict__.get("_csr")
        if cached is None:
            lens = np.fromiter((len(r) for r in self.rows), dtype=np.int64, count=len(self.rows))
            indptr = np.zeros(len(self.rows) + 1, dtype=np.int64)
            np.cumsum(lens, out=indptr[1:])
            if self.rows:
                ids = np.concatenate([r.ids for r in self.rows]).astype(_ID_DTYPE, copy=False)
                w = np.concatenate([r.weights for r in self.rows])
            else:
                ids, w = np.empty(0, _ID_DTYPE), np.empty(0, np.float64)
            cached = (indptr, ids, w)
            object.__setattr__(self, "_csr", cached)
        return cached

    @property
    def nnz(self) -> int:
        return int(self.csr()[0][-1])

    def without_empty(self) -> "Dataset":
        keep = [i for i, r in enumerate(self.rows) if len(r)]
        labels = None if self.labels is None else [self.labels[i] for i in keep]
        return Dataset(tuple(self.rows[i] for i in keep), labels, self.feature_max, self.name)


def iter_libsvm(lines: Iterable[str]) -> Iterator[tuple[int, int, WeightedSet]]:
    """Yield ``(line_number, label, set)``, skipping blank and comment lines."""
    for lineno, line in enumerate(lines, start=1):
        if not line.split("#", 1)[0].strip():
            continue
        try:
            label, ws = parse_libsvm_line(line)
        except (MalformedLineError, NonMonotonicIndexError, NegativeWeightError, NonFiniteWeightError) as e:
            raise type(e)(f"line {lineno}: {e}") from None
        yield lineno, label, ws


def read_libsvm(path: str | Path) -> Dataset:
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        parsed = [(y, ws) for _, y, ws in iter_libsvm(fh)]
    return Dataset(tuple(ws for _, ws in parsed), tuple(y for y, _ in parsed), name=path.stem)


def write_libsvm(path: str | Path, data: Dataset, header: str | None = None) -> None:
    labels = data.labels if data.labels is not None else (0,) * len(data)
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            fh.write(f"# {header}\n")
        for y, ws in zip(labels, data.rows):
            fh.write(format_libsvm_line(y, ws) + "\n")


def column_max(rows: Sequence[WeightedSet]) -> tuple[np.ndarray, np.ndarray]:
    ids = np.concatenate([r.ids for r in rows]) if rows else np.empty(0, _ID_DTYPE)
    w = np.concatenate([r.weights for r in rows]) if rows else np.empty(0)
    uniq, inv = np.unique(ids, return_inverse=True)
    mx = np.zeros(uniq.size)
    np.maximum.at(mx, inv, w)
    return uniq.astype(_ID_DTYPE), mx


def rescale_set(ws: WeightedSet, feature_max: tuple[np.ndarray, np.ndarray]) -> WeightedSet:
    """Divide each weight by its column maximum, clipping to 1.

    Features never seen when the maxima were computed keep divisor 1 before
    clipping, so unseen query features land at ``min(w, 1)``.
    """
    fids, fmax = feature_max
    pos = np.searchsorted(fids, ws.ids)
    pos_c = np.minimum(pos, max(fids.size - 1, 0))
    known = (pos < fids.size) & (fids[pos_c] == ws.ids) if fids.size else np.zeros(len(ws), bool)
    div = np.where(known, fmax[pos_c] if fids.size else 1.0, 1.0)
    w = np.minimum(ws.weights / div, 1.0)
    return WeightedSet(ws.ids.copy(), w, _trusted=True)


def rescale_unit(data: Dataset) -> Dataset:
    """Per-feature rescaling to (0, 1] by the column maximum over ``data``."""
    if len(data) == 0:
        raise EmptyDatasetError("cannot rescale an empty dataset")
    fm = column_max(data.rows)
    rows = tuple(rescale_set(r, fm) for r in data.rows)
    return Dataset(rows, data.labels, fm, data.name)
