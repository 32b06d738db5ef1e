"""Synthetic heavy-tailed data standing in for word-count columns and LIBSVM corpora."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .estimator import wjs_exact
from .weighted_set import Dataset, WeightedSet


@dataclass(frozen=True)
class SyntheticSpec:
    """Corpus shape: ``rows`` sets over ``dim`` features, each feature present
    with probability ``density``, weights Pareto-distributed with tail index
    ``tail`` (smaller is heavier).

    Rows are drawn around ``clusters`` prototypes so that nearest neighbours
    are meaningful; ``clusters=0`` picks ``max(1, rows // 20)``.
    """

    rows: int
    dim: int
    density: float
    tail: float = 1.5
    clusters: int = 0

    def __post_init__(self):
        if self.rows < 1 or self.dim < 1:
            raise ValueError("rows and dim must be positive")
        if not 0 < self.density <= 1:
            raise ValueError("density must be in (0, 1]")
        if self.tail <= 0:
            raise ValueError("tail must be > 0")

    @classmethod
    def parse(cls, text: str) -> "SyntheticSpec":
        """``"rows,dim,density,tail"`` as given on the command line."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 4:
            raise ValueError("expected rows,dim,density,tail")
        return cls(int(parts[0]), int(parts[1]), float(parts[2]), float(parts[3]))

    @property
    def label(self) -> str:
        return f"synthetic-{self.rows}x{self.dim}-d{self.density:g}-t{self.tail:g}"


def _heavy(rng: np.random.Generator, tail: float, n: int) -> np.ndarray:
    # Pareto with minimum 1
    return rng.pareto(tail, n) + 1.0


def make_corpus(spec: SyntheticSpec, seed: int = 0) -> Dataset:
    """Clustered heavy-tailed corpus; every row is nonempty.

    A row copies each feature of its prototype with probability 0.7
    (weight jittered by a lognormal factor, sigma 0.5) and adds fresh
    features at the remaining rate so its expected size matches
    ``density * dim``.
    """
    rng = np.random.default_rng(seed)
    n_clusters = spec.clusters or max(1, spec.rows // 20)
    keep = 0.7
    protos = []
    for _ in range(n_clusters):
        mask = rng.random(spec.dim) < spec.density
        ids = np.flatnonzero(mask)
        protos.append((ids, _heavy(rng, spec.tail, ids.size)))
    rows = []
    labels = []
    for _ in range(spec.rows):
        c = int(rng.integers(n_clusters))
        pid, pw = protos[c]
        kept = rng.random(pid.size) < keep
        ids = pid[kept]
        w = pw[kept] * np.exp(0.5 * rng.standard_normal(ids.size))
        extra = rng.random(spec.dim) < spec.density * (1 - keep)
        extra[ids] = False
        eids = np.flatnonzero(extra)
        ids = np.concatenate([ids, eids])
        w = np.concatenate([w, _heavy(rng, spec.tail, eids.size)])
        if ids.size == 0:
            ids = rng.integers(spec.dim, size=1)
            w = _heavy(rng, spec.tail, 1)
        order = np.argsort(ids)
        rows.append(WeightedSet(ids[order].astype(np.uint64), w[order]))
        labels.append(c)
    return Dataset(tuple(rows), tuple(labels), name=spec.label)


def heavy_tailed_pair(
    rng: np.random.Generator,
    dim: int = 200,
    tail: float = 1.5,
    keep: float = 0.6,
    jitter: float = 0.25,
) -> tuple[WeightedSet, WeightedSet]:
    """A pair of related heavy-tailed sets.

    ``S`` has ``dim`` features with Pareto weights.  ``O`` keeps each of them
    with probability ``keep`` (weight times ``exp(jitter * N(0, 1))``) and
    gains about ``(1 - keep) * dim`` features of its own.
    """
    w = _heavy(rng, tail, dim)
    kept = rng.random(dim) < keep
    ow = w * np.exp(jitter * rng.standard_normal(dim))
    extra = rng.random(dim) < (1 - keep)
    S = WeightedSet(np.arange(dim, dtype=np.uint64), w)
    o_ids = np.concatenate([np.flatnonzero(kept), dim + np.flatnonzero(extra)])
    o_w = np.concatenate([ow[kept], _heavy(rng, tail, int(extra.sum()))])
    if o_ids.size == 0:
        o_ids, o_w = np.array([0]), w[:1].copy()
    return S, WeightedSet(o_ids.astype(np.uint64), o_w)


def stratified_pairs(
    n: int,
    seed: int = 0,
    lo: float = 0.1,
    hi: float = 0.9,
    dim: int = 200,
    tail: float = 1.5,
) -> list[tuple[WeightedSet, WeightedSet, float]]:
    """``n`` pairs whose exact WJS covers ``[lo, hi]``: one pair per equal-width bin.

    Pairs come from :func:`heavy_tailed_pair` with ``keep ~ U(0.1, 1)`` and
    ``jitter ~ U(0, 0.5)``; draws are rejected until every bin is filled.
    """
    rng = np.random.default_rng(seed)
    edges = np.linspace(lo, hi, n + 1)
    slots: list = [None] * n
    while any(s is None for s in slots):
        S, O = heavy_tailed_pair(rng, dim, tail, keep=rng.uniform(0.1, 1.0), jitter=rng.uniform(0.0, 0.5))
        j = wjs_exact(S, O)
        b = int(np.searchsorted(edges, j, side="right")) - 1
        if 0 <= b < n and slots[b] is None:
            slots[b] = (S, O, j)
    return slots
