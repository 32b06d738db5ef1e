"""k-NN precision harness: exact WJS neighbours vs sketch-estimated ones."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import KappaTooLargeError, ListTooShortError
from .estimator import estimate_rows, wjs_to_rows
from .sketcher import Scheme, Sketch, SketchBatch, SketchConfig, sketch_dataset
from .weighted_set import Dataset, WeightedSet


@dataclass(frozen=True)
class PrecisionReport:
    dataset: str
    scheme: str
    K: int
    kappa: int
    queries: int
    precision: float
    corpus_size: int = 0
    seed: int = 0

    CSV_FIELDS = ("dataset", "scheme", "K", "kappa", "queries", "precision")

    def csv_row(self) -> list:
        return [self.dataset, self.scheme, self.K, self.kappa, self.queries, repr(self.precision)]


def top_kappa(scores: np.ndarray, kappa: int, exclude: int | None = None) -> list[int]:
    """Row indices of the ``kappa`` largest scores; ties to the smaller index."""
    scores = np.asarray(scores, dtype=np.float64)
    n = scores.size - (exclude is not None)
    if kappa > n:
        raise KappaTooLargeError(f"kappa={kappa} exceeds {n} candidates")
    idx = np.arange(scores.size)
    if exclude is not None:
        keep = idx != exclude
        idx, scores = idx[keep], scores[keep]
    order = np.lexsort((idx, -scores))
    return idx[order[:kappa]].tolist()


def exact_knn(query: WeightedSet, corpus: Dataset, kappa: int, exclude: int | None = None) -> list[int]:
    """Top-``kappa`` corpus rows by exact WJS, most similar first.

    ``exclude`` drops one row (the query's own row) from the candidates.
    """
    indptr, ids, w = corpus.csr()
    return top_kappa(wjs_to_rows(query, indptr, ids, w), kappa, exclude)


def sketch_knn(query: Sketch, corpus: SketchBatch, kappa: int, exclude: int | None = None) -> list[int]:
    return top_kappa(estimate_rows(query, corpus), kappa, exclude)


def precision_at(truth: Sequence[int], retrieved: Sequence[int], kappa: int) -> float:
    if len(truth) < kappa or len(retrieved) < kappa:
        raise ListTooShortError(f"need at least {kappa} entries in both lists")
    return len(set(truth[:kappa]) & set(retrieved[:kappa])) / kappa


def sample_queries(n_rows: int, n_queries: int, seed: int) -> np.ndarray:
    n_queries = min(n_queries, n_rows)
    return np.sort(np.random.default_rng(seed).choice(n_rows, n_queries, replace=False))


def precision_sweep(
    corpus: Dataset,
    configs: Iterable[SketchConfig],
    Ks: Sequence[int],
    kappa: int,
    n_queries: int,
    seed: int = 0,
    threads: int | None = None,
) -> list[PrecisionReport]:
    """Mean precision@kappa for every config and every K in ``Ks``.

    Each config is sketched once at ``max(Ks)``; smaller K are read as
    prefixes.  Queries are corpus rows and are excluded from their own
    candidate lists.
    """
    Ks = sorted(set(int(k) for k in Ks))
    queries = sample_queries(len(corpus), n_queries, seed)
    truth = {int(q): exact_knn(corpus[int(q)], corpus, kappa, exclude=int(q)) for q in queries}
    reports = []
    for cfg in configs:
        full = sketch_dataset(corpus, SketchConfig(cfg.scheme, max(Ks), cfg.pool, cfg.base_seed), threads)
        for K in Ks:
            batch = full.prefix(K)
            precs = [
                precision_at(truth[int(q)], sketch_knn(batch[int(q)], batch, kappa, exclude=int(q)), kappa)
                for q in queries
            ]
            reports.append(
                PrecisionReport(corpus.name, Scheme(cfg.scheme).value, K, kappa, len(queries),
                                math.fsum(precs) / len(precs), len(corpus), seed)
            )
    return reports
