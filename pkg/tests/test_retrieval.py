import numpy as np
import pytest

from scws.errors import KappaTooLargeError, ListTooShortError
from scws.estimator import estimate
from scws.pool import build_pool
from scws.retrieval import (
    PrecisionReport,
    exact_knn,
    precision_at,
    precision_sweep,
    sample_queries,
    sketch_knn,
    top_kappa,
)
from scws.sketcher import SketchConfig, sketch_dataset
from scws.synthetic import SyntheticSpec, make_corpus


@pytest.fixture(scope="module")
def corpus():
    return make_corpus(SyntheticSpec(50, 80, 0.2), seed=4)


def _brute_knn(q, rows, kappa, exclude=None):
    # independent oracle: python dicts and sort by (-score, index)
    qd = q.to_dict()
    scored = []
    for i, r in enumerate(rows):
        if i == exclude:
            continue
        rd = r.to_dict()
        keys = set(qd) | set(rd)
        lo = sum(min(qd.get(z, 0), rd.get(z, 0)) for z in keys)
        hi = sum(max(qd.get(z, 0), rd.get(z, 0)) for z in keys)
        scored.append((-lo / hi, i))
    return [i for _, i in sorted(scored)[:kappa]]


def test_exact_knn_matches_brute_force(corpus):
    for qi in range(0, 50, 7):
        q = corpus[qi]
        assert exact_knn(q, corpus, 5) == _brute_knn(q, corpus.rows, 5)
        assert exact_knn(q, corpus, 5, exclude=qi) == _brute_knn(q, corpus.rows, 5, exclude=qi)


def test_self_is_first(corpus):
    assert exact_knn(corpus[11], corpus, 1) == [11]


def test_kappa_equals_corpus_size(corpus):
    assert sorted(exact_knn(corpus[0], corpus, 50)) == list(range(50))
    with pytest.raises(KappaTooLargeError):
        exact_knn(corpus[0], corpus, 51)
    with pytest.raises(KappaTooLargeError):
        exact_knn(corpus[0], corpus, 50, exclude=0)


def test_top_kappa_ties_prefer_smaller_index():
    assert top_kappa(np.array([0.5, 0.9, 0.5, 0.9]), 3) == [1, 3, 0]
    assert top_kappa(np.array([0.5, 0.9, 0.5, 0.9]), 3, exclude=1) == [3, 0, 2]


def test_precision_examples():
    assert precision_at([1, 2, 3, 4], [1, 9, 3, 8], 4) == 0.5
    assert precision_at([1, 2], [2, 1], 2) == 1.0
    assert precision_at([1, 2, 3], [4, 5, 6], 3) == 0.0
    with pytest.raises(ListTooShortError):
        precision_at([1, 2], [1, 2, 3], 3)


def test_sketch_knn_orders_by_estimate(corpus, pool):
    batch = sketch_dataset(corpus, SketchConfig("scws", 128, pool))
    q = batch[5]
    est = [estimate(q, batch[i]) for i in range(len(batch))]
    want = sorted(range(len(batch)), key=lambda i: (-est[i], i))[:10]
    assert sketch_knn(q, batch, 10) == want
    assert sketch_knn(q, batch, 1) == [5]
    assert 5 not in sketch_knn(q, batch, 10, exclude=5)


def test_sample_queries():
    q = sample_queries(100, 10, 3)
    assert len(set(q.tolist())) == 10 and q.tolist() == sorted(q.tolist())
    assert np.array_equal(q, sample_queries(100, 10, 3))
    assert len(sample_queries(5, 10, 3)) == 5


def test_precision_sweep(corpus, pool):
    cfgs = [SketchConfig("icws", 1, base_seed=2), SketchConfig("scws", 1, pool)]
    reps = precision_sweep(corpus, cfgs, [8, 64], kappa=5, n_queries=20, seed=1)
    assert [(r.scheme, r.K) for r in reps] == [("icws", 8), ("icws", 64), ("scws", 8), ("scws", 64)]
    for r in reps:
        assert isinstance(r, PrecisionReport)
        assert 0.0 <= r.precision <= 1.0 and r.queries == 20 and r.kappa == 5
    # identical sketching gives identical numbers
    again = precision_sweep(corpus, cfgs, [8, 64], kappa=5, n_queries=20, seed=1)
    assert [r.precision for r in reps] == [r.precision for r in again]


def test_precision_sweep_large_K_recovers_exact(corpus):
    # with K large the sketch neighbours approach the exact ones
    (r,) = precision_sweep(corpus, [SketchConfig("icws", 1)], [4096], kappa=3, n_queries=10, seed=0)
    assert r.precision >= 0.8
