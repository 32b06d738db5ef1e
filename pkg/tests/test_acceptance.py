"""Acceptance gate.

Each criterion is run at its stated tolerance and appends one PASS/FAIL line
to ``conftest.ACCEPTANCE_LINES``; the lines are printed after the session.
Inputs (pair generators, corpus specs, seeds) were fixed before any result
was looked at.
"""
import csv
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest
from scipy import stats

import conftest
from scws import bench, cli
from scws.estimator import estimate
from scws.pool import build_pool
from scws.sketcher import Scheme, SketchConfig, build_sketch
from scws.synthetic import SyntheticSpec, make_corpus, stratified_pairs
from scws.weighted_set import WeightedSet

SCHEMES = (Scheme.ICWS, Scheme.ICWS0, Scheme.SCWS)


def _record(name, ok, detail):
    conftest.ACCEPTANCE_LINES.append(f"{name}: {'PASS' if ok else 'FAIL'}  {detail}")
    return ok


def _cli_csv(tmp_path, argv):
    out = tmp_path / f"{argv[0]}.csv"
    assert cli.main(argv + ["--out", str(out)]) == 0
    with open(out, newline="") as fh:
        return list(csv.DictReader(fh))


def _config(scheme, K, seed=0, pool=None):
    if scheme is Scheme.SCWS:
        return SketchConfig(scheme, K, pool=pool or build_pool())
    return SketchConfig(scheme, K, base_seed=seed)


def test_c1_collision_fidelity():
    t0 = time.perf_counter()
    pairs = stratified_pairs(20, seed=0)
    worst = {}
    failing = {}
    for s in SCHEMES:
        cfg = _config(s, 5000)
        errs = [estimate(build_sketch(S, cfg), build_sketch(O, cfg)) - j for S, O, j in pairs]
        worst[s] = max(errs, key=abs)
        failing[s] = sum(abs(e) >= 0.02 for e in errs)
    elapsed = time.perf_counter() - t0
    ok = all(n == 0 for n in failing.values()) and elapsed < 60
    detail = "; ".join(f"{s.value} worst {worst[s]:+.4f} fails {failing[s]}/20" for s in SCHEMES)
    _record("C1 collision fidelity |est-wjs|<0.02 @K=5000", ok, f"{detail}; {elapsed:.1f}s")
    assert ok


def test_c2_mean_bias(tmp_path):
    t0 = time.perf_counter()
    rows = _cli_csv(tmp_path, ["bias", "--k", "1000", "--reps", "200", "--seed", "0"])
    elapsed = time.perf_counter() - t0
    at = {r["scheme"]: float(r["mean_bias"]) for r in rows if r["K"] == "1000"}
    ok = all(abs(at[s.value]) < 0.02 for s in SCHEMES) and elapsed < 300
    detail = ", ".join(f"{s.value} {at[s.value]:+.4f}" for s in SCHEMES)
    _record("C2 mean bias |b|<0.02 @K=1000, R=200", ok,
            f"wjs {float(rows[0]['true_wjs']):.4f}; {detail}; {elapsed:.1f}s")
    assert ok


def _uniformity_sets():
    rng = np.random.default_rng(2018)
    for _ in range(5):
        ids = np.sort(rng.choice(10**6, 50, replace=False)).astype(np.uint64)
        yield WeightedSet(ids, 1.0 - rng.random(50))


def test_c3_uniformity():
    t0 = time.perf_counter()
    n = 50000
    pvals = {Scheme.ICWS: [], Scheme.SCWS: []}
    for S in _uniformity_sets():
        expected = n * S.weights / S.weights.sum()
        for s in pvals:
            z = build_sketch(S, _config(s, n, seed=11)).ids
            observed = np.searchsorted(S.ids, z)
            counts = np.bincount(observed, minlength=len(S))
            pvals[s].append(stats.chisquare(counts, expected).pvalue)
    elapsed = time.perf_counter() - t0
    ok = all(p > 0.001 for ps in pvals.values() for p in ps) and elapsed < 60
    detail = "; ".join(f"{s.value} min p {min(ps):.2e}" for s, ps in pvals.items())
    _record("C3 uniformity chi-square p>0.001, 5 sets D=50", ok, f"{detail}; {elapsed:.1f}s")
    assert ok


def test_c4_scws_scale_invariance():
    rng = np.random.default_rng(7)
    pool = build_pool()
    cfg = SketchConfig(Scheme.SCWS, 256, pool=pool)
    mismatches = 0
    for _ in range(100):
        d = int(rng.integers(1, 200))
        ids = np.sort(rng.choice(10**7, d, replace=False)).astype(np.uint64)
        S = WeightedSet(ids, rng.pareto(1.5, d) + 1.0)
        base = build_sketch(S, cfg)
        for alpha in (1e-3, 1.0, 7.3, 1e3):
            mismatches += not np.array_equal(build_sketch(S.scaled(alpha), cfg).ids, base.ids)
    ok = mismatches == 0
    _record("C4 SCWS scale invariance, 100 sets x 4 scales", ok, f"{mismatches} mismatching sketches")
    assert ok


@pytest.mark.slow
def test_c5_speedup():
    t0 = time.perf_counter()
    data = make_corpus(SyntheticSpec(2000, 20000, 0.01), seed=0)
    rows = {r.scheme: r for r in bench.time_schemes(data, SCHEMES, K=1000, threads=1, repeats=2)}
    elapsed = time.perf_counter() - t0
    sk = {s: rows[s.value].sketch_seconds for s in SCHEMES}
    speedup = sk[Scheme.ICWS] / sk[Scheme.SCWS]
    gap = abs(sk[Scheme.ICWS0] - sk[Scheme.ICWS]) / sk[Scheme.ICWS]
    ok = speedup >= 4 and gap < 0.10 and elapsed < 300
    _record("C5 speedup SCWS/ICWS >= 4x, ICWS vs ICWS-0bit within 10%", ok,
            f"nnz/row {data.nnz / len(data):.0f}; icws {sk[Scheme.ICWS]:.2f}s icws0 {sk[Scheme.ICWS0]:.2f}s "
            f"scws {sk[Scheme.SCWS]:.2f}s; speedup {speedup:.1f}x; gap {gap:.1%}; {elapsed:.1f}s")
    assert ok


def test_c6_pool_robustness(tmp_path):
    t0 = time.perf_counter()
    rows = _cli_csv(tmp_path, ["pool-sweep", "--task", "bias", "--sizes", "4000,65536",
                               "--k", "1000", "--reps", "200", "--seed", "0"])
    elapsed = time.perf_counter() - t0
    m = {int(r["pool_size"]): float(r["metric"]) for r in rows}
    ok = abs(m[4000] - m[65536]) < 0.02 and elapsed < 600
    _record("C6 pool robustness |bias(4000)-bias(65536)|<0.02", ok,
            f"4000 {m[4000]:+.4f}, 65536 {m[65536]:+.4f}; {elapsed:.1f}s")
    assert ok


def test_c7_retrieval_trend(tmp_path):
    t0 = time.perf_counter()
    rows = _cli_csv(tmp_path, ["knn", "--synthetic", "500,1000,0.05,1.5", "--k", "64,512",
                               "--kappa", "10", "--queries", "100", "--scheme", "scws,icws"])
    elapsed = time.perf_counter() - t0
    p = {(r["scheme"], int(r["K"])): float(r["precision"]) for r in rows}
    trend = p["scws", 512] >= p["scws", 64] - 0.02
    close = abs(p["scws", 512] - p["icws", 512]) <= 0.05
    ok = trend and close and elapsed < 300
    _record("C7 retrieval trend and SCWS~ICWS @K=512", ok,
            f"scws {p['scws', 64]:.3f}->{p['scws', 512]:.3f}; icws {p['icws', 64]:.3f}->{p['icws', 512]:.3f}; "
            f"{elapsed:.1f}s")
    assert ok


PROPERTY_TESTS = [
    "tests/test_sketcher.py::test_prefix_property",
    "tests/test_sketcher.py::test_feature_order_invariance",
    "tests/test_sketcher.py::test_determinism",
    "tests/test_sketcher.py::test_elementwise_max_containment",
    "tests/test_sketcher.py::test_icws_t_bound",
    "tests/test_estimator.py::test_wjs_matches_brute_force",
    "tests/test_estimator.py::test_self_estimate_is_one",
    "tests/test_vectorizer.py::test_shape_and_nnz",
    "tests/test_vectorizer.py::test_slot_locality",
    "tests/test_weighted_set.py::test_libsvm_round_trip",
    "tests/test_weighted_set.py::test_rescale_properties",
]


def test_c8_property_suites():
    root = Path(__file__).resolve().parents[1]
    proc = subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", *PROPERTY_TESTS],
                          cwd=root, capture_output=True, text=True)
    summary = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr[-200:]
    ok = proc.returncode == 0
    _record("C8 property suites", ok, summary)
    assert ok, proc.stdout[-2000:]
