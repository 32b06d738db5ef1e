"""Command-line front end: ``scws-bench <subcommand> ...``.

Every subcommand writes CSV (or the requested file) and exits 0; validation
and I/O failures print a one-line diagnostic to stderr and exit 2.
"""
from __future__ import annotations

import argparse
import contextlib
import csv
import sys
import time
from pathlib import Path
from typing import Sequence

import numpy as np

from . import bench
from .errors import CwsError
from .estimator import check_compatible, estimate
from .pool import DEFAULT_SEED, DEFAULT_SIZE, build_pool, load_pool, save_pool
from .retrieval import PrecisionReport, precision_sweep
from .sketcher import Scheme, SketchConfig, load_sketches, save_sketches, sketch_dataset
from .synthetic import SyntheticSpec, heavy_tailed_pair, make_corpus
from .vectorizer import write_bbit_libsvm
from .weighted_set import Dataset, read_libsvm, rescale_unit


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


@contextlib.contextmanager
def _output(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            yield fh


def _write_csv(path: str | None, header: Sequence[str], rows) -> None:
    with _output(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _load_data(args) -> tuple[Dataset, float]:
    """Dataset from ``--input`` or ``--synthetic``; returns it with parse time."""
    t0 = time.perf_counter()
    if getattr(args, "input", None):
        data = read_libsvm(args.input)
    elif getattr(args, "synthetic", None):
        data = make_corpus(SyntheticSpec.parse(args.synthetic), seed=args.data_seed)
    else:
        raise CwsError("give --input FILE or --synthetic rows,dim,density,tail")
    if getattr(args, "rescale", False):
        data = rescale_unit(data)
    dropped = len(data)
    data = data.without_empty()
    dropped -= len(data)
    if dropped:
        print(f"note: dropped {dropped} empty rows", file=sys.stderr)
    if len(data) == 0:
        raise CwsError("no nonempty rows in input")
    return data, time.perf_counter() - t0


def _pool(args):
    if getattr(args, "pool_file", None):
        return load_pool(args.pool_file)
    return build_pool(args.pool_size, args.pool_seed)


def _configs(args, schemes, K) -> list[SketchConfig]:
    pool = _pool(args) if Scheme.SCWS in schemes else None
    return [SketchConfig(s, K, pool=pool, base_seed=args.seed) for s in schemes]


# --- subcommands ----------------------------------------------------------------

def cmd_bias(args) -> None:
    if args.reps < 1:
        raise CwsError(f"--reps must be >= 1, got {args.reps}")
    if args.input:
        data = read_libsvm(args.input)
        i, j = args.rows
        S, O = data[i], data[j]
        pair_id = f"{Path(args.input).stem}:{i}-{j}"
    else:
        S, O = heavy_tailed_pair(np.random.default_rng(args.data_seed), dim=args.dim, tail=args.tail,
                                 keep=args.keep, jitter=args.jitter)
        pair_id = f"synthetic-{args.data_seed}"
    curves = bench.bias_curves(S, O, bench.parse_schemes(args.scheme), args.k, args.reps, args.seed,
                               args.pool_size, pair_id)
    _write_csv(args.out, bench.BiasCurve.CSV_FIELDS, (r for c in curves for r in c.csv_rows()))


def cmd_bench(args) -> None:
    data, parse_s = _load_data(args)
    schemes = bench.parse_schemes(args.scheme)
    rows = bench.time_schemes(data, schemes, args.k, args.threads, args.b, args.repeats,
                              pool=_pool(args), base_seed=args.seed, parse_seconds=parse_s)
    _write_csv(args.out, bench.ThroughputRow.CSV_FIELDS, (r.csv_row() for r in rows))


def cmd_pool_sweep(args) -> None:
    sizes = _int_list(args.sizes)
    if not sizes or min(sizes) < 1:
        raise CwsError("--sizes must list pool sizes >= 1")
    if args.task == "bias":
        S, O = heavy_tailed_pair(np.random.default_rng(args.data_seed), dim=args.dim, tail=args.tail,
                                 keep=args.keep, jitter=args.jitter)
        rows = bench.pool_sweep_bias(S, O, sizes, args.k, args.reps, args.seed)
    else:
        data, _ = _load_data(args)
        rows = bench.pool_sweep_precision(data, sizes, args.k, args.kappa, args.queries, args.seed,
                                          args.pool_seed, args.threads)
    _write_csv(args.out, bench.SweepRow.CSV_FIELDS, (r.csv_row() for r in rows))


def cmd_sketch(args) -> None:
    data, _ = _load_data(args)
    (cfg,) = _configs(args, [Scheme(args.scheme)], args.k)
    batch = sketch_dataset(data, cfg, args.threads)
    if args.out in (None, "-"):
        raise CwsError("sketch needs --out FILE")
    save_sketches(batch, args.out)


def cmd_estimate(args) -> None:
    a = load_sketches(args.a)
    b = load_sketches(args.b)
    check_compatible(a, b)
    if len(a) != len(b):
        raise CwsError(f"row counts differ: {len(a)} vs {len(b)}")
    rows = ([i, repr(estimate(a[i], b[i]))] for i in range(len(a)))
    _write_csv(args.out, ("row", "estimate"), rows)


def cmd_vectorize(args) -> None:
    data, _ = _load_data(args)
    (cfg,) = _configs(args, [Scheme(args.scheme)], args.k)
    batch = sketch_dataset(data, cfg, args.threads).to_zero_bit()
    if args.out in (None, "-"):
        raise CwsError("vectorize needs --out FILE")
    write_bbit_libsvm(args.out, batch, args.b, data.labels, normalize=args.normalize)


def cmd_knn(args) -> None:
    data, _ = _load_data(args)
    schemes = bench.parse_schemes(args.scheme)
    Ks = _int_list(args.k)
    if not Ks or min(Ks) < 1:
        raise CwsError("--k must list sketch sizes >= 1")
    reports = precision_sweep(data, _configs(args, schemes, max(Ks)), Ks, args.kappa, args.queries,
                              args.seed, args.threads)
    _write_csv(args.out, PrecisionReport.CSV_FIELDS, (r.csv_row() for r in reports))


def cmd_pool(args) -> None:
    if args.out in (None, "-"):
        raise CwsError("pool needs --out FILE")
    save_pool(build_pool(args.pool_size, args.pool_seed, precision=args.precision), args.out)


# --- parser --------------------------------------------------------------------

def _add_pool_flags(p) -> None:
    p.add_argument("--pool-size", type=int, default=DEFAULT_SIZE)
    p.add_argument("--pool-seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--pool-file", help="load the pool from a snapshot instead of sampling it")


def _add_data_flags(p) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--input", help="LIBSVM file")
    g.add_argument("--synthetic", metavar="ROWS,DIM,DENSITY,TAIL")
    p.add_argument("--data-seed", type=int, default=0, help="seed for synthetic data")
    p.add_argument("--rescale", action="store_true", help="rescale each feature to (0, 1] first")


def _add_pair_flags(p) -> None:
    p.add_argument("--dim", type=int, default=200)
    p.add_argument("--tail", type=float, default=1.5)
    p.add_argument("--keep", type=float, default=0.6)
    p.add_argument("--jitter", type=float, default=0.25)
    p.add_argument("--data-seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="scws-bench", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, out_help="output path (default stdout)"):
        p.add_argument("--out", help=out_help)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--threads", type=int, default=1)

    p = sub.add_parser("bias", help="mean bias of each scheme vs exact WJS for K = 1..k")
    common(p)
    p.add_argument("--input", help="LIBSVM file; the pair is two of its rows")
    p.add_argument("--rows", type=int, nargs=2, default=(0, 1), metavar=("I", "J"))
    _add_pair_flags(p)
    p.add_argument("--scheme", action="append", help="icws, icws0, scws (repeatable; default all)")
    p.add_argument("--k", type=int, default=1000)
    p.add_argument("--reps", type=int, default=200)
    p.add_argument("--pool-size", type=int, default=DEFAULT_SIZE)
    p.set_defaults(func=cmd_bias)

    p = sub.add_parser("bench", help="sketching throughput per scheme")
    common(p)
    _add_data_flags(p)
    _add_pool_flags(p)
    p.add_argument("--scheme", action="append")
    p.add_argument("--k", type=int, default=1000)
    p.add_argument("--b", type=int, default=8)
    p.add_argument("--repeats", type=int, default=1)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("pool-sweep", help="SCWS metric as a function of pool size")
    common(p)
    p.add_argument("--task", choices=("bias", "precision"), default="bias")
    p.add_argument("--sizes", default="32,512,4000,65536")
    p.add_argument("--k", type=int, default=1000)
    p.add_argument("--reps", type=int, default=200)
    p.add_argument("--kappa", type=int, default=10)
    p.add_argument("--queries", type=int, default=100)
    p.add_argument("--pool-seed", type=int, default=DEFAULT_SEED)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--input")
    g.add_argument("--synthetic", metavar="ROWS,DIM,DENSITY,TAIL")
    p.add_argument("--rescale", action="store_true")
    _add_pair_flags(p)
    p.set_defaults(func=cmd_pool_sweep)

    p = sub.add_parser("sketch", help="write sketches of every row to a sketch file")
    common(p, "sketch file to write")
    _add_data_flags(p)
    _add_pool_flags(p)
    p.add_argument("--scheme", default="scws", choices=[s.value for s in Scheme])
    p.add_argument("--k", type=int, default=1000)
    p.set_defaults(func=cmd_sketch)

    p = sub.add_parser("estimate", help="row-wise similarity estimates between two sketch files")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--out")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("vectorize", help="b-bit one-hot features in LIBSVM format")
    common(p, "LIBSVM file to write")
    _add_data_flags(p)
    _add_pool_flags(p)
    p.add_argument("--scheme", default="scws", choices=[s.value for s in Scheme])
    p.add_argument("--k", type=int, default=4096)
    p.add_argument("--b", type=int, default=8)
    p.add_argument("--normalize", action="store_true", help="values 1/sqrt(K) instead of 1")
    p.set_defaults(func=cmd_vectorize)

    p = sub.add_parser("knn", help="precision@kappa of sketch k-NN against exact WJS k-NN")
    common(p)
    _add_data_flags(p)
    _add_pool_flags(p)
    p.add_argument("--scheme", action="append")
    p.add_argument("--k", default="64,512", help="comma-separated sketch sizes")
    p.add_argument("--kappa", type=int, default=10)
    p.add_argument("--queries", type=int, default=100)
    p.set_defaults(func=cmd_knn)

    p = sub.add_parser("pool", help="write a pool snapshot file")
    p.add_argument("--out")
    p.add_argument("--pool-size", type=int, default=DEFAULT_SIZE)
    p.add_argument("--pool-seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--precision", choices=("single", "double"), default="single")
    p.set_defaults(func=cmd_pool)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (CwsError, ValueError, OSError) as e:
        print(f"scws-bench {args.command}: error: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
