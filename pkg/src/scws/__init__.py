"""Weighted min-hash sketching: ICWS, 0-bit ICWS and simplified CWS with a value pool."""
import os

import numba

if "NUMBA_THREADING_LAYER" not in os.environ:
    # skip the TBB probe, which warns on older system TBB builds
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

from .errors import CwsError  # noqa: E402
from .estimator import estimate, wjs_exact  # noqa: E402
from .pool import SamplePool, build_pool, gamma21, load_pool, pool_index, save_pool  # noqa: E402
from .sketcher import (  # noqa: E402
    IcwsHash,
    Scheme,
    Sketch,
    SketchBatch,
    SketchConfig,
    build_sketch,
    icws0_minhash,
    icws_minhash,
    load_sketches,
    save_sketches,
    scws_minhash,
    sketch_dataset,
)
from .vectorizer import BBitVector, vectorize  # noqa: E402
from .weighted_set import (  # noqa: E402
    Dataset,
    WeightedSet,
    from_pairs,
    parse_libsvm_line,
    read_libsvm,
    rescale_unit,
)

__all__ = [
    "BBitVector", "CwsError", "Dataset", "IcwsHash", "SamplePool", "Scheme", "Sketch",
    "SketchBatch", "SketchConfig", "WeightedSet", "build_pool", "build_sketch", "estimate",
    "from_pairs", "gamma21", "icws0_minhash", "icws_minhash", "load_pool", "load_sketches",
    "parse_libsvm_line", "pool_index", "read_libsvm", "rescale_unit", "save_pool",
    "save_sketches", "scws_minhash", "sketch_dataset", "vectorize", "wjs_exact",
]
