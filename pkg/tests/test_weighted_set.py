import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import weighted_sets
from scws.errors import (
    DuplicateFeatureError,
    EmptyDatasetError,
    MalformedLineError,
    NegativeWeightError,
    NonFiniteWeightError,
    NonMonotonicIndexError,
)
from scws.weighted_set import (
    Dataset,
    format_libsvm_line,
    from_pairs,
    parse_libsvm_line,
    read_libsvm,
    rescale_set,
    rescale_unit,
    write_libsvm,
)


def test_from_pairs_basic():
    s = from_pairs([(3, 2.0), (7, 1.0)])
    assert len(s) == 2
    assert s[3] == 2.0 and s[7] == 1.0


def test_from_pairs_drops_zero():
    s = from_pairs([(3, 0.0), (7, 1.0)])
    assert len(s) == 1
    assert 3 not in s and s[3] == 0.0


def test_from_pairs_rejects_negative():
    with pytest.raises(NegativeWeightError):
        from_pairs([(3, -1.0)])


@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_from_pairs_rejects_non_finite(bad):
    with pytest.raises(NonFiniteWeightError):
        from_pairs([(1, bad)])


def test_from_pairs_rejects_duplicates():
    with pytest.raises(DuplicateFeatureError):
        from_pairs([(1, 1.0), (1, 2.0)])
    with pytest.raises(DuplicateFeatureError):
        from_pairs([(1, 0.0), (1, 2.0)])


def test_set_is_immutable():
    s = from_pairs([(1, 1.0)])
    with pytest.raises(ValueError):
        s.weights[0] = 3.0


def test_order_of_pairs_does_not_matter():
    a = from_pairs([(5, 1.0), (2, 3.0), (9, 0.5)])
    b = from_pairs([(9, 0.5), (5, 1.0), (2, 3.0)])
    assert a == b
    assert a.ids.tolist() == [2, 5, 9]


def test_large_feature_ids():
    s = from_pairs([(2**64 - 2, 1.0), (0, 2.0)])
    assert s.ids.tolist() == [0, 2**64 - 2]


# --- LIBSVM -------------------------------------------------------------------

def test_parse_line():
    label, s = parse_libsvm_line("1 1:0.5 4:2")
    assert label == 1
    assert s.to_dict() == {1: 0.5, 4: 2.0}


def test_parse_label_only():
    label, s = parse_libsvm_line("-1 ")
    assert label == -1 and len(s) == 0


def test_parse_non_monotonic():
    with pytest.raises(NonMonotonicIndexError):
        parse_libsvm_line("1 4:2 1:0.5")
    with pytest.raises(NonMonotonicIndexError):
        parse_libsvm_line("1 4:2 4:0.5")


@pytest.mark.parametrize("line", ["", "abc 1:2", "1 1-2", "1 x:2", "1 1:y", "1.5 1:2"])
def test_parse_malformed(line):
    with pytest.raises(MalformedLineError):
        parse_libsvm_line(line)


def test_parse_negative_value():
    with pytest.raises(NegativeWeightError):
        parse_libsvm_line("1 2:-0.5")


def test_parse_comment_and_zero_values():
    label, s = parse_libsvm_line("+1 2:0 3:1.5 # trailing 9:9")
    assert label == 1 and s.to_dict() == {3: 1.5}


@given(st.integers(-5, 5), weighted_sets(min_size=0, max_id=10**6))
def test_libsvm_round_trip(label, s):
    line = format_libsvm_line(label, s)
    assert parse_libsvm_line(line) == (label, s)


def test_read_libsvm_reports_line(tmp_path):
    p = tmp_path / "d.svm"
    p.write_text("# header\n1 1:1\n\n-1 3:1 2:1\n")
    with pytest.raises(NonMonotonicIndexError, match="line 4"):
        read_libsvm(p)


def test_read_write_file(tmp_path):
    d = Dataset((from_pairs([(1, 0.5), (4, 2.0)]), from_pairs([(2, 1.0)])), (1, -1))
    p = tmp_path / "d.svm"
    write_libsvm(p, d, header="two rows")
    back = read_libsvm(p)
    assert back.rows == d.rows and back.labels == d.labels


# --- rescaling ------------------------------------------------------------------

def _rows(*dicts):
    return Dataset(tuple(from_pairs(d.items()) for d in dicts))


def _brute_rescale(rows):
    colmax = {}
    for r in rows:
        for z, w in r.items():
            colmax[z] = max(colmax.get(z, 0.0), w)
    return [{z: w / colmax[z] for z, w in r.items()} for r in rows]


def test_rescale_examples():
    out = rescale_unit(_rows({1: 2}, {1: 4}))
    assert [r.to_dict() for r in out.rows] == [{1: 0.5}, {1: 1.0}]
    out = rescale_unit(_rows({1: 1}))
    assert out.rows[0].to_dict() == {1: 1.0}


def test_rescale_matches_brute_force():
    rows = [{1: 3.0, 2: 6.0}, {2: 2.0}]
    got = [r.to_dict() for r in rescale_unit(_rows(*rows)).rows]
    want = _brute_rescale(rows)
    assert got == [{1: 1.0, 2: 1.0}, {2: 1 / 3}]
    for g, w in zip(got, want):
        assert g.keys() == w.keys()
        assert all(math.isclose(g[k], w[k], rel_tol=1e-15) for k in g)


def test_rescale_empty():
    with pytest.raises(EmptyDatasetError):
        rescale_unit(Dataset(()))


@given(st.lists(weighted_sets(max_id=8), min_size=1, max_size=6))
def test_rescale_properties(sets):
    d = Dataset(tuple(sets))
    once = rescale_unit(d)
    twice = rescale_unit(once)
    assert once.rows == twice.rows
    for before, after in zip(d.rows, once.rows):
        assert np.all(after.weights > 0) and np.all(after.weights <= 1)
        assert after.ids.tolist() == before.ids.tolist()
    # per column: the row holding the maximum is unchanged and ratios survive
    for z in {int(z) for s in sets for z in s.ids}:
        col = [(r[z], o[z]) for r, o in zip(d.rows, once.rows) if z in r]
        assert np.argmax([b for b, _ in col]) == np.argmax([a for _, a in col])
        ref_before, ref_after = col[0]
        for b, a in col[1:]:
            assert math.isclose(b / ref_before, a / ref_after, rel_tol=1e-12)


def test_rescale_query_uses_corpus_max():
    d = rescale_unit(_rows({1: 2.0, 2: 4.0}, {1: 8.0}))
    q = rescale_set(from_pairs([(1, 4.0), (2, 1.0), (3, 7.0)]), d.feature_max)
    assert q.to_dict() == {1: 0.5, 2: 0.25, 3: 1.0}
