import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.core.errors import DimensionMismatchError, InvalidInputError
from src.core.sequences import SparseSeq, cesaro, reflect, translate, truncate


def _seq(blocks, lo=-1):
    return SparseSeq.from_dense(lo, np.asarray(blocks, dtype=complex).reshape(-1, 1))


def test_zero_blocks_dropped():
    s = SparseSeq(2, {0: [0, 0], 3: [1, 0]})
    assert s.indices() == [3]
    assert s.support() == (3, 3)
    assert SparseSeq.zeros(2).is_zero()
    assert np.array_equal(s[7], np.zeros(2))


def test_translate_delta():
    d = SparseSeq.delta(np.array([1.0, 2.0]), 0)
    t = translate(d, 3)
    assert t.indices() == [3]
    assert np.array_equal(t[3], d[0])


def test_reflect_twice_is_identity():
    s = _seq([1, 2, 3, 4], lo=-2)
    assert reflect(reflect(s)).allclose(s)
    assert reflect(s).support() == (-1, 2)


def test_truncate():
    s = _seq([1, 2, 3, 4, 5], lo=-2)
    assert truncate(s, 1).indices() == [-1, 0, 1]


def test_cesaro_order_one():
    a, b, c = 2.0, 3.0, -4.0
    out = cesaro(1, _seq([a, b, c]))
    assert out[-1][0] == pytest.approx(a / 2)
    assert out[0][0] == pytest.approx(b)
    assert out[1][0] == pytest.approx(c / 2)


def test_cesaro_order_zero_keeps_index_zero():
    out = cesaro(0, _seq([1, 2, 3]))
    assert out.indices() == [0]


def test_cesaro_rejects_negative_order():
    with pytest.raises(InvalidInputError):
        cesaro(-1, _seq([1]))


def test_dict_descriptor():
    s = SparseSeq.from_dict({"dim": 2, "entries": [{"k": -1, "re": [1, 0], "im": [0, 2]}]})
    assert s[-1][1] == 2j
    assert SparseSeq.from_dict(s.to_dict()).allclose(s)
    with pytest.raises(InvalidInputError):
        SparseSeq.from_dict({"entries": []})


def test_dimension_checks():
    with pytest.raises(DimensionMismatchError):
        SparseSeq(2, {0: [1, 2, 3]})
    with pytest.raises(DimensionMismatchError):
        SparseSeq.delta([1.0]) + SparseSeq.delta([1.0, 2.0])


def test_to_dense_window():
    s = _seq([1, 2], lo=0)
    assert s.to_dense(-1, 2).shape == (4, 1)
    with pytest.raises(InvalidInputError):
        s.to_dense(1, 2)


blocks = st.lists(st.floats(-10, 10, allow_nan=False), min_size=1, max_size=8)


@given(vals=blocks, lo=st.integers(-6, 6), m=st.integers(-10, 10))
@settings(max_examples=200, deadline=None)
def test_translate_preserves_total(vals, lo, m):
    s = _seq(vals, lo)
    assert np.allclose(translate(s, m).total(), s.total())
    assert translate(translate(s, m), -m).allclose(s)


@given(vals=blocks, lo=st.integers(-6, 6))
@settings(max_examples=200, deadline=None)
def test_cesaro_covering_order_is_near_identity(vals, lo):
    s = _seq(vals, lo)
    reach = max(abs(lo), abs(lo + len(vals) - 1))
    n = 10 ** 6 * (reach + 1)
    assert cesaro(n, s).allclose(s, atol=1e-4 * (1 + float(np.abs(s.to_dense()).max(initial=0.0))))
    # Each block is scaled by (n + 1 - |k|) / (n + 1)
    n = reach
    c = cesaro(n, s)
    for k in s.indices():
        assert np.allclose(c[k], s[k] * (n + 1 - abs(k)) / (n + 1))
