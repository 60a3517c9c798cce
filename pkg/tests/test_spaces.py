import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.core.errors import DimensionMismatchError, InvalidInputError
from src.core.interpolation import sum_norm
from src.core.spaces import Couple, NormedSpace, conjugate_exponent, intersection_norm, parse_exponent

EXPONENTS = [1.0, 1.5, 2.0, 4.0, math.inf]


@pytest.mark.parametrize("p, w, v, expected", [
    (2, (1, 1), (3, 4), 5.0),
    (1, (2, 3), (1, -1), 5.0),
    ("inf", (1, 2), (3, 1), 3.0),
])
def test_norm_examples(p, w, v, expected):
    assert NormedSpace.weighted_lp(p, w).norm(v) == pytest.approx(expected)


@pytest.mark.parametrize("p, w, v, expected", [
    (2, (1, 1), (0, 1), 1.0),
    (1, (2, 3), (2, 3), 1.0),
    ("inf", (1, 1), (1, 1), 2.0),
])
def test_dual_norm_examples(p, w, v, expected):
    assert NormedSpace.weighted_lp(p, w).dual_norm(v) == pytest.approx(expected)


@pytest.mark.parametrize("p", EXPONENTS)
def test_duality_map_norms_x(p):
    sp = NormedSpace.weighted_lp(p, [0.5, 2.0, 3.0])
    x = np.array([1.0 - 1j, 0.25, -2.0])
    y = sp.duality_map(x)
    assert abs(np.sum(x * y)) == pytest.approx(sp.norm(x))
    assert sp.dual_norm(y) == pytest.approx(1.0)


def test_parse_exponent():
    assert parse_exponent("inf") == math.inf
    assert parse_exponent("Infinity") == math.inf
    assert parse_exponent(2) == 2.0
    assert conjugate_exponent(1.0) == math.inf
    assert conjugate_exponent(4.0) == pytest.approx(4.0 / 3.0)
    with pytest.raises(InvalidInputError):
        parse_exponent(0.5)


def test_invalid_spaces():
    with pytest.raises(InvalidInputError):
        NormedSpace.weighted_lp(2, [1.0, 0.0])
    with pytest.raises(InvalidInputError):
        NormedSpace.weighted_lp(0.5, [1.0])
    with pytest.raises(DimensionMismatchError):
        NormedSpace.weighted_lp(2, [1.0, 1.0]).norm([1.0, 2.0, 3.0])
    with pytest.raises(DimensionMismatchError):
        Couple(2, NormedSpace.weighted_lp(2, [1.0, 1.0]), NormedSpace.weighted_lp(2, [1.0]))


def test_intersection_norm():
    c = Couple.of(NormedSpace.weighted_lp(1, [1, 1]), NormedSpace.weighted_lp("inf", [1, 1]))
    assert intersection_norm(c, [1, 1]) == pytest.approx(2.0)
    assert intersection_norm(c, [0, 0]) == 0.0


def test_sum_norm_diagonal_l1(fast_solver):
    c = Couple.of(NormedSpace.weighted_lp(1, [1, 5]), NormedSpace.weighted_lp(1, [4, 2]))
    sol = sum_norm(c, np.array([1.0, 1.0]), fast_solver)
    assert sol.value == pytest.approx(3.0, rel=1e-4)
    x0, x1 = sol.certificate
    assert np.allclose(x0.total() + x1.total(), [1.0, 1.0])


def test_sum_norm_equal_spaces(fast_solver):
    sp = NormedSpace.weighted_lp(2, [1.0, 3.0])
    sol = sum_norm(Couple.of(sp, sp), np.array([2.0, -1.0]), fast_solver)
    assert sol.value == pytest.approx(sp.norm([2.0, -1.0]), rel=1e-4)
    assert sum_norm(Couple.of(sp, sp), np.zeros(2), fast_solver).value == 0.0


def test_sum_below_intersection(fast_solver):
    c = Couple.of(NormedSpace.weighted_lp(1.5, [1.0, 4.0]), NormedSpace.weighted_lp(4, [2.0, 0.5]))
    v = np.array([0.3, -1.2j])
    s = sum_norm(c, v, fast_solver).value
    assert s <= min(c.space0.norm(v), c.space1.norm(v)) * (1 + 1e-6)
    assert min(c.space0.norm(v), c.space1.norm(v)) <= intersection_norm(c, v)


vectors = st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=3, max_size=3)


@given(a=vectors, b=vectors, p=st.sampled_from(EXPONENTS), c=st.floats(-50, 50, allow_nan=False))
@settings(max_examples=200, deadline=None)
def test_norm_axioms(a, b, p, c):
    sp = NormedSpace.weighted_lp(p, [0.5, 1.0, 7.0])
    a, b = np.array(a), np.array(b)
    assert sp.norm(a + b) <= sp.norm(a) + sp.norm(b) + 1e-9 * (1 + sp.norm(a) + sp.norm(b))
    assert sp.norm(c * a) == pytest.approx(abs(c) * sp.norm(a), rel=1e-9, abs=1e-9)
    assert sp.norm(np.zeros(3)) == 0.0
