import logging
import math

import numpy as np
import pytest

from src.core.errors import DimensionMismatchError, InvalidInputError
from src.core.operators import (
    ResolventFamily, base_operator_norm, diagonal_family_bound, operator_struct_bound,
)
from src.core.spaces import NormedSpace
from src.core.structures import FourierLp, LatticeLq, Lp


def _sp(p, w=(1.0, 1.0)):
    return NormedSpace.weighted_lp(p, list(w))


def test_hilbert_spaces_use_svd():
    b = base_operator_norm(np.diag([3.0, -4.0j]), _sp(2), _sp(2))
    assert b.exact and b.method == "svd"
    assert float(b) == pytest.approx(4.0)


def test_weights_enter_the_norm():
    b = base_operator_norm(np.eye(2), _sp(2, (2.0, 1.0)), _sp(2, (1.0, 3.0)))
    assert b.value == pytest.approx(3.0)


def test_l1_domain_uses_column_norms():
    b = base_operator_norm([[1.0, 2.0], [3.0, 4.0]], _sp(1), _sp(2))
    assert b.method == "column_norms"
    assert b.value == pytest.approx(math.sqrt(20.0))


def test_sup_target_uses_row_norms():
    b = base_operator_norm([[1.0, 2.0], [3.0, 4.0]], _sp(2), _sp("inf"))
    assert b.method == "row_norms"
    assert b.value == pytest.approx(5.0)


def test_multistart_is_a_lower_estimate(caplog):
    with caplog.at_level(logging.WARNING, logger="src.core.operators"):
        b = base_operator_norm(np.eye(2), _sp(3), _sp(1.5))
    exact = 2.0 ** (1.0 / 1.5 - 1.0 / 3.0)
    assert not b.exact and b.method == "multistart"
    assert 0.99 * exact <= b.value <= exact * (1 + 1e-9)
    assert "multistart" in caplog.text


def test_shape_mismatch():
    with pytest.raises(DimensionMismatchError):
        base_operator_norm(np.eye(3), _sp(2), _sp(2))


def test_struct_bound_row_structures_and_modulus():
    T = np.array([[1.0, -1.0], [1.0, 1.0]])
    assert operator_struct_bound(T, FourierLp(2), _sp(2), _sp(2)).value == pytest.approx(math.sqrt(2.0))
    lat = operator_struct_bound(T, LatticeLq(2), _sp(2), _sp(2))
    assert not lat.exact and lat.method == "modulus_svd"
    assert lat.value == pytest.approx(2.0)


def test_resolvent_family():
    a = np.array([0.5, 2.0, 7.0])
    fam = ResolventFamily(a)
    ref = ResolventFamily(a, reflect=True)
    for k in (-3, 0, 2):
        assert np.allclose(fam.s_diag(k) + fam.t_diag(k), 1.0)
        assert np.allclose(ref.s_diag(k), fam.s_diag(-k))
        assert np.allclose(fam.t_k(k), np.diag(fam.t_diag(k)))
    with pytest.raises(InvalidInputError):
        ResolventFamily([1.0, 0.0])


def test_resolvent_bounds_below_one():
    fam = ResolventFamily([0.5, 3.0])
    sp = _sp(2, (1.0, 2.0))
    for which in ("s", "t"):
        b = fam.struct_bound(Lp(2), sp, which)
        assert 0.99 < b <= 1.0


def test_diagonal_family_shrinking_exponent():
    ones = lambda k: np.ones(2)
    assert diagonal_family_bound(ones, Lp(2), _sp(2), _sp(1), ks=[0]) == pytest.approx(math.sqrt(2.0))
    assert diagonal_family_bound(ones, Lp(2), _sp(1), _sp(2), ks=[0]) == pytest.approx(1.0)


def test_diagonal_family_lattice_takes_coordinate_sup():
    unit = lambda k: np.eye(2)[k]
    assert diagonal_family_bound(unit, Lp(1), _sp(2), _sp(1), ks=[0, 1]) == pytest.approx(1.0)
    assert diagonal_family_bound(unit, LatticeLq(1), _sp(2), _sp(1), ks=[0, 1]) == pytest.approx(math.sqrt(2.0))
