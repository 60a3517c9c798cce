import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.core.errors import EnumerationBudgetError, InvalidInputError, QuadratureBudgetError
from src.core.sequences import SparseSeq, reflect, translate
from src.core.spaces import NormedSpace
from src.core.structures import (
    FourierC, FourierLp, Gaussian, LatticeLq, Lp, Rademacher, SeqStructSpec, WeightedEval,
    dual_structure, gaussian_moment, seq_norm, seq_norm_value, weighted_seq_norm,
)

SCALAR = NormedSpace.weighted_lp(2, [1.0])

DETERMINISTIC = [Lp(1), Lp(2), Lp(math.inf), LatticeLq(1.5), LatticeLq(math.inf),
                 FourierLp(1), FourierLp(3), FourierC(), Rademacher(1, mode="exact"), Rademacher(2.5, mode="exact")]


def _scalar_seq(vals, lo=0):
    return SparseSeq.from_dense(lo, np.asarray(vals, dtype=complex).reshape(-1, 1))


@pytest.mark.parametrize("struct", DETERMINISTIC + [Gaussian(2, samples=4000, seed=5)], ids=lambda s: s.label())
def test_delta_axiom(struct):
    sp = NormedSpace.weighted_lp(1.5, [1.0, 2.0, 0.5])
    x = np.array([1.0, -2.0j, 0.5])
    for k in (-3, 0, 4):
        assert seq_norm(struct, sp, SparseSeq.delta(x, k)).value == pytest.approx(sp.norm(x), rel=1e-9)


def test_l2_two_ones():
    assert seq_norm(Lp(2), SCALAR, _scalar_seq([1, 1])).value == pytest.approx(math.sqrt(2))


def test_fourier_l1_two_ones():
    e = seq_norm(FourierLp(1, quad_nodes=4096), SCALAR, _scalar_seq([1, 1]))
    assert e.value == pytest.approx(4.0 / math.pi, rel=1e-5)


def test_rademacher_exact_two_ones():
    assert seq_norm(Rademacher(1, mode="exact"), SCALAR, _scalar_seq([1, 1])).value == pytest.approx(1.0)


@pytest.mark.parametrize("mode", ["exact", "auto"])
def test_rademacher_enumerates_support_only(mode):
    s = SparseSeq(1, {0: [1.0], 25: [1.0]})
    est = seq_norm(Rademacher(1, mode=mode), SCALAR, s)
    assert est.method == "rademacher_exact"
    assert est.value == pytest.approx(1.0, rel=1e-12)
    assert seq_norm_value(Rademacher(2, mode=mode), SCALAR, s) == pytest.approx(math.sqrt(2.0))


def test_gaussian_hilbert():
    sp = NormedSpace.weighted_lp(2, [1.0, 3.0])
    s = SparseSeq(2, {0: [1.0, 0.5], 2: [0.0, -1.0j], 5: [2.0, 0.0]})
    exact = math.sqrt(sum(sp.norm(s[k]) ** 2 for k in s.indices()))
    e = seq_norm(Gaussian(2, samples=20000, seed=11), sp, s)
    assert e.value == pytest.approx(exact, rel=0.05)
    assert e.lo <= e.value <= e.hi


def test_weighted_series():
    s = _scalar_seq([1, 1, 1], lo=-1)
    e = weighted_seq_norm(Lp(1), SCALAR, WeightedEval(math.e, -0.5), s)
    assert e.value == pytest.approx(3.25525, abs=1e-5)


def test_weighted_exponent_zero_and_delta():
    s = _scalar_seq([2, -1, 0.5], lo=-1)
    assert weighted_seq_norm(Lp(3), SCALAR, WeightedEval(), s).value == pytest.approx(seq_norm(Lp(3), SCALAR, s).value)
    d = weighted_seq_norm(Lp(3), SCALAR, WeightedEval(2.0, 0.75), SparseSeq.delta([2.0], 3))
    assert d.value == pytest.approx(2.0 ** (0.75 * 3) * 2.0)


def test_lattice_vs_lp_on_disjoint_coordinates():
    sp = NormedSpace.weighted_lp(2, [1.0, 1.0])
    s = SparseSeq(2, {0: [3.0, 0.0], 1: [0.0, 4.0]})
    assert seq_norm_value(LatticeLq(1), sp, s) == pytest.approx(5.0)
    assert seq_norm_value(Lp(1), sp, s) == pytest.approx(7.0)


def test_fourier_c_sup():
    e = seq_norm(FourierC(quad_nodes=256), SCALAR, _scalar_seq([1, 1]))
    assert e.value == pytest.approx(2.0)
    assert e.hi >= e.value


def test_budgets():
    with pytest.raises(QuadratureBudgetError):
        seq_norm(FourierLp(2, quad_nodes=7), SCALAR, _scalar_seq([1, 1]))
    with pytest.raises(EnumerationBudgetError):
        seq_norm(Rademacher(1, mode="exact"), SCALAR, SparseSeq.from_dense(0, np.ones((21, 1))))
    assert seq_norm(Rademacher(1, mode="auto", samples=2000), SCALAR,
                    SparseSeq.from_dense(0, np.ones((21, 1)))).method == "rademacher_mc"


def test_descriptor_validation():
    with pytest.raises(InvalidInputError):
        FourierLp(math.inf)
    with pytest.raises(InvalidInputError):
        Rademacher(2, mode="sometimes")
    with pytest.raises(InvalidInputError):
        SeqStructSpec.from_dict({"kind": "alpha"})
    assert SeqStructSpec.from_dict(Rademacher(1.5, mode="exact").to_dict()) == Rademacher(1.5, mode="exact")
    assert SeqStructSpec.from_dict({"kind": "lattice_lq", "q": "inf"}) == LatticeLq(math.inf)


def test_dual_structure():
    assert dual_structure(Lp(1)) == Lp(math.inf)
    assert dual_structure(LatticeLq(4)) == LatticeLq(4.0 / 3.0)


def test_gaussian_moment():
    assert gaussian_moment(2.0) == pytest.approx(1.0)
    assert gaussian_moment(1.0) == pytest.approx(math.sqrt(2.0 / math.pi))


def test_zero_sequence():
    for struct in DETERMINISTIC:
        assert seq_norm(struct, SCALAR, SparseSeq.zeros(1)).value == 0.0


block_vals = st.lists(st.complex_numbers(max_magnitude=100, allow_nan=False, allow_infinity=False),
                      min_size=1, max_size=6)


@given(vals=block_vals, lo=st.integers(-5, 5), m=st.integers(-8, 8), which=st.integers(0, len(DETERMINISTIC) - 1))
@settings(max_examples=150, deadline=None)
def test_translation_reflection_invariance(vals, lo, m, which):
    struct = DETERMINISTIC[which]
    s = _scalar_seq(vals, lo)
    base = seq_norm_value(struct, SCALAR, s)
    tol = 1e-9 * (1.0 + base)
    assert abs(seq_norm_value(struct, SCALAR, translate(s, m)) - base) <= tol
    assert abs(seq_norm_value(struct, SCALAR, reflect(s)) - base) <= tol


@given(vals=block_vals, lo=st.integers(-5, 5), which=st.integers(0, len(DETERMINISTIC) - 1))
@settings(max_examples=150, deadline=None)
def test_sandwich(vals, lo, which):
    struct = DETERMINISTIC[which]
    s = _scalar_seq(vals, lo)
    v = seq_norm_value(struct, SCALAR, s)
    top = max(abs(complex(z)) for z in vals)
    assert top <= v * (1 + 1e-9) + 1e-12
    assert v <= sum(abs(complex(z)) for z in vals) * (1 + 1e-9) + 1e-12
