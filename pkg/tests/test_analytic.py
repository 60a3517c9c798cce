import numpy as np
import pytest

from src.core.analytic import LaurentOperatorFamily, complex_view, laurent_convolve, stein_boundary_coeffs
from src.core.errors import DimensionMismatchError, InvalidInputError
from src.core.interpolation import interp_objective
from src.core.sequences import SparseSeq
from src.verify.oracles import fft_coefficients, stein_fft_coeffs

SEQ = SparseSeq(2, {-2: [1.0, 0.5j], 0: [0.0, 2.0], 3: [-1.0, 1.0]})


def _family():
    rng = np.random.default_rng(7)
    return LaurentOperatorFamily({m: rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
                                  for m in (-1, 0, 2)})


def test_delta_is_constant():
    x = np.array([1.0, -2.0j])
    view = complex_view(SparseSeq.delta(x, 0), 0.3)
    for z in (0.0, 1.0 + 2.0j, 0.5 - 7.0j):
        assert np.allclose(view.eval_at(z), x)


def test_value_at_theta_is_total():
    view = complex_view(SEQ, 0.4)
    assert np.allclose(view.eval_at(0.4), SEQ.total())
    assert view.boundary_coeffs(0.4) is SEQ


def test_objective_matches_interp_objective(hilbert_problem):
    view = complex_view(SEQ, hilbert_problem.theta, hilbert_problem.base)
    assert view.objective(hilbert_problem) == pytest.approx(interp_objective(hilbert_problem, SEQ))


def test_boundary_function_fourier_coefficients():
    view = complex_view(SEQ, 0.6)
    T = 64
    ts = 2.0 * np.pi * np.arange(T) / T
    c = fft_coefficients(view.boundary_function(1.0, ts))
    expected = view.boundary_coeffs(1.0)
    for k in range(-4, 5):
        assert np.allclose(c[k % T], expected[k], atol=1e-12)


def test_laurent_convolve_against_fft():
    fam = _family()
    for j in (0, 1):
        conv = stein_boundary_coeffs(fam, j, SEQ)
        fft = stein_fft_coeffs(fam, j, SEQ)
        lo, hi = SEQ.support()[0] - 1, SEQ.support()[1] + 2
        assert np.allclose(conv.to_dense(lo, hi), fft.to_dense(lo, hi), atol=1e-10)


def test_convolution_sums_to_evaluated_operator():
    fam = _family()
    y = laurent_convolve(fam, SEQ, 0.35)
    assert np.allclose(y.total(), fam.eval_at(0.35) @ SEQ.total())


def test_family_validation():
    with pytest.raises(InvalidInputError):
        LaurentOperatorFamily({})
    with pytest.raises(InvalidInputError):
        LaurentOperatorFamily({0: np.eye(2), 1: np.eye(3)})
    with pytest.raises(InvalidInputError):
        stein_boundary_coeffs(_family(), 2, SEQ)
    with pytest.raises(DimensionMismatchError):
        laurent_convolve(_family(), SparseSeq.delta([1.0, 2.0, 3.0]), 0.0)


def test_family_coefficients_sorted():
    fam = LaurentOperatorFamily({2: np.eye(2), -1: np.eye(2)})
    assert list(fam.coeffs) == [-1, 2]
    assert (fam.dim_out, fam.dim_in) == (2, 2)
    assert np.allclose(fam.eval_at(0.0), 2.0 * np.eye(2))
    assert fam.to_dict()["coeffs"][0]["m"] == -1
