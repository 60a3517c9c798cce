import math

import numpy as np
import pytest

from src.core.errors import DimensionMismatchError, InvalidInputError, UnsupportedStructureError
from src.core.interpolation import (
    InterpProblem, InterpolationSpace, balance_shift, base_change_constant, calderon_lozanovskii_norm,
    calderon_lozanovskii_objective, change_base_reindex,
    discrete_real_constant, discrete_real_norm, finite_rep, finite_rep_constant, interp_norm, interp_objective,
    j_functional, k_functional, logconvex_norm, mean_constants, mean_norm, partial_sums, sandwich_constant,
    side_norms, telescope,
)
from src.core.sequences import SparseSeq
from src.core.spaces import Couple, NormedSpace
from src.core.structures import FourierLp, Gaussian, Lp
from src.verify.oracles import oracle_stein_weiss

E = math.e


def _equal_couple(p=2, w=(1.0, 2.0)):
    sp = NormedSpace.weighted_lp(p, list(w))
    return Couple.of(sp, sp), sp


def test_problem_validation(hilbert_problem):
    with pytest.raises(InvalidInputError):
        hilbert_problem.with_(theta=0.0)
    with pytest.raises(InvalidInputError):
        hilbert_problem.with_(base=1.0)
    with pytest.raises(InvalidInputError):
        hilbert_problem.with_(window=0)


def test_constants():
    r = math.exp(0.5)
    assert sandwich_constant(0.5) == pytest.approx((r + 1.0) / (r - 1.0))
    assert finite_rep_constant(0.5) == pytest.approx(1.0 + (2.0 * r + 1.0) / (r - 1.0))
    c1, c2 = mean_constants(0.5)
    assert c1 == pytest.approx(4.0 * r / (r - 1.0))
    assert c2 == pytest.approx(2.0 * (1.0 + r))
    assert base_change_constant(E, E, 0.3) == pytest.approx(E ** 0.3)
    assert base_change_constant(E, E ** 2, 0.3) == pytest.approx(3.0 * E ** 0.6)


def test_zero_vector(hilbert_problem):
    sol = interp_norm(hilbert_problem, np.zeros(2))
    assert sol.value == 0.0
    assert sol.certificate.is_zero()


def test_equal_spaces_bracket(fast_solver, x2):
    couple, sp = _equal_couple()
    for st in (Lp(1), Lp(2), Lp(math.inf)):
        prob = InterpProblem(couple, st, st, 0.4, E, 4, fast_solver)
        sol = interp_norm(prob, x2, SparseSeq.delta(x2, 0), check_window=False)
        assert sol.value <= sp.norm(x2) * (1 + 1e-12)
        assert sol.value >= sp.norm(x2) / sandwich_constant(0.4) * (1 - 1e-9)
        assert sol.lower_hint <= sol.value


def test_window_check_records_drift(hilbert_problem, x2):
    sol = interp_norm(hilbert_problem, x2)
    assert "window_drift" in sol.diagnostics
    assert sol.diagnostics["value_2N"] <= sol.value * (1 + 1e-12)
    assert sol.diagnostics["window_drift"] >= -1e-12


def test_balance_shift_bound(hilbert_problem):
    s = SparseSeq(2, {0: [1.0, 0.0], 3: [0.0, 2.0j]})
    f0, f1 = side_norms(hilbert_problem, s)
    shifted, _ = balance_shift(hilbert_problem, s)
    geo = f0 ** 0.5 * f1 ** 0.5
    assert interp_objective(hilbert_problem, shifted) <= E ** 0.5 * geo * (1 + 1e-12)
    assert np.allclose(shifted.total(), s.total())


def test_logconvex_bracket(hilbert_problem, x2):
    ix = interp_norm(hilbert_problem, x2, check_window=False)
    lc = logconvex_norm(hilbert_problem, x2, ix.certificate)
    assert lc.value <= ix.value * (1 + 1e-9)
    shifted, _ = balance_shift(hilbert_problem, lc.certificate)
    again = interp_norm(hilbert_problem, x2, [ix.certificate, shifted], check_window=False)
    assert again.value <= E ** hilbert_problem.theta * lc.value * (1 + 1e-9)


# --- mean method ---

def test_mean_zero(hilbert_problem):
    assert mean_norm(hilbert_problem, np.zeros(2)).value == 0.0


def test_mean_rejects_fourier(hilbert_problem, x2):
    with pytest.raises(UnsupportedStructureError):
        mean_norm(hilbert_problem.with_(struct0=FourierLp(2)), x2)


def test_mean_equal_spaces_step(fast_solver, x2):
    couple, sp = _equal_couple()
    th = 0.3
    prob = InterpProblem(couple, Lp(math.inf), Lp(math.inf), th, E, 3, fast_solver)
    sol = mean_norm(prob, x2)
    assert sol.value <= (1.0 + E ** (-(1.0 - th))) * sp.norm(x2) * (1 + 1e-9)
    assert sol.value > 0


# --- K and J functionals ---

def test_k_functional_equal_spaces(fast_solver, x2):
    couple, sp = _equal_couple()
    for t in (0.25, 1.0, 3.0):
        sol = k_functional(couple, t, x2, fast_solver)
        assert sol.value == pytest.approx(min(1.0, t) * sp.norm(x2), rel=1e-4)
        assert sol.lower_hint <= sol.value * (1 + 1e-12)


def test_k_functional_diagonal_l1(fast_solver):
    c = Couple.of(NormedSpace.weighted_lp(1, [1, 5]), NormedSpace.weighted_lp(1, [4, 2]))
    sol = k_functional(c, 0.5, np.array([1.0, -1.0]), fast_solver)
    assert sol.value == pytest.approx(2.0, rel=1e-4)
    x0, x1 = sol.certificate
    assert np.allclose(x0.total() + x1.total(), [1.0, -1.0])


def test_k_functional_rejects_nonpositive_t(hilbert_problem, x2):
    with pytest.raises(InvalidInputError):
        k_functional(hilbert_problem.couple, 0.0, x2)


def test_j_functional():
    c = Couple.of(NormedSpace.weighted_lp(2, [1, 1]), NormedSpace.weighted_lp(1, [1, 1]))
    assert j_functional(c, 0.5, [3.0, 4.0]) == pytest.approx(5.0)
    assert j_functional(c, 1.0, [3.0, 4.0]) == pytest.approx(7.0)


@pytest.mark.parametrize("p", [1, 2, "inf"])
def test_discrete_real_equal_spaces(p, fast_solver, x2):
    couple, sp = _equal_couple()
    est = discrete_real_norm(couple, 0.5, p, x2, window=4, cfg=fast_solver)
    assert est.value == pytest.approx(discrete_real_constant(0.5, p, window=4) * sp.norm(x2), rel=1e-4)
    assert est.hi >= est.value


# --- Calderon-Lozanovskii ---

def test_cl_equal_spaces(fast_solver):
    couple, sp = _equal_couple(p=3)
    x = np.array([2.0, -0.5j])
    assert calderon_lozanovskii_norm(couple, 0.6, x, fast_solver).value == pytest.approx(sp.norm(x), rel=1e-6)


def test_cl_weighted_same_exponent(fast_solver):
    w0, w1 = [1.0, 4.0, 0.5], [2.0, 0.25, 3.0]
    couple = Couple.of(NormedSpace.weighted_lp(2, w0), NormedSpace.weighted_lp(2, w1))
    x = np.array([1.0, 0.0, -2.0 + 1j])
    sol = calderon_lozanovskii_norm(couple, 0.35, x, fast_solver)
    assert sol.value == pytest.approx(oracle_stein_weiss(w0, w1, 2.0, 0.35, x), rel=1e-4)
    assert sol.certificate[0][0][1] == 0


def test_cl_error_interval_spans_stopping_tolerance(fast_solver):
    couple = Couple.of(NormedSpace.weighted_lp(2, [1.0, 3.0]), NormedSpace.weighted_lp(1, [2.0, 0.5]))
    sol = calderon_lozanovskii_norm(couple, 0.5, np.array([1.0, 2.0]), fast_solver)
    lo, hi = sol.error_interval
    assert hi == sol.value
    assert lo == pytest.approx(sol.value / (1.0 + fast_solver.rel_tol))
    assert lo < hi


# --- decompositions ---

def test_change_base_reindex():
    s = SparseSeq(1, {-1: [1.0], 0: [2.0], 1: [3.0], 2: [4.0]})
    assert change_base_reindex(s, E, E) is s
    r = change_base_reindex(s, E, E ** 2)
    assert r.indices() == [-1, 0, 1]
    assert r[0][0] == pytest.approx(5.0)
    assert np.allclose(r.total(), s.total())


def test_partial_sums_telescope():
    s = SparseSeq(1, {-2: [1.0], 0: [2.0j], 1: [-0.5]})
    x = s.total()
    ps = partial_sums(s, 3)
    assert np.allclose(ps[3], x)
    assert telescope(ps, 3, x).allclose(s)


def test_finite_rep(hilbert_problem, x2):
    res = finite_rep(hilbert_problem, x2)
    assert np.allclose(res.seq.total(), x2)
    assert res.value <= res.constant * res.base_value * (1 + 1e-9)
    assert res.value == pytest.approx(interp_objective(hilbert_problem, res.seq))


def test_finite_rep_rejects_sampled_structures(hilbert_problem, x2):
    with pytest.raises(UnsupportedStructureError):
        finite_rep(hilbert_problem.with_(struct1=Gaussian(2, samples=200)), x2)


def test_cl_objective_bounds_norm(fast_solver):
    couple, sp = _equal_couple(p=2, w=(1.0, 1.0))
    x = np.array([3.0, 4.0])
    assert calderon_lozanovskii_objective(couple, 0.5, x, np.abs(x)) == pytest.approx(5.0)
    w = Couple.of(NormedSpace.weighted_lp(2, [1.0, 4.0]), NormedSpace.weighted_lp(1, [2.0, 0.5]))
    cl = calderon_lozanovskii_norm(w, 0.4, x, fast_solver)
    for u in ([1.0, 1.0], [0.2, 3.0], [5.0, 0.1]):
        assert cl.value <= calderon_lozanovskii_objective(w, 0.4, x, np.array(u)) * (1 + 1e-5)
    assert calderon_lozanovskii_objective(w, 0.4, x, np.array([1.0, 0.0])) == math.inf
    assert calderon_lozanovskii_objective(w, 0.4, np.zeros(2), np.ones(2)) == 0.0


# --- norm oracles ---

def test_interpolation_space_oracle(hilbert_problem, x2):
    space = InterpolationSpace(hilbert_problem)
    assert space.dim == 2
    assert space.norm(x2) == pytest.approx(interp_norm(hilbert_problem, x2, check_window=False).value, rel=1e-12)
    w0, w1 = hilbert_problem.couple.space0.weights, hilbert_problem.couple.space1.weights
    sw = oracle_stein_weiss(w0, w1, 2.0, 0.5, x2)
    assert space.norm(x2) <= E ** 0.5 * sw * (1 + 1e-6)
    assert np.allclose(space.norms_rows(np.stack([x2, 2 * x2])), [space.norm(x2), 2 * space.norm(x2)], rtol=1e-4)
    with pytest.raises(DimensionMismatchError):
        space.norm([1.0, 2.0, 3.0])
