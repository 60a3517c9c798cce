import math

import numpy as np
import pytest

from src.core.interpolation import InterpProblem
from src.core.sequences import SparseSeq
from src.core.spaces import Couple, NormedSpace
from src.core.structures import FourierLp, Lp
from src.verify.measure import (
    WINDOW_CAP, covering_window, drift_check, measure_interp, reach_checks, suite_window,
)
from src.verify.registry import SUITE_WINDOW, SuiteContext

E = math.e


def _linf_problem(solver, theta=0.25):
    sp = NormedSpace.weighted_lp(2, [1.0])
    return InterpProblem(Couple.of(sp, sp), Lp(math.inf), Lp(math.inf), theta, E, 2, solver)


def _linf_scalar_norm(theta, N):
    """1 / sum_{|k| <= N} min(e^{theta k}, e^{-(1-theta) k}) for x = 1."""
    return 1.0 / sum(min(E ** (theta * k), E ** (-(1.0 - theta) * k)) for k in range(-N, N + 1))


def test_default_window():
    ctx = SuiteContext(1, None)
    assert ctx.window == SUITE_WINDOW == 8


def test_suite_window(fast_solver):
    ctx = SuiteContext(1, fast_solver)
    assert suite_window(ctx, 0.5, E, [Lp(1.0)]) == 8
    assert suite_window(ctx, 0.25, E, [Lp(math.inf)]) == math.ceil(4.0 + math.log(200.0) / 0.25)
    assert suite_window(ctx, 0.25, E, [FourierLp(1.0)]) < suite_window(ctx, 0.25, E, [Lp(math.inf)])
    assert suite_window(ctx, 0.05, 1.5, [Lp(math.inf)]) == WINDOW_CAP


def test_covering_window():
    s = SparseSeq(1, {-9: [1.0], 3: [2.0]})
    assert covering_window(8, s) == 8
    assert covering_window(2, s) == 5
    assert covering_window(3, SparseSeq.zeros(1)) == 3


def test_narrow_window_fails_drift(fast_solver):
    m = measure_interp("interp", _linf_problem(fast_solver), np.array([1.0]), 2)
    assert m.value_N == pytest.approx(_linf_scalar_norm(0.25, 2), rel=1e-4)
    assert m.value == pytest.approx(_linf_scalar_norm(0.25, 4), rel=1e-4)
    assert m.drift == pytest.approx(1.0 - _linf_scalar_norm(0.25, 4) / _linf_scalar_norm(0.25, 2), rel=1e-3)
    check = drift_check(m)
    assert check.label == "drift[interp]"
    assert not check.passed


def test_wide_window_passes_drift(fast_solver):
    prob = _linf_problem(fast_solver, theta=0.5)
    m = measure_interp("interp", prob, np.array([1.0]), 14)
    assert drift_check(m).passed
    assert m.details()["interp_window"] == 14


def test_reach_checks(fast_solver):
    prob = _linf_problem(fast_solver)
    m = measure_interp("interp", prob, np.array([1.0]), 2)
    inside = SparseSeq.delta([1.0], 0)
    outside = SparseSeq.delta([1.0], 5)
    checks = reach_checks(m, prob, {"delta": inside, "far": outside})
    assert [c.label for c in checks] == ["interp<=delta"]
    assert checks[0].passed
    assert checks[0].details["delta"] == pytest.approx(1.0)
