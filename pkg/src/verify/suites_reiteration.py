"""
Reiteration on weighted l^p couples: the real form with explicit constants,
and the Hilbert form checked against closed forms.
"""

import functools
import logging
import math
from typing import Dict, List, Tuple

import numpy as np

from ..core.interpolation import InterpProblem, InterpolationSpace
from ..core.spaces import Couple, NormedSpace, parse_exponent, weighted_lp_norm
from ..core.structures import FourierLp, Lp
from . import generators as gen
from .measure import SOLVER_TOL, drift_check, measure_interp, problem_window, reach_checks, suite_window
from .oracles import diagonal_placement, hilbert_closed_form, hilbert_stein_weiss_bounds, oracle_stein_weiss
from .registry import Check, SuiteContext, ratio, register

logger = logging.getLogger(__name__)

MIN_GAP = 0.2
STEIN_WEISS_TOL = 1e-4
INNER_BASE = math.e


def _thetas(rng) -> Tuple[float, float]:
    while True:
        t0, t1 = sorted(np.round(rng.uniform(0.2, 0.8, size=2), 6))
        if t1 - t0 >= MIN_GAP: return float(t0), float(t1)


def gen_reiteration(rng, ctx, exponents=(1.0, 2.0, 4.0, math.inf)):
    n = int(rng.choice(gen.SMALL_DIMS))
    t0, t1 = _thetas(rng)
    return {
        "p": gen.random_exponent(rng, exponents), "w0": gen.random_weights(rng, n), "w1": gen.random_weights(rng, n),
        "theta0": t0, "theta1": t1, "theta": gen.random_theta(rng), "x": gen.random_vector(rng, n),
    }


def reiterated_weights(w0, w1, theta0: float, theta1: float) -> Tuple[np.ndarray, np.ndarray]:
    w0, w1 = np.asarray(w0, dtype=float), np.asarray(w1, dtype=float)
    return w0 ** (1.0 - theta0) * w1 ** theta0, w0 ** (1.0 - theta1) * w1 ** theta1


def reiteration_constant(theta: float, base: float) -> float:
    bt, bs = base ** theta, base ** (1.0 - theta)
    return bt / (bt - 1.0) + bs / (bs - 1.0)


def intermediate_spaces(X: Couple, st, thetas, ctx: SuiteContext) -> List[InterpolationSpace]:
    """(X0, X1)_{t_j} over INNER_BASE as norm oracles."""
    return [
        InterpolationSpace(InterpProblem(X, st, st, t, INNER_BASE, suite_window(ctx, t, INNER_BASE, [st]), ctx.solver))
        for t in thetas
    ]


@register("reiteration-real", gen_reiteration, cases=30)
def check_reiteration_real(inst: Dict, ctx: SuiteContext) -> List[Check]:
    """
    With Y_j = l^p(w0^(1-t_j) w1^t_j), (Y0, Y1)_theta over base b equals
    (X0, X1)_omega over base a = b^(1/(t1-t0)), omega = (1-theta) t0 + theta t1.
    The weighted Y_j are compared blockwise with the interpolation spaces
    (X0, X1)_{t_j} they stand for.
    """
    p = parse_exponent(inst["p"])
    w0, w1 = np.asarray(inst["w0"], dtype=float), np.asarray(inst["w1"], dtype=float)
    ts = (float(inst["theta0"]), float(inst["theta1"]))
    th = float(inst["theta"])
    x = gen.build_vector(inst["x"])
    b = math.e
    a = b ** (1.0 / (ts[1] - ts[0]))
    omega = (1.0 - th) * ts[0] + th * ts[1]
    st = Lp(p)

    X = Couple.of(NormedSpace.weighted_lp(p, w0), NormedSpace.weighted_lp(p, w1))
    v = reiterated_weights(w0, w1, *ts)
    Y = Couple.of(NormedSpace.weighted_lp(p, v[0]), NormedSpace.weighted_lp(p, v[1]))
    probX = InterpProblem(X, st, st, omega, a, ctx.window, ctx.solver)
    probY = InterpProblem(Y, st, st, th, b, ctx.window, ctx.solver)

    # 1. Both sides measured cold on a shared window
    N = max(problem_window(ctx, probX), problem_window(ctx, probY))
    nX = measure_interp("X_omega", probX, x, N)
    nY = measure_interp("Y_theta", probY, x, N)
    sw = oracle_stein_weiss(w0, w1, p, omega, x)
    G = reiteration_constant(th, b)
    consts = {"a": a, "omega": omega, "a^omega": a ** omega, "G": G}
    details = dict(nX.details(), **nY.details(), stein_weiss=sw)
    checks = [
        drift_check(nX), drift_check(nY),
        Check("Y<=X", ratio(nY.value, nX.value), 1.0, SOLVER_TOL, consts, details),
        Check("X<=K*Y", ratio(nX.value, nY.value), a ** omega * G, SOLVER_TOL, consts, details),
        Check("X<=a^omega*SW", ratio(nX.value, sw), a ** omega, SOLVER_TOL, consts, details),
        Check("SW<=G*Y", ratio(sw, nY.value), G, SOLVER_TOL, consts, details),
    ]
    checks += reach_checks(nX, probX, {"diagonal": diagonal_placement(x, w0, w1, a)})
    checks += reach_checks(nY, probY, {"X_certificate": nX.certificate})

    # 2. Blocks of the diagonal decomposition of Y against the oracle spaces (X0, X1)_{t_j}
    d = diagonal_placement(x, v[0], v[1], b)
    oracles = intermediate_spaces(X, st, ts, ctx)
    Gs = [reiteration_constant(t, INNER_BASE) for t in ts]
    rows = {}
    for j, (t, space) in enumerate(zip(ts, oracles)):
        bt = INNER_BASE ** t
        vals = []
        for k in d.indices():
            sw_k, y_k = Y.space(j).norm(d[k]), space.norm(d[k])
            vals.append(b ** ((j - th) * k) * y_k)
            checks.append(Check(f"SW{j}[{k}]<=G*Y{j}", ratio(sw_k, y_k), Gs[j], SOLVER_TOL, {"G": Gs[j]},
                                {"weighted": sw_k, "oracle": y_k}))
            checks.append(Check(f"Y{j}[{k}]<=b^t*SW{j}", ratio(y_k, sw_k), bt, SOLVER_TOL, {"b^t": bt},
                                {"weighted": sw_k, "oracle": y_k}))
        rows[j] = float(weighted_lp_norm(np.asarray(vals), np.ones(len(vals)), p)) if vals else 0.0
    U = max(rows.values())
    checks.append(Check("Y_weighted<=G*Y_oracle", ratio(nY.value, U), max(Gs), SOLVER_TOL,
                        {"G0": Gs[0], "G1": Gs[1]}, dict(nY.details(), oracle_objective=U)))
    return checks


@functools.lru_cache(maxsize=64)
def _stein_weiss_bounds(theta: float, base: float) -> Tuple[float, float]:
    return hilbert_stein_weiss_bounds(theta, base)


def gen_reiteration_hilbert(rng, ctx):
    return gen_reiteration(rng, ctx, exponents=(2.0,))


@register("reiteration-hilbert-complex", gen_reiteration_hilbert, cases=30)
def check_reiteration_hilbert(inst: Dict, ctx: SuiteContext) -> List[Check]:
    """
    Hilbert couple with Fourier-L^2 structures: the computed norm of the
    reiterated couple equals the windowed closed form, sits above the
    infinite-window one and below the closed form of the original couple at
    omega, and within the Stein-Weiss bracket.
    """
    w0, w1 = np.asarray(inst["w0"], dtype=float), np.asarray(inst["w1"], dtype=float)
    t0, t1, th = float(inst["theta0"]), float(inst["theta1"]), float(inst["theta"])
    x = gen.build_vector(inst["x"])
    b = math.e
    a = b ** (1.0 / (t1 - t0))
    omega = (1.0 - th) * t0 + th * t1

    v0, v1 = reiterated_weights(w0, w1, t0, t1)
    Y = Couple.of(NormedSpace.weighted_lp(2.0, v0), NormedSpace.weighted_lp(2.0, v1))
    st = FourierLp(2.0)
    probY = InterpProblem(Y, st, st, th, b, ctx.window, ctx.solver)
    W = problem_window(ctx, probY)

    # 1. Cold norm of the reiterated couple
    nY = measure_interp("Y_theta", probY, x, W)

    # 2. Closed forms on the 2W window: Y at theta (exact optimum), X at omega over base a
    cf_Y = hilbert_closed_form(v0, v1, th, x, b, window=2 * W)
    inf_Y = hilbert_closed_form(v0, v1, th, x, b)
    cf_X = hilbert_closed_form(w0, w1, omega, x, a, window=2 * W)

    # 3. Stein-Weiss bracket
    L, U = _stein_weiss_bounds(th, b)
    sw = oracle_stein_weiss(v0, v1, 2.0, th, x)

    consts = {"L": L, "U": U, "mu": cf_Y.mu, "a": a, "omega": omega}
    details = dict(nY.details(), closed_form=cf_Y.value, infinite_window=inf_Y.value,
                   X_omega=cf_X.value, stein_weiss=sw)
    return [
        drift_check(nY),
        Check("closed_form<=Y", ratio(cf_Y.value, nY.value), 1.0, 1e-9, consts, details),
        Check("Y<=closed_form", ratio(nY.value, cf_Y.value), 1.0, SOLVER_TOL, consts, details),
        Check("infinite<=Y", ratio(inf_Y.value, nY.value), 1.0, 1e-9, consts, details),
        Check("Y<=X_omega", ratio(nY.value, cf_X.value), 1.0, SOLVER_TOL, consts, details),
        Check("L*SW<=Y", ratio(L * sw, nY.value), 1.0, STEIN_WEISS_TOL, consts, details),
    ]
