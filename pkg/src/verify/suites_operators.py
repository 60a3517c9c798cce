"""
Operator suites: interpolation of a single operator, Stein interpolation of
a Laurent family, and intersections through a resolvent family.
"""

import logging
import math
from typing import Dict, List

import numpy as np

from ..core.analytic import LaurentOperatorFamily, complex_view, laurent_convolve, stein_boundary_coeffs
from ..core.interpolation import InterpProblem, balance_shift, partial_sums, sandwich_constant, telescope
from ..core.operators import ResolventFamily, base_operator_norm, operator_struct_bound
from ..core.sequences import SparseSeq, translate
from ..core.spaces import Couple, NormedSpace, parse_exponent
from ..core.structures import Lp, seq_norm_value
from . import generators as gen
from .measure import SOLVER_TOL, covering_window, drift_check, measure_interp, problem_window, reach_checks
from .oracles import stein_fft_coeffs
from .registry import Check, SuiteContext, ratio, register

logger = logging.getLogger(__name__)

FFT_TOL = 1e-8
INPUT_SEQS = 4


def _l2_couple(rng, n: int) -> Dict:
    return gen.random_couple(rng, n, 2.0, 2.0)


def _random_matrix(rng, rows: int, cols: int) -> Dict:
    A = (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / math.sqrt(cols)
    return {"re": A.real.round(8).tolist(), "im": A.imag.round(8).tolist()}


def _matrix(d: Dict) -> np.ndarray:
    return np.asarray(d["re"], dtype=float) + 1j * np.asarray(d["im"], dtype=float)


def _prob(couple: Couple, theta: float, ctx: SuiteContext, struct=None) -> InterpProblem:
    st = struct or Lp(2.0)
    return InterpProblem(couple, st, st, theta, math.e, ctx.window, ctx.solver)


# --- operator ---

def gen_operator(rng, ctx):
    n_in, n_out = int(rng.choice(gen.SMALL_DIMS)), int(rng.choice(gen.SMALL_DIMS))
    return {
        "X": _l2_couple(rng, n_in), "Y": _l2_couple(rng, n_out), "T": _random_matrix(rng, n_out, n_in),
        "theta": gen.random_theta(rng), "x": gen.random_vector(rng, n_in), "snapped": bool(rng.random() < 0.5),
    }


@register("operator", gen_operator, cases=100)
def check_operator(inst: Dict, ctx: SuiteContext) -> List[Check]:
    """||Tx||_theta <= b^theta M0^(1-theta) M1^theta ||x||_theta, constant 1 when M0/M1 is a power of b."""
    X, Y = gen.build_couple(inst["X"]), gen.build_couple(inst["Y"])
    T, th, x = _matrix(inst["T"]), float(inst["theta"]), gen.build_vector(inst["x"])
    st = Lp(2.0)
    M0 = operator_struct_bound(T, st, X.space0, Y.space0).value
    M1 = operator_struct_bound(T, st, X.space1, Y.space1).value
    n_snap = int(round(math.log(M0 / M1)))
    if inst["snapped"]:
        # Rescale Y1 so that M0 / M1 = e^n exactly
        c = M0 / (M1 * math.exp(n_snap))
        Y = Couple.of(Y.space0, NormedSpace.weighted_lp(2.0, Y.space1.weights * c))
        M1 = operator_struct_bound(T, st, X.space1, Y.space1).value
    probX, probY = _prob(X, th, ctx), _prob(Y, th, ctx)

    # 1. Cold norm of x, then the image of its decomposition moved into balance
    Ix = measure_interp("interp_x", probX, x, problem_window(ctx, probX))
    Ts = SparseSeq(T.shape[0], {k: T @ b for k, b in Ix.certificate.entries.items()})
    shifted, n = balance_shift(probY, Ts)
    snapped = translate(Ts, n_snap)

    # 2. Cold norm of Tx on a window holding both image decompositions
    Tx = T @ x
    ITx = measure_interp("interp_Tx", probY, Tx, covering_window(Ix.window, shifted, snapped))

    M = M0 ** (1.0 - th) * M1 ** th
    bound = 1.0 if inst["snapped"] else math.e ** th
    consts = {"M0": M0, "M1": M1, "bound": bound}
    details = dict(Ix.details(), **ITx.details(), shift=n, snap=n_snap)
    return [
        drift_check(Ix), drift_check(ITx),
        Check("operator", ratio(ITx.value, M * Ix.value), bound, SOLVER_TOL, consts, details),
    ] + reach_checks(ITx, probY, {"balanced_image": shifted, "snapped_image": snapped})


# --- stein ---

def gen_stein(rng, ctx):
    n_in, n_out = int(rng.choice(gen.SMALL_DIMS)), int(rng.choice(gen.SMALL_DIMS))
    return {
        "X": _l2_couple(rng, n_in), "Y": _l2_couple(rng, n_out),
        "coeffs": {str(m): _random_matrix(rng, n_out, n_in) for m in (-1, 0, 1)},
        "theta": gen.random_theta(rng), "x": gen.random_vector(rng, n_in),
        "inputs": [gen.random_seq(rng, n_in, max_width=4, max_offset=3) for _ in range(INPUT_SEQS)],
    }


def _boundary_ratio(fam: LaurentOperatorFamily, j: int, s: SparseSeq, X: Couple, Y: Couple, st) -> float:
    """||T(j + it) applied to s||_{S(Y_j)} / ||s||_{S(X_j)} on Fourier coefficients."""
    return ratio(seq_norm_value(st, Y.space(j), stein_boundary_coeffs(fam, j, s)), seq_norm_value(st, X.space(j), s))


@register("stein", gen_stein, cases=50)
def check_stein(inst: Dict, ctx: SuiteContext) -> List[Check]:
    """||T(theta)x||_theta <= e^theta M0^(1-theta) M1^theta ||x||_theta for a Laurent family."""
    X, Y = gen.build_couple(inst["X"]), gen.build_couple(inst["Y"])
    fam = LaurentOperatorFamily({int(m): _matrix(A) for m, A in inst["coeffs"].items()})
    th, x = float(inst["theta"]), gen.build_vector(inst["x"])
    st = Lp(2.0)
    inputs = [gen.build_seq(s) for s in inst["inputs"]]
    checks = []

    # 1. Convolution form of the boundary coefficients against FFT quadrature
    ms = list(fam.coeffs)
    for i, s in enumerate(inputs):
        lo, hi = s.support()[0] + ms[0], s.support()[1] + ms[-1]
        for j in (0, 1):
            a = stein_boundary_coeffs(fam, j, s).to_dense(lo, hi)
            b = stein_fft_coeffs(fam, j, s).to_dense(lo, hi)
            err = float(np.abs(a - b).max()) / max(float(np.abs(a).max()), 1e-300)
            checks.append(Check(f"fft[{i},{j}]", err, 0.0, FFT_TOL))

    # 2. Cold norm of x; its boundary sequences join the inputs
    probX, probY = _prob(X, th, ctx), _prob(Y, th, ctx)
    Ix = measure_interp("interp_x", probX, x, problem_window(ctx, probX))
    view = complex_view(Ix.certificate, th)
    boundary = [view.boundary_coeffs(float(j)) for j in (0, 1)]

    # 3. Boundary constants: measured sup over the inputs, analytic sum_m e^{mj} ||A_m||
    M = [sum(math.exp(m * j) * base_operator_norm(A, X.space(j), Y.space(j)).value for m, A in fam.coeffs.items())
         for j in (0, 1)]
    M_hat = [max(_boundary_ratio(fam, j, s, X, Y, st) for s in inputs + [boundary[j]]) for j in (0, 1)]
    for j in (0, 1):
        checks.append(Check(f"M_measured[{j}]<=M[{j}]", ratio(M_hat[j], M[j]), 1.0, 1e-9,
                            {f"M{j}": M[j]}, {f"M_measured{j}": M_hat[j]}))

    # 4. The family at theta carries the convolved certificate to T(theta)x
    y = laurent_convolve(fam, Ix.certificate, th)
    Tx = fam.eval_at(th) @ x
    scale = max(1.0, float(np.abs(Tx).max()))
    checks.append(Check("T(theta)x=sum", float(np.abs(y.total() - Tx).max()) / scale, 0.0, 1e-10))
    shifted, n = balance_shift(probY, y)
    ITx = measure_interp("interp_Tx", probY, Tx, covering_window(Ix.window, shifted))

    C = math.e ** th
    M_th = M_hat[0] ** (1.0 - th) * M_hat[1] ** th
    consts = {"C": C, "M0": M[0], "M1": M[1], "M_measured0": M_hat[0], "M_measured1": M_hat[1]}
    details = dict(Ix.details(), **ITx.details(), shift=n)
    checks += [
        drift_check(Ix), drift_check(ITx),
        Check("stein", ratio(ITx.value, M_th * Ix.value), C, SOLVER_TOL, consts, details),
    ]
    return checks + reach_checks(ITx, probY, {"balanced_convolution": shifted})


# --- intersections ---

def gen_intersections(rng, ctx):
    n = int(rng.choice(gen.SMALL_DIMS))
    return {
        "p": gen.random_exponent(rng, (1.0, 2.0, math.inf)),
        "wX": gen.random_weights(rng, n), "a": gen.random_weights(rng, n), "wZ": gen.random_weights(rng, n),
        "theta": gen.random_theta(rng), "x": gen.random_vector(rng, n),
    }


def resolvent_splitting(fam: ResolventFamily, A: SparseSeq, C: SparseSeq, N: int, x) -> SparseSeq:
    """Telescoped decomposition of E_k = S_k A_k + T_k C_k (A, C partial sums on [-N, N])."""
    E = SparseSeq(A.dim, {k: fam.s_diag(k) * A[k] + fam.t_diag(k) * C[k] for k in range(-N, N + 1)})
    return telescope(E, N, x)


@register("intersections", gen_intersections, cases=50)
def check_intersections(inst: Dict, ctx: SuiteContext) -> List[Check]:
    """(X, Y cap Z)_theta against max((X, Y)_theta, (X, Z)_theta), Y the graph space of diag(a)."""
    p = parse_exponent(inst["p"])
    wX, a, wZ = (np.asarray(inst[k], dtype=float) for k in ("wX", "a", "wZ"))
    th, x = float(inst["theta"]), gen.build_vector(inst["x"])
    Xs, Ys, Zs = (NormedSpace.weighted_lp(p, w) for w in (wX, wX * a, wZ))
    st = Lp(p)
    pXY = _prob(Couple.of(Xs, Ys), th, ctx, st)
    pXZ = _prob(Couple.of(Xs, Zs), th, ctx, st)
    pXYZ = pXY.with_(extra_side1=((Zs, st),))
    N = problem_window(ctx, pXYZ)

    # 1. The three norms, each solved cold
    nXY = measure_interp("XY", pXY, x, N)
    nXZ = measure_interp("XZ", pXZ, x, N)
    nXYZ = measure_interp("XYZ", pXYZ, x, N)

    # 2. Hypothesis bounds of the resolvent family on [-N, N]
    fam = ResolventFamily(a, reflect=True)
    ks = range(-N, N + 1)
    B = {
        "S_XX": fam.struct_bound(st, Xs, "s", Xs, ks), "T_XX": fam.struct_bound(st, Xs, "t", Xs, ks),
        "S_YY": fam.struct_bound(st, Ys, "s", Ys, ks), "S_YZ": fam.struct_bound(st, Ys, "s", Zs, ks),
        "T_ZY": fam.struct_bound(st, Zs, "t", Ys, ks), "T_ZZ": fam.struct_bound(st, Zs, "t", Zs, ks),
    }
    K_hyp = max(B["S_XX"] + B["S_YY"] + B["S_YZ"] + 2.0, B["T_XX"] + B["T_ZY"] + B["T_ZZ"] + 1.0)
    K = 2.0 * (1.0 + math.e ** (1.0 - th)) * K_hyp * sandwich_constant(th)

    # 3. Resolvent splitting of the two narrow certificates, inside the 2N window
    y, z = nXY.narrow.certificate, nXZ.narrow.certificate
    W = resolvent_splitting(fam, partial_sums(y, N), partial_sums(z, N), N, x)

    consts = dict(B, K_hyp=K_hyp, K=K)
    details = dict(nXY.details(), **nXZ.details(), **nXYZ.details())
    return [
        drift_check(nXY), drift_check(nXZ), drift_check(nXYZ),
        Check("pairwise<=intersection", ratio(max(nXY.value, nXZ.value), nXYZ.value), 1.0, SOLVER_TOL, consts, details),
        Check("intersection<=K*pairwise", ratio(nXYZ.value, max(nXY.value, nXZ.value)), K, SOLVER_TOL, consts, details),
    ] + reach_checks(nXYZ, pXYZ, {"resolvent_splitting": W}) \
      + reach_checks(nXY, pXY, {"intersection_certificate": nXYZ.certificate}) \
      + reach_checks(nXZ, pXZ, {"intersection_certificate": nXYZ.certificate})
