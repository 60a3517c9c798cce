"""
Suites on the interpolation method itself: embeddings, log-convexity, the
mean method, finite representation, bracketing by l^1 / l^inf, duality,
the lattice identity, change of base, the analytic view and the J/K classes.

Every norm is measured cold at N and 2N (measure.py). The decompositions the
proofs construct are only evaluated: the solver has to reach them on its own.
"""

import logging
import math
from typing import Dict, List

import numpy as np

from ..core.analytic import complex_view
from ..core.interpolation import (
    InterpProblem, balance_shift, base_change_constant, calderon_lozanovskii_norm,
    calderon_lozanovskii_objective, change_base_reindex, finite_rep, finite_rep_constant, interp_norm,
    interp_objective, j_functional, k_functional, mean_constants, sandwich_constant, sum_norm, telescope,
)
from ..core.sequences import SparseSeq
from ..core.spaces import NormedSpace, intersection_norm
from ..core.structures import FourierLp, LatticeLq, Lp, dual_structure
from . import generators as gen
from .measure import (
    SOLVER_TOL, drift_check, logconvex_solve, mean_solve, measure, measure_interp, problem_window,
    reach_check, reach_checks,
)
from .oracles import poisson_constants, poisson_factor, support_function_estimate
from .registry import Check, SuiteContext, ratio, register

logger = logging.getLogger(__name__)

# Rademacher stays in the structure suites: a 2N window is past its enumeration budget
ALL_DETERMINISTIC = ("lp", "lattice_lq", "fourier_lp", "fourier_c")
CLOSED_TAILS = ("lp", "lattice_lq")
EVEN_FOURIER = (2.0, 4.0)
POISSON_TOL = 1e-3


def _problem(inst: Dict, ctx: SuiteContext, **over) -> InterpProblem:
    prob = InterpProblem(
        gen.build_couple(inst["couple"]), gen.build_struct(inst["struct0"]), gen.build_struct(inst["struct1"]),
        float(inst["theta"]), float(inst.get("base", math.e)), ctx.window, ctx.solver,
    )
    return prob.with_(**over) if over else prob


def _x(inst: Dict) -> np.ndarray:
    return gen.build_vector(inst["x"])


def _split_at(s: SparseSeq, k: int) -> np.ndarray:
    """sum_{m <= k} s_m."""
    return sum((s[m] for m in s.indices() if m <= k), np.zeros(s.dim, dtype=complex))


def _finite_rep_at(prob: InterpProblem, x, m):
    """finite_rep on the 2N window of a measurement, continuing from its solution."""
    return finite_rep(prob.with_(window=2 * m.window, solver=prob.solver.with_(restarts=1)), x,
                      warm_start=m.certificate)


# --- embeddings-basic ---

def gen_all_kinds(rng, ctx):
    return gen.random_problem(rng, kinds=ALL_DETERMINISTIC)


@register("embeddings-basic", gen_all_kinds, cases=100)
def check_embeddings(inst: Dict, ctx: SuiteContext) -> List[Check]:
    """X0 cap X1 -> X_theta -> X0 + X1 with constants 1 and C_theta."""
    prob, x = _problem(inst, ctx), _x(inst)
    I = measure_interp("interp", prob, x, problem_window(ctx, prob))
    sn = sum_norm(prob.couple, x, ctx.solver).value
    x0 = _split_at(I.certificate, 0)
    split = prob.couple.space0.norm(x0) + prob.couple.space1.norm(x - x0)
    C = sandwich_constant(prob.theta, prob.base)
    details = dict(I.details(), sum=sn, split_at_0=split)
    return [
        drift_check(I),
        Check("interp<=intersection", ratio(I.value, intersection_norm(prob.couple, x)), 1.0, SOLVER_TOL,
              details=details),
        Check("sum<=C*interp", ratio(sn, I.value), C, SOLVER_TOL, {"C_theta": C}, details),
        Check("sum<=split_at_0", ratio(sn, split), 1.0, SOLVER_TOL, details=details),
    ]


# --- logconvex ---

@register("logconvex", gen_all_kinds, cases=100)
def check_logconvex(inst: Dict, ctx: SuiteContext) -> List[Check]:
    """inf f0^(1-theta) f1^theta <= interp <= b^theta * inf f0^(1-theta) f1^theta."""
    prob, x = _problem(inst, ctx), _x(inst)
    N = problem_window(ctx, prob)
    L = measure("logconvex", logconvex_solve(prob, x), N)
    I = measure_interp("interp", prob, x, N)
    # The product is translation invariant; the balanced shift bounds the max
    shifted, n = balance_shift(prob, L.certificate)
    bt = prob.base ** prob.theta
    details = dict(I.details(), **L.details(), shift=n)
    return [
        drift_check(I), drift_check(L),
        Check("logconvex<=interp", ratio(L.value, I.value), 1.0, SOLVER_TOL, details=details),
        Check("interp<=b^theta*logconvex", ratio(I.value, L.value), bt, SOLVER_TOL, {"b^theta": bt}, details),
    ] + reach_checks(I, prob, {"shifted_logconvex": shifted})


# --- mean-method ---

def gen_mean(rng, ctx):
    return gen.random_problem(rng, kinds=CLOSED_TAILS, base=math.e)


@register("mean-method", gen_mean, cases=100)
def check_mean(inst: Dict, ctx: SuiteContext) -> List[Check]:
    """mean <= c1 interp (partial sums) and interp <= c2 mean (telescoping)."""
    prob, x = _problem(inst, ctx), _x(inst)
    N = problem_window(ctx, prob)
    c1, c2 = mean_constants(prob.theta, prob.base)
    I = measure_interp("interp", prob, x, N)
    M = measure("mean", mean_solve(prob, x), N)
    Nm = M.narrow.diagnostics.get("window", [-N, N])[1]
    tele = telescope(M.narrow.certificate[0], Nm, x)
    consts = {"c1": c1, "c2": c2}
    details = dict(I.details(), **M.details())
    return [
        drift_check(I), drift_check(M),
        Check("mean<=c1*interp", ratio(M.value, I.value), c1, SOLVER_TOL, consts, details),
        Check("interp<=c2*mean", ratio(I.value, M.value), c2, SOLVER_TOL, consts, details),
    ] + reach_checks(I, prob, {"telescoped_mean": tele})


# --- finite-rep ---

def gen_finite_rep(rng, ctx):
    return gen.random_problem(rng, kinds=("lp", "lattice_lq", "fourier_lp"), fourier_exponents=EVEN_FOURIER)


@register("finite-rep", gen_finite_rep, cases=100)
def check_finite_rep(inst: Dict, ctx: SuiteContext) -> List[Check]:
    """A finitely supported decomposition w with sum w = x and objective <= C(theta, b) * interp."""
    prob, x = _problem(inst, ctx), _x(inst)
    I = measure_interp("interp", prob, x, problem_window(ctx, prob))
    fr = _finite_rep_at(prob, x, I)
    scale = max(1.0, float(np.abs(x).max()))
    err = float(np.abs(fr.seq.total() - x).max()) / scale
    details = dict(I.details(), n=fr.n, value=fr.value, base_value=fr.base_value)
    return [
        drift_check(I),
        Check("sum(w)=x", err, 0.0, 1e-10, details=details),
        Check("objective<=C*interp", ratio(fr.value, fr.base_value), fr.constant,
              constants={"C": fr.constant}, details=details),
    ]


# --- real-bracket ---

@register("real-bracket", gen_all_kinds, cases=100)
def check_real_bracket(inst: Dict, ctx: SuiteContext) -> List[Check]:
    """interp with l^inf structures <= interp with S <= interp with l^1 structures."""
    prob, x = _problem(inst, ctx), _x(inst)
    p1 = prob.with_(struct0=Lp(1.0), struct1=Lp(1.0))
    pinf = prob.with_(struct0=Lp(math.inf), struct1=Lp(math.inf))
    # l^inf needs the widest window of the three
    N = max(problem_window(ctx, prob), problem_window(ctx, pinf))
    I1 = measure_interp("l1", p1, x, N)
    IS = measure_interp("S", prob, x, N)
    Iinf = measure_interp("linf", pinf, x, N)
    details = dict(I1.details(), **IS.details(), **Iinf.details())
    return [
        drift_check(I1), drift_check(IS), drift_check(Iinf),
        Check("S<=l1", ratio(IS.value, I1.value), 1.0, SOLVER_TOL, details=details),
        Check("linf<=S", ratio(Iinf.value, IS.value), 1.0, SOLVER_TOL, details=details),
    ] + reach_checks(IS, prob, {"l1_certificate": I1.certificate}) \
      + reach_checks(Iinf, pinf, {"S_certificate": IS.certificate})


# --- duality-lp ---

DUAL_EXPONENTS = (1.5, 2.0, 4.0)
RANDOM_DIRECTIONS = 6


def gen_duality(rng, ctx):
    n = int(rng.choice((1, 2, 4)))
    return {
        "couple": gen.random_couple(rng, n, gen.random_exponent(rng, DUAL_EXPONENTS), gen.random_exponent(rng, DUAL_EXPONENTS)),
        "struct0": Lp(float(gen.random_exponent(rng, DUAL_EXPONENTS))).to_dict(),
        "struct1": Lp(float(gen.random_exponent(rng, DUAL_EXPONENTS))).to_dict(),
        "theta": gen.random_theta(rng),
        "base": math.e,
        "x": gen.random_vector(rng, n),
        "directions": [gen.random_vector(rng, n) for _ in range(RANDOM_DIRECTIONS)],
    }


@register("duality-lp", gen_duality, cases=30)
def check_duality(inst: Dict, ctx: SuiteContext) -> List[Check]:
    """The dual-couple norm against a sampled support function (a lower estimate of the dual norm)."""
    prob, xstar = _problem(inst, ctx), _x(inst)
    c = prob.couple
    dual_prob = prob.with_(couple=c.dual(), struct0=dual_structure(prob.struct0),
                           struct1=dual_structure(prob.struct1))
    Istar = measure_interp("dual_interp", dual_prob, xstar, problem_window(ctx, dual_prob))

    # 1. Candidate directions: coordinates, random, and norming vectors
    dirs = [np.eye(c.dim)[i].astype(complex) for i in range(c.dim)]
    dirs += [gen.build_vector(d) for d in inst["directions"]]
    dirs += [c.space0.dual().duality_map(xstar), c.space1.dual().duality_map(xstar)]
    th = prob.theta
    p_th = 1.0 / ((1.0 - th) / c.space0.p + th / c.space1.p)
    sw = NormedSpace.weighted_lp(p_th, c.space0.weights ** (1.0 - th) * c.space1.weights ** th)
    dirs.append(sw.dual().duality_map(xstar))

    # 2. Support function estimate; each direction norm is solved on the 2N window
    D, best = support_function_estimate(prob.with_(window=2 * problem_window(ctx, prob)), xstar, dirs)
    c1, c2 = mean_constants(th, prob.base)
    consts = {"c1": c1, "c2": c2}
    details = dict(Istar.details(), support_estimate=D, best_direction=best)
    return [
        drift_check(Istar),
        Check("support<=c1*dual", ratio(D, Istar.value), c1, SOLVER_TOL, consts, details),
        Check("dual<=c1*c2*support", ratio(Istar.value, D), c1 * c2, SOLVER_TOL, consts, details),
    ]


# --- bfs-identity ---

def gen_lattice_couple(rng, ctx):
    n = int(rng.choice(gen.SMALL_DIMS))
    return {"couple": gen.random_couple(rng, n), "theta": gen.random_theta(rng), "x": gen.random_vector(rng, n)}


def lattice_from_factorization(x, u, v, theta: float, base: float, norms) -> SparseSeq:
    """
    Place coordinate i of x at floor(log_b(v_i / u_i)) after rescaling (u, v)
    so that b^theta ||u||_0 = ||v||_1; |x| = u^(1-theta) v^theta is kept.
    """
    nu, nv = norms
    lam = (nv / (base ** theta * nu)) ** theta if nu > 0 and nv > 0 else 1.0
    u2, v2 = lam * u, lam ** (-(1.0 - theta) / theta) * v
    out: Dict[int, np.ndarray] = {}
    for i in np.flatnonzero(x):
        k = int(math.floor(math.log(v2[i] / u2[i]) / math.log(base) + 1e-12))
        blk = out.setdefault(k, np.zeros(x.size, dtype=complex))
        blk[i] = x[i]
    return SparseSeq(x.size, out)


@register("bfs-identity", gen_lattice_couple, cases=50)
def check_bfs(inst: Dict, ctx: SuiteContext) -> List[Check]:
    """Fourier-L^1 and lattice-l^1 interpolation against the Calderon-Lozanovskii product."""
    couple, th, x = gen.build_couple(inst["couple"]), float(inst["theta"]), _x(inst)
    b = math.e
    probL = InterpProblem(couple, LatticeLq(1.0), LatticeLq(1.0), th, b, ctx.window, ctx.solver)
    probF = probL.with_(struct0=FourierLp(1.0), struct1=FourierLp(1.0))
    N = max(problem_window(ctx, probL), problem_window(ctx, probF))

    # 1. The three norms, each solved on its own
    IL = measure_interp("lattice", probL, x, N)
    IF = measure_interp("fourier", probF, x, N)
    cl = calderon_lozanovskii_norm(couple, th, x, ctx.solver)

    # 2. Lattice decomposition placed from the product factorization
    u, v = np.abs(cl.certificate[0][0]), np.abs(cl.certificate[1][0])
    placed = lattice_from_factorization(x, u, v, th, b, (couple.space0.norm(u), couple.space1.norm(v)))

    # 3. Product factor from the Poisson averages of the Fourier certificate
    up, _ = poisson_factor(IF.certificate, th, b)
    cl_poisson = calderon_lozanovskii_objective(couple, th, x, up)
    rho0, rho1 = poisson_constants(th, b)
    rho = rho0 ** (1.0 - th) * rho1 ** th

    C0 = b ** th + b ** -th + b ** th / (b ** th - 1.0)
    C1 = b ** (1 - th) + b ** -(1 - th) + b ** (1 - th) / (b ** (1 - th) - 1.0)
    K = b ** th * max(C0, C1)
    consts = {"C0": C0, "C1": C1, "rho0": rho0, "rho1": rho1}
    details = dict(IL.details(), **IF.details(), product=cl.value, product_from_poisson=cl_poisson)
    return [
        drift_check(IL), drift_check(IF),
        Check("fourier<=lattice", ratio(IF.value, IL.value), 1.0, SOLVER_TOL, consts, details),
        Check("lattice<=K*product", ratio(IL.value, cl.value), K, SOLVER_TOL, consts, details),
        Check("product<=rho*fourier", ratio(cl.value, IF.value), rho, POISSON_TOL, consts, details),
        Check("product<=poisson_factor", ratio(cl.value, cl_poisson), 1.0, SOLVER_TOL, details=details),
    ] + reach_checks(IL, probL, {"placed_product": placed}) \
      + reach_checks(IF, probF, {"lattice_certificate": IL.certificate})


# --- base-change ---

BASE_CHANGE_EXPONENTS = (1.0, 1.5, 2.0)


def gen_base_change(rng, ctx):
    inst = gen.random_problem(rng, kinds=CLOSED_TAILS, exponents=BASE_CHANGE_EXPONENTS)
    inst["theta"] = float(rng.choice(gen.THETAS))
    a, b = rng.choice(len(gen.BASES), size=2, replace=False)
    inst["base"], inst["base_b"] = float(gen.BASES[a]), float(gen.BASES[b])
    return inst


@register("base-change", gen_base_change, cases=50)
def check_base_change(inst: Dict, ctx: SuiteContext) -> List[Check]:
    """Norms for bases a and b agree within floor-reindexing constants both ways."""
    prob_a, x = _problem(inst, ctx), _x(inst)
    a, b = prob_a.base, float(inst["base_b"])
    prob_b = prob_a.with_(base=b)
    Ia = measure_interp("interp_a", prob_a, x, problem_window(ctx, prob_a))
    Ib = measure_interp("interp_b", prob_b, x, problem_window(ctx, prob_b))
    Kab, Kba = base_change_constant(a, b, prob_a.theta), base_change_constant(b, a, prob_a.theta)
    consts = {"K_ab": Kab, "K_ba": Kba}
    details = dict(Ia.details(), **Ib.details(), a=a, b=b)
    return [
        drift_check(Ia), drift_check(Ib),
        Check("b<=K_ab*a", ratio(Ib.value, Ia.value), Kab, SOLVER_TOL, consts, details),
        Check("a<=K_ba*b", ratio(Ia.value, Ib.value), Kba, SOLVER_TOL, consts, details),
    ] + reach_checks(Ib, prob_b, {"reindexed_a": change_base_reindex(Ia.certificate, a, b)}) \
      + reach_checks(Ia, prob_a, {"reindexed_b": change_base_reindex(Ib.certificate, b, a)})


# --- complex-view ---

def gen_complex_view(rng, ctx):
    inst = gen.random_problem(rng, kinds=("lp", "lattice_lq", "fourier_lp"), fourier_exponents=EVEN_FOURIER)
    n = inst["couple"]["dim"]
    inst["seq"] = gen.random_seq(rng, n, max_width=5, max_offset=3)
    return inst


@register("complex-view", gen_complex_view, cases=30)
def check_complex_view(inst: Dict, ctx: SuiteContext) -> List[Check]:
    """Boundary functions reproduce the weighted sequences; the norm sits between the two analytic bounds."""
    prob = _problem(inst, ctx)
    s = gen.build_seq(inst["seq"])
    view = complex_view(s, prob.theta, prob.base)
    checks = []

    # 1. Isometry and evaluation at theta
    obj = interp_objective(prob, s)
    checks.append(Check("isometry", abs(view.objective(prob) - obj) / obj, 0.0, 1e-10))
    tot = s.total()
    scale = max(1.0, float(np.abs(tot).max()))
    checks.append(Check("f(theta)=sum", float(np.abs(view.eval_at(prob.theta) - tot).max()) / scale, 0.0, 1e-10))

    # 2. FFT of boundary samples against the weighted coefficients
    lo, hi = s.support()
    T = 64 * (hi - lo + 1)
    ts = 2.0 * np.pi * np.arange(T) / T
    for j in (0, 1):
        coeffs = view.boundary_coeffs(float(j))
        fft = np.fft.fft(view.boundary_function(float(j), ts), axis=0) / T
        ref = max(float(np.abs(coeffs[k]).max()) for k in coeffs.indices())
        err = max(float(np.abs(fft[k % T] - coeffs[k]).max()) for k in coeffs.indices())
        checks.append(Check(f"fft[{j}]", err / ref, 0.0, 1e-10))

    # 3. Both directions of the correspondence
    x = tot if np.any(tot) else s[s.indices()[0]]
    I = measure_interp("interp", prob, x, max(problem_window(ctx, prob), -lo, hi))
    checks.append(drift_check(I))
    if np.any(tot):
        checks.append(reach_check(I, "analytic", obj))
    fr = _finite_rep_at(prob, x, I)
    C = finite_rep_constant(prob.theta, prob.base)
    checks.append(Check("analytic<=C*interp", ratio(complex_view(fr.seq, prob.theta, prob.base).objective(prob),
                                                   fr.base_value), C, constants={"C": C}))
    return checks


# --- jk-classes ---

def gen_jk(rng, ctx):
    n = int(rng.choice(gen.SMALL_DIMS))
    p = gen.random_exponent(rng, (1.0, 2.0, math.inf))
    return {
        "couple": gen.random_couple(rng, n), "struct0": {"kind": "lp", "p": p}, "struct1": {"kind": "lp", "p": p},
        "theta": gen.random_theta(rng), "base": math.e, "x": gen.random_vector(rng, n),
        "log_t": np.round(rng.uniform(-3.0, 3.0, size=3), 6).tolist(),
        "seq": gen.random_seq(rng, n, max_width=4, max_offset=3),
    }


def k_constant(t: float, theta: float, base: float) -> float:
    """t^-theta sum_k min(b^{k theta}, t b^{-k(1-theta)}), summed in closed form."""
    m = math.floor(math.log(t) / math.log(base) + 1e-12)
    low = base ** (theta * m) / (1.0 - base ** -theta)
    high = t * base ** (-(1.0 - theta) * (m + 1)) / (1.0 - base ** -(1.0 - theta))
    return t ** -theta * (low + high)


def _lp_norm(values: np.ndarray, p: float) -> float:
    return float(values.max()) if math.isinf(p) else float((values ** p).sum() ** (1.0 / p))


@register("jk-classes", gen_jk, cases=30)
def check_jk(inst: Dict, ctx: SuiteContext) -> List[Check]:
    """Class J and K inequalities and the two sequence embeddings, l^p structures."""
    prob, x = _problem(inst, ctx), _x(inst)
    couple, th, b = prob.couple, prob.theta, prob.base
    p = prob.struct0.p
    N = problem_window(ctx, prob)
    I = measure_interp("interp", prob, x, N)
    y, V = I.certificate, I.value
    checks = [drift_check(I)]

    # 1. J side: a single block at floor(log_b t) or ceil(log_b t)
    for r in inst["log_t"]:
        t = b ** r
        J = t ** -th * j_functional(couple, t, x)
        checks.append(Check(f"J[{r:+.3f}]", ratio(V, J), b ** th, SOLVER_TOL, {"b^theta": b ** th}))

    # 2. K side: the certificate split at log_b t bounds K from above
    for r in inst["log_t"]:
        t = b ** r
        K = k_functional(couple, t, x, ctx.solver).value
        y0 = _split_at(y, math.floor(r + 1e-12))
        split = couple.space0.norm(y0) + t * couple.space1.norm(x - y0)
        c = k_constant(t, th, b)
        checks.append(Check(f"K[{r:+.3f}]", ratio(t ** -th * K, V), c, SOLVER_TOL, {"c(t)": c}))
        checks.append(Check(f"K[{r:+.3f}]<=split", ratio(K, split), 1.0, SOLVER_TOL))

    # 3. Intersection-side embedding: ||sum s|| <= ||(b^{-theta k} J(b^k, s_k))||_p
    s = gen.build_seq(inst["seq"])
    jnorm = _lp_norm(np.array([b ** (-th * k) * j_functional(couple, b ** k, s[k]) for k in s.indices()]), p)
    Is = 0.0
    if np.any(s.total()):
        Is = interp_norm(prob.with_(window=2 * N), s.total(), check_window=False).value
    checks.append(Check("sum-embedding-J", ratio(Is, jnorm), 1.0, SOLVER_TOL))

    # 4. Sum-side embedding: ||(b^{-theta k} K(b^k, x))_k||_p <= C_theta ||x||_theta
    M = N + 2
    kv = np.array([b ** (-th * k) * k_functional(couple, b ** k, x, ctx.solver).value for k in range(-M, M + 1)])
    knorm = _lp_norm(kv, p)
    C = sandwich_constant(th, b)
    checks.append(Check("K-embedding", ratio(knorm, V), C, SOLVER_TOL, {"C_theta": C}))
    return checks
