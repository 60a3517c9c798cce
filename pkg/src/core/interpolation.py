"""
Interpolation norms and the constructions built on them.

interp_norm is the infimum over finitely supported decompositions
x = sum_k x_k (supported in [-N, N]) of

    max_j || (b^{(j - theta) k} x_k)_k ||_{S_j}

and every other norm here is a variant of that program: the log-convex
product form, the mean (splitting) form, K/J functionals, the discrete
real method, the finite representation, base change and the
Calderon-Lozanovskii product of lattice couples.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DimensionMismatchError, InvalidInputError, UnsupportedStructureError
from .sequences import SparseSeq, cesaro, translate
from .solver import (
    InterpSolution, NormTerm, SolverConfig, minimize_max, minimize_product, minimize_sum, run_smoothed,
    stopping_interval,
)
from .spaces import Couple, NormedSpace, NormOracle, parse_exponent
from .structures import Lp, LatticeLq, NormEstimate, SeqStructSpec

logger = logging.getLogger(__name__)

DRIFT_LIMIT = 0.01
DEFAULT_WINDOW = 8


@dataclass(frozen=True)
class InterpProblem:
    couple: Couple
    struct0: SeqStructSpec
    struct1: SeqStructSpec
    theta: float
    base: float = math.e
    window: int = DEFAULT_WINDOW
    solver: SolverConfig = field(default_factory=SolverConfig)
    # Further (space, structure) pairs intersected into side 1
    extra_side1: Tuple[Tuple[NormedSpace, SeqStructSpec], ...] = ()

    def __post_init__(self):
        if not (0.0 < self.theta < 1.0): raise InvalidInputError(f"theta must lie in (0, 1), got {self.theta}")
        if not (self.base > 1.0): raise InvalidInputError(f"base must exceed 1, got {self.base}")
        if int(self.window) < 1: raise InvalidInputError(f"window must be at least 1, got {self.window}")
        for space, _ in self.extra_side1:
            if space.dim != self.couple.dim:
                raise DimensionMismatchError(self.couple.dim, space.dim, "extra side-1 space")
        object.__setattr__(self, "extra_side1", tuple(tuple(e) for e in self.extra_side1))

    def with_(self, **kw) -> "InterpProblem":
        return replace(self, **kw)

    @property
    def dim(self) -> int: return self.couple.dim

    def side_groups(self) -> List[List[NormTerm]]:
        b, th = self.base, self.theta
        side0 = [NormTerm(self.couple.space0, self.struct0, b, -th)]
        side1 = [NormTerm(self.couple.space1, self.struct1, b, 1.0 - th)]
        side1 += [NormTerm(sp, st, b, 1.0 - th) for sp, st in self.extra_side1]
        return [side0, side1]

    def check(self, x) -> np.ndarray:
        return self.couple.space0.check(x, "x")


WarmStarts = Union[None, SparseSeq, Sequence[SparseSeq]]


def _warm_list(warm_start: WarmStarts) -> List[SparseSeq]:
    if warm_start is None: return []
    if isinstance(warm_start, SparseSeq): return [warm_start]
    return [w for w in warm_start if w is not None]


# --- Constants ---

def sandwich_constant(theta: float, base: float = math.e) -> float:
    """C_theta = sum_{k<=0} b^{k theta} + sum_{k>0} b^{-k(1-theta)}."""
    bt, bs = base ** theta, base ** (1.0 - theta)
    return bt / (bt - 1.0) + 1.0 / (bs - 1.0)


def finite_rep_constant(theta: float, base: float = math.e) -> float:
    """1 + max_j (2 b^a_j + 1)/(b^a_j - 1) with a_0 = theta, a_1 = 1 - theta."""
    return 1.0 + max((2.0 * base ** a + 1.0) / (base ** a - 1.0) for a in (theta, 1.0 - theta))


def mean_constants(theta: float, base: float = math.e) -> Tuple[float, float]:
    """(c1, c2): mean <= c1 * interp and interp <= c2 * mean."""
    bt, bs = base ** theta, base ** (1.0 - theta)
    return 2.0 * (bt / (bt - 1.0) + bs / (bs - 1.0)), 2.0 * (1.0 + bt)


def base_change_constant(a: float, b: float, theta: float) -> float:
    """Constant of ||reindex(s)||_b <= K ||s||_a for l^p and lattice structures."""
    delta = math.log(b) / math.log(a)
    copies = math.floor(delta) + 1 if delta > 1.0 + 1e-12 else 1
    return copies * b ** theta


# --- Objectives ---

def side_norms(prob: InterpProblem, s: SparseSeq) -> Tuple[float, float]:
    """The two weighted structure norms of a decomposition (side 1 includes extras)."""
    if s.is_zero(): return (0.0, 0.0)
    lo, hi = s.support()
    X = s.to_dense()
    g0, g1 = prob.side_groups()
    return max(t.exact(X, lo) for t in g0), max(t.exact(X, lo) for t in g1)


def interp_objective(prob: InterpProblem, s: SparseSeq) -> float:
    return max(side_norms(prob, s))


def balance_shift(prob: InterpProblem, s: SparseSeq, factors: Tuple[float, float] = (1.0, 1.0)) -> Tuple[SparseSeq, int]:
    """
    Translate s by the integer n nearest to log_b(f0 / f1) (floor or ceil, whichever
    gives the smaller max). factors scale the two side norms before balancing.
    """
    f0, f1 = side_norms(prob, s)
    f0, f1 = f0 * factors[0], f1 * factors[1]
    if s.is_zero() or f0 == 0 or f1 == 0: return s, 0
    r = math.log(f0 / f1) / math.log(prob.base)
    b, th = prob.base, prob.theta
    best = min((max(f0 * b ** (-th * n), f1 * b ** ((1.0 - th) * n)), n) for n in (math.floor(r), math.ceil(r)))
    return translate(s, best[1]), best[1]


def interp_objective_estimate(prob: InterpProblem, s: SparseSeq) -> NormEstimate:
    if s.is_zero(): return NormEstimate(0.0, 0.0, 0.0)
    lo, _ = s.support()
    X = s.to_dense()
    ests = [t.estimate(X, lo) for g in prob.side_groups() for t in g]
    return NormEstimate(max(e.value for e in ests), max(e.lo for e in ests), max(e.hi for e in ests), "max")


def sum_norm_lower_bound(couple: Couple, x, t: float = 1.0) -> float:
    """|<x, y>| / max(||y||_0*, ||y||_1* / t) over the duality maps of x."""
    x = couple.space0.check(x)
    best = 0.0
    for space in (couple.space0, couple.space1):
        y = space.duality_map(x)
        denom = max(couple.space0.dual_norm(y), couple.space1.dual_norm(y) / t)
        if denom > 0:
            best = max(best, abs(np.sum(x * y)) / denom)
    return best


# --- Interpolation norms ---

def interp_norm(prob: InterpProblem, x, warm_start: WarmStarts = None,
                check_window: bool = True) -> InterpSolution:
    """
    ||x||_theta over decompositions supported in [-N, N].
    With check_window the solve is repeated at 2N; a drift of 1% or more
    sets window_warning.
    """
    x = prob.check(x)
    N = int(prob.window)
    warm = _warm_list(warm_start)
    sol = minimize_max(prob.side_groups(), x, (-N, N), prob.solver, warm)
    if sol.value > 0:
        hint = sum_norm_lower_bound(prob.couple, x) / sandwich_constant(prob.theta, prob.base)
        sol.lower_hint = min(hint, sol.value)
    if check_window and sol.value > 0:
        wide = minimize_max(prob.side_groups(), x, (-2 * N, 2 * N), prob.solver, warm + [sol.certificate])
        drift = (sol.value - wide.value) / sol.value
        sol.diagnostics["window_drift"] = drift
        sol.diagnostics["value_2N"] = wide.value
        if drift >= DRIFT_LIMIT:
            sol.window_warning = True
            logger.warning("window N=%d drifts by %.2f%% at 2N", N, 100.0 * drift)
    return sol


@dataclass(frozen=True)
class InterpolationSpace(NormOracle):
    """
    (X0, X1)_theta as a norm oracle: every evaluation is a cold interp_norm
    solve, so values are upper bounds within the solver tolerance.
    """
    problem: InterpProblem

    @property
    def dim(self) -> int: return self.problem.dim

    def norm(self, v) -> float:
        return interp_norm(self.problem, self.check(v), check_window=False).value


def logconvex_norm(prob: InterpProblem, x, warm_start: WarmStarts = None) -> InterpSolution:
    """inf f0^(1-theta) f1^theta over the same decompositions."""
    x = prob.check(x)
    N = int(prob.window)
    return minimize_product(prob.side_groups(), (1.0 - prob.theta, prob.theta), x, (-N, N),
                            prob.solver, _warm_list(warm_start))


# --- Mean method ---

def _tail(struct: SeqStructSpec, space: NormedSpace, x: np.ndarray, rate: float, base: float, N: int):
    """
    Pinned tail sum_{m > N} of (b^{-rate m} x) in the aggregator's units:
    p-th powers for l^p, coordinatewise q-th powers for lattices, maxima for inf.
    """
    if isinstance(struct, Lp):
        nx = space.norm(x)
        if math.isinf(struct.p): return base ** (-rate * (N + 1)) * nx
        p = struct.p
        return nx ** p * base ** (-rate * (N + 1) * p) / (1.0 - base ** (-rate * p))
    if isinstance(struct, LatticeLq):
        ax = np.abs(x)
        if math.isinf(struct.q): return base ** (-rate * (N + 1)) * ax
        q = struct.q
        return ax ** q * base ** (-rate * (N + 1) * q) / (1.0 - base ** (-rate * q))
    raise UnsupportedStructureError(struct.kind, "mean_norm")


def partial_sums(s: SparseSeq, N: int) -> SparseSeq:
    """x0_k = sum_{m <= k} s_m on [-N, N]."""
    acc = sum((s[m] for m in s.indices() if m < -N), np.zeros(s.dim, dtype=complex))
    out = {}
    for k in range(-N, N + 1):
        acc = acc + s[k]
        out[k] = acc.copy()
    return SparseSeq(s.dim, out)


def telescope(x0: SparseSeq, N: int, x) -> SparseSeq:
    """s_k = x0_k - x0_{k-1} on [-N, N+1] with x0 = 0 below -N and x above N."""
    x = np.asarray(x, dtype=complex)
    out = {}
    prev = np.zeros(x0.dim, dtype=complex)
    for k in range(-N, N + 2):
        cur = x0[k] if k <= N else x
        out[k] = cur - prev
        prev = cur
    return SparseSeq(x0.dim, out)


def mean_norm(prob: InterpProblem, x, warm_start: WarmStarts = None) -> InterpSolution:
    """
    inf sum_j || (b^{(j-theta)k} x^j_k)_k ||_{S_j} over x^0_k + x^1_k = x, with x^0
    pinned to 0 below -N and to x above N; pinned tails are added in closed form.
    Warm starts are candidate x^0 sequences.
    """
    x = prob.check(x)
    groups = prob.side_groups()
    for g in groups:
        for t in g:
            if not t.struct.closed_form_tails:
                raise UnsupportedStructureError(t.struct.kind, "mean_norm")
    if not np.any(x):
        return InterpSolution(0.0, (SparseSeq.zeros(prob.dim), SparseSeq.zeros(prob.dim)), error_interval=(0.0, 0.0))

    warm = _warm_list(warm_start)
    N = int(prob.window)
    for w in warm:
        lo, hi = w.support()
        N = max(N, abs(lo), abs(hi))
    b, th = prob.base, prob.theta

    # 1. Terms with their pinned tails
    g0 = [replace(t, tail=_tail(t.struct, t.space, x, th, b, N)) for t in groups[0]]
    g1 = [replace(t, tail=_tail(t.struct, t.space, x, 1.0 - th, b, N)) for t in groups[1]]

    # 2. Step splittings at k = 0 as starting candidates
    K = 2 * N + 1
    steps = [SparseSeq(prob.dim, {k: x for k in range(0, N + 1)}),
             SparseSeq(prob.dim, {k: x for k in range(1, N + 1)})]
    target = np.tile(x, (K, 1))
    sol = minimize_sum(g0, g1, target, -N, prob.solver, steps + warm)
    sol.diagnostics["window"] = [-N, N]
    return sol


# --- K and J functionals ---

def k_functional(couple: Couple, t: float, x, cfg: Optional[SolverConfig] = None,
                 warm_start: Optional[Tuple] = None) -> InterpSolution:
    """K(t, x) = inf ||x0||_0 + t ||x1||_1 over x0 + x1 = x."""
    if not (t > 0): raise InvalidInputError(f"t must be positive, got {t}")
    x = couple.space0.check(x)
    cfg = cfg or SolverConfig()
    if not np.any(x):
        z = SparseSeq.zeros(couple.dim)
        return InterpSolution(0.0, (z, z), error_interval=(0.0, 0.0))
    g0 = [NormTerm(couple.space0, Lp(1.0))]
    g1 = [NormTerm(couple.space1, Lp(1.0), factor=float(t))]
    warm = []
    if warm_start is not None:
        warm.append(SparseSeq(couple.dim, {0: np.asarray(warm_start[0], dtype=complex)}))
    sol = minimize_sum(g0, g1, x[None, :], 0, cfg, warm)
    sol.lower_hint = min(sum_norm_lower_bound(couple, x, t), sol.value)
    return sol


def sum_norm(couple: Couple, v, cfg: Optional[SolverConfig] = None,
             warm_start: Optional[Tuple[np.ndarray, np.ndarray]] = None) -> InterpSolution:
    """||v||_{X0+X1} = K(1, v); certificate (x0, x1)."""
    return k_functional(couple, 1.0, v, cfg, warm_start=warm_start)


def j_functional(couple: Couple, t: float, x) -> float:
    """J(t, x) = max(||x||_0, t ||x||_1)."""
    if not (t > 0): raise InvalidInputError(f"t must be positive, got {t}")
    return max(couple.space0.norm(x), t * couple.space1.norm(x))


def discrete_real_norm(couple: Couple, theta: float, p, x, window: int = DEFAULT_WINDOW,
                       cfg: Optional[SolverConfig] = None, base: float = math.e) -> NormEstimate:
    """
    l^p norm over k in [-N, N] of b^{-theta k} K(b^k, x); the geometric
    tails K <= ||x||_0 (k > N) and K <= b^k ||x||_1 (k < -N) bound the rest.
    """
    p = parse_exponent(p)
    if not (0.0 < theta < 1.0): raise InvalidInputError(f"theta must lie in (0, 1), got {theta}")
    x = couple.space0.check(x)
    if not np.any(x): return NormEstimate(0.0, 0.0, 0.0, "discrete_real")
    cfg = cfg or SolverConfig()
    N = int(window)
    vals = []
    prev = None
    for k in range(-N, N + 1):
        sol = k_functional(couple, base ** k, x, cfg, warm_start=prev)
        prev = (sol.certificate[0][0],)
        vals.append(base ** (-theta * k) * sol.value)
    vals = np.array(vals)
    n0, n1 = couple.space0.norm(x), couple.space1.norm(x)
    r0 = base ** (-theta * (N + 1))            # k > N, weight b^{-theta k}
    r1 = base ** (-(1.0 - theta) * (N + 1))    # k < -N, weight b^{k(1-theta)}
    if math.isinf(p):
        value = float(vals.max())
        hi = max(value, r0 * n0, r1 * n1)
    else:
        value = float((vals ** p).sum() ** (1.0 / p))
        tail = (n0 * r0) ** p / (1.0 - base ** (-theta * p)) + (n1 * r1) ** p / (1.0 - base ** (-(1.0 - theta) * p))
        hi = float(((vals ** p).sum() + tail) ** (1.0 / p))
    return NormEstimate(value, value, hi, "discrete_real")


def discrete_real_constant(theta: float, p, window: int = DEFAULT_WINDOW, base: float = math.e) -> float:
    """The truncated series for X0 = X1: l^p norm of b^{-theta k} min(1, b^k), |k| <= N."""
    p = parse_exponent(p)
    ks = np.arange(-window, window + 1)
    v = base ** (-theta * ks) * np.minimum(1.0, base ** ks.astype(float))
    return float(v.max()) if math.isinf(p) else float((v ** p).sum() ** (1.0 / p))


# --- Finite representation ---

@dataclass
class FiniteRepResult:
    seq: SparseSeq
    constant: float
    n: int
    value: float
    base_value: float

    def to_dict(self) -> Dict:
        return {"seq": self.seq.to_dict(), "constant": self.constant, "n": self.n,
                "value": self.value, "base_value": self.base_value}


def finite_rep(prob: InterpProblem, x, slack: float = 1.5, warm_start: WarmStarts = None) -> FiniteRepResult:
    """
    Cesaro average of a near-optimal decomposition y plus tail lumps:
        w = C_n y + sum_{m=0}^{n} [ (x - sum_{k<=m} y_k) at m  +  (sum_{k<=-m-1} y_k) at -m ] / (n+1)
    with n + 1 >= max(||x||_0, ||x||_1) / ||y||_theta. Sum of w is x exactly.
    """
    if not (slack > 1.0): raise InvalidInputError(f"slack must exceed 1, got {slack}")
    for st in [prob.struct0, prob.struct1] + [e[1] for e in prob.extra_side1]:
        if not st.cesaro_contractive:
            raise UnsupportedStructureError(st.kind, "finite_rep")
    x = prob.check(x)
    C = finite_rep_constant(prob.theta, prob.base)
    if not np.any(x):
        return FiniteRepResult(SparseSeq.zeros(prob.dim), C, 0, 0.0, 0.0)

    # 1. Near-optimal decomposition
    sol = interp_norm(prob, x, warm_start, check_window=False)
    y, V = sol.certificate, sol.value

    # 2. Cesaro order from the threshold rule
    top = max(prob.couple.space0.norm(x), prob.couple.space1.norm(x))
    n = max(int(math.ceil(top / V - 1e-12)) - 1, 0)

    # 3. Lumps
    lumps: Dict[int, np.ndarray] = {}
    ks = y.indices()
    for m in range(n + 1):
        plus = x - sum((y[k] for k in ks if k <= m), np.zeros(prob.dim, dtype=complex))
        minus = sum((y[k] for k in ks if k <= -m - 1), np.zeros(prob.dim, dtype=complex))
        lumps[m] = lumps.get(m, 0) + plus / (n + 1)
        lumps[-m] = lumps.get(-m, 0) + minus / (n + 1)
    w = cesaro(n, y) + SparseSeq(prob.dim, lumps)
    value = interp_objective(prob, w)
    logger.debug("finite_rep: n=%d base=%.6g value=%.6g C=%.4g", n, V, value, C)
    return FiniteRepResult(w, C, n, value, V)


# --- Base change ---

def change_base_reindex(seq: SparseSeq, a: float, b: float) -> SparseSeq:
    """
    Move a base-a decomposition to base b = a^delta: block k goes to floor(k / delta),
    collisions are summed (at most floor(delta) + 1 of them when delta > 1).
    """
    if not (a > 1.0 and b > 1.0): raise InvalidInputError("bases must exceed 1")
    delta = math.log(b) / math.log(a)
    if abs(delta - 1.0) < 1e-12: return seq
    out: Dict[int, np.ndarray] = {}
    for k, blk in seq.entries.items():
        m = math.floor(k / delta + 1e-12)
        out[m] = out[m] + blk if m in out else blk.copy()
    return SparseSeq(seq.dim, out)


# --- Calderon-Lozanovskii product ---

def calderon_lozanovskii_norm(couple: Couple, theta: float, x, cfg: Optional[SolverConfig] = None,
                              warm_start=None) -> InterpSolution:
    """
    inf ||x0||_0^(1-theta) ||x1||_1^theta over |x| <= |x0|^(1-theta) |x1|^theta.
    With u = exp(eta) on supp(x) and the binding |x1| = (|x|/u^(1-theta))^(1/theta),
    the log objective is convex in eta. Coordinates with x_i = 0 carry u_i = 0.
    """
    if not (0.0 < theta < 1.0): raise InvalidInputError(f"theta must lie in (0, 1), got {theta}")
    x = couple.space0.check(x)
    cfg = cfg or SolverConfig()
    S = np.flatnonzero(x)
    if S.size == 0:
        z = SparseSeq.zeros(couple.dim)
        return InterpSolution(0.0, (z, z), error_interval=(0.0, 0.0))
    ax = np.abs(x[S])
    w0, w1 = couple.space0.weights[S], couple.space1.weights[S]
    p0, p1 = couple.space0.p, couple.space1.p
    sp0 = NormedSpace.weighted_lp(p0, w0)
    sp1 = NormedSpace.weighted_lp(p1, w1)
    r = (1.0 - theta) / theta

    def factors(eta):
        u = np.exp(eta)
        v = ax ** (1.0 / theta) * np.exp(-r * eta)
        return u, v

    def exact_fn(eta):
        u, v = factors(eta)
        return (1.0 - theta) * math.log(sp0.norm(u)) + theta * math.log(sp1.norm(v))

    base_n0, base_n1 = sp0.norm(ax), sp1.norm(ax)

    def smooth_fn(eta, mu):
        u, v = factors(eta)
        n0, g0 = sp0.smooth_magnitudes(u[None, :], mu * base_n0)
        n1, g1 = sp1.smooth_magnitudes(v[None, :], mu * base_n1)
        val = (1.0 - theta) * math.log(n0[0]) + theta * math.log(n1[0])
        grad = (1.0 - theta) * (g0[0] * u / n0[0] - g1[0] * v / n1[0])
        return val, grad

    starts = [np.log(ax)]
    for k in range(1, cfg.restarts):
        rng = np.random.default_rng([cfg.seed, k])
        starts.append(np.log(ax) + rng.normal(0.0, 1.0, size=S.size))
    if warm_start is not None:
        u0 = np.asarray(warm_start, dtype=float)[S]
        if np.all(u0 > 0): starts.append(np.log(u0))

    best_eta, best_v, iters, conv = None, math.inf, 0, True
    for j, eta0 in enumerate(starts):
        v0 = exact_fn(eta0)
        if v0 < best_v: best_eta, best_v = eta0, v0
        eta, v, it, c = run_smoothed(smooth_fn, exact_fn, eta0, cfg, 1.0, f"cl{j}")
        iters += it
        conv = conv and c
        if v < best_v: best_eta, best_v = eta, v
    u, v = factors(best_eta)
    x0 = np.zeros(couple.dim, dtype=complex)
    x1 = np.zeros(couple.dim, dtype=complex)
    x0[S] = u * np.exp(1j * np.angle(x[S]))
    x1[S] = v
    value = couple.space0.norm(x0) ** (1.0 - theta) * couple.space1.norm(x1) ** theta
    cert = (SparseSeq.delta(x0, 0), SparseSeq.delta(x1, 0))
    if not conv:
        logger.warning("Calderon-Lozanovskii factorization stopped before convergence")
    return InterpSolution(value, cert, iterations=iters, converged=conv,
                          error_interval=stopping_interval(value, cfg),
                          diagnostics={"starts": len(starts), "support": S.tolist()})


def calderon_lozanovskii_objective(couple: Couple, theta: float, x, u) -> float:
    """||u||_0^(1-theta) ||v||_1^theta for the binding v = (|x| / u^(1-theta))^(1/theta) on supp(x)."""
    x = couple.space0.check(x)
    S = np.flatnonzero(x)
    if S.size == 0: return 0.0
    au = np.abs(np.asarray(u, dtype=complex))[S]
    if np.any(au <= 0): return math.inf
    u0, v = np.zeros(couple.dim), np.zeros(couple.dim)
    u0[S] = au
    v[S] = (np.abs(x[S]) / au ** (1.0 - theta)) ** (1.0 / theta)
    return couple.space0.norm(u0) ** (1.0 - theta) * couple.space1.norm(v) ** theta
