"""
Generic minimization of max / sum / product-of-norms objectives over
block decompositions.

Each norm term is a (weighted) sequence-structure norm of a window of
blocks. The nonsmooth parts (moduli and maxima) are smoothed with a
temperature mu; scipy's L-BFGS-B runs one stage per temperature of the
schedule, warm-started from the previous stage. The returned value is
always the exact objective at the returned certificate.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import minimize

from .errors import InvalidInputError, SolverError
from .sequences import SparseSeq
from .spaces import NormedSpace
from .structures import SeqStructSpec, NormEstimate, check_weight_range

logger = logging.getLogger(__name__)

SCHEDULE_START = 0.05
LOG_GUARD = 1e-300
MIN_STAGE_ITERS = 25


@dataclass(frozen=True)
class SolverConfig:
    rel_tol: float = 1e-7
    max_iters: int = 50000
    smoothing_schedule: Optional[Tuple[float, ...]] = None
    restarts: int = 4
    seed: int = 1

    def __post_init__(self):
        if not (self.rel_tol > 0): raise InvalidInputError("rel_tol must be positive")
        if self.max_iters < 1: raise InvalidInputError("max_iters must be positive")
        if self.restarts < 1: raise InvalidInputError("restarts must be at least 1")
        if self.smoothing_schedule is not None:
            sched = tuple(float(m) for m in self.smoothing_schedule)
            if not sched or any(b >= a for a, b in zip(sched, sched[1:])) or sched[0] <= 0:
                raise InvalidInputError("smoothing_schedule must be positive and strictly decreasing")
            if sched[-1] >= self.rel_tol:
                raise InvalidInputError("smoothing_schedule must end below rel_tol")
            object.__setattr__(self, "smoothing_schedule", sched)

    def schedule(self) -> Tuple[float, ...]:
        """Relative temperatures; the default halves from 0.05 until below rel_tol."""
        if self.smoothing_schedule is not None: return self.smoothing_schedule
        out = [SCHEDULE_START]
        while out[-1] >= self.rel_tol:
            out.append(out[-1] / 2.0)
        return tuple(out)

    def with_(self, **kw) -> "SolverConfig":
        return replace(self, **kw)

    def to_dict(self) -> Dict:
        return {
            "rel_tol": self.rel_tol, "max_iters": self.max_iters, "restarts": self.restarts,
            "seed": self.seed,
            "smoothing_schedule": list(self.smoothing_schedule) if self.smoothing_schedule else None,
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "SolverConfig":
        known = {"rel_tol", "max_iters", "smoothing_schedule", "restarts", "seed"}
        unknown = set(data) - known
        if unknown:
            raise InvalidInputError(f"unknown solver fields: {sorted(unknown)}")
        kw = dict(data)
        if kw.get("smoothing_schedule") is not None:
            kw["smoothing_schedule"] = tuple(kw["smoothing_schedule"])
        return cls(**kw)


Certificate = Union[SparseSeq, Tuple[SparseSeq, SparseSeq], None]


@dataclass
class InterpSolution:
    value: float
    certificate: Certificate = None
    lower_hint: float = 0.0
    iterations: int = 0
    converged: bool = True
    error_interval: Tuple[float, float] = (0.0, 0.0)
    window_warning: bool = False
    diagnostics: Dict = field(default_factory=dict)

    def to_dict(self) -> Dict:
        cert = self.certificate
        if isinstance(cert, SparseSeq): cert = cert.to_dict()
        elif cert is not None: cert = [c.to_dict() for c in cert]
        return {
            "value": self.value, "lower_hint": self.lower_hint, "iterations": self.iterations,
            "converged": self.converged, "error_interval": list(self.error_interval),
            "window_warning": self.window_warning,
            "certificate": cert, "diagnostics": self.diagnostics,
        }


@dataclass
class NormTerm:
    """factor * || (base^(exponent*k) x_k)_k ||_struct, plus an optional pinned tail."""
    space: NormedSpace
    struct: SeqStructSpec
    base: float = math.e
    exponent: float = 0.0
    factor: float = 1.0
    tail: Optional[Union[float, np.ndarray]] = None

    def _scaled(self, X: np.ndarray, lo: int) -> Tuple[np.ndarray, np.ndarray]:
        K = X.shape[0]
        if self.exponent == 0.0:
            d = np.ones(K)
        else:
            check_weight_range(self.base, self.exponent, lo, lo + K - 1)
            d = np.exp(self.exponent * math.log(self.base) * (lo + np.arange(K)))
        return d, d[:, None] * X

    def exact(self, X: np.ndarray, lo: int) -> float:
        _, Xw = self._scaled(X, lo)
        return self.factor * self.struct.compile(X.shape[0]).exact(self.space, Xw, self.tail)

    def estimate(self, X: np.ndarray, lo: int) -> NormEstimate:
        if self.tail is not None:
            v = self.exact(X, lo)
            return NormEstimate(v, v, v, self.struct.kind)
        _, Xw = self._scaled(X, lo)
        e = self.struct.compile(X.shape[0]).estimate(self.space, Xw)
        f = self.factor
        return NormEstimate(f * e.value, f * e.lo, f * e.hi, e.method)

    def smooth(self, X: np.ndarray, lo: int, mu: float) -> Tuple[float, np.ndarray]:
        d, Xw = self._scaled(X, lo)
        v, G = self.struct.compile(X.shape[0]).smooth(self.space, Xw, mu / self.factor, self.tail)
        return self.factor * v, self.factor * d[:, None] * G


Group = Sequence[NormTerm]


# --- Group evaluation (a group is the max of its terms) ---

def _softmax(vals: np.ndarray, mu: float) -> Tuple[float, np.ndarray]:
    m = vals.max()
    e = np.exp((vals - m) / mu)
    s = e.sum()
    return m + mu * math.log(s), e / s


def _group_exact(group: Group, X: np.ndarray, lo: int) -> float:
    return max(t.exact(X, lo) for t in group)


def _group_estimate(group: Group, X: np.ndarray, lo: int) -> Tuple[float, float, float]:
    ests = [t.estimate(X, lo) for t in group]
    return max(e.value for e in ests), max(e.lo for e in ests), max(e.hi for e in ests)


def _group_smooth(group: Group, X: np.ndarray, lo: int, mu: float) -> Tuple[float, np.ndarray]:
    if len(group) == 1:
        return group[0].smooth(X, lo, mu)
    parts = [t.smooth(X, lo, mu) for t in group]
    val, w = _softmax(np.array([p[0] for p in parts]), mu)
    return val, sum(wi * p[1] for wi, p in zip(w, parts))


def _pack(Z: np.ndarray) -> np.ndarray:
    return np.concatenate([Z.real.ravel(), Z.imag.ravel()])


def _unpack(z: np.ndarray, shape: Tuple[int, int]) -> np.ndarray:
    h = z.size // 2
    return (z[:h] + 1j * z[h:]).reshape(shape)


# --- Staged smoothing loop ---

def run_smoothed(smooth_fn, exact_fn, z0: np.ndarray, cfg: SolverConfig, scale: float, label: str):
    """
    Continuation over the temperature schedule.
    Returns (best z, best exact value, iterations, converged).
    """
    schedule = cfg.schedule()
    per_stage = max(cfg.max_iters // len(schedule), MIN_STAGE_ITERS)
    z = z0.copy()
    best_z, best_v = z.copy(), exact_fn(z)
    iters, converged = 0, False
    for mu_rel in schedule:
        mu = mu_rel * scale

        def fun(v, mu=mu):
            val, g = smooth_fn(v, mu)
            return val / scale, g / scale

        res = minimize(fun, z, jac=True, method="L-BFGS-B",
                       options={"maxiter": per_stage, "ftol": cfg.rel_tol * 1e-2, "gtol": 1e-12})
        z = res.x
        iters += int(res.nit)
        converged = bool(res.success) or res.nit < per_stage
        v = exact_fn(z)
        if v < best_v:
            best_z, best_v = z.copy(), v
        logger.debug("%s: mu=%.3g nit=%d exact=%.10g", label, mu_rel, res.nit, v)
    return best_z, best_v, iters, converged


def _starts(shape: Tuple[int, int], scale_vec: float, cfg: SolverConfig, base_starts: List[np.ndarray]):
    starts = list(base_starts)
    for r in range(1, cfg.restarts):
        rng = np.random.default_rng([cfg.seed, r])
        Z = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * scale_vec
        starts.append(Z)
    return starts


def stopping_interval(value: float, cfg: SolverConfig) -> Tuple[float, float]:
    """The value is attained at the certificate; the optimum lies within rel_tol below it."""
    return (value / (1.0 + cfg.rel_tol), value)


def _finish(best_val: float, interval: Tuple[float, float], cert, iters: int, converged: bool,
            diagnostics: Dict, cfg: SolverConfig) -> InterpSolution:
    if not converged:
        logger.warning("solver stopped before convergence; best value %.6g", best_val)
    lo, hi = interval
    slo, shi = stopping_interval(best_val, cfg)
    return InterpSolution(
        value=best_val, certificate=cert, iterations=iters, converged=converged,
        error_interval=(min(lo, slo), max(hi, shi)), diagnostics=diagnostics,
    )


# --- Block-sum constraint: sum_k x_k = target ---

def _minimize_split(groups: Sequence[Group], target: np.ndarray, window: Tuple[int, int],
                    cfg: SolverConfig, warm_starts: Sequence[SparseSeq], combine: str,
                    exponents: Optional[Sequence[float]] = None) -> InterpSolution:
    target = np.asarray(target, dtype=complex)
    n = target.shape[0]
    if not np.any(target):
        return InterpSolution(0.0, SparseSeq.zeros(n), error_interval=(0.0, 0.0),
                              diagnostics={"window": list(window), "trivial": True})

    # 1. Window covers 0 and every warm start support
    lo, hi = min(window[0], 0), max(window[1], 0)
    warm = [w for w in warm_starts if w is not None and not w.is_zero()]
    for w in warm:
        if not np.allclose(w.total(), target, atol=1e-9 * max(1.0, np.abs(target).max())):
            raise InvalidInputError("warm start does not decompose the target")
        wl, wh = w.support()
        if wl < lo or wh > hi:
            logger.debug("window [%d, %d] extended to cover warm start [%d, %d]", lo, hi, wl, wh)
        lo, hi = min(lo, wl), max(hi, wh)
    K = hi - lo + 1
    i0 = -lo
    free = [i for i in range(K) if i != i0]
    shape = (K - 1, n)

    def assemble(Z: np.ndarray) -> np.ndarray:
        X = np.zeros((K, n), dtype=complex)
        X[free] = Z
        X[i0] = target - Z.sum(axis=0)
        return X

    # 2. Objective combination
    if combine == "logprod":
        ex = np.asarray(exponents, dtype=float)

        def combine_exact(vals): return float(np.prod(np.asarray(vals) ** ex))

        def combine_smooth(parts, mu):
            f = np.array([p[0] for p in parts]) + LOG_GUARD
            G = sum(e / fi * p[1] for e, fi, p in zip(ex, f, parts))
            return float(ex @ np.log(f)), G
    elif combine == "max":
        def combine_exact(vals): return max(vals)

        def combine_smooth(parts, mu):
            if len(parts) == 1: return parts[0]
            val, w = _softmax(np.array([p[0] for p in parts]), mu)
            return val, sum(wi * p[1] for wi, p in zip(w, parts))
    else:
        raise InvalidInputError(f"unknown combine mode {combine!r}")

    def exact_X(X): return combine_exact([_group_exact(g, X, lo) for g in groups])

    def exact_fn(z): return exact_X(assemble(_unpack(z, shape)))

    def smooth_fn(z, mu):
        X = assemble(_unpack(z, shape))
        val, G = combine_smooth([_group_smooth(g, X, lo, mu) for g in groups], mu)
        return val, _pack(G[free] - G[i0])

    # 3. Starts: delta at 0, random decompositions, warm starts
    delta = np.zeros(shape, dtype=complex)
    tscale = float(np.abs(target).max()) / math.sqrt(K)
    starts = _starts(shape, tscale, cfg, [delta])
    labels = ["delta"] + [f"random{r}" for r in range(1, len(starts))]
    for j, w in enumerate(warm):
        Xw = w.to_dense(lo, hi)
        starts.append(Xw[free])
        labels.append(f"warm{j}")

    delta_value = exact_X(assemble(delta))
    scale = delta_value if combine != "logprod" else max(delta_value, LOG_GUARD)
    if scale <= 0 or not math.isfinite(scale):
        scale = 1.0

    best_v, best_z, best_label, iters, conv_all = math.inf, None, None, 0, True
    for Z0, label in zip(starts, labels):
        z0 = _pack(Z0)
        v0 = exact_fn(z0)
        if v0 < best_v:
            best_v, best_z, best_label = v0, z0, label + ":start"
        z, v, it, conv = run_smoothed(smooth_fn, exact_fn, z0, cfg, scale, label)
        iters += it
        conv_all = conv_all and conv
        if v < best_v:
            best_v, best_z, best_label = v, z, label
    X = assemble(_unpack(best_z, shape))

    # 4. Interval at the certificate (Monte Carlo and quadrature widen it)
    if combine == "logprod":
        ests = [_group_estimate(g, X, lo) for g in groups]
        interval = (combine_exact([e[1] for e in ests]), combine_exact([e[2] for e in ests]))
    else:
        ests = [_group_estimate(g, X, lo) for g in groups]
        interval = (max(e[1] for e in ests), max(e[2] for e in ests))
    diag = {"window": [lo, hi], "best_start": best_label, "starts": len(starts),
            "stages": len(cfg.schedule()), "combine": combine}
    return _finish(best_v, interval, SparseSeq.from_dense(lo, X), iters, conv_all, diag, cfg)


def minimize_max(groups: Sequence[Group], target, window: Tuple[int, int], cfg: SolverConfig,
                 warm_starts: Sequence[SparseSeq] = ()) -> InterpSolution:
    """inf max_j f_j(s) over s supported in window with sum_k s_k = target."""
    return _minimize_split(groups, target, window, cfg, warm_starts, "max")


def minimize_product(groups: Sequence[Group], exponents: Sequence[float], target, window: Tuple[int, int],
                     cfg: SolverConfig, warm_starts: Sequence[SparseSeq] = ()) -> InterpSolution:
    """inf prod_j f_j(s)^e_j, minimized as sum_j e_j log(f_j + 1e-300)."""
    if len(exponents) != len(groups):
        raise InvalidInputError("one exponent per group is required")
    return _minimize_split(groups, target, window, cfg, warm_starts, "logprod", exponents)


# --- Blockwise constraint: x0_k + x1_k = target_k ---

def minimize_sum(group0: Group, group1: Group, target_blocks: np.ndarray, lo: int, cfg: SolverConfig,
                 warm_starts: Sequence[SparseSeq] = ()) -> InterpSolution:
    """
    inf g0(x0) + g1(x1) with x0_k + x1_k = target_k for each k in lo .. lo+K-1.
    x1 is eliminated as target - x0. Warm starts are candidate x0 sequences.
    """
    T = np.asarray(target_blocks, dtype=complex)
    K, n = T.shape
    shape = (K, n)

    def split(z):
        X0 = _unpack(z, shape)
        return X0, T - X0

    def exact_fn(z):
        X0, X1 = split(z)
        return _group_exact(group0, X0, lo) + _group_exact(group1, X1, lo)

    def smooth_fn(z, mu):
        X0, X1 = split(z)
        v0, G0 = _group_smooth(group0, X0, lo, mu)
        v1, G1 = _group_smooth(group1, X1, lo, mu)
        return v0 + v1, _pack(G0 - G1)

    zero = np.zeros(shape, dtype=complex)
    all0_v = exact_fn(_pack(T))
    all1_v = exact_fn(_pack(zero))
    scale = min(all0_v, all1_v)
    if scale <= 0 or not math.isfinite(scale):
        if scale == 0:
            X0 = T if all0_v == 0 else zero
            cert = (SparseSeq.from_dense(lo, X0), SparseSeq.from_dense(lo, T - X0))
            return InterpSolution(0.0, cert, error_interval=(0.0, 0.0), diagnostics={"trivial": True})
        scale = 1.0

    base_starts = [zero, T.copy(), 0.5 * T]
    labels = ["side1", "side0", "half"]
    tscale = float(np.abs(T).max()) / 2.0 if np.any(T) else 1.0
    starts = _starts(shape, tscale, cfg, base_starts)
    labels += [f"random{r}" for r in range(1, cfg.restarts)]
    for j, w in enumerate(warm_starts):
        if w is None: continue
        starts.append(w.to_dense(lo, lo + K - 1))
        labels.append(f"warm{j}")

    best_v, best_z, best_label, iters, conv_all = math.inf, None, None, 0, True
    for Z0, label in zip(starts, labels):
        z0 = _pack(Z0)
        v0 = exact_fn(z0)
        if v0 < best_v:
            best_v, best_z, best_label = v0, z0, label + ":start"
        z, v, it, conv = run_smoothed(smooth_fn, exact_fn, z0, cfg, scale, label)
        iters += it
        conv_all = conv_all and conv
        if v < best_v:
            best_v, best_z, best_label = v, z, label
    if best_z is None:
        raise SolverError("no finite objective value reached")

    X0, X1 = split(best_z)
    e0, e1 = _group_estimate(group0, X0, lo), _group_estimate(group1, X1, lo)
    interval = (e0[1] + e1[1], e0[2] + e1[2])
    cert = (SparseSeq.from_dense(lo, X0), SparseSeq.from_dense(lo, X1))
    diag = {"window": [lo, lo + K - 1], "best_start": best_label, "starts": len(starts),
            "stages": len(cfg.schedule()), "combine": "sum"}
    return _finish(best_v, interval, cert, iters, conv_all, diag, cfg)
