"""
Sequence structures on a NormedSpace.

Every implemented structure is evaluated through one of two compiled forms
over K consecutive blocks X (a K x n complex array, relative index 0..K-1):

  row aggregate    V = M X,  value = (sum_r c_r ||V_r||^p)^(1/p)  or  max_r ||V_r||
  lattice          value = || ( sum_k |x_{k,i}|^q )^(1/q) ||_X  (coordinatewise)

l^p uses M = I; Fourier structures use M_{r,k} = exp(i k t_r) on a uniform
torus grid; Rademacher and Gaussian structures use sign / normal sample
matrices. Working on relative indices makes translation invariance exact.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import ClassVar, Dict, Optional, Tuple, Type

import numpy as np
from scipy.special import gamma
from scipy.stats import norm as normal_dist

from .errors import (
    EnumerationBudgetError, InvalidInputError, OverflowGuardError,
    QuadratureBudgetError, DimensionMismatchError, UnsupportedStructureError,
)
from .sequences import SparseSeq
from .spaces import INF, NormedSpace, exponent_to_json, parse_exponent, conjugate_exponent

logger = logging.getLogger(__name__)

ENUMERATION_BUDGET_LOG2 = 20
DEFAULT_MC_SAMPLES = 20000
DEFAULT_NODES_PER_INDEX = 64
MIN_NODES_PER_INDEX = 4
CONFIDENCE = 0.99
MC_BATCHES = 20
OVERFLOW_LIMIT = 1e300


@dataclass(frozen=True)
class NormEstimate:
    value: float
    lo: float
    hi: float
    method: str = "exact"

    @property
    def half_width(self) -> float:
        return max(self.value - self.lo, self.hi - self.value)

    @property
    def error_interval(self) -> Tuple[float, float]:
        return (self.lo, self.hi)

    def to_dict(self) -> Dict:
        return {"value": self.value, "lo": self.lo, "hi": self.hi, "method": self.method}


@dataclass(frozen=True)
class WeightedEval:
    """Geometric weight base^(exponent*k)."""
    base: float = math.e
    exponent: float = 0.0

    def __post_init__(self):
        if not (self.base > 1.0):
            raise InvalidInputError(f"base must exceed 1, got {self.base}")


# --- Compiled forms ---

class RowAggregate:
    def __init__(self, matrix: Optional[np.ndarray], coeffs: np.ndarray, p: float,
                 method: str, monte_carlo: bool = False, exact_quadrature: bool = True):
        self.matrix = matrix
        self.coeffs = coeffs
        self.p = p
        self.method = method
        self.monte_carlo = monte_carlo
        self.exact_quadrature = exact_quadrature

    def rows(self, X: np.ndarray) -> np.ndarray:
        return X if self.matrix is None else self.matrix @ X

    def _combine(self, vals: np.ndarray, tail: Optional[float] = None) -> float:
        if math.isinf(self.p):
            m = float(vals.max()) if vals.size else 0.0
            return m if tail is None else max(m, float(tail))
        tail_p = 0.0 if tail is None else float(tail)
        m = max(float(vals.max()) if vals.size else 0.0, tail_p ** (1.0 / self.p))
        if m == 0: return 0.0
        return float(m * (self.coeffs @ (vals / m) ** self.p + tail_p / m ** self.p) ** (1.0 / self.p))

    def exact(self, space: NormedSpace, X: np.ndarray, tail: Optional[float] = None) -> float:
        return self._combine(space.norms_rows(self.rows(X)), tail)

    def estimate(self, space: NormedSpace, X: np.ndarray) -> NormEstimate:
        vals = space.norms_rows(self.rows(X))
        value = self._combine(vals)
        if self.monte_carlo:
            return _mc_interval(vals, self.p, value, self.method)
        if self.method == "fourier_c":
            # Bernstein: |f(t) - f(t_j)| <= deg * ||f||_inf * pi / T on the grid
            deg = X.shape[0] - 1
            slack = 1.0 - math.pi * deg / vals.size
            hi = value / slack if slack > 0 else math.inf
            return NormEstimate(value, value, hi, self.method)
        if self.method == "fourier_lp" and not self.exact_quadrature:
            half = vals[::2]
            coarse = float((half ** self.p).mean() ** (1.0 / self.p)) if half.size else value
            err = abs(value - coarse)
            return NormEstimate(value, max(value - err, 0.0), value + err, self.method)
        return NormEstimate(value, value, value, self.method)

    def smooth(self, space: NormedSpace, X: np.ndarray, mu: float,
               tail: Optional[float] = None) -> Tuple[float, np.ndarray]:
        V = self.rows(X)
        vals, grads = space.smooth_rows(V, mu)
        if math.isinf(self.p):
            allv = vals if tail is None else np.append(vals, tail)
            m = allv.max()
            e = np.exp((allv - m) / mu)
            s = e.sum()
            agg = m + mu * math.log(s)
            d = (e / s)[: vals.size]
        else:
            tail_p = 0.0 if tail is None else float(tail)
            m = max(vals.max(), tail_p ** (1.0 / self.p) if tail_p > 0 else 0.0)
            r = vals / m
            s = self.coeffs @ r ** self.p + tail_p / m ** self.p
            agg = m * s ** (1.0 / self.p)
            d = self.coeffs * r ** (self.p - 1.0) * s ** (1.0 / self.p - 1.0)
        GV = d[:, None] * grads
        GX = GV if self.matrix is None else self.matrix.conj().T @ GV
        return float(agg), GX


class LatticeAggregate:
    def __init__(self, q: float):
        self.q = q
        self.method = "lattice"
        self.monte_carlo = False

    def krivine(self, X: np.ndarray, tail: Optional[np.ndarray] = None) -> np.ndarray:
        """Coordinatewise l^q aggregate; tail holds extra q-th powers (or maxima for q = inf)."""
        a = np.abs(X)
        if tail is not None:
            t = np.asarray(tail, dtype=float)
            a = np.vstack([a, t[None, :] if math.isinf(self.q) else t[None, :] ** (1.0 / self.q)])
        if a.shape[0] == 0: return np.zeros(X.shape[1])
        if math.isinf(self.q): return a.max(axis=0)
        m = a.max(axis=0)
        safe = np.where(m > 0, m, 1.0)
        return safe * ((a / safe) ** self.q).sum(axis=0) ** (1.0 / self.q)

    def exact(self, space: NormedSpace, X: np.ndarray, tail: Optional[np.ndarray] = None) -> float:
        return float(space.norms_rows(self.krivine(X, tail)[None, :])[0])

    def estimate(self, space: NormedSpace, X: np.ndarray) -> NormEstimate:
        v = self.exact(space, X)
        return NormEstimate(v, v, v, self.method)

    def smooth(self, space: NormedSpace, X: np.ndarray, mu: float,
               tail: Optional[np.ndarray] = None) -> Tuple[float, np.ndarray]:
        a = np.sqrt(X.real ** 2 + X.imag ** 2 + mu * mu)
        if math.isinf(self.q):
            stack = a if tail is None else np.vstack([a, tail[None, :]])
            m = stack.max(axis=0)
            e = np.exp((stack - m) / mu)
            s = e.sum(axis=0)
            xi = m + mu * np.log(s)
            dxi = (e / s)[: a.shape[0]]
        elif self.q == 1.0:
            xi = a.sum(axis=0) + (0.0 if tail is None else tail)
            dxi = np.ones_like(a)
        else:
            m = a.max(axis=0)
            if tail is not None: m = np.maximum(m, tail ** (1.0 / self.q))
            r = a / m
            s = (r ** self.q).sum(axis=0) + (0.0 if tail is None else tail / m ** self.q)
            xi = m * s ** (1.0 / self.q)
            dxi = r ** (self.q - 1.0) * s ** (1.0 / self.q - 1.0)
        vals, dval = space.smooth_magnitudes(xi[None, :], mu)
        GX = dval[0][None, :] * dxi * X / a
        return float(vals[0]), GX


def _mc_interval(vals: np.ndarray, p: float, value: float, method: str) -> NormEstimate:
    """99% interval for (E ||.||^p)^(1/p) from batch means of the p-th powers."""
    y = vals ** p
    batches = np.array_split(y, MC_BATCHES)
    means = np.array([b.mean() for b in batches if b.size])
    se = means.std(ddof=1) / math.sqrt(means.size) if means.size > 1 else 0.0
    h = normal_dist.ppf(0.5 + CONFIDENCE / 2.0) * se
    ybar = y.mean()
    return NormEstimate(value, max(ybar - h, 0.0) ** (1.0 / p), (ybar + h) ** (1.0 / p), method)


# --- Sample columns (common random numbers: column j depends only on (seed, j)) ---

def _sign_column(seed: int, j: int, samples: int) -> np.ndarray:
    rng = np.random.default_rng([seed, j])
    return rng.integers(0, 2, size=samples) * 2.0 - 1.0


def _gauss_column(seed: int, j: int, samples: int, p: float) -> np.ndarray:
    rng = np.random.default_rng([seed, j])
    g = rng.standard_normal(samples)
    # Empirical p-th moment normalized to one
    return g / np.mean(np.abs(g) ** p) ** (1.0 / p)


def gaussian_moment(p: float) -> float:
    """(E|g|^p)^(1/p) for a standard real Gaussian."""
    return (2.0 ** (p / 2.0) * gamma((p + 1.0) / 2.0) / math.sqrt(math.pi)) ** (1.0 / p)


# --- Descriptors ---

_REGISTRY: Dict[str, Type["SeqStructSpec"]] = {}


def _register(cls):
    _REGISTRY[cls.kind] = cls
    return cls


@dataclass(frozen=True)
class SeqStructSpec:
    kind: ClassVar[str] = "abstract"

    @staticmethod
    def from_dict(data: Dict) -> "SeqStructSpec":
        kind = data.get("kind")
        if kind not in _REGISTRY:
            raise InvalidInputError(f"unknown structure kind {kind!r}; known: {sorted(_REGISTRY)}")
        return _REGISTRY[kind]._from_dict(data)

    def to_dict(self) -> Dict:
        raise NotImplementedError

    def compile(self, width: int):
        return _compile(self, int(width))

    # Capabilities
    @property
    def cesaro_contractive(self) -> bool: return True
    @property
    def closed_form_tails(self) -> bool: return False
    def is_monte_carlo(self, width: int) -> bool: return False
    def label(self) -> str: return self.kind


@_register
@dataclass(frozen=True)
class Lp(SeqStructSpec):
    """l^p(Z; X)."""
    kind: ClassVar[str] = "lp"
    p: float = 2.0

    def __post_init__(self): object.__setattr__(self, "p", parse_exponent(self.p))
    @classmethod
    def _from_dict(cls, d): return cls(d.get("p", 2.0))
    def to_dict(self): return {"kind": self.kind, "p": exponent_to_json(self.p)}
    @property
    def closed_form_tails(self): return True
    def label(self): return f"lp({exponent_to_json(self.p)})"


@_register
@dataclass(frozen=True)
class FourierLp(SeqStructSpec):
    """Fourier coefficients of an L^p(T; X) trigonometric polynomial, p < inf."""
    kind: ClassVar[str] = "fourier_lp"
    p: float = 2.0
    quad_nodes: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "p", parse_exponent(self.p))
        if math.isinf(self.p):
            raise InvalidInputError("fourier_lp needs p < inf; use fourier_c for the sup norm")
        if self.quad_nodes is not None and self.quad_nodes < 1:
            raise InvalidInputError("quad_nodes must be positive")
    @classmethod
    def _from_dict(cls, d): return cls(d.get("p", 2.0), d.get("quad_nodes"))
    def to_dict(self): return {"kind": self.kind, "p": exponent_to_json(self.p), "quad_nodes": self.quad_nodes}
    def label(self): return f"fourier_lp({exponent_to_json(self.p)})"


@_register
@dataclass(frozen=True)
class FourierC(SeqStructSpec):
    """Sup norm over the torus (continuous and L^inf versions coincide here)."""
    kind: ClassVar[str] = "fourier_c"
    quad_nodes: Optional[int] = None

    @classmethod
    def _from_dict(cls, d): return cls(d.get("quad_nodes"))
    def to_dict(self): return {"kind": self.kind, "quad_nodes": self.quad_nodes}


@_register
@dataclass(frozen=True)
class Rademacher(SeqStructSpec):
    """(E || sum_k eps_k x_k ||^p)^(1/p); mode exact, monte_carlo or auto."""
    kind: ClassVar[str] = "rademacher"
    p: float = 2.0
    mode: str = "auto"
    samples: int = DEFAULT_MC_SAMPLES
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "p", parse_exponent(self.p))
        if math.isinf(self.p): raise InvalidInputError("rademacher needs p < inf")
        if self.mode not in ("exact", "monte_carlo", "auto"):
            raise InvalidInputError(f"unknown rademacher mode {self.mode!r}")
    @classmethod
    def _from_dict(cls, d):
        return cls(d.get("p", 2.0), d.get("mode", "auto"), int(d.get("samples", DEFAULT_MC_SAMPLES)), int(d.get("seed", 0)))
    def to_dict(self):
        return {"kind": self.kind, "p": exponent_to_json(self.p), "mode": self.mode, "samples": self.samples, "seed": self.seed}
    def is_monte_carlo(self, width):
        return self.mode == "monte_carlo" or (self.mode == "auto" and width > ENUMERATION_BUDGET_LOG2)
    @property
    def cesaro_contractive(self): return self.mode != "monte_carlo"
    def label(self): return f"rademacher({exponent_to_json(self.p)},{self.mode})"


@_register
@dataclass(frozen=True)
class Gaussian(SeqStructSpec):
    """(E || sum_k g_k x_k ||^p)^(1/p) over a frozen, moment-normalized sample set."""
    kind: ClassVar[str] = "gaussian"
    p: float = 2.0
    samples: int = DEFAULT_MC_SAMPLES
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "p", parse_exponent(self.p))
        if math.isinf(self.p): raise InvalidInputError("gaussian needs p < inf")
    @classmethod
    def _from_dict(cls, d): return cls(d.get("p", 2.0), int(d.get("samples", DEFAULT_MC_SAMPLES)), int(d.get("seed", 0)))
    def to_dict(self): return {"kind": self.kind, "p": exponent_to_json(self.p), "samples": self.samples, "seed": self.seed}
    def is_monte_carlo(self, width): return True
    @property
    def cesaro_contractive(self): return False
    def label(self): return f"gaussian({exponent_to_json(self.p)})"


@_register
@dataclass(frozen=True)
class LatticeLq(SeqStructSpec):
    """X(l^q): base norm of the coordinatewise l^q aggregate."""
    kind: ClassVar[str] = "lattice_lq"
    q: float = 2.0

    def __post_init__(self): object.__setattr__(self, "q", parse_exponent(self.q))
    @classmethod
    def _from_dict(cls, d): return cls(d.get("q", 2.0))
    def to_dict(self): return {"kind": self.kind, "q": exponent_to_json(self.q)}
    @property
    def closed_form_tails(self): return True
    def label(self): return f"lattice({exponent_to_json(self.q)})"


def dual_structure(struct: SeqStructSpec) -> SeqStructSpec:
    """l^p -> l^{p'} and X(l^q) -> X*(l^{q'})."""
    if isinstance(struct, Lp): return Lp(conjugate_exponent(struct.p))
    if isinstance(struct, LatticeLq): return LatticeLq(conjugate_exponent(struct.q))
    raise UnsupportedStructureError(struct.kind, "dual_structure")


# --- Compilation ---

def fourier_nodes(quad_nodes: Optional[int], width: int) -> int:
    nodes = quad_nodes if quad_nodes is not None else DEFAULT_NODES_PER_INDEX * width
    if nodes < MIN_NODES_PER_INDEX * width:
        raise QuadratureBudgetError(nodes, width)
    return nodes


@lru_cache(maxsize=256)
def _compile(struct: SeqStructSpec, width: int):
    if isinstance(struct, Lp):
        return RowAggregate(None, np.ones(width), struct.p, "lp")
    if isinstance(struct, LatticeLq):
        return LatticeAggregate(struct.q)
    if isinstance(struct, (FourierLp, FourierC)):
        T = fourier_nodes(struct.quad_nodes, width)
        t = 2.0 * np.pi * np.arange(T) / T
        M = np.exp(1j * np.outer(t, np.arange(width)))
        if isinstance(struct, FourierC):
            return RowAggregate(M, np.full(T, 1.0 / T), INF, "fourier_c")
        p = struct.p
        # |f|^p is a trig polynomial of degree p*(width-1)/2 per side for even integer p
        exact = float(p).is_integer() and int(p) % 2 == 0 and T > p * (width - 1)
        return RowAggregate(M, np.full(T, 1.0 / T), p, "fourier_lp", exact_quadrature=exact)
    if isinstance(struct, Rademacher):
        if struct.is_monte_carlo(width):
            S = struct.samples
            M = np.column_stack([_sign_column(struct.seed, j, S) for j in range(width)]).astype(complex)
            return RowAggregate(M, np.full(S, 1.0 / S), struct.p, "rademacher_mc", monte_carlo=True)
        if width > ENUMERATION_BUDGET_LOG2:
            raise EnumerationBudgetError(width, ENUMERATION_BUDGET_LOG2)
        # The first sign is fixed: ||-v|| = ||v|| halves the enumeration
        n_rows = 2 ** (width - 1)
        codes = np.arange(n_rows)[:, None]
        bits = (codes >> np.arange(width - 1)[None, :]) & 1
        M = np.hstack([np.ones((n_rows, 1)), 1.0 - 2.0 * bits]).astype(complex)
        return RowAggregate(M, np.full(n_rows, 1.0 / n_rows), struct.p, "rademacher_exact")
    if isinstance(struct, Gaussian):
        S = struct.samples
        M = np.column_stack([_gauss_column(struct.seed, j, S, struct.p) for j in range(width)]).astype(complex)
        return RowAggregate(M, np.full(S, 1.0 / S), struct.p, "gaussian_mc", monte_carlo=True)
    raise InvalidInputError(f"cannot compile structure {struct!r}")


# --- Operations ---

def _dense(struct: SeqStructSpec, space: NormedSpace, s: SparseSeq):
    if s.dim != space.dim:
        raise DimensionMismatchError(space.dim, s.dim, "sequence")
    if isinstance(struct, Rademacher):
        # Zero blocks drop out of sum_k eps_k x_k: only the support is enumerated
        return np.array([s[k] for k in s.indices()], dtype=complex).reshape(-1, s.dim)
    return s.to_dense()


def seq_norm(struct: SeqStructSpec, base_space: NormedSpace, s: SparseSeq) -> NormEstimate:
    """||s||_S with an error interval (quadrature or Monte Carlo)."""
    X = _dense(struct, base_space, s)
    if s.is_zero():
        return NormEstimate(0.0, 0.0, 0.0, struct.kind)
    return struct.compile(X.shape[0]).estimate(base_space, X)


def seq_norm_value(struct: SeqStructSpec, base_space: NormedSpace, s: SparseSeq) -> float:
    if s.is_zero(): return 0.0
    X = _dense(struct, base_space, s)
    return struct.compile(X.shape[0]).exact(base_space, X)


def check_weight_range(base: float, exponent: float, lo: int, hi: int) -> None:
    worst = abs(exponent) * math.log(base) * max(abs(lo), abs(hi))
    if worst > math.log(OVERFLOW_LIMIT):
        raise OverflowGuardError(
            f"weight {base}^({exponent}*k) exceeds {OVERFLOW_LIMIT:g} on indices [{lo}, {hi}]"
        )


def weighted_seq_norm(struct: SeqStructSpec, base_space: NormedSpace, w: WeightedEval,
                      s: SparseSeq) -> NormEstimate:
    """||(base^(exponent*k) x_k)_k||_S."""
    if s.is_zero():
        return NormEstimate(0.0, 0.0, 0.0, struct.kind)
    lo, hi = s.support()
    check_weight_range(w.base, w.exponent, lo, hi)
    return seq_norm(struct, base_space, s.weighted(w.base, w.exponent))
