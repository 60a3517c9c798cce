import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, Optional

import numpy as np
from scipy.linalg import svdvals

from .errors import DimensionMismatchError, InvalidInputError, UnsupportedStructureError
from .solver import SolverConfig
from .spaces import NormedSpace, conjugate_exponent, weighted_lp_norm
from .structures import FourierC, FourierLp, Gaussian, LatticeLq, Lp, Rademacher, SeqStructSpec

logger = logging.getLogger(__name__)

POWER_STEPS = 200
STARTS_PER_RESTART = 8
RESOLVENT_RANGE = range(-20, 21)


@dataclass(frozen=True)
class OperatorBound:
    value: float
    exact: bool
    method: str
    starts: int = 0

    def __float__(self): return float(self.value)

    def to_dict(self) -> Dict:
        return {"value": self.value, "exact": self.exact, "method": self.method, "starts": self.starts}


# --- Base operator norm between weighted l^p spaces ---

def _dual_vector(v: np.ndarray, p: float) -> np.ndarray:
    """Unit functional in l^{p'} norming v in l^p (unweighted)."""
    a = np.abs(v)
    phase = np.exp(-1j * np.angle(v))
    if math.isinf(p):
        y = np.zeros_like(v)
        i = int(np.argmax(a))
        y[i] = phase[i]
        return y
    if p == 1.0: return phase
    nv = weighted_lp_norm(a, np.ones_like(a), p)
    return phase * (a / nv) ** (p - 1.0)


def _power_method(B: np.ndarray, p: float, q: float, cfg: SolverConfig) -> OperatorBound:
    """
    Multistart p -> q power iteration: x <- dual_{p'}( B^H dual_q(Bx) ).
    Each iterate is feasible, so the maximum is a lower estimate.
    """
    pp = conjugate_exponent(p)
    ones = np.ones(B.shape[1])
    best, starts = 0.0, cfg.restarts * STARTS_PER_RESTART
    for r in range(starts):
        rng = np.random.default_rng([cfg.seed, r])
        x = rng.standard_normal(B.shape[1]) + 1j * rng.standard_normal(B.shape[1])
        x /= weighted_lp_norm(np.abs(x), ones, p)
        val = 0.0
        for _ in range(POWER_STEPS):
            y = B @ x
            new = float(weighted_lp_norm(np.abs(y), np.ones(B.shape[0]), q))
            if new <= val * (1.0 + 1e-14): break
            val = new
            z = B.conj().T @ np.conj(_dual_vector(y, q))
            x = np.conj(_dual_vector(z, pp))
            nx = weighted_lp_norm(np.abs(x), ones, p)
            if nx == 0: break
            x = x / nx
        best = max(best, val)
    logger.warning("operator norm %g -> %g estimated by multistart (lower estimate %.6g)", p, q, best)
    return OperatorBound(best, False, "multistart", starts)


def base_operator_norm(T, space_in: NormedSpace, space_out: NormedSpace,
                       cfg: Optional[SolverConfig] = None) -> OperatorBound:
    """||T||_{X -> Y} for weighted l^p spaces through B = diag(v) T diag(1/u)."""
    T = np.atleast_2d(np.asarray(T, dtype=complex))
    if T.shape != (space_out.dim, space_in.dim):
        raise DimensionMismatchError(space_out.dim * space_in.dim, T.size, "operator")
    B = space_out.weights[:, None] * T / space_in.weights[None, :]
    p, q = space_in.p, space_out.p
    if p == 2.0 and q == 2.0:
        return OperatorBound(float(svdvals(B)[0]), True, "svd")
    if p == 1.0:
        cols = weighted_lp_norm(np.abs(B.T), np.ones(B.shape[0]), q)
        return OperatorBound(float(cols.max()), True, "column_norms")
    if math.isinf(q):
        rows = weighted_lp_norm(np.abs(B), np.ones(B.shape[1]), conjugate_exponent(p))
        return OperatorBound(float(rows.max()), True, "row_norms")
    return _power_method(B, p, q, cfg or SolverConfig())


def operator_struct_bound(T, struct: SeqStructSpec, space_in: NormedSpace, space_out: NormedSpace,
                          cfg: Optional[SolverConfig] = None) -> OperatorBound:
    """
    Bound of the constant sequence (..., T, T, T, ...) from S(X) to S(Y).
    Row-aggregate structures act blockwise, so the bound is ||T||_{X->Y}.
    For X(l^q) the coordinatewise aggregate is dominated through the modulus |T|.
    """
    if isinstance(struct, LatticeLq):
        T = np.abs(np.atleast_2d(np.asarray(T, dtype=complex)))
        b = base_operator_norm(T, space_in, space_out, cfg)
        return OperatorBound(b.value, False, "modulus_" + b.method, b.starts)
    if isinstance(struct, (Lp, FourierLp, FourierC, Rademacher, Gaussian)):
        return base_operator_norm(T, space_in, space_out, cfg)
    raise UnsupportedStructureError(struct.kind, "operator_struct_bound")


# --- Diagonal operator sequences ---

def _diag_norm(d: np.ndarray, space_in: NormedSpace, space_out: NormedSpace) -> float:
    """Norm of diag(d) from l^p(u) to l^q(v)."""
    m = space_out.weights * np.abs(d) / space_in.weights
    p, q = space_in.p, space_out.p
    if p <= q: return float(m.max())
    # 1/r = 1/q - 1/p, q is finite here
    r = q if math.isinf(p) else 1.0 / (1.0 / q - 1.0 / p)
    return float(weighted_lp_norm(m, np.ones_like(m), r))


def diagonal_family_bound(diag_fn: Callable[[int], np.ndarray], struct: SeqStructSpec,
                          space_in: NormedSpace, space_out: NormedSpace,
                          ks: Iterable[int] = RESOLVENT_RANGE) -> float:
    """
    (S, T)-bound of a diagonal operator sequence (D_k)_k acting pointwise:
    l^p structures give sup_k ||D_k||; lattices give the sup inside the coordinate.
    """
    ds = np.array([np.asarray(diag_fn(k), dtype=complex) for k in ks])
    if isinstance(struct, Lp):
        return max(_diag_norm(d, space_in, space_out) for d in ds)
    if isinstance(struct, LatticeLq):
        return _diag_norm(np.abs(ds).max(axis=0), space_in, space_out)
    raise UnsupportedStructureError(struct.kind, "diagonal_family_bound")


class ResolventFamily:
    """
    S_k = a / (e^k + a) and T_k = e^k / (e^k + a), diagonal; S_k + T_k = I.
    With reflect=True the index is negated (k -> -k).
    """
    def __init__(self, a, reflect: bool = False):
        a = np.atleast_1d(np.asarray(a, dtype=float))
        if np.any(a <= 0) or not np.all(np.isfinite(a)):
            raise InvalidInputError("resolvent family needs a strictly positive vector a")
        self.a = a
        self.reflect = reflect

    def _ek(self, k: int) -> float:
        return math.exp(-k if self.reflect else k)

    def s_diag(self, k: int) -> np.ndarray:
        e = self._ek(k)
        return self.a / (e + self.a)

    def t_diag(self, k: int) -> np.ndarray:
        e = self._ek(k)
        return e / (e + self.a)

    def s_k(self, k: int) -> np.ndarray: return np.diag(self.s_diag(k))
    def t_k(self, k: int) -> np.ndarray: return np.diag(self.t_diag(k))

    def struct_bound(self, struct: SeqStructSpec, space: NormedSpace, which: str = "t",
                     space_out: Optional[NormedSpace] = None, ks: Iterable[int] = RESOLVENT_RANGE) -> float:
        fn = self.t_diag if which == "t" else self.s_diag
        return diagonal_family_bound(fn, struct, space, space_out or space, ks)
