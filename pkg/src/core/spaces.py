import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

from .errors import DimensionMismatchError, InvalidInputError

logger = logging.getLogger(__name__)

INF = math.inf


def parse_exponent(value) -> float:
    """Accepts 1.5, "2", "inf", "Infinity" or math.inf."""
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "infinity", "+inf"):
            return INF
        value = float(value)
    p = float(value)
    if not (p >= 1.0):
        raise InvalidInputError(f"exponent must lie in [1, inf], got {value!r}")
    return p


def exponent_to_json(p: float):
    return "inf" if math.isinf(p) else float(p)


def conjugate_exponent(p: float) -> float:
    if p == 1.0: return INF
    if math.isinf(p): return 1.0
    return p / (p - 1.0)


def weighted_lp_norm(a: np.ndarray, w: np.ndarray, p: float) -> np.ndarray:
    """
    Exact weighted l^p norm along the last axis of a magnitude array.
    ||a||_{p,w} = (sum_i (w_i a_i)^p)^(1/p), or max_i w_i a_i for p = inf.
    """
    wa = np.abs(a) * w
    if wa.shape[-1] == 0:
        return np.zeros(wa.shape[:-1])
    if math.isinf(p):
        return wa.max(axis=-1)
    if p == 1.0:
        return wa.sum(axis=-1)
    # Scale by the max entry so large p does not overflow
    m = wa.max(axis=-1, keepdims=True)
    safe = np.where(m > 0, m, 1.0)
    return safe[..., 0] * ((wa / safe) ** p).sum(axis=-1) ** (1.0 / p)


def smooth_weighted_lp(a: np.ndarray, w: np.ndarray, p: float, mu: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Smoothed weighted l^p norm of nonnegative rows and its derivative.

    a has shape (R, n). For p = inf the max is replaced by mu*log(sum exp(.../mu)),
    otherwise the expression is already smooth in a > 0.
    Returns values (R,) and d value / d a of shape (R, n).
    """
    wa = a * w
    if math.isinf(p):
        m = wa.max(axis=1, keepdims=True)
        e = np.exp((wa - m) / mu)
        s = e.sum(axis=1, keepdims=True)
        return m[:, 0] + mu * np.log(s[:, 0]), (e / s) * w
    if p == 1.0:
        return wa.sum(axis=1), np.broadcast_to(w, a.shape).copy()
    m = wa.max(axis=1, keepdims=True)
    m = np.where(m > 0, m, 1.0)
    r = wa / m
    s = (r ** p).sum(axis=1, keepdims=True)
    vals = m[:, 0] * s[:, 0] ** (1.0 / p)
    grad = w * r ** (p - 1.0) * s ** (1.0 / p - 1.0)
    return vals, grad


@dataclass(frozen=True)
class WeightedLp:
    p: float
    weights: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "p", parse_exponent(self.p))
        object.__setattr__(self, "weights", tuple(float(x) for x in self.weights))
        if not self.weights:
            raise InvalidInputError("weights must be non-empty")
        if any(not (x > 0 and math.isfinite(x)) for x in self.weights):
            raise InvalidInputError("weights must be strictly positive and finite")

    def to_dict(self) -> Dict:
        return {"kind": "weighted_lp", "p": exponent_to_json(self.p), "weights": list(self.weights)}


class NormOracle:
    """A norm on C^n known only through evaluation."""
    dim: int

    def check(self, v, what: str = "vector") -> np.ndarray:
        v = np.asarray(v, dtype=complex)
        if v.ndim != 1 or v.shape[0] != self.dim:
            raise DimensionMismatchError(self.dim, v.shape[-1] if v.ndim else 0, what)
        return v

    def norm(self, v) -> float:
        raise NotImplementedError

    def norms_rows(self, rows: np.ndarray) -> np.ndarray:
        return np.array([self.norm(r) for r in np.atleast_2d(rows)])


@dataclass(frozen=True)
class NormedSpace(NormOracle):
    """
    A norm on C^n given by an abstract norm descriptor.
    Only weighted l^p descriptors exist; everything acts on coordinate moduli,
    so every space is a coordinate Banach lattice.
    """
    dim: int
    norm_spec: WeightedLp
    _w: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidInputError(f"dim must be positive, got {self.dim}")
        if len(self.norm_spec.weights) != self.dim:
            raise DimensionMismatchError(self.dim, len(self.norm_spec.weights), "weight vector")
        object.__setattr__(self, "_w", np.asarray(self.norm_spec.weights, dtype=float))

    # --- Constructors ---
    @classmethod
    def weighted_lp(cls, p, weights) -> "NormedSpace":
        weights = tuple(np.atleast_1d(np.asarray(weights, dtype=float)).tolist())
        return cls(len(weights), WeightedLp(p, weights))

    @classmethod
    def from_dict(cls, data: Dict) -> "NormedSpace":
        if data.get("kind", "weighted_lp") != "weighted_lp":
            raise InvalidInputError(f"unknown norm kind {data.get('kind')!r}")
        if "weights" not in data or "p" not in data:
            raise InvalidInputError("norm descriptor needs 'p' and 'weights'")
        return cls.weighted_lp(data["p"], data["weights"])

    def to_dict(self) -> Dict:
        return self.norm_spec.to_dict()

    @property
    def p(self) -> float: return self.norm_spec.p
    @property
    def weights(self) -> np.ndarray: return self._w

    # --- Evaluation ---
    def norm(self, v) -> float:
        return float(weighted_lp_norm(np.abs(self.check(v)), self._w, self.p))

    def norms_rows(self, rows: np.ndarray) -> np.ndarray:
        return weighted_lp_norm(np.abs(rows), self._w, self.p)

    def dual(self) -> "NormedSpace":
        """X* as a weighted l^{p'} space with reciprocal weights."""
        return NormedSpace.weighted_lp(conjugate_exponent(self.p), 1.0 / self._w)

    def dual_norm(self, v) -> float:
        return self.dual().norm(self.check(v))

    def duality_map(self, v) -> np.ndarray:
        """A norming functional y with <x, y> = ||x|| and ||y||_* = 1 (x != 0)."""
        v = self.check(v)
        nv = self.norm(v)
        if nv == 0:
            return np.zeros(self.dim, dtype=complex)
        phase = np.exp(-1j * np.angle(v))
        wa = self._w * np.abs(v)
        if math.isinf(self.p):
            y = np.zeros(self.dim, dtype=complex)
            i = int(np.argmax(wa))
            y[i] = phase[i] * self._w[i]
            return y
        if self.p == 1.0:
            return phase * self._w
        return phase * self._w * (wa / nv) ** (self.p - 1.0)

    # --- Smoothed evaluation for the solver ---
    def smooth_rows(self, rows: np.ndarray, mu: float) -> Tuple[np.ndarray, np.ndarray]:
        """
        Smoothed norms of complex rows, |z| -> sqrt(|z|^2 + mu^2).
        Returns values (R,) and the complex gradient d/dRe + i d/dIm, shape (R, n).
        """
        a = np.sqrt(rows.real ** 2 + rows.imag ** 2 + mu * mu)
        vals, da = smooth_weighted_lp(a, self._w, self.p, mu)
        return vals, da * rows / a

    def smooth_magnitudes(self, a: np.ndarray, mu: float) -> Tuple[np.ndarray, np.ndarray]:
        return smooth_weighted_lp(a, self._w, self.p, mu)


@dataclass(frozen=True)
class Couple:
    """Two norms on the same ambient C^n."""
    dim: int
    space0: NormedSpace
    space1: NormedSpace

    def __post_init__(self):
        if self.space0.dim != self.dim: raise DimensionMismatchError(self.dim, self.space0.dim, "space0")
        if self.space1.dim != self.dim: raise DimensionMismatchError(self.dim, self.space1.dim, "space1")

    @classmethod
    def of(cls, space0: NormedSpace, space1: NormedSpace) -> "Couple":
        return cls(space0.dim, space0, space1)

    @classmethod
    def from_dict(cls, data: Dict) -> "Couple":
        s0 = NormedSpace.from_dict(data["space0"])
        s1 = NormedSpace.from_dict(data["space1"])
        return cls(int(data.get("dim", s0.dim)), s0, s1)

    def to_dict(self) -> Dict:
        return {"dim": self.dim, "space0": self.space0.to_dict(), "space1": self.space1.to_dict()}

    def space(self, j: int) -> NormedSpace:
        return self.space0 if j == 0 else self.space1

    def dual(self) -> "Couple":
        return Couple(self.dim, self.space0.dual(), self.space1.dual())


# --- Module level operations ---

def norm_eval(space: NormOracle, v) -> float:
    return space.norm(v)


def dual_norm_eval(space: NormedSpace, v) -> float:
    return space.dual_norm(v)


def intersection_norm(couple: Couple, v) -> float:
    """||v||_{X0 cap X1} = max(||v||_0, ||v||_1)."""
    return max(couple.space0.norm(v), couple.space1.norm(v))

