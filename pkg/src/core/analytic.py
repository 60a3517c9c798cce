"""
Analytic (complex-strip) view of decompositions and Laurent operator families.

A finitely supported s corresponds to f(z) = sum_k b^{k(z - theta)} x_k; on the
boundary lines Re z = j its Fourier coefficients are (b^{k(j - theta)} x_k)_k,
which are exactly the weighted sequences of the interpolation objective.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Mapping

import numpy as np

from .errors import DimensionMismatchError, InvalidInputError
from .sequences import SparseSeq
from .structures import seq_norm_value

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class AnalyticView:
    seq: SparseSeq
    theta: float
    base: float = math.e

    def eval_at(self, z: complex) -> np.ndarray:
        """f(z) = sum_k b^{k(z - theta)} x_k."""
        lb = math.log(self.base)
        out = np.zeros(self.seq.dim, dtype=complex)
        for k, blk in self.seq.entries.items():
            out += np.exp(k * (z - self.theta) * lb) * blk
        return out

    def boundary_coeffs(self, j: float) -> SparseSeq:
        """Fourier coefficients of t -> f(j + i t / ln b)."""
        if j == self.theta: return self.seq
        return self.seq.weighted(self.base, j - self.theta)

    def boundary_function(self, j: float, ts) -> np.ndarray:
        """Samples of the 2pi-periodic t -> f(j + i t / ln b), shape (len(ts), dim)."""
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        c = self.boundary_coeffs(j)
        if c.is_zero(): return np.zeros((ts.size, self.seq.dim), dtype=complex)
        ks = np.array(c.indices())
        return np.exp(1j * np.outer(ts, ks)) @ c.to_dense(ks[0], ks[-1])[ks - ks[0]]

    def objective(self, prob) -> float:
        """max over the boundary lines of the structure norm of the Fourier coefficients."""
        pairs0 = [(prob.couple.space0, prob.struct0)]
        pairs1 = [(prob.couple.space1, prob.struct1)] + list(prob.extra_side1)
        vals = [seq_norm_value(st, sp, self.boundary_coeffs(0.0)) for sp, st in pairs0]
        vals += [seq_norm_value(st, sp, self.boundary_coeffs(1.0)) for sp, st in pairs1]
        return max(vals)


def complex_view(seq: SparseSeq, theta: float, base: float = math.e) -> AnalyticView:
    return AnalyticView(seq, theta, base)


# --- Laurent operator families T(z) = sum_m e^{m z} A_m ---

class LaurentOperatorFamily:
    def __init__(self, coeffs: Mapping[int, np.ndarray]):
        if not coeffs:
            raise InvalidInputError("a Laurent family needs at least one coefficient")
        mats = {int(m): np.atleast_2d(np.asarray(A, dtype=complex)) for m, A in coeffs.items()}
        shapes = {A.shape for A in mats.values()}
        if len(shapes) != 1:
            raise InvalidInputError(f"inconsistent coefficient shapes {sorted(shapes)}")
        self.coeffs: Dict[int, np.ndarray] = dict(sorted(mats.items()))
        self.dim_out, self.dim_in = shapes.pop()

    def __repr__(self):
        return f"LaurentOperatorFamily(m={list(self.coeffs)}, shape=({self.dim_out}, {self.dim_in}))"

    def eval_at(self, z: complex) -> np.ndarray:
        return sum(np.exp(m * z) * A for m, A in self.coeffs.items())

    def to_dict(self) -> Dict:
        return {"coeffs": [{"m": m, "re": A.real.tolist(), "im": A.imag.tolist()} for m, A in self.coeffs.items()]}


def laurent_convolve(fam: LaurentOperatorFamily, s: SparseSeq, real_part: float) -> SparseSeq:
    """k-th block: sum_m e^{m r} A_m x_{k-m}."""
    if s.dim != fam.dim_in:
        raise DimensionMismatchError(fam.dim_in, s.dim, "sequence")
    out: Dict[int, np.ndarray] = {}
    for m, A in fam.coeffs.items():
        scale = math.exp(m * real_part)
        for k, blk in s.entries.items():
            y = scale * (A @ blk)
            out[k + m] = out[k + m] + y if (k + m) in out else y
    return SparseSeq(fam.dim_out, out)


def stein_boundary_coeffs(fam: LaurentOperatorFamily, j: int, s: SparseSeq) -> SparseSeq:
    """Fourier coefficients of t -> sum_k e^{ikt} T(j + it) x_k."""
    if j not in (0, 1):
        raise InvalidInputError(f"boundary index must be 0 or 1, got {j}")
    return laurent_convolve(fam, s, float(j))
