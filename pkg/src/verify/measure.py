"""
Cold measurements for the theorem suites.

A measured norm is solved from the solver's own starts at a window N and
again at 2N, the wide solve starting from the narrow solution. Decompositions
that a proof constructs are never handed to the solver: they are evaluated
afterwards and the solver has to reach their objective. Window drift and the
reach comparisons are checks like any other.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional

import numpy as np

from ..core.interpolation import (
    DRIFT_LIMIT, InterpProblem, interp_norm, interp_objective, logconvex_norm, mean_norm,
)
from ..core.sequences import SparseSeq
from ..core.solver import InterpSolution
from ..core.spaces import conjugate_exponent
from ..core.structures import FourierLp, LatticeLq, Lp, Rademacher, SeqStructSpec
from .generators import LOG_WEIGHT
from .registry import Check, SuiteContext, ratio

logger = logging.getLogger(__name__)

# Slack for inequalities between independently solved norms
SOLVER_TOL = 1e-4
DRIFT_TAIL = 0.005
WINDOW_CAP = 40

Solve = Callable[[int, Optional[InterpSolution]], InterpSolution]


# --- Window per case ---

def _tail_exponent(struct: SeqStructSpec) -> float:
    """
    Conjugate exponent of the structure. Fourier L^p below 2 and Rademacher
    behave like l^2 on spread-out tails; FourierC like l^1.
    """
    if isinstance(struct, Lp): return conjugate_exponent(struct.p)
    if isinstance(struct, LatticeLq): return conjugate_exponent(struct.q)
    if isinstance(struct, FourierLp): return conjugate_exponent(max(struct.p, 2.0))
    if isinstance(struct, Rademacher): return 2.0
    return 1.0


def suite_window(ctx: SuiteContext, theta: float, base: float, structs: Iterable[SeqStructSpec] = (),
                 spread: float = 2.0 * LOG_WEIGHT) -> int:
    """
    ctx.window, widened until the spread of log weight ratios plus a geometric
    tail b^(-r min(theta, 1 - theta) k) <= DRIFT_TAIL fits inside N, with r the
    smallest conjugate exponent of the structures. Capped at WINDOW_CAP.
    """
    r = min((_tail_exponent(s) for s in structs), default=1.0)
    lb = math.log(base)
    if math.isinf(r):
        need = spread / lb
    else:
        need = spread / lb + math.log(1.0 / DRIFT_TAIL) / (r * min(theta, 1.0 - theta) * lb)
    return int(min(max(ctx.window, math.ceil(need)), WINDOW_CAP))


def problem_window(ctx: SuiteContext, prob: InterpProblem) -> int:
    structs = [prob.struct0, prob.struct1] + [e[1] for e in prob.extra_side1]
    return suite_window(ctx, prob.theta, prob.base, structs)


def covers(s: SparseSeq, window: int) -> bool:
    if s.is_zero(): return True
    lo, hi = s.support()
    return -window <= lo and hi <= window


def covering_window(window: int, *seqs: SparseSeq) -> int:
    """Smallest N >= window whose 2N window holds every sequence."""
    reach = max((max(abs(k) for k in s.support()) for s in seqs if not s.is_zero()), default=0)
    return max(int(window), math.ceil(reach / 2))


# --- Measurements ---

@dataclass
class Measured:
    label: str
    window: int
    narrow: InterpSolution
    wide: InterpSolution

    @property
    def value(self) -> float: return self.wide.value
    @property
    def value_N(self) -> float: return self.narrow.value
    @property
    def certificate(self): return self.wide.certificate

    @property
    def drift(self) -> float:
        if self.value_N <= 0: return 0.0
        return abs(self.value_N - self.value) / self.value_N

    def details(self) -> Dict:
        return {self.label: self.value, f"{self.label}_N": self.value_N, f"{self.label}_window": self.window}


def measure(label: str, solve: Solve, window: int) -> Measured:
    narrow = solve(window, None)
    wide = solve(2 * window, narrow) if narrow.value > 0 else narrow
    logger.debug("%s: N=%d value %.10g, 2N value %.10g", label, window, narrow.value, wide.value)
    return Measured(label, window, narrow, wide)


def interp_solve(prob: InterpProblem, x) -> Solve:
    def solve(window: int, prev: Optional[InterpSolution]) -> InterpSolution:
        cfg = prob.solver if prev is None else prob.solver.with_(restarts=1)
        warm = None if prev is None else prev.certificate
        return interp_norm(prob.with_(window=window, solver=cfg), x, warm, check_window=False)
    return solve


def logconvex_solve(prob: InterpProblem, x) -> Solve:
    def solve(window: int, prev: Optional[InterpSolution]) -> InterpSolution:
        cfg = prob.solver if prev is None else prob.solver.with_(restarts=1)
        warm = None if prev is None else prev.certificate
        return logconvex_norm(prob.with_(window=window, solver=cfg), x, warm)
    return solve


def extend_partial_sums(x0: SparseSeq, narrow: int, window: int, x) -> SparseSeq:
    """A mean-method x0 on [-narrow, narrow] continued by its pinned value x up to window."""
    x = np.asarray(x, dtype=complex)
    entries = {k: x0[k] for k in x0.indices()}
    entries.update({k: x for k in range(narrow + 1, window + 1)})
    return SparseSeq(x0.dim, entries)


def mean_solve(prob: InterpProblem, x) -> Solve:
    def solve(window: int, prev: Optional[InterpSolution]) -> InterpSolution:
        cfg = prob.solver if prev is None else prob.solver.with_(restarts=1)
        warm = None
        if prev is not None:
            narrow = prev.diagnostics.get("window", [0, 0])[1]
            warm = extend_partial_sums(prev.certificate[0], narrow, window, x)
        return mean_norm(prob.with_(window=window, solver=cfg), x, warm)
    return solve


def measure_interp(label: str, prob: InterpProblem, x, window: int) -> Measured:
    return measure(label, interp_solve(prob, x), window)


# --- Checks ---

def drift_check(m: Measured) -> Check:
    """Relative change between the N and 2N solves stays below DRIFT_LIMIT."""
    return Check(f"drift[{m.label}]", m.drift, DRIFT_LIMIT, 0.0, {"drift_limit": DRIFT_LIMIT}, m.details())


def reach_check(m: Measured, name: str, objective: float) -> Check:
    """The solver must not stop above a decomposition it was never shown."""
    return Check(f"{m.label}<={name}", ratio(m.value, objective), 1.0, SOLVER_TOL,
                 details=dict(m.details(), **{name: objective}))


def reach_checks(m: Measured, prob: InterpProblem, candidates: Dict[str, SparseSeq]) -> List[Check]:
    """reach_check for every candidate decomposition inside the 2N window."""
    out = []
    for name, s in candidates.items():
        if s is None or s.is_zero(): continue
        if not covers(s, 2 * m.window):
            logger.debug("%s: candidate %s support %s lies outside 2N = %d", m.label, name, s.support(), 2 * m.window)
            continue
        out.append(reach_check(m, name, interp_objective(prob, s)))
    return out
