"""
Suite registry and runner.

A suite is a generator (rng -> JSON-serializable instance) plus a checker
(instance, context -> list of Check). Each case draws from its own stream
default_rng([seed, case]), so a run is reproducible and a single case can be
replayed without the others.
"""

import hashlib
import json
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from ..core.errors import InterpError, UnknownSuiteError
from ..core.solver import SolverConfig
from .report import CaseRecord, VerificationReport

logger = logging.getLogger(__name__)

DEFAULT_CASES = 100
SUITE_WINDOW = 8
SUITE_RTOL = 1e-9


@dataclass
class Check:
    """ratio <= bound (+ tol, relative to the bound) is the pass criterion."""
    label: str
    ratio: float
    bound: float
    tol: float = SUITE_RTOL
    constants: Dict[str, float] = field(default_factory=dict)
    details: Dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        if math.isnan(self.ratio): return False
        return self.ratio <= self.bound * (1.0 + self.tol) + self.tol


@dataclass(frozen=True)
class SuiteContext:
    seed: int
    solver: SolverConfig
    window: int = SUITE_WINDOW


Generator = Callable[[np.random.Generator, SuiteContext], Dict]
Checker = Callable[[Dict, SuiteContext], List[Check]]


@dataclass(frozen=True)
class Suite:
    name: str
    generate: Generator
    check: Checker
    cases: int = DEFAULT_CASES
    description: str = ""


_SUITES: Dict[str, Suite] = {}


def register(name: str, generate: Generator, cases: int = DEFAULT_CASES, description: str = ""):
    """Decorator for checkers: @register("axioms", gen_space_and_seq)."""
    def wrap(check: Checker) -> Checker:
        _SUITES[name] = Suite(name, generate, check, cases, description or (check.__doc__ or "").strip())
        return check
    return wrap


def available() -> List[str]:
    return sorted(_SUITES)


def get_suite(name: str) -> Suite:
    if name not in _SUITES:
        raise UnknownSuiteError(name, available())
    return _SUITES[name]


def ratio(a: float, b: float) -> float:
    """a / b with 0/0 = 0 and a/0 = inf."""
    if b > 0: return a / b
    return 0.0 if a <= 1e-300 else math.inf


def digest(instance: Dict) -> str:
    blob = json.dumps(instance, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def suite_solver(seed: int) -> SolverConfig:
    return SolverConfig(rel_tol=1e-6, max_iters=20000, restarts=2, seed=seed)


def run_suite(name: str, seed: int = 1, cases: Optional[int] = None,
              solver: Optional[SolverConfig] = None, window: int = SUITE_WINDOW) -> VerificationReport:
    suite = get_suite(name)
    n_cases = suite.cases if cases is None else int(cases)
    ctx = SuiteContext(seed, solver or suite_solver(seed), int(window))
    logger.info("suite %s: %d cases, seed %d", name, n_cases, seed)

    records: List[CaseRecord] = []
    t0 = time.perf_counter()
    for case in range(n_cases):
        rng = np.random.default_rng([seed, case])
        instance = suite.generate(rng, ctx)
        d = digest(instance)
        try:
            checks = suite.check(instance, ctx)
        except (InterpError, ArithmeticError, np.linalg.LinAlgError) as e:
            logger.warning("suite %s case %d (%s) raised %s: %s", name, case, d, type(e).__name__, e)
            records.append(CaseRecord(d, case, "error", math.nan, math.nan, False, error=f"{type(e).__name__}: {e}"))
            continue
        for c in checks:
            records.append(CaseRecord(d, case, c.label, float(c.ratio), float(c.bound), c.passed,
                                      dict(c.constants), dict(c.details)))
            if not c.passed:
                logger.warning("suite %s case %d (%s) %s: ratio %.6g > bound %.6g",
                               name, case, d, c.label, c.ratio, c.bound)
    wall = time.perf_counter() - t0

    records.sort(key=lambda r: (r.digest, r.case, r.check))
    report = VerificationReport(name, seed, n_cases, records, wall)
    logger.info("suite %s: %d checks, %d failures, max ratio/bound %.4g, %.1fs",
                name, len(records), report.failures, report.max_normalized_ratio, wall)
    return report
