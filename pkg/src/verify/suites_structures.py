"""
Suites on single sequence structures: axioms, the l^inf / l^1 sandwich,
Cesaro contraction and the Gaussian structure on Hilbert spaces.
"""

import math
from typing import Dict, List

import numpy as np

from ..core.sequences import SparseSeq, cesaro, reflect, translate
from ..core.spaces import NormedSpace, parse_exponent
from ..core.structures import (
    FourierC, FourierLp, Gaussian, LatticeLq, Lp, Rademacher, SeqStructSpec, seq_norm,
)
from . import generators as gen
from .registry import Check, SuiteContext, register

EXACT_TOL = 1e-9
CI_FACTOR = 3.0
MC_SAMPLES = 20000


def _variants(p: float, seed: int, quad_nodes=None) -> List[SeqStructSpec]:
    out: List[SeqStructSpec] = [Lp(p), LatticeLq(p), FourierC(quad_nodes)]
    if not math.isinf(p):
        out += [FourierLp(p, quad_nodes), Rademacher(p, mode="exact"),
                Rademacher(p, mode="monte_carlo", samples=MC_SAMPLES, seed=seed),
                Gaussian(p, samples=MC_SAMPLES, seed=seed)]
    return out


def _is_mc(struct: SeqStructSpec) -> bool:
    return isinstance(struct, Gaussian) or (isinstance(struct, Rademacher) and struct.mode == "monte_carlo")


def gen_space_and_seq(rng: np.random.Generator, ctx: SuiteContext) -> Dict:
    n = int(rng.choice(gen.DIMS))
    return {
        "space": gen.random_space(rng, n),
        "seq": gen.random_seq(rng, n),
        "p": gen.random_exponent(rng),
        "shift": int(rng.integers(-7, 8)),
        "k": int(rng.integers(-5, 6)),
        "mc_seed": int(rng.integers(0, 2 ** 31)),
    }


def _equal_check(label: str, a, b, mc: bool, constants=None) -> Check:
    """|a - b| within rounding, or within 3 CI half-widths for Monte Carlo."""
    if mc:
        return Check(label, abs(a.value - b.value), CI_FACTOR * (a.half_width + b.half_width), 1e-12,
                     constants or {})
    scale = max(a.value, b.value, 1e-300)
    return Check(label, abs(a.value - b.value) / scale, 0.0, EXACT_TOL, constants or {})


@register("axioms", gen_space_and_seq, cases=50)
def check_axioms(inst: Dict, ctx: SuiteContext) -> List[Check]:
    """Delta, translation, reflection and coordinate-contraction axioms per structure variant."""
    space = gen.build_space(inst["space"])
    s = gen.build_seq(inst["seq"])
    p = parse_exponent(inst["p"])
    x = s.total() if np.any(s.total()) else s[s.indices()[0]]
    checks = []
    for st in _variants(p, inst["mc_seed"]):
        mc = _is_mc(st)
        name = st.label()
        # 1. delta_k(x) has the norm of x
        d = seq_norm(st, space, SparseSeq.delta(x, inst["k"]))
        checks.append(Check(f"{name}:delta", abs(d.value - space.norm(x)) / max(space.norm(x), 1e-300),
                            0.0, EXACT_TOL))
        # 2. translation and reflection invariance
        base = seq_norm(st, space, s)
        checks.append(_equal_check(f"{name}:translate", seq_norm(st, space, translate(s, inst["shift"])), base, False))
        checks.append(_equal_check(f"{name}:reflect", seq_norm(st, space, reflect(s)), base, mc))
        # 3. ||x_k|| <= ||s||
        top = max(space.norm(s[k]) for k in s.indices())
        bound = base.value + (CI_FACTOR * base.half_width if mc else 0.0)
        checks.append(Check(f"{name}:coordinate", top, bound, EXACT_TOL))
    return checks


@register("sandwich", gen_space_and_seq, cases=100)
def check_sandwich(inst: Dict, ctx: SuiteContext) -> List[Check]:
    """||s||_{l^inf(X)} <= ||s||_S <= ||s||_{l^1(X)}."""
    space = gen.build_space(inst["space"])
    s = gen.build_seq(inst["seq"])
    p = parse_exponent(inst["p"])
    lo = seq_norm(Lp(math.inf), space, s).value
    hi = seq_norm(Lp(1.0), space, s).value
    checks = []
    for st in _variants(p, inst["mc_seed"]):
        e = seq_norm(st, space, s)
        consts = {"linf": lo, "l1": hi}
        lower_bound = e.value + (CI_FACTOR * e.half_width if _is_mc(st) else 0.0)
        checks.append(Check(f"{st.label()}:lower", lo, lower_bound, EXACT_TOL, consts))
        checks.append(Check(f"{st.label()}:upper", e.value / hi, 1.0, EXACT_TOL, consts))
    return checks


def gen_cesaro(rng: np.random.Generator, ctx: SuiteContext) -> Dict:
    inst = gen_space_and_seq(rng, ctx)
    inst["orders"] = sorted(int(n) for n in rng.integers(0, 8, size=3))
    return inst


@register("cesaro", gen_cesaro, cases=50)
def check_cesaro(inst: Dict, ctx: SuiteContext) -> List[Check]:
    """||C_n s|| <= ||s|| for contractive structures, and C_n s -> s at rate sum |k| ||x_k|| / (n+1)."""
    space = gen.build_space(inst["space"])
    s = gen.build_seq(inst["seq"])
    p = parse_exponent(inst["p"])
    # One quadrature grid for s and all of its Cesaro means
    nodes = 64 * s.width()
    structs = [st for st in _variants(p, inst["mc_seed"], quad_nodes=nodes) if st.cesaro_contractive and not _is_mc(st)]
    lo, hi = s.support()
    reach = max(abs(lo), abs(hi))
    rate = sum(abs(k) * space.norm(s[k]) for k in s.indices())
    checks = []
    for st in structs:
        base = seq_norm(st, space, s).value
        for n in inst["orders"]:
            checks.append(Check(f"{st.label()}:contract[{n}]", seq_norm(st, space, cesaro(n, s)).value / base,
                                1.0, EXACT_TOL))
        for n in (reach, 4 * reach + 3):
            diff = seq_norm(st, space, cesaro(n, s) - s).value
            checks.append(Check(f"{st.label()}:converge[{n}]", diff / rate if rate > 0 else diff,
                                1.0 / (n + 1) if rate > 0 else 0.0, EXACT_TOL, {"rate": rate}))
    return checks


def gen_hilbert_seq(rng: np.random.Generator, ctx: SuiteContext) -> Dict:
    n = int(rng.choice(gen.DIMS))
    return {"space": gen.random_space(rng, n, 2.0), "seq": gen.random_seq(rng, n),
            "mc_seed": int(rng.integers(0, 2 ** 31))}


@register("gaussian-hilbert", gen_hilbert_seq, cases=50)
def check_gaussian_hilbert(inst: Dict, ctx: SuiteContext) -> List[Check]:
    """On a Hilbert space the Gaussian structure is (sum ||x_k||^2)^(1/2) up to Monte Carlo error."""
    space: NormedSpace = gen.build_space(inst["space"])
    s = gen.build_seq(inst["seq"])
    exact = math.sqrt(sum(space.norm(s[k]) ** 2 for k in s.indices()))
    e = seq_norm(Gaussian(2.0, samples=MC_SAMPLES, seed=inst["mc_seed"]), space, s)
    return [Check("gaussian:l2", abs(e.value - exact), CI_FACTOR * e.half_width, 1e-12,
                  {"exact": exact, "half_width": e.half_width})]
