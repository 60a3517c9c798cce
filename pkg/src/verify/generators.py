"""
Random instance generators. Every instance is a plain JSON-able dict so its
digest is stable; checkers rebuild objects with the helpers at the bottom.
"""

import math
from typing import Dict, List, Optional, Sequence

import numpy as np

from ..core.config import parse_vector
from ..core.sequences import SparseSeq
from ..core.spaces import Couple, NormedSpace, exponent_to_json
from ..core.structures import FourierC, FourierLp, LatticeLq, Lp, Rademacher, SeqStructSpec

DIMS = (1, 2, 4, 8)
SMALL_DIMS = (1, 2, 4)
THETAS = (0.25, 0.5, 0.75)
EXPONENTS = (1.0, 1.5, 2.0, 4.0, math.inf)
LOG_WEIGHT = 2.0
BASES = (1.5, math.e, 4.0)


def random_theta(rng: np.random.Generator) -> float:
    """A grid value half the time, otherwise uniform on [0.2, 0.8]."""
    if rng.random() < 0.5: return float(rng.choice(THETAS))
    return float(np.round(rng.uniform(0.2, 0.8), 6))


def random_exponent(rng: np.random.Generator, choices: Sequence[float] = EXPONENTS):
    return exponent_to_json(float(choices[int(rng.integers(len(choices)))]))


def random_weights(rng: np.random.Generator, n: int) -> List[float]:
    return np.exp(rng.uniform(-LOG_WEIGHT, LOG_WEIGHT, size=n)).round(8).tolist()


def random_space(rng: np.random.Generator, n: int, p=None) -> Dict:
    p = random_exponent(rng) if p is None else exponent_to_json(float(p))
    return {"kind": "weighted_lp", "p": p, "weights": random_weights(rng, n)}


def random_couple(rng: np.random.Generator, n: int, p0=None, p1=None) -> Dict:
    return {"dim": n, "space0": random_space(rng, n, p0), "space1": random_space(rng, n, p1)}


def random_vector(rng: np.random.Generator, n: int, real: bool = False) -> Dict:
    re = rng.standard_normal(n).round(8)
    im = np.zeros(n) if real else rng.standard_normal(n).round(8)
    return {"re": re.tolist(), "im": im.tolist()}


def random_seq(rng: np.random.Generator, n: int, max_width: int = 6, max_offset: int = 5) -> Dict:
    width = int(rng.integers(1, max_width + 1))
    lo = int(rng.integers(-max_offset, max_offset + 1))
    entries = []
    for k in range(lo, lo + width):
        if k not in (lo, lo + width - 1) and rng.random() < 0.25: continue
        v = random_vector(rng, n)
        entries.append({"k": k, **v})
    return {"dim": n, "entries": entries}


def random_struct(rng: np.random.Generator, kinds: Sequence[str] = ("lp", "lattice_lq", "fourier_lp"),
                  exponents: Sequence[float] = EXPONENTS, fourier_exponents: Optional[Sequence[float]] = None) -> Dict:
    kind = str(kinds[int(rng.integers(len(kinds)))])
    if kind == "lp": return Lp(float(random_exponent(rng, exponents))).to_dict()
    if kind == "lattice_lq": return LatticeLq(float(random_exponent(rng, exponents))).to_dict()
    finite = list(fourier_exponents or [p for p in exponents if not math.isinf(p)] or [2.0])
    if kind == "fourier_lp": return FourierLp(float(random_exponent(rng, finite))).to_dict()
    if kind == "fourier_c": return FourierC().to_dict()
    if kind == "rademacher": return Rademacher(float(random_exponent(rng, finite)), mode="exact").to_dict()
    raise ValueError(f"no generator for structure kind {kind!r}")


def random_problem(rng: np.random.Generator, dims: Sequence[int] = SMALL_DIMS,
                   kinds: Sequence[str] = ("lp", "lattice_lq", "fourier_lp"),
                   base: Optional[float] = None, **struct_kw) -> Dict:
    n = int(rng.choice(dims))
    return {
        "couple": random_couple(rng, n),
        "struct0": random_struct(rng, kinds, **struct_kw),
        "struct1": random_struct(rng, kinds, **struct_kw),
        "theta": random_theta(rng),
        "base": float(base if base is not None else math.e),
        "x": random_vector(rng, n),
    }


# --- Rebuilding ---

def build_couple(d: Dict) -> Couple: return Couple.from_dict(d)
def build_space(d: Dict) -> NormedSpace: return NormedSpace.from_dict(d)
def build_struct(d: Dict) -> SeqStructSpec: return SeqStructSpec.from_dict(d)
def build_vector(d: Dict) -> np.ndarray: return parse_vector(d)
def build_seq(d: Dict) -> SparseSeq: return SparseSeq.from_dict(d)
