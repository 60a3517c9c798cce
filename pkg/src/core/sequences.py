import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

import numpy as np

from .errors import DimensionMismatchError, InvalidInputError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SparseSeq:
    """
    A finitely supported sequence Z -> C^n.
    Canonical form: blocks are stored by index, zero blocks are dropped.
    """
    dim: int
    entries: Mapping[int, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidInputError(f"dim must be positive, got {self.dim}")
        clean: Dict[int, np.ndarray] = {}
        for k, block in self.entries.items():
            b = np.asarray(block, dtype=complex).reshape(-1)
            if b.shape[0] != self.dim:
                raise DimensionMismatchError(self.dim, b.shape[0], f"block at index {k}")
            if np.any(b != 0):
                b = b.copy()
                b.flags.writeable = False
                clean[int(k)] = b
        object.__setattr__(self, "entries", dict(sorted(clean.items())))

    # --- Constructors ---
    @classmethod
    def zeros(cls, dim: int) -> "SparseSeq":
        return cls(dim, {})

    @classmethod
    def delta(cls, x, k: int = 0) -> "SparseSeq":
        x = np.atleast_1d(np.asarray(x, dtype=complex))
        return cls(x.shape[0], {k: x})

    @classmethod
    def from_dense(cls, lo: int, blocks: np.ndarray) -> "SparseSeq":
        """Blocks is a (K, n) array holding indices lo .. lo+K-1."""
        blocks = np.asarray(blocks, dtype=complex)
        if blocks.ndim == 1: blocks = blocks[:, None]
        return cls(blocks.shape[1], {lo + i: blocks[i] for i in range(blocks.shape[0])})

    @classmethod
    def from_dict(cls, data: Dict) -> "SparseSeq":
        try:
            dim = int(data["dim"])
            entries = {}
            for item in data.get("entries", []):
                re = np.asarray(item["re"], dtype=float)
                im = np.asarray(item.get("im", np.zeros_like(re)), dtype=float)
                entries[int(item["k"])] = re + 1j * im
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidInputError(f"malformed sequence descriptor: {e}") from e
        return cls(dim, entries)

    def to_dict(self) -> Dict:
        return {
            "dim": self.dim,
            "entries": [
                {"k": k, "re": b.real.tolist(), "im": b.imag.tolist()} for k, b in self.entries.items()
            ],
        }

    # --- Inspection ---
    def __len__(self) -> int: return len(self.entries)
    def __getitem__(self, k: int) -> np.ndarray:
        return self.entries.get(k, np.zeros(self.dim, dtype=complex))

    def is_zero(self) -> bool: return not self.entries
    def indices(self) -> List[int]: return list(self.entries.keys())

    def support(self) -> Tuple[int, int]:
        """(min index, max index); (0, 0) for the zero sequence."""
        if not self.entries: return (0, 0)
        ks = self.indices()
        return ks[0], ks[-1]

    def width(self) -> int:
        lo, hi = self.support()
        return hi - lo + 1

    def to_dense(self, lo: Optional[int] = None, hi: Optional[int] = None) -> np.ndarray:
        """(hi-lo+1, n) array; indices outside [lo, hi] must be empty."""
        slo, shi = self.support()
        lo = slo if lo is None else lo
        hi = shi if hi is None else hi
        out = np.zeros((hi - lo + 1, self.dim), dtype=complex)
        for k, b in self.entries.items():
            if k < lo or k > hi:
                raise InvalidInputError(f"index {k} outside window [{lo}, {hi}]")
            out[k - lo] = b
        return out

    def total(self) -> np.ndarray:
        """Sum of all blocks."""
        out = np.zeros(self.dim, dtype=complex)
        for b in self.entries.values(): out += b
        return out

    def allclose(self, other: "SparseSeq", atol: float = 1e-12) -> bool:
        if self.dim != other.dim: return False
        ks = set(self.entries) | set(other.entries)
        return all(np.allclose(self[k], other[k], rtol=0, atol=atol) for k in ks)

    # --- Algebra ---
    def __add__(self, other: "SparseSeq") -> "SparseSeq":
        if other.dim != self.dim: raise DimensionMismatchError(self.dim, other.dim, "sequence")
        out = {k: b.copy() for k, b in self.entries.items()}
        for k, b in other.entries.items():
            out[k] = out[k] + b if k in out else b.copy()
        return SparseSeq(self.dim, out)

    def __sub__(self, other: "SparseSeq") -> "SparseSeq":
        return self + other.scale(-1.0)

    def scale(self, c: complex) -> "SparseSeq":
        return SparseSeq(self.dim, {k: c * b for k, b in self.entries.items()})

    def map_blocks(self, fn) -> "SparseSeq":
        """Apply fn(k, block) -> block to every stored block."""
        return SparseSeq(self.dim, {k: fn(k, b) for k, b in self.entries.items()})

    def weighted(self, base: float, exponent: float) -> "SparseSeq":
        """(base^(exponent*k) x_k)_k."""
        lb = np.log(base) * exponent
        return self.map_blocks(lambda k, b: np.exp(lb * k) * b)

    def restrict(self, keep: Iterable[int]) -> "SparseSeq":
        keep = set(keep)
        return SparseSeq(self.dim, {k: b for k, b in self.entries.items() if k in keep})


# --- Structural operators ---

def translate(s: SparseSeq, m: int) -> SparseSeq:
    """Index shift: the block at k moves to k+m."""
    return SparseSeq(s.dim, {k + m: b for k, b in s.entries.items()})


def reflect(s: SparseSeq) -> SparseSeq:
    """Index negation k -> -k."""
    return SparseSeq(s.dim, {-k: b for k, b in s.entries.items()})


def truncate(s: SparseSeq, m: int) -> SparseSeq:
    """Restriction to indices [-m, m]."""
    return SparseSeq(s.dim, {k: b for k, b in s.entries.items() if -m <= k <= m})


def cesaro(n: int, s: SparseSeq) -> SparseSeq:
    """
    C_n s = 1/(n+1) * sum_{m=0}^{n} truncate(s, m).
    Index k survives in the truncations m = |k| .. n, so the block is scaled
    by (n+1-|k|)/(n+1) for |k| <= n and dropped otherwise.
    """
    if n < 0:
        raise InvalidInputError(f"Cesaro order must be nonnegative, got {n}")
    return SparseSeq(
        s.dim,
        {k: b * ((n + 1 - abs(k)) / (n + 1)) for k, b in s.entries.items() if abs(k) <= n},
    )
