import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Dict, List, Optional

import pandas as pd


@dataclass
class CaseRecord:
    digest: str
    case: int
    check: str
    ratio: float
    bound: float
    passed: bool
    constants: Dict[str, float] = field(default_factory=dict)
    details: Dict = field(default_factory=dict)
    error: Optional[str] = None

    @property
    def normalized(self) -> float:
        if math.isnan(self.ratio) or self.bound == 0: return self.ratio
        return self.ratio / self.bound

    def to_dict(self) -> Dict:
        return {
            "digest": self.digest, "case": self.case, "check": self.check,
            "ratio": _finite(self.ratio), "bound": _finite(self.bound), "pass": self.passed,
            "constants": {k: _finite(v) for k, v in self.constants.items()},
            "details": {k: _finite(v) for k, v in self.details.items()}, "error": self.error,
        }


def _finite(v):
    """JSON has no inf/nan: encode them as strings."""
    if isinstance(v, float) and not math.isfinite(v): return str(v)
    return v


def _plain(v):
    """numpy scalars and complex values in details."""
    if isinstance(v, complex): return {"re": v.real, "im": v.imag}
    if hasattr(v, "item"): return _finite(v.item())
    if hasattr(v, "tolist"): return v.tolist()
    return str(v)


@dataclass
class VerificationReport:
    suite: str
    seed: int
    cases: int
    records: List[CaseRecord]
    wall_time: float
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds"))

    @property
    def failures(self) -> int:
        return sum(1 for r in self.records if not r.passed)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    @property
    def max_ratio(self) -> float:
        vals = [r.ratio for r in self.records if not math.isnan(r.ratio)]
        return max(vals) if vals else 0.0

    @property
    def max_normalized_ratio(self) -> float:
        vals = [r.normalized for r in self.records if not math.isnan(r.ratio)]
        return max(vals) if vals else 0.0

    def summary(self, timing: bool = True) -> Dict:
        out = {
            "suite": self.suite, "seed": self.seed, "cases": self.cases, "checks": len(self.records),
            "failures": self.failures, "max_ratio": _finite(self.max_ratio),
            "max_ratio_over_bound": _finite(self.max_normalized_ratio),
        }
        if timing: out["wall_time"] = round(self.wall_time, 3)
        return out

    def to_dict(self, timestamp: bool = True) -> Dict:
        out = {"summary": self.summary(timestamp), "records": [r.to_dict() for r in self.records]}
        if timestamp: out["timestamp"] = self.timestamp
        return out

    def to_json(self, timestamp: bool = True) -> str:
        return json.dumps(self.to_dict(timestamp), sort_keys=True, indent=2, default=_plain)

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for r in self.records:
            row = {"suite": self.suite, "digest": r.digest, "case": r.case, "check": r.check,
                   "ratio": r.ratio, "bound": r.bound, "pass": r.passed, "error": r.error or ""}
            row.update({f"constants.{k}": v for k, v in sorted(r.constants.items())})
            rows.append(row)
        return pd.DataFrame(rows, columns=None if rows else
                            ["suite", "digest", "case", "check", "ratio", "bound", "pass", "error"])

    def to_csv(self, path: Optional[str] = None) -> Optional[str]:
        return self.to_frame().to_csv(path, index=False)
