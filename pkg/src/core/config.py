"""
Problem files (JSON, schema "v1") and seed resolution.

{
  "schema": "v1",
  "couple": {"dim": 2, "space0": {"kind": "weighted_lp", "p": 2, "weights": [1, 1]}, "space1": {...}},
  "struct0": {"kind": "lp", "p": 2}, "struct1": {"kind": "fourier_lp", "p": 1},
  "theta": 0.5, "base": 2.718281828, "window": 8,
  "solver": {"rel_tol": 1e-7, "max_iters": 50000, "restarts": 4, "seed": 1},
  "extra_side1": [{"space": {...}, "struct": {...}}],
  "x": {"re": [1, 0], "im": [0, 0]}
}
"""

import json
import logging
import math
import os
from typing import Dict, Optional, Tuple

import numpy as np

from .errors import InvalidInputError, ProblemFileError
from .interpolation import InterpProblem
from .solver import SolverConfig
from .spaces import Couple, NormedSpace
from .structures import SeqStructSpec

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "v1"
SEED_ENV = "INTERP_SEED"
DEFAULT_SEED = 1
BASE_DIR = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
DEFAULT_PROBLEM_FILE = os.path.join(BASE_DIR, "problem_default.json")


def resolve_seed(flag: Optional[int] = None) -> int:
    """--seed flag, then the INTERP_SEED environment variable, then 1."""
    if flag is not None: return int(flag)
    env = os.environ.get(SEED_ENV)
    if env is None or env.strip() == "": return DEFAULT_SEED
    try:
        return int(env)
    except ValueError:
        raise InvalidInputError(f"{SEED_ENV} must be an integer, got {env!r}")


def parse_vector(data, dim: Optional[int] = None, field: str = "x") -> np.ndarray:
    """A list of reals, a {"re": [...], "im": [...]} object, or a comma-separated string."""
    try:
        if isinstance(data, str):
            data = [float(t) for t in data.split(",") if t.strip()]
        if isinstance(data, dict):
            re = np.asarray(data["re"], dtype=float)
            im = np.asarray(data.get("im", np.zeros_like(re)), dtype=float)
            v = re + 1j * im
        else:
            v = np.asarray(data, dtype=complex)
    except (KeyError, TypeError, ValueError) as e:
        raise ProblemFileError(f"malformed vector: {e}", field=field)
    if v.ndim != 1 or (dim is not None and v.shape[0] != dim):
        raise ProblemFileError(f"vector must have length {dim}, got shape {v.shape}", field=field)
    return v


def _section(data: Dict, key: str, build):
    if key not in data:
        raise ProblemFileError("missing required field", field=key)
    try:
        return build(data[key])
    except ProblemFileError:
        raise
    except (InvalidInputError, KeyError, TypeError, ValueError) as e:
        raise ProblemFileError(str(e), field=key)


def problem_from_dict(data: Dict) -> Tuple[InterpProblem, np.ndarray]:
    if not isinstance(data, dict):
        raise ProblemFileError("top level must be a JSON object")
    schema = data.get("schema", SCHEMA_VERSION)
    if schema != SCHEMA_VERSION:
        raise ProblemFileError(f"unsupported schema {schema!r}, expected {SCHEMA_VERSION!r}", field="schema")

    # 1. Spaces and structures
    couple = _section(data, "couple", Couple.from_dict)
    struct0 = _section(data, "struct0", SeqStructSpec.from_dict)
    struct1 = _section(data, "struct1", SeqStructSpec.from_dict)
    extras = ()
    if "extra_side1" in data:
        extras = _section(data, "extra_side1", lambda items: tuple(
            (NormedSpace.from_dict(e["space"]), SeqStructSpec.from_dict(e["struct"])) for e in items
        ))

    # 2. Scalars and solver
    solver = _section(data, "solver", SolverConfig.from_dict) if "solver" in data else SolverConfig()
    theta = _section(data, "theta", float)
    base = float(data.get("base", math.e))
    window = data.get("window", 8)
    if not isinstance(window, int) or isinstance(window, bool):
        raise ProblemFileError("window must be an integer", field="window")
    try:
        prob = InterpProblem(couple, struct0, struct1, theta, base, window, solver, extras)
    except InvalidInputError as e:
        raise ProblemFileError(str(e))

    # 3. Vector
    x = parse_vector(data["x"], couple.dim) if "x" in data else np.zeros(couple.dim, dtype=complex)
    return prob, x


def load_problem(path: Optional[str] = None) -> Tuple[InterpProblem, np.ndarray]:
    path = path or DEFAULT_PROBLEM_FILE
    try:
        with open(path, "r") as f:
            text = f.read()
    except OSError as e:
        raise ProblemFileError(f"cannot read problem file {path}: {e.strerror}")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ProblemFileError(f"invalid JSON: {e.msg} (column {e.colno})", line=e.lineno)
    logger.debug("loaded problem file %s", path)
    return problem_from_dict(data)


def problem_to_dict(prob: InterpProblem, x=None) -> Dict:
    data = {
        "schema": SCHEMA_VERSION,
        "couple": prob.couple.to_dict(),
        "struct0": prob.struct0.to_dict(),
        "struct1": prob.struct1.to_dict(),
        "theta": prob.theta,
        "base": prob.base,
        "window": prob.window,
        "solver": prob.solver.to_dict(),
    }
    if prob.extra_side1:
        data["extra_side1"] = [{"space": sp.to_dict(), "struct": st.to_dict()} for sp, st in prob.extra_side1]
    if x is not None:
        x = np.asarray(x, dtype=complex)
        data["x"] = {"re": x.real.tolist(), "im": x.imag.tolist()}
    return data
