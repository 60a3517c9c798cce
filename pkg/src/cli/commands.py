"""
Command-line front end.

    python main.py interp norm --problem p.json
    python main.py seq norm --seq '{"dim": 1, "entries": [{"k": 0, "re": 1}]}'
    python main.py verify axioms --seed 1 --cases 50
    python main.py verify all --format csv --out report.csv

Exit codes: 0 success, 1 verification failure (or a failed computation),
2 usage error (bad flags, malformed problem file).
"""

import functools
import json
import logging
import math
import os
import sys
from dataclasses import replace
from typing import Dict, List, Optional, Tuple

import click
import numpy as np
import pandas as pd

from ..core.config import SEED_ENV, load_problem, parse_vector, resolve_seed
from ..core.errors import InterpError, InvalidInputError, ProblemFileError
from ..core.interpolation import (
    InterpProblem, calderon_lozanovskii_norm, interp_norm, k_functional, logconvex_norm, mean_norm,
)
from ..core.sequences import SparseSeq
from ..core.structures import seq_norm
from ..verify import VerificationReport, available, run_suite
from ..verify.registry import SUITE_WINDOW, suite_solver

logger = logging.getLogger(__name__)

VERSION = "0.1.0"
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


# --- Helpers ---

def _configure_logging(verbose: int) -> None:
    level = logging.WARNING if verbose == 0 else logging.INFO if verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


def _plain(v):
    if isinstance(v, SparseSeq): return v.to_dict()
    if isinstance(v, (complex, np.complexfloating)): return {"re": float(v.real), "im": float(v.imag)}
    if isinstance(v, np.ndarray):
        if np.iscomplexobj(v): return {"re": v.real.tolist(), "im": v.imag.tolist()}
        return v.tolist()
    if hasattr(v, "item"): v = v.item()
    if isinstance(v, float) and not math.isfinite(v): return str(v)
    if isinstance(v, dict): return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)): return [_plain(x) for x in v]
    return v


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        click.echo(text)
        return
    with open(out, "w") as f:
        f.write(text if text.endswith("\n") else text + "\n")
    logger.info("wrote %s", out)


def _emit_result(command: str, result: Dict, fmt: str, out: Optional[str]) -> None:
    """One computation: JSON object, or a one-row CSV of its scalar fields."""
    data = _plain({"command": command, **result})
    if fmt == "json":
        _emit(json.dumps(data, sort_keys=True, indent=2), out)
        return
    row = {k: v for k, v in data.items() if not isinstance(v, (dict, list)) or k == "error_interval"}
    if "error_interval" in row:
        row["error_lo"], row["error_hi"] = row.pop("error_interval")
    _emit(pd.DataFrame([row]).to_csv(index=False), out)


# --- Shared options ---

def problem_options(f):
    """--problem plus the per-field overrides."""
    opts = [
        click.option("--problem", "problem_path", type=click.Path(dir_okay=False), default=None,
                     help="Problem file (JSON, schema v1); defaults to problem_default.json"),
        click.option("--theta", type=float, default=None, help="Interpolation parameter in (0, 1)"),
        click.option("--base", type=float, default=None, help="Geometric base b > 1"),
        click.option("--window", type=int, default=None, help="Truncation window N"),
        click.option("--solver-tol", type=float, default=None, help="Solver relative tolerance"),
        click.option("--max-iters", type=int, default=None, help="Solver iteration cap"),
        click.option("--restarts", type=int, default=None, help="Solver restarts"),
        click.option("--seed", type=int, default=None, help="Seed (falls back to INTERP_SEED, then 1)"),
        click.option("--x", "x_text", default=None, help="Vector override: comma-separated reals or JSON"),
    ]
    for opt in reversed(opts):
        f = opt(f)
    return f


def output_options(f):
    f = click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write the report to a file")(f)
    f = click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)(f)
    return f


def usage_errors(fn):
    """Malformed input becomes a usage error (exit 2), other toolkit errors exit 1."""
    @functools.wraps(fn)
    def wrapper(*args, **kw):
        try:
            return fn(*args, **kw)
        except InvalidInputError as e:
            raise click.UsageError(str(e))
        except InterpError as e:
            raise click.ClickException(f"{type(e).__name__}: {e}")
    return wrapper


def _parse_x(text: str, dim: int) -> np.ndarray:
    text = text.strip()
    try:
        data = json.loads(text) if text[:1] in "[{" else text
    except json.JSONDecodeError as e:
        raise ProblemFileError(f"invalid JSON: {e.msg}", field="--x")
    return parse_vector(data, dim, field="--x")


def build_problem(problem_path=None, theta=None, base=None, window=None, solver_tol=None,
                  max_iters=None, restarts=None, seed=None, x_text=None) -> Tuple[InterpProblem, np.ndarray]:
    prob, x = load_problem(problem_path)
    # Flags override file fields
    solver = prob.solver
    over = {"rel_tol": solver_tol, "max_iters": max_iters, "restarts": restarts}
    over = {k: v for k, v in over.items() if v is not None}
    if seed is not None or os.environ.get(SEED_ENV): over["seed"] = resolve_seed(seed)
    if over: solver = replace(solver, **over)
    fields = {"theta": theta, "base": base, "window": window}
    fields = {k: v for k, v in fields.items() if v is not None}
    prob = prob.with_(solver=solver, **fields)
    if x_text is not None: x = _parse_x(x_text, prob.dim)
    return prob, x


def _read_seq(text: str) -> SparseSeq:
    """Inline JSON or a path to a JSON file holding {"dim", "entries"}."""
    if text.strip().startswith("{"):
        return SparseSeq.from_dict(json.loads(text))
    with open(text, "r") as f:
        return SparseSeq.from_dict(json.load(f))


# --- Commands ---

@click.group()
@click.version_option(version=VERSION, prog_name="seqinterp")
@click.option("-v", "--verbose", count=True, help="-v for INFO, -vv for DEBUG")
def cli(verbose: int):
    """
    Sequentially structured interpolation of finite-dimensional couples.

    Examples:

        seqinterp interp norm --problem p.json    # interpolation norm of x

        seqinterp interp kfunc --t 2              # K-functional K(2, x)

        seqinterp verify logconvex --cases 20     # run one theorem suite

        seqinterp suites                          # list suite names
    """
    _configure_logging(verbose)


@cli.group()
def space():
    """Norms on the base spaces X0, X1."""


@space.command("eval")
@problem_options
@output_options
@click.option("--side", type=click.IntRange(0, 1), default=0, show_default=True)
@click.option("--dual", is_flag=True, help="Evaluate the dual norm instead")
@usage_errors
def space_eval(side, dual, fmt, out, **kw):
    prob, x = build_problem(**kw)
    sp = prob.couple.space(side)
    value = sp.dual_norm(x) if dual else sp.norm(x)
    _emit_result("space eval", {"side": side, "dual": dual, "value": value, "space": sp.to_dict()}, fmt, out)


@cli.group()
def seq():
    """Sequence-structure norms."""


@seq.command("norm")
@problem_options
@output_options
@click.option("--seq", "seq_text", required=True, help="Sequence as inline JSON or a JSON file path")
@click.option("--side", type=click.IntRange(0, 1), default=0, show_default=True,
              help="Use struct0/space0 or struct1/space1 of the problem")
@usage_errors
def seq_norm_cmd(seq_text, side, fmt, out, **kw):
    prob, _ = build_problem(**kw)
    try:
        s = _read_seq(seq_text)
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        raise click.UsageError(f"--seq: {e}")
    struct = prob.struct0 if side == 0 else prob.struct1
    est = seq_norm(struct, prob.couple.space(side), s)
    _emit_result("seq norm", {"side": side, "struct": struct.to_dict(), **est.to_dict(),
                              "error_interval": [est.lo, est.hi]}, fmt, out)


@cli.group()
def interp():
    """Interpolation norms and functionals."""


@interp.command("norm")
@problem_options
@output_options
@click.option("--no-window-check", is_flag=True, help="Skip the 2N drift solve")
@usage_errors
def interp_norm_cmd(no_window_check, fmt, out, **kw):
    prob, x = build_problem(**kw)
    sol = interp_norm(prob, x, check_window=not no_window_check)
    _emit_result("interp norm", {"theta": prob.theta, "base": prob.base, "window": prob.window, **sol.to_dict()},
                 fmt, out)


@interp.command("logconvex")
@problem_options
@output_options
@usage_errors
def interp_logconvex_cmd(fmt, out, **kw):
    prob, x = build_problem(**kw)
    sol = logconvex_norm(prob, x)
    _emit_result("interp logconvex", {"theta": prob.theta, **sol.to_dict()}, fmt, out)


@interp.command("mean")
@problem_options
@output_options
@usage_errors
def interp_mean_cmd(fmt, out, **kw):
    prob, x = build_problem(**kw)
    sol = mean_norm(prob, x)
    _emit_result("interp mean", {"theta": prob.theta, **sol.to_dict()}, fmt, out)


@interp.command("kfunc")
@problem_options
@output_options
@click.option("--t", "t", type=float, default=1.0, show_default=True, help="K(t, x) parameter")
@usage_errors
def interp_kfunc_cmd(t, fmt, out, **kw):
    prob, x = build_problem(**kw)
    sol = k_functional(prob.couple, t, x, prob.solver)
    _emit_result("interp kfunc", {"t": t, **sol.to_dict()}, fmt, out)


@interp.command("cl-product")
@problem_options
@output_options
@usage_errors
def interp_cl_cmd(fmt, out, **kw):
    prob, x = build_problem(**kw)
    sol = calderon_lozanovskii_norm(prob.couple, prob.theta, x, prob.solver)
    _emit_result("interp cl-product", {"theta": prob.theta, **sol.to_dict()}, fmt, out)


@cli.command()
def suites():
    """List the registered theorem suites."""
    for name in available():
        click.echo(name)


def _combined(reports: List[VerificationReport], fmt: str, timestamp: bool) -> str:
    if fmt == "csv":
        return pd.concat([r.to_frame() for r in reports], ignore_index=True).to_csv(index=False)
    if len(reports) == 1:
        return reports[0].to_json(timestamp)
    data = {"suites": [r.to_dict(timestamp) for r in reports],
            "failures": sum(r.failures for r in reports)}
    return json.dumps(data, sort_keys=True, indent=2, default=str)


@cli.command()
@click.argument("suite")
@click.option("--seed", type=int, default=None, help="Seed (falls back to INTERP_SEED, then 1)")
@click.option("--cases", type=click.IntRange(min=1), default=None, help="Cases per suite (suite default otherwise)")
@click.option("--window", type=click.IntRange(min=1), default=SUITE_WINDOW, show_default=True,
              help="Smallest window N; every measured norm is re-solved at 2N")
@click.option("--solver-tol", type=float, default=None)
@click.option("--max-iters", type=int, default=None)
@click.option("--restarts", type=int, default=None)
@click.option("--no-timestamp", is_flag=True, help="Omit timestamps and timings for byte-stable reports")
@output_options
@usage_errors
def verify(suite, seed, cases, window, solver_tol, max_iters, restarts, no_timestamp, fmt, out):
    """Run theorem suite SUITE (or 'all'); exit 1 if any check fails."""
    seed = resolve_seed(seed)
    names = available() if suite == "all" else [suite]
    if suite != "all" and suite not in available():
        raise click.UsageError(f"unknown suite '{suite}'; known suites: {', '.join(available())}")
    solver = suite_solver(seed)
    over = {"rel_tol": solver_tol, "max_iters": max_iters, "restarts": restarts}
    over = {k: v for k, v in over.items() if v is not None}
    if over: solver = replace(solver, **over)

    reports = [run_suite(name, seed=seed, cases=cases, solver=solver, window=window)
               for name in names]
    _emit(_combined(reports, fmt, not no_timestamp), out)
    for r in reports:
        click.echo(f"{r.suite}: {len(r.records)} checks, {r.failures} failures, "
                   f"max ratio/bound {r.max_normalized_ratio:.4g}", err=True)
    if any(not r.passed for r in reports):
        sys.exit(1)


def main(argv: Optional[List[str]] = None) -> None:
    cli.main(args=argv, prog_name="seqinterp")
