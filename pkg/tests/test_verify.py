import json
import math

import numpy as np
import pytest

from src.core.errors import UnknownSuiteError
from src.core.interpolation import DRIFT_LIMIT, interp_norm
from src.core.solver import SolverConfig
from src.verify import Check, available, get_suite, run_suite
from src.verify.oracles import diagonal_placement, hilbert_closed_form, oracle_stein_weiss
from src.verify.registry import digest, ratio

SUITES = [
    "axioms", "base-change", "bfs-identity", "cesaro", "complex-view", "duality-lp", "embeddings-basic",
    "finite-rep", "gaussian-hilbert", "intersections", "jk-classes", "logconvex", "mean-method", "operator",
    "real-bracket", "reiteration-hilbert-complex", "reiteration-real", "sandwich", "stein",
]
STRUCTURE_SUITES = {"axioms", "cesaro", "gaussian-hilbert", "sandwich"}


def test_registered_suites():
    assert available() == SUITES
    assert get_suite("logconvex").cases > 0


def test_unknown_suite():
    with pytest.raises(UnknownSuiteError) as err:
        run_suite("no-such-suite")
    assert "axioms" in str(err.value)


def test_check_semantics():
    assert Check("eq", 2.0, 2.0).passed
    assert Check("tol", 2.0 * (1 + 5e-10), 2.0).passed
    assert not Check("over", 2.1, 2.0).passed
    assert not Check("nan", math.nan, 1.0).passed
    assert Check("zero", 0.0, 0.0, 0.0).passed


def test_ratio_conventions():
    assert ratio(1.0, 4.0) == 0.25
    assert ratio(0.0, 0.0) == 0.0
    assert ratio(1.0, 0.0) == math.inf


def test_digest_ignores_key_order():
    assert digest({"a": 1, "b": [1, 2]}) == digest({"b": [1, 2], "a": 1})


@pytest.mark.parametrize("name", SUITES)
def test_suite_passes_on_small_run(name):
    report = run_suite(name, seed=1, cases=2)
    assert report.cases == 2
    assert report.records
    assert report.passed, [r.to_dict() for r in report.records if not r.passed]


@pytest.mark.parametrize("name", sorted(set(SUITES) - STRUCTURE_SUITES))
def test_solved_suites_record_window_drift(name):
    report = run_suite(name, seed=2, cases=1)
    drift = [r for r in report.records if r.check.startswith("drift[")]
    assert drift
    assert all(r.bound == DRIFT_LIMIT for r in drift)


def test_degraded_solver_fails_suite():
    weak = SolverConfig(rel_tol=0.5, max_iters=1, restarts=1, smoothing_schedule=(0.4,))
    report = run_suite("reiteration-hilbert-complex", seed=1, cases=3, solver=weak)
    assert not report.passed
    failed = {r.check for r in report.records if not r.passed}
    assert any("closed_form" in label for label in failed), failed


def test_report_is_deterministic():
    a = run_suite("sandwich", seed=5, cases=4).to_json(timestamp=False)
    b = run_suite("sandwich", seed=5, cases=4).to_json(timestamp=False)
    assert a == b
    data = json.loads(a)
    assert "timestamp" not in data and "wall_time" not in data["summary"]
    assert data["summary"]["failures"] == 0


def test_report_frame_columns():
    frame = run_suite("cesaro", seed=2, cases=2).to_frame()
    assert {"suite", "digest", "case", "check", "ratio", "bound", "pass"} <= set(frame.columns)
    assert frame["pass"].all()


def test_hilbert_closed_form_matches_solver(hilbert_problem, x2):
    w0, w1 = hilbert_problem.couple.space0.weights, hilbert_problem.couple.space1.weights
    cf = hilbert_closed_form(w0, w1, hilbert_problem.theta, x2, window=hilbert_problem.window)
    sol = interp_norm(hilbert_problem, x2, check_window=False)
    assert sol.value >= cf.value * (1 - 1e-9)
    assert sol.value == pytest.approx(cf.value, rel=1e-4)
    assert np.allclose(cf.seq.total(), x2)


def test_diagonal_placement_and_stein_weiss():
    x = np.array([1.0, -2.0, 0.0])
    s = diagonal_placement(x, [1.0, 8.0, 1.0], [1.0, 1.0, 1.0])
    assert s.indices() == [0, 2]
    assert np.allclose(s.total(), x)
    assert oracle_stein_weiss([1.0, 4.0], [4.0, 1.0], 2.0, 0.5, [3.0, 4.0]) == pytest.approx(10.0)


@pytest.mark.parametrize("name, cases", [
    ("axioms", 50), ("cesaro", 50), ("embeddings-basic", 100), ("logconvex", 100), ("mean-method", 100),
    ("finite-rep", 100), ("real-bracket", 100), ("operator", 100), ("duality-lp", 30), ("bfs-identity", 50),
    ("base-change", 50), ("stein", 50), ("intersections", 50), ("reiteration-real", 30),
    ("reiteration-hilbert-complex", 30),
])
def test_default_case_counts(name, cases):
    assert get_suite(name).cases == cases


def test_stein_records_measured_constants():
    report = run_suite("stein", seed=3, cases=1)
    (rec,) = [r for r in report.records if r.check == "stein"]
    for j in (0, 1):
        assert 0 < rec.constants[f"M_measured{j}"] <= rec.constants[f"M{j}"] * (1 + 1e-9)
    assert rec.bound == rec.constants["C"] > 1.0
    assert any(r.check.startswith("M_measured") for r in report.records)


def test_reiteration_compares_oracle_spaces():
    report = run_suite("reiteration-real", seed=3, cases=1)
    labels = {r.check for r in report.records}
    assert any(label.startswith("Y0[") for label in labels)
    assert any(label.startswith("SW1[") for label in labels)
    assert "Y_weighted<=G*Y_oracle" in labels
    assert report.passed, [r.to_dict() for r in report.records if not r.passed]
