import json

import pandas as pd
import pytest
from click.testing import CliRunner

from src.cli.commands import cli
from src.verify import available


@pytest.fixture
def runner():
    return CliRunner()


def _run(runner, args, out_path=None):
    if out_path is not None:
        args = args + ["--out", str(out_path)]
    return runner.invoke(cli, args, catch_exceptions=False)


def test_suites_lists_registry(runner):
    result = _run(runner, ["suites"])
    assert result.exit_code == 0
    for name in available():
        assert name in result.output


def test_version(runner):
    result = _run(runner, ["--version"])
    assert result.exit_code == 0
    assert "seqinterp" in result.output


def test_interp_norm_of_zero(runner, tmp_path):
    out = tmp_path / "norm.json"
    result = _run(runner, ["interp", "norm", "--x", "0,0", "--window", "2"], out)
    assert result.exit_code == 0
    data = json.loads(out.read_text())
    assert data["command"] == "interp norm"
    assert data["value"] == 0.0
    assert data["window"] == 2


def test_space_eval(runner, tmp_path):
    out = tmp_path / "space.json"
    result = _run(runner, ["space", "eval", "--x", "3,4", "--side", "0"], out)
    assert result.exit_code == 0
    assert json.loads(out.read_text())["value"] == pytest.approx(5.0)


def test_seq_norm_inline(runner, tmp_path):
    out = tmp_path / "seq.json"
    seq = json.dumps({"dim": 2, "entries": [{"k": 0, "re": [3, 0]}, {"k": 2, "re": [0, 4]}]})
    result = _run(runner, ["seq", "norm", "--seq", seq], out)
    assert result.exit_code == 0
    assert json.loads(out.read_text())["value"] == pytest.approx(5.0)


def test_kfunc_csv(runner, tmp_path):
    out = tmp_path / "k.csv"
    result = _run(runner, ["interp", "kfunc", "--t", "0.25", "--x", "1,0", "--format", "csv"], out)
    assert result.exit_code == 0
    frame = pd.read_csv(out)
    assert len(frame) == 1
    assert frame.loc[0, "value"] == pytest.approx(0.5, rel=1e-4)
    assert {"error_lo", "error_hi"} <= set(frame.columns)


def test_malformed_problem_is_usage_error(runner, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{\n  \"theta\": ,\n}")
    result = runner.invoke(cli, ["interp", "norm", "--problem", str(bad)])
    assert result.exit_code == 2
    assert "line 2" in result.output


def test_malformed_vector_is_usage_error(runner):
    result = runner.invoke(cli, ["interp", "norm", "--x", "[1, 2"])
    assert result.exit_code == 2


def test_unknown_suite_is_usage_error(runner):
    result = runner.invoke(cli, ["verify", "no-such-suite"])
    assert result.exit_code == 2
    assert "known suites" in result.output


def test_verify_is_byte_stable(runner, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["verify", "axioms", "--cases", "3", "--seed", "4", "--no-timestamp"]
    assert _run(runner, args, a).exit_code == 0
    assert _run(runner, args, b).exit_code == 0
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.read_text())["summary"]["suite"] == "axioms"


def test_verify_csv(runner, tmp_path):
    out = tmp_path / "cesaro.csv"
    assert _run(runner, ["verify", "cesaro", "--cases", "2", "--format", "csv"], out).exit_code == 0
    frame = pd.read_csv(out)
    assert (frame["suite"] == "cesaro").all()
    assert frame["pass"].all()
