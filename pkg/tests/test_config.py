import json
import math

import numpy as np
import pytest

from src.core.config import (
    SEED_ENV, load_problem, parse_vector, problem_from_dict, problem_to_dict, resolve_seed,
)
from src.core.errors import InvalidInputError, ProblemFileError
from src.core.structures import Lp


def test_default_problem_loads():
    prob, x = load_problem()
    assert prob.dim == 2
    assert prob.theta == 0.5
    assert prob.struct0 == Lp(2)
    assert np.allclose(x, [1.0, -0.5 + 0.25j])


def test_malformed_json_reports_line(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "schema": "v1",\n  "theta": 0.5,,\n}\n')
    with pytest.raises(ProblemFileError) as err:
        load_problem(str(path))
    assert err.value.line == 3
    assert "line 3" in str(err.value)


def test_missing_file(tmp_path):
    with pytest.raises(ProblemFileError):
        load_problem(str(tmp_path / "absent.json"))


def test_missing_field_is_named():
    data = problem_to_dict(load_problem()[0])
    del data["struct1"]
    with pytest.raises(ProblemFileError) as err:
        problem_from_dict(data)
    assert err.value.field == "struct1"


@pytest.mark.parametrize("key, value", [
    ("schema", "v0"),
    ("theta", 1.5),
    ("window", 2.5),
])
def test_invalid_fields(key, value):
    data = problem_to_dict(load_problem()[0])
    data[key] = value
    with pytest.raises(ProblemFileError):
        problem_from_dict(data)


def test_round_trip_through_dict():
    prob, x = load_problem()
    data = problem_to_dict(prob.with_(theta=0.3, window=5), x)
    again, y = problem_from_dict(json.loads(json.dumps(data)))
    assert problem_to_dict(again, y) == data
    assert again.base == pytest.approx(math.e)


def test_parse_vector_forms():
    assert np.allclose(parse_vector("1, -2,3"), [1, -2, 3])
    assert np.allclose(parse_vector({"re": [1, 2], "im": [0, -1]}), [1, 2 - 1j])
    with pytest.raises(ProblemFileError):
        parse_vector([1, 2], dim=3)
    with pytest.raises(ProblemFileError):
        parse_vector({"im": [1]})


def test_resolve_seed(monkeypatch):
    monkeypatch.delenv(SEED_ENV, raising=False)
    assert resolve_seed() == 1
    monkeypatch.setenv(SEED_ENV, "42")
    assert resolve_seed() == 42
    assert resolve_seed(7) == 7
    monkeypatch.setenv(SEED_ENV, "many")
    with pytest.raises(InvalidInputError):
        resolve_seed()
