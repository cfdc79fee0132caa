"""Tests for instance and solution files."""

import json

import pytest

from src.core.costs import QuadUVW, TableCost
from src.core.errors import InstanceFormatError
from src.utils.persistence import (
    SolutionFile,
    TraceRecord,
    load_instance,
    load_solution,
    parse_instance,
    save_instance,
    save_solution,
)
from src.utils.generator import generate_instance


def instance_json(**overrides) -> str:
    data = {
        "n": 2,
        "D": 2,
        "B": 2,
        "gamma": 1,
        "ell": [0, 0],
        "u": [2, 2],
        "dbar": [1, 1],
        "bbar": [1, 1],
        "costs": [
            {"kind": "quad_uvw", "u": [1, 0], "v": [1, 0], "w": [0, 0]},
            {"kind": "table", "values": [[0, 1, 4], [1, 2, 5], [4, 5, 8]]},
        ],
    }
    data.update(overrides)
    return json.dumps(data)


def test_parse_both_cost_kinds():
    inst = parse_instance(instance_json())
    assert isinstance(inst.costs[0], QuadUVW)
    assert isinstance(inst.costs[1], TableCost)
    assert inst.costs[1].evaluate(1, 2) == 5
    assert inst.xbar == (2, 2)


@pytest.mark.parametrize("kind", ["quad", "table"])
def test_instance_file_round_trip(tmp_path, kind):
    inst = generate_instance(3, 4, seed=9, kind=kind)
    path = tmp_path / "inst.json"
    save_instance(inst, str(path))
    assert load_instance(str(path)) == inst


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("{not json", "<string>"),
        (instance_json(gamma="two"), "gamma"),
        (instance_json(costs=[{"kind": "cubic"}, {"kind": "table", "values": [[0]]}]), "costs.0"),
        (instance_json(extra=1), "extra"),
        (instance_json(costs=[{"kind": "table", "values": [[0, 1], [2]]}] * 2), "rectangular"),
    ],
)
def test_malformed_instances(text, fragment):
    with pytest.raises(InstanceFormatError) as exc:
        parse_instance(text)
    assert fragment in str(exc.value)


def test_missing_file(tmp_path):
    with pytest.raises(InstanceFormatError):
        load_instance(str(tmp_path / "absent.json"))


def test_solution_to_stdout_and_file(tmp_path, capsys):
    solution = SolutionFile(
        d=[2, 1],
        b=[1, 0],
        objective=2,
        iterations=1,
        distance=2,
        algorithm="greedy",
        trace=[TraceRecord(k=0, d=[1, 1], b=[1, 1], objective=4, distance=0)],
    )
    text = save_solution(solution, None)
    assert capsys.readouterr().out == text
    assert json.loads(text)["objective"] == 2

    path = tmp_path / "solution.json"
    save_solution(solution, str(path))
    assert load_solution(str(path)) == solution
