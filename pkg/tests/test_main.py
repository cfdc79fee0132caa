"""Tests for the command line."""

import csv
import json
from dataclasses import replace

import pytest

import src.main as cli
from src.config import defaults
from src.main import EXIT_CHECK_FAILED, EXIT_INFEASIBLE, EXIT_INVALID, EXIT_OK, build_parser, main
from src.services.verify_service import CheckResult, TheoremReport
from src.utils.persistence import InstanceFile, dump_model, load_instance
from tests.conftest import tabulate, two_station_instance
from tests.test_verify_service import bumpy_instance


def write_instance(path, inst):
    path.write_text(dump_model(InstanceFile.from_instance(inst)), encoding="utf-8")
    return str(path)


@pytest.fixture
def worked_file(tmp_path):
    return write_instance(tmp_path / "worked.json", two_station_instance())


def test_gen_is_deterministic(tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    for path in (first, second):
        assert main(["gen", "--n", "3", "--umax", "4", "--seed", "5", "--output", str(path)]) == EXIT_OK
    assert first.read_text() == second.read_text()
    assert load_instance(str(first)).n == 3


def test_gen_table_costs(tmp_path):
    path = tmp_path / "t.json"
    assert main(["gen", "--n", "2", "--umax", "3", "--seed", "1", "--kind", "table", "--gamma", "2", "--output", str(path)]) == EXIT_OK
    data = json.loads(path.read_text())
    assert data["gamma"] == 2
    assert {c["kind"] for c in data["costs"]} == {"table"}


@pytest.mark.parametrize("algo", defaults.algorithms)
def test_solve_every_algorithm(tmp_path, worked_file, algo):
    out = tmp_path / "solution.json"
    assert main(["solve", "--input", worked_file, "--algo", algo, "--output", str(out)]) == EXIT_OK
    solution = json.loads(out.read_text())
    assert solution["objective"] == 2
    assert solution["algorithm"] == algo
    assert sum(solution["d"]) + sum(solution["b"]) == 4


def test_solve_with_trace_to_stdout(worked_file, capsys):
    assert main(["solve", "--input", worked_file, "--trace"]) == EXIT_OK
    solution = json.loads(capsys.readouterr().out)
    assert [step["objective"] for step in solution["trace"]] == [4, 2]
    assert solution["trace"][1]["distance"] == 2


def test_solve_infeasible_instance(tmp_path):
    inst = two_station_instance()
    path = tmp_path / "infeasible.json"
    data = InstanceFile.from_instance(inst).model_dump()
    data["D"] = 3
    path.write_text(json.dumps(data))
    assert main(["solve", "--input", str(path)]) == EXIT_INFEASIBLE


def test_solve_invalid_instance(tmp_path):
    inst = two_station_instance()
    bad = write_instance(
        tmp_path / "bad.json",
        replace(inst, costs=(tabulate(lambda d, b: d * b), inst.costs[1])),
    )
    assert main(["solve", "--input", bad]) == EXIT_INVALID


def test_solve_malformed_file(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{")
    assert main(["solve", "--input", str(path)]) == EXIT_INVALID


def test_unknown_algorithm_is_a_usage_error(worked_file):
    with pytest.raises(SystemExit):
        main(["solve", "--input", worked_file, "--algo", "simplex"])


def test_check_instance_file(worked_file, tmp_path, capsys):
    summary_path = tmp_path / "summary.json"
    code = main(["check", "--input", worked_file, "--suite", "multimodular,trajectory", "--json", str(summary_path)])
    assert code == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 2
    assert all(" ok " in line for line in lines)
    assert json.loads(summary_path.read_text())["passed"] == 1


def test_check_rejects_invalid_instance(tmp_path):
    path = write_instance(tmp_path / "bumpy.json", bumpy_instance())
    # validation rejects the non-multimodular table before any check runs
    assert main(["check", "--input", path, "--suite", "m-exc"]) == EXIT_INVALID


def test_check_failure_exit_code(worked_file, monkeypatch, capsys):
    def failing_suite(inst, checks, seed=0, label=None):
        return TheoremReport(label, [CheckResult("m-exc", False, "no exchange for i=0", "x=(0, 4) y=(4, 0)")])

    monkeypatch.setattr(cli, "check_theorem_suite", failing_suite)
    assert main(["check", "--input", worked_file, "--suite", "m-exc"]) == EXIT_CHECK_FAILED
    assert "FAIL m-exc" in capsys.readouterr().out


def test_check_random_corpus(capsys):
    code = main(["check", "--random", "3", "--seed", "4", "--umax", "3", "--suite", "multimodular,equivalence"])
    assert code == EXIT_OK
    assert len(capsys.readouterr().out.splitlines()) == 6


def test_check_rejects_unknown_suite():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["check", "--random", "1", "--suite", "multimodular,bogus"])


def test_bench_writes_csv(tmp_path):
    path = tmp_path / "bench.csv"
    code = main(["bench", "--family", "scaling", "--n", "4", "--capacity", "200", "--seed", "1", "--instances", "2", "--csv", str(path)])
    assert code == EXIT_OK
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    assert len(rows) == 2
    assert tuple(rows[0].keys()) == defaults.bench_columns
    assert [row["seed"] for row in rows] == ["1", "2"]


def test_exit_codes_are_distinct():
    assert len({EXIT_OK, EXIT_INVALID, EXIT_INFEASIBLE, EXIT_CHECK_FAILED}) == 4
