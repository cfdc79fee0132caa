"""Tests for the benchmark runs."""

import pytest

from src.config import defaults
from src.services.bench_service import phase_bound, run_benchmark, step_bound


def post_first_steps(row):
    return row["max_descent_steps_after_first"] + row["max_rebalance_steps_after_first"]


@pytest.mark.parametrize("lambda1,expected", [(1, 1), (2, 2), (8, 4), (9, 5), (200, 9)])
def test_phase_bound(lambda1, expected):
    assert phase_bound(lambda1) == expected


@pytest.mark.parametrize("n,expected", [(1, 9), (5, 45), (50, 450)])
def test_step_bound(n, expected):
    assert step_bound(n) == expected


def test_greedy_rows():
    rows = run_benchmark("greedy", 3, 4, seed=0, instances=2)
    assert [row["seed"] for row in rows] == [0, 1]
    assert all(row["iterations"] <= row["gamma"] for row in rows)
    assert all(set(row) == set(defaults.bench_columns) for row in rows)


def test_unknown_family():
    with pytest.raises(ValueError):
        run_benchmark("annealing", 3, 4, seed=0)


def test_scaling_respects_bounds_on_small_run():
    (row,) = run_benchmark("scaling", 5, 400, seed=3)
    assert row["step_bound"] == step_bound(5)
    assert row["phases"] <= row["phase_bound"]
    assert post_first_steps(row) <= row["step_bound"]


@pytest.mark.slow
@pytest.mark.parametrize("total", defaults.large_totals)
def test_scaling_on_large_instances(total):
    rows = run_benchmark("scaling", defaults.large_station_count, total, seed=0, instances=3)
    for row in rows:
        assert row["phases"] <= row["phase_bound"]
        assert post_first_steps(row) <= row["step_bound"]
