"""Tests for the (DR) and (DA) solvers."""

from dataclasses import replace

import pytest

from src.core.costs import INFINITY
from src.core.errors import InfeasibleError
from src.core.instance import Allocation, Instance, allocation_cost, is_dr_feasible
from src.services.dock_service import (
    ScalingSchedule,
    Side,
    build_split,
    da_descent_with_stats,
    make_f_oracle,
    minimize_convex_sum,
    nearest_da_optimum,
    psi,
    solve_da_scaling,
    solve_da_steepest,
    solve_dr_greedy,
    solve_dr_poly,
    solve_drl,
)
from src.services.verify_service import brute_force_da, brute_force_dr
from src.utils.generator import generate_corpus, generate_instance
from src.utils.vectors import l1_distance
from tests.conftest import tabulate, two_station_instance


def far_optimum_instance(gamma: int = 1) -> Instance:
    """Four stations; the (DA) optimum moves gamma docks into each of stations 0 and 1."""
    pull = tabulate(lambda d, b: (d - 4) ** 2 + b * b, size=7)
    push = tabulate(lambda d, b: d * d + b * b, size=7)
    return Instance(
        n=4,
        D=8,
        B=0,
        gamma=gamma,
        ell=(0, 0, 0, 0),
        u=(6, 6, 6, 6),
        dbar=(2, 2, 2, 2),
        bbar=(0, 0, 0, 0),
        costs=(pull, pull, push, push),
    )


@pytest.mark.parametrize("fast", [True, False])
def test_greedy_on_worked_instance(two_station, fast):
    solution = solve_dr_greedy(two_station, fast=fast)
    assert solution.objective == 2
    assert solution.allocation.x == (3, 1)
    assert solution.iterations == 1
    assert [s.objective for s in solution.trace] == [4, 2]
    assert is_dr_feasible(two_station, solution.allocation)


def test_greedy_with_zero_radius_keeps_docks():
    solution = solve_dr_greedy(two_station_instance(gamma=0))
    assert solution.objective == 4
    assert solution.allocation.x == (2, 2)
    assert solution.iterations == 0


def test_da_on_worked_instance(two_station):
    alloc = solve_da_steepest(two_station)
    assert allocation_cost(two_station, alloc.d, alloc.b) == 2
    alloc, schedule = solve_da_scaling(two_station)
    assert allocation_cost(two_station, alloc.d, alloc.b) == 2
    assert schedule.lambdas == (1,)


def test_da_rejects_infeasible_start(two_station):
    with pytest.raises(InfeasibleError):
        solve_da_steepest(two_station, Allocation((0, 0), (2, 2)))


def test_da_trace_records_distances(two_station):
    _, stats = da_descent_with_stats(two_station, Allocation(two_station.dbar, two_station.bbar))
    assert stats.descent_steps == 1
    assert [s.distance for s in stats.trace] == [0, 2]


@pytest.mark.parametrize(
    "total,n,lambdas",
    [(64, 2, (8, 4, 2, 1)), (4, 2, (1,)), (7, 1, (1,)), (100, 5, (5, 2, 1)), (1000, 3, (83, 41, 20, 10, 5, 2, 1))],
)
def test_scaling_schedule(total, n, lambdas):
    assert ScalingSchedule.planned(total, n).lambdas == lambdas


def test_f_oracle_values(two_station):
    f = make_f_oracle(two_station)
    assert f((2, 2)) == 4
    assert f((3, 1)) == 2
    assert f((4, 0)) == INFINITY  # outside the gamma box
    assert f((2, 1)) == INFINITY  # off the level D + B


def test_nearest_da_optimum_moves_towards_xbar():
    # every split of the four docks is optimal; the nearest optimum is xbar
    flat = tabulate(lambda d, b: 0)
    inst = Instance(
        n=2, D=4, B=0, gamma=2, ell=(0, 0), u=(4, 4), dbar=(2, 2), bbar=(0, 0), costs=(flat, flat)
    )
    nearest = nearest_da_optimum(inst, Allocation((4, 0), (0, 0)))
    assert nearest.x == (2, 2)


def test_split_for_far_optimum():
    inst = far_optimum_instance(gamma=1)
    alloc, _ = solve_da_scaling(inst)
    alloc = nearest_da_optimum(inst, alloc)
    assert l1_distance(alloc.x, inst.xbar) > 2 * inst.gamma
    split = build_split(inst, alloc.x)
    assert alloc.x == (3, 3, 1, 1)
    assert split.P == (0, 1)
    assert split.ell_hat[:2] == (2, 2)
    assert split.u_hat[:2] == (3, 3)
    assert split.rest == (2, 3)
    printed = split.as_printed(inst)
    assert not printed.signed
    assert printed.ell_hat == inst.box_lower


def test_poly_uses_the_split():
    inst = far_optimum_instance(gamma=1)
    solution = solve_dr_poly(inst)
    assert solution.details["split"] is True
    assert solution.details["P"] == [0, 1]
    assert solution.objective == 10
    assert solution.objective == brute_force_dr(inst).objective
    assert is_dr_feasible(inst, solution.allocation)


def test_poly_without_split(two_station):
    solution = solve_dr_poly(two_station)
    assert solution.objective == 2
    assert solution.details["split"] is False


def test_psi_is_monotone_in_the_bike_budget():
    inst = generate_instance(3, 4, seed=5)
    values = [psi(inst, None, Side.FULL, a) for a in range(inst.B + 1)]
    assert all(b <= a for a, b in zip(values, values[1:]))
    with pytest.raises(ValueError):
        psi(inst, None, Side.FULL, inst.B + 1)


def test_minimize_convex_sum():
    left = [INFINITY, INFINITY, 9, 4, 1, 0, 0]
    right = [0, 0, 0, 1, 3, 6, INFINITY]
    alpha, value, probes = minimize_convex_sum(lambda a: left[a], lambda a: right[a], 0, 6)
    assert value == min(a + b for a, b in zip(left, right))
    assert value == 4
    assert alpha == 4
    assert probes <= 14


def test_minimize_convex_sum_without_overlap():
    alpha, value, _ = minimize_convex_sum(
        lambda a: 0 if a >= 3 else INFINITY, lambda a: 0 if a <= 1 else INFINITY, 0, 4
    )
    assert alpha is None
    assert value == INFINITY


def test_drl_sides_add_up():
    inst = far_optimum_instance(gamma=2)
    split = build_split(inst, (4, 4, 0, 0))
    alloc, value, alpha = solve_drl(inst, split)
    assert alpha == 0
    assert value == 4
    assert allocation_cost(inst, alloc.d, alloc.b) == value
    assert is_dr_feasible(inst, alloc)


@pytest.mark.parametrize("inst", list(generate_corpus(12, seed=100, umax=3)), ids=lambda i: f"n{i.n}g{i.gamma}")
def test_solvers_match_brute_force(inst):
    dr = brute_force_dr(inst).objective
    da = brute_force_da(inst).objective
    assert solve_dr_greedy(inst, fast=True).objective == dr
    assert solve_dr_greedy(inst, fast=False).objective == dr
    assert solve_dr_poly(inst).objective == dr
    assert solve_dr_poly(inst, nearest=False).objective == dr
    alloc = solve_da_steepest(inst)
    assert allocation_cost(inst, alloc.d, alloc.b) == da
    alloc, _ = solve_da_scaling(inst)
    assert allocation_cost(inst, alloc.d, alloc.b) == da


def test_large_radius_greedy_equals_da():
    inst = replace(generate_instance(3, 4, seed=21), gamma=8)
    da = brute_force_da(inst).objective
    assert solve_dr_greedy(inst).objective == da


@pytest.mark.slow
def test_solvers_match_brute_force_on_large_corpus():
    for inst in generate_corpus(500, seed=2024, umax=4):
        dr = brute_force_dr(inst).objective
        assert solve_dr_greedy(inst, fast=True).objective == dr
        assert solve_dr_greedy(inst, fast=False).objective == dr
        assert solve_dr_poly(inst).objective == dr
        assert solve_dr_poly(inst, nearest=False).objective == dr
        alloc, _ = solve_da_scaling(inst)
        assert allocation_cost(inst, alloc.d, alloc.b) == brute_force_da(inst).objective
