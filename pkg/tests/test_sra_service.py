"""Tests for optimal bike counts and the incremental marginal-heap update."""

import random
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.core.costs import LexCost, eval_station_cost
from src.core.errors import InfeasibleError
from src.services.allocation_problem import AllocationProblem
from src.services.sra_service import (
    FAMILIES,
    Marginal,
    MarginalHeap,
    SraState,
    best_exchange,
    bike_optimal_allocation,
    in_update_neighborhood,
    pair_candidates,
    rebalance_bikes,
    solve_sra,
    sra_incremental,
)
from src.services.verify_service import brute_force_sra
from src.utils.enumeration import iter_box
from src.utils.generator import generate_instance
from src.utils.vectors import subtract


def test_bikes_for_fixed_docks(bike_only):
    result = solve_sra(bike_only, (2, 2))
    assert result.b == (1, 1)
    assert result.value == 2


def test_incremental_move(bike_only):
    problem = AllocationProblem.for_sra(bike_only)
    state = SraState.create(problem, (1, 1), (1, 1))
    after = sra_incremental(bike_only, state, 0, 1)
    assert tuple(after.x) == (3, 1)
    assert after.value() == 2
    # the original state is untouched unless in_place is set
    assert tuple(state.x) == (2, 2)


def test_worked_instance_start(two_station):
    alloc = bike_optimal_allocation(two_station)
    assert alloc.b == (1, 1)
    assert alloc.d == (1, 1)


def test_dock_totals_outside_bounds(two_station):
    with pytest.raises(InfeasibleError):
        solve_sra(two_station, (5, -1))


def test_incremental_rejects_bound_violation(two_station):
    problem = AllocationProblem.for_sra(two_station)
    state = SraState.create(problem, (4, 0), (0, 0))
    with pytest.raises(InfeasibleError):
        sra_incremental(two_station, state, 0, 1)
    with pytest.raises(ValueError):
        sra_incremental(two_station, state, 1, 1)


def test_marginal_heap_skips_stale_entries():
    heap = MarginalHeap()
    heap.push(0, LexCost(5))
    heap.push(1, LexCost(3))
    heap.push(0, LexCost(1))
    heap.push(2, LexCost(3))
    assert heap.smallest(3) == [(LexCost(1), 0), (LexCost(3), 1), (LexCost(3), 2)]
    heap.push(0, LexCost(9))
    assert heap.smallest(1) == [(LexCost(3), 1)]
    assert heap.smallest(5)[-1] == (LexCost(9), 0)


def test_marginal_heap_survives_compaction():
    heap = MarginalHeap()
    for round_ in range(100):
        for station in range(3):
            heap.push(station, LexCost(round_ * 10 + station))
    assert [s for _, s in heap.smallest(3)] == [0, 1, 2]
    assert len(heap._heap) <= 4 * 3 + 64


def test_families_are_dock_moves():
    for kind_i, kind_j, kind_t in FAMILIES.values():
        assert kind_i.delta_d + kind_i.delta_b == 1
        assert kind_j.delta_d + kind_j.delta_b == -1
        if kind_t is not None:
            assert kind_t in (Marginal.TO_DOCK, Marginal.TO_BIKE)


def test_best_exchange_on_worked_instance(two_station):
    problem = AllocationProblem.for_da(two_station)
    start = bike_optimal_allocation(two_station)
    state = SraState.create(problem, start.d, start.b)
    move = best_exchange(state)
    assert move.key == LexCost(-2, 0)
    assert (move.plus, move.minus, move.family) == (0, 1, 1)
    assert len(pair_candidates(state, 0, 1)) == 3


def test_rebalance_reaches_sra_optimum():
    inst = generate_instance(4, 4, seed=11)
    problem = AllocationProblem.for_sra(inst)
    state = SraState.create(problem, inst.xbar, (0,) * inst.n)
    rebalance_bikes(state)
    assert state.value() == solve_sra(inst, inst.xbar).value


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("kind", ["quad", "table"])
def test_greedy_matches_enumeration(seed, kind):
    inst = generate_instance(3, 4, seed, kind=kind)
    for x in iter_box(inst.ell, inst.u, level=inst.total):
        _, expected = brute_force_sra(inst, x)
        assert solve_sra(inst, x).value == expected


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(2, 4))
def test_incremental_matches_fresh_solve(seed, n):
    inst = generate_instance(n, 4, seed)
    rng = random.Random(seed)
    points = list(iter_box(inst.ell, inst.u, level=inst.total))
    x = rng.choice(points)
    i, j = rng.sample(range(n), 2)
    if x[i] + 1 > inst.u[i] or x[j] - 1 < inst.ell[j]:
        return
    start = solve_sra(inst, x)
    state = SraState.create(AllocationProblem.for_sra(inst), subtract(x, start.b), start.b)
    after = sra_incremental(inst, state, i, j)
    assert after.value() == solve_sra(inst, after.x).value
    assert in_update_neighborhood(subtract(after.b, start.b), i, j)


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_long_random_walk_stays_optimal(seed):
    # zero lower bounds and xbar = (1, 2, 1, 2) inside u >= 2 keep a dock move available at every step
    inst = replace(
        generate_instance(4, 4, seed, kind="table"),
        ell=(0, 0, 0, 0), dbar=(1, 1, 1, 1), bbar=(0, 1, 0, 1), D=4, B=2,
    )
    rng = random.Random(seed)
    start = solve_sra(inst, inst.xbar)
    state = SraState.create(AllocationProblem.for_sra(inst), subtract(inst.xbar, start.b), start.b)
    moves = 0
    for _ in range(1000):
        feasible = [
            (i, j)
            for i in range(inst.n)
            for j in range(inst.n)
            if i != j and state.x[i] < inst.u[i] and state.x[j] > inst.ell[j]
        ]
        i, j = rng.choice(feasible)
        before = tuple(state.b)
        sra_incremental(inst, state, i, j, in_place=True)
        moves += 1
        assert in_update_neighborhood(subtract(state.b, before), i, j)
        _, expected = brute_force_sra(inst, state.x)
        assert state.value() == expected
    assert moves == 1000


@pytest.mark.parametrize(
    "delta,expected",
    [
        ((0, 0, 0, 0), True),
        ((1, 0, 0, 0), True),
        ((0, -1, 0, 0), True),
        ((1, -1, 0, 0), True),
        ((1, 0, -1, 0), True),
        ((0, -1, 0, 1), True),
        ((0, 0, 1, -1), False),
        ((-1, 1, 0, 0), False),
        ((0, 0, 1, 0), False),
        ((2, -1, 0, 0), False),
        ((1, -1, 1, 0), False),
    ],
)
def test_update_neighborhood_shapes(delta, expected):
    assert in_update_neighborhood(delta, 0, 1) is expected


@pytest.mark.parametrize("seed", range(10))
@pytest.mark.parametrize("kind", ["quad", "table"])
def test_bike_marginals_are_nondecreasing(seed, kind):
    inst = generate_instance(4, 5, seed, kind=kind)
    for cost, cap in zip(inst.costs, inst.u):
        for x in range(cap + 1):
            marginals = [
                eval_station_cost(cost, x - beta - 1, beta + 1) - eval_station_cost(cost, x - beta, beta)
                for beta in range(x)
            ]
            assert all(a <= b for a, b in zip(marginals, marginals[1:]))
