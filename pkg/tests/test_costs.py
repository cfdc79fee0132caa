"""Tests for cost arithmetic and the multimodularity checks."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.core.costs import (
    INFINITY,
    INT64_MAX,
    LexCost,
    QuadUVW,
    TableCost,
    add_costs,
    check_multimodular,
    check_multimodular_consequences,
    eval_station_cost,
)
from src.core.errors import CostOverflowError
from tests.conftest import tabulate

quad_pairs = st.tuples(st.integers(0, 5), st.integers(-20, 20))


def test_add_costs_absorbs_infinity():
    assert add_costs(1, 2, 3) == 6
    assert add_costs(1, INFINITY) == INFINITY


def test_add_costs_overflow_raises():
    with pytest.raises(CostOverflowError):
        add_costs(INT64_MAX, 1)


@pytest.mark.parametrize(
    "smaller,larger",
    [
        (LexCost(1, 100), LexCost(2, 0)),
        (LexCost(1, 0), LexCost(1, 1)),
        (LexCost(-3, 5), LexCost(0, -5)),
        (LexCost(10**9, 0), LexCost.infinite()),
    ],
)
def test_lex_cost_order(smaller, larger):
    assert smaller < larger


def test_lex_cost_addition():
    assert LexCost(1, 2) + LexCost(3, -1) == LexCost(4, 1)
    assert not (LexCost(1, 2) + LexCost.infinite()).is_finite


def test_table_cost_outside_table_is_infinite():
    cost = tabulate(lambda d, b: d + b, size=3)
    assert cost.evaluate(2, 2) == 4
    assert cost.evaluate(3, 0) == INFINITY
    assert eval_station_cost(cost, -1, 0) == INFINITY


@pytest.mark.parametrize("values", [(), ((1, 2), (3,))])
def test_table_cost_rejects_bad_shape(values):
    with pytest.raises(ValueError):
        TableCost(values)


def test_quad_uvw_evaluates_all_three_terms():
    cost = QuadUVW(u=(1, 0), v=(2, -1), w=(1, 3))
    # d = 2, b = 1: 4 + (2 - 1) + (9 + 9)
    assert cost.evaluate(2, 1) == 23
    assert cost.grid(2, 1)[2, 1] == 23


def test_separable_convex_table_is_multimodular():
    cost = tabulate(lambda d, b: (d - 2) ** 2 + (b - 2) ** 2)
    assert check_multimodular(cost, 4, 4)
    assert check_multimodular_consequences(cost, 4, 4)


def test_product_cost_fails_second_inequality_first():
    report = check_multimodular(tabulate(lambda d, b: d * b), 4, 4)
    assert not report.passed
    assert report.point == (1, 1)
    assert report.inequality == 2


def test_concave_total_term_is_reported():
    cost = tabulate(lambda d, b: -((d + b) ** 2))
    report = check_multimodular(cost, 4, 4)
    assert not report.passed
    assert not check_multimodular_consequences(cost, 4, 4)


def test_check_requires_covering_table():
    with pytest.raises(ValueError):
        check_multimodular(tabulate(lambda d, b: 0, size=3), 4, 4)


@settings(max_examples=50, deadline=None)
@given(u=quad_pairs, v=quad_pairs, w=quad_pairs, capacity=st.integers(1, 6))
def test_quadratic_costs_with_nonnegative_curvature_are_multimodular(u, v, w, capacity):
    cost = QuadUVW(u, v, w)
    assert check_multimodular(cost, capacity, capacity)
    assert check_multimodular_consequences(cost, capacity, capacity)


lex_costs = st.builds(LexCost, st.integers(-50, 50), st.integers(-50, 50))


@given(a=lex_costs, b=lex_costs, c=lex_costs)
def test_lex_order_is_total_and_translation_invariant(a, b, c):
    assert (a < b) + (a == b) + (b < a) == 1
    if a <= b and b <= c:
        assert a <= c
    assert (a < b) == (a + c < b + c)
