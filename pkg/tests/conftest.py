"""Test configuration and fixtures."""

import pytest

from src.core.costs import TableCost
from src.core.instance import Instance
from src.services.mconvex_service import MConvexOracle
from src.utils.generator import generate_corpus


def tabulate(fn, size: int = 5) -> TableCost:
    """TableCost with values[d][b] = fn(d, b) on [0, size)^2."""
    return TableCost(tuple(tuple(fn(d, b) for b in range(size)) for d in range(size)))


def two_station_instance(gamma: int = 1) -> Instance:
    """c1 = (d-2)^2 + (b-2)^2, c2 = d^2 + b^2 around xbar = (2, 2)."""
    return Instance(
        n=2,
        D=2,
        B=2,
        gamma=gamma,
        ell=(0, 0),
        u=(4, 4),
        dbar=(1, 1),
        bbar=(1, 1),
        costs=(
            tabulate(lambda d, b: (d - 2) ** 2 + (b - 2) ** 2),
            tabulate(lambda d, b: d * d + b * b),
        ),
    )


def bike_only_instance() -> Instance:
    """Costs depend on bikes only: c_i = (b - 2)^2."""
    cost = tabulate(lambda d, b: (b - 2) ** 2)
    return Instance(
        n=2, D=2, B=2, gamma=1, ell=(0, 0), u=(4, 4), dbar=(1, 1), bbar=(1, 1), costs=(cost, cost)
    )


def line_oracle(fn, level: int, upper: int, anchor=None) -> MConvexOracle:
    """Two-variable oracle fn(x) on {x1 + x2 = level, 0 <= x <= upper}."""
    return MConvexOracle(
        lower=(0, 0),
        upper=(upper, upper),
        evaluate=fn,
        level=level,
        anchor=anchor,
        name="line",
    )


@pytest.fixture
def two_station():
    return two_station_instance()


@pytest.fixture
def bike_only():
    return bike_only_instance()


@pytest.fixture
def small_corpus():
    """Eight seeded instances with n in {2, 3}, mixing table and quadratic costs."""
    return [inst for inst in generate_corpus(16, seed=7, umax=3) if inst.n <= 3][:8]
