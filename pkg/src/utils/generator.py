"""Seeded random instances.

Small instances stay enumerable for the brute-force oracles; large ones feed
the scaling benchmark. Costs are multimodular by construction: separable
convex terms in d and b plus a convex term in d + b.
"""

from typing import Iterator, List, Optional

import numpy as np

from src.config import defaults
from src.core.costs import QuadUVW, StationCost, TableCost
from src.core.instance import Instance


def _quadratic(rng: np.random.Generator, scale: int) -> tuple:
    """(q, l) with q in the coefficient range and the vertex of q*t^2 + l*t near [0, scale]."""
    lo, hi = defaults.coefficient_range
    q = int(rng.integers(lo, hi + 1))
    target = int(rng.integers(0, scale + 1))
    return q, -2 * q * target + int(rng.integers(lo, hi + 1))


def _convex_sequence(rng: np.random.Generator, length: int, scale: int) -> np.ndarray:
    _, hi = defaults.coefficient_range
    slopes = np.sort(rng.integers(-hi * scale, hi * scale + 1, size=length - 1))
    return np.concatenate(([0], np.cumsum(slopes)))


def random_station_cost(rng: np.random.Generator, capacity: int, kind: str = "quad") -> StationCost:
    if kind == "quad":
        return QuadUVW(_quadratic(rng, capacity), _quadratic(rng, capacity), _quadratic(rng, capacity))
    if kind != "table":
        raise ValueError(f"unknown cost kind {kind!r}")
    size = capacity + 1
    dock_term = _convex_sequence(rng, size, capacity)
    bike_term = _convex_sequence(rng, size, capacity)
    total_term = _convex_sequence(rng, 2 * size - 1, capacity)
    d, b = np.meshgrid(np.arange(size), np.arange(size), indexing="ij")
    values = dock_term[d] + bike_term[b] + total_term[d + b]
    return TableCost(tuple(tuple(int(v) for v in row) for row in values))


def generate_instance(
    n: int,
    umax: int,
    seed: int,
    kind: str = "quad",
    gamma: Optional[int] = None,
) -> Instance:
    """A valid random instance; the same arguments always give the same instance."""
    rng = np.random.default_rng(seed)
    cap_lo = min(defaults.capacity_range[0], umax)
    u = [int(v) for v in rng.integers(cap_lo, umax + 1, size=n)]
    ell = [int(rng.integers(0, cap // 2 + 1)) for cap in u]
    xbar = [int(rng.integers(lo, cap + 1)) for lo, cap in zip(ell, u)]
    bbar = [int(rng.integers(0, x + 1)) for x in xbar]
    dbar = [x - b for x, b in zip(xbar, bbar)]
    spare = int(rng.integers(0, min(2, sum(dbar)) + 1))
    B = sum(bbar) + spare
    D = sum(xbar) - B
    if gamma is None:
        gamma = int(rng.integers(defaults.gamma_range[0], defaults.gamma_range[1] + 1))
    costs = [random_station_cost(rng, cap, kind) for cap in u]
    return Instance(n=n, D=D, B=B, gamma=gamma, ell=ell, u=u, dbar=dbar, bbar=bbar, costs=costs)


def generate_corpus(count: int, seed: int, umax: int = 4, kinds=("quad", "table")) -> Iterator[Instance]:
    """`count` small instances; instance k uses seed + k."""
    for k in range(count):
        rng = np.random.default_rng(seed + k)
        n = int(rng.choice(defaults.station_count_choices))
        kind = kinds[k % len(kinds)]
        yield generate_instance(n, umax, seed + k, kind=kind)


def generate_large_instance(n: int, total_docks: int, seed: int) -> Instance:
    """Instance with n stations and D + B = total_docks for the scaling benchmark."""
    rng = np.random.default_rng(seed)
    share = max(1, total_docks // n)
    xbar: List[int] = [int(v) for v in rng.multinomial(total_docks, [1 / n] * n)]
    u = [x + int(rng.integers(0, share + 1)) for x in xbar]
    ell = [max(0, x - int(rng.integers(0, share + 1))) for x in xbar]
    bbar = [int(rng.integers(0, x + 1)) for x in xbar]
    dbar = [x - b for x, b in zip(xbar, bbar)]
    B = sum(bbar) + int(rng.integers(0, sum(dbar) // 4 + 1))
    D = total_docks - B
    costs = [
        QuadUVW(_quadratic(rng, cap), _quadratic(rng, cap), _quadratic(rng, cap)) for cap in u
    ]
    return Instance(
        n=n, D=D, B=B, gamma=total_docks // 4, ell=ell, u=u, dbar=dbar, bbar=bbar, costs=costs
    )
