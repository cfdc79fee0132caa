"""Exact cost arithmetic and per-station dissatisfaction models.

Costs are Python integers kept inside the signed 64-bit range; the extended
value `INFINITY` marks points outside an effective domain. `LexCost` orders
pairs lexicographically and replaces the usual "plus epsilon times distance"
tie-breaking perturbation.
"""

import math
from dataclasses import dataclass
from typing import ClassVar, Optional, Tuple, Union

import numpy as np

from src.core.errors import CostOverflowError

INT64_MAX = 2**63 - 1
INT64_MIN = -(2**63)
INFINITY = math.inf

ExtendedCost = Union[int, float]


def is_finite(value: ExtendedCost) -> bool:
    return value != INFINITY


def checked(value: ExtendedCost) -> ExtendedCost:
    """Return value unchanged, raising CostOverflowError outside 64-bit range."""
    if value == INFINITY:
        return value
    if not INT64_MIN <= value <= INT64_MAX:
        raise CostOverflowError(f"cost {value} leaves the 64-bit range")
    return value


def add_costs(*values: ExtendedCost) -> ExtendedCost:
    """Sum of extended costs; INFINITY absorbs."""
    if any(v == INFINITY for v in values):
        return INFINITY
    return checked(sum(values))


@dataclass(frozen=True, order=True)
class LexCost:
    """Lexicographic cost: compare `primary` first, then `secondary`.

    Both components may be INFINITY. Addition is componentwise, which keeps
    the order compatible with sums of marginal changes.
    """

    primary: ExtendedCost
    secondary: ExtendedCost = 0

    @classmethod
    def infinite(cls) -> "LexCost":
        return cls(INFINITY, 0)

    @property
    def is_finite(self) -> bool:
        return self.primary != INFINITY and self.secondary != INFINITY

    def __add__(self, other: "LexCost") -> "LexCost":
        if not (self.is_finite and other.is_finite):
            return LexCost.infinite()
        return LexCost(self.primary + other.primary, self.secondary + other.secondary)


ZERO = LexCost(0, 0)


@dataclass(frozen=True)
class TableCost:
    """Explicit cost table: values[d][b] for 0 <= d <= max_d, 0 <= b <= max_b."""

    values: Tuple[Tuple[int, ...], ...]
    kind: ClassVar[str] = "table"

    def __post_init__(self):
        rows = tuple(tuple(int(v) for v in row) for row in self.values)
        if not rows or not rows[0]:
            raise ValueError("cost table must have at least one entry")
        if any(len(row) != len(rows[0]) for row in rows):
            raise ValueError("cost table must be rectangular")
        for row in rows:
            for v in row:
                checked(v)
        object.__setattr__(self, "values", rows)

    @property
    def max_d(self) -> int:
        return len(self.values) - 1

    @property
    def max_b(self) -> int:
        return len(self.values[0]) - 1

    def covers(self, max_d: int, max_b: int) -> bool:
        return self.max_d >= max_d and self.max_b >= max_b

    def evaluate(self, d: int, b: int) -> ExtendedCost:
        if d > self.max_d or b > self.max_b:
            return INFINITY
        return self.values[d][b]

    def grid(self, max_d: int, max_b: int) -> np.ndarray:
        return np.array(self.values, dtype=np.int64)[: max_d + 1, : max_b + 1]


@dataclass(frozen=True)
class QuadUVW:
    """c(d, b) = u(d) + v(b) + w(d + b) with u, v, w quadratics.

    Each of u, v, w is a (quadratic, linear) coefficient pair, e.g.
    u(t) = u[0] * t**2 + u[1] * t. Nonnegative quadratic coefficients make the
    cost multimodular on the whole quadrant.
    """

    u: Tuple[int, int]
    v: Tuple[int, int]
    w: Tuple[int, int]
    kind: ClassVar[str] = "quad_uvw"

    def __post_init__(self):
        for name in ("u", "v", "w"):
            pair = tuple(int(c) for c in getattr(self, name))
            if len(pair) != 2:
                raise ValueError(f"{name} must be a (quadratic, linear) pair")
            object.__setattr__(self, name, pair)

    def covers(self, max_d: int, max_b: int) -> bool:
        return True

    def evaluate(self, d: int, b: int) -> ExtendedCost:
        s = d + b
        return checked(
            self.u[0] * d * d
            + self.u[1] * d
            + self.v[0] * b * b
            + self.v[1] * b
            + self.w[0] * s * s
            + self.w[1] * s
        )

    def bound(self, capacity: int) -> int:
        """Upper bound on |c(d, b)| over 0 <= d, b <= capacity."""
        U = capacity
        return (
            self.u[0] * U * U
            + abs(self.u[1]) * U
            + self.v[0] * U * U
            + abs(self.v[1]) * U
            + self.w[0] * 4 * U * U
            + abs(self.w[1]) * 2 * U
        )

    def grid(self, max_d: int, max_b: int) -> np.ndarray:
        d, b = np.meshgrid(
            np.arange(max_d + 1, dtype=np.int64),
            np.arange(max_b + 1, dtype=np.int64),
            indexing="ij",
        )
        s = d + b
        return (
            self.u[0] * d * d
            + self.u[1] * d
            + self.v[0] * b * b
            + self.v[1] * b
            + self.w[0] * s * s
            + self.w[1] * s
        )


StationCost = Union[TableCost, QuadUVW]


def eval_station_cost(c: StationCost, d: int, b: int) -> ExtendedCost:
    """Cost of a station holding d open docks and b parked bikes."""
    if d < 0 or b < 0:
        return INFINITY
    return c.evaluate(d, b)


@dataclass(frozen=True)
class MultimodularReport:
    passed: bool
    point: Optional[Tuple[int, int]] = None
    inequality: Optional[int] = None

    def __bool__(self) -> bool:
        return self.passed


def check_multimodular(c: StationCost, max_d: int, max_b: int) -> MultimodularReport:
    """Test the three multimodularity inequalities on [0, max_d] x [0, max_b].

    Inequalities are numbered 1..3:

        1. c(e+1, z+1) - c(e+1, z) >= c(e, z+1) - c(e, z)
        2. c(e-1, z+1) - c(e-1, z) >= c(e, z) - c(e, z-1)
        3. c(e+1, z-1) - c(e, z-1) >= c(e, z) - c(e-1, z)

    Every inequality is checked wherever all of its points lie in the range.
    The reported violation is the smallest point (e, z), ties broken by the
    smallest inequality number.
    """
    if not c.covers(max_d, max_b):
        raise ValueError(f"cost domain does not cover [0, {max_d}] x [0, {max_b}]")
    g = c.grid(max_d, max_b).astype(np.int64)

    violations = []
    # 1: anchored at (e, z), e in [0, max_d-1], z in [0, max_b-1]
    bad = (g[1:, 1:] - g[1:, :-1]) < (g[:-1, 1:] - g[:-1, :-1])
    violations += [((int(e), int(z)), 1) for e, z in np.argwhere(bad)]
    # 2: e in [1, max_d], z in [1, max_b-1]
    bad = (g[:-1, 2:] - g[:-1, 1:-1]) < (g[1:, 1:-1] - g[1:, :-2])
    violations += [((int(e) + 1, int(z) + 1), 2) for e, z in np.argwhere(bad)]
    # 3: e in [1, max_d-1], z in [1, max_b]
    bad = (g[2:, :-1] - g[1:-1, :-1]) < (g[1:-1, 1:] - g[:-2, 1:])
    violations += [((int(e) + 1, int(z) + 1), 3) for e, z in np.argwhere(bad)]

    if not violations:
        return MultimodularReport(True)
    point, inequality = min(violations)
    return MultimodularReport(False, point, inequality)


def check_multimodular_consequences(
    c: StationCost, max_d: int, max_b: int
) -> MultimodularReport:
    """Check the two pairwise exchange inequalities implied by multimodularity.

    For points p = (e, z) and q = (e', z') of the range:

        1. e > e' and z < z'       =>  c(p) + c(q) >= c(e-1, z+1) + c(e'+1, z'-1)
        2. e > e' and e+z > e'+z'  =>  c(p) + c(q) >= c(e-1, z) + c(e'+1, z')

    The first violating (p, q) is reported as `point` = p.
    """
    g = c.grid(max_d, max_b).astype(np.int64)
    for e in range(max_d + 1):
        for z in range(max_b + 1):
            for e2 in range(e):
                for z2 in range(max_b + 1):
                    lhs = g[e, z] + g[e2, z2]
                    if z < z2 and lhs < g[e - 1, z + 1] + g[e2 + 1, z2 - 1]:
                        return MultimodularReport(False, (e, z), 1)
                    if e + z > e2 + z2 and lhs < g[e - 1, z] + g[e2 + 1, z2]:
                        return MultimodularReport(False, (e, z), 2)
    return MultimodularReport(True)
