"""Minimization of M-convex functions given as black-box oracles.

The oracle of an M-convex function carries a level (every finite point has the
same coordinate sum) and a box enclosing its effective domain; an oracle
without a level models an M-natural-convex function. Besides plain steepest
descent this module solves the L1-ball constrained problem

    minimize f(x)  subject to  ||x - center||_1 <= 2 * gamma

three ways (forward greedy, reverse greedy from the nearest minimizer, and
the reduction to a smaller M-convex function g), and offers brute-force
exchange-axiom checkers used by the verification suite.
"""

import functools
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from src.core.costs import INFINITY, ExtendedCost, LexCost, StationCost, eval_station_cost
from src.core.errors import InfeasibleError
from src.utils.enumeration import EnumGuard, iter_box
from src.utils.logger import solver_logger
from src.utils.vectors import (
    IntVector,
    as_vector,
    box_excess,
    exchange,
    l1_distance,
    negative_support,
    ordered_pairs,
    positive_support,
    total,
    within,
)


@dataclass(frozen=True)
class MConvexOracle:
    """A function on Z^n that is +infinity off a box (and off a level set).

    Attributes:
        lower, upper: Box enclosing the effective domain
        evaluate: Value on box points; never called outside the box
        level: Coordinate sum of every finite point, None for M-natural oracles
        anchor: A known point of the effective domain, if any
    """

    lower: IntVector
    upper: IntVector
    evaluate: Callable[[IntVector], ExtendedCost]
    level: Optional[int] = None
    anchor: Optional[IntVector] = None
    name: str = "oracle"

    @property
    def n(self) -> int:
        return len(self.lower)

    def __call__(self, x: Sequence[int]) -> ExtendedCost:
        x = as_vector(x)
        if len(x) != self.n:
            raise ValueError(f"{self.name}: expected {self.n} coordinates, got {len(x)}")
        if self.level is not None and sum(x) != self.level:
            return INFINITY
        if not within(x, self.lower, self.upper):
            return INFINITY
        return self.evaluate(x)

    def cached(self) -> "MConvexOracle":
        """Same oracle with memoized evaluations."""
        return replace(self, evaluate=functools.lru_cache(maxsize=None)(self.evaluate))

    def points(self, guard: Optional[EnumGuard] = None) -> Iterator[IntVector]:
        return iter_box(self.lower, self.upper, guard, self.level)

    def domain(self, guard: Optional[EnumGuard] = None) -> Dict[IntVector, ExtendedCost]:
        """All finite points with their values, by enumeration."""
        values = {}
        for x in self.points(guard):
            value = self(x)
            if value != INFINITY:
                values[x] = value
        return values

    def find_feasible(self, guard: Optional[EnumGuard] = None) -> IntVector:
        if self.anchor is not None and self(self.anchor) != INFINITY:
            return self.anchor
        for x in self.points(guard):
            if self(x) != INFINITY:
                return x
        raise InfeasibleError(f"{self.name}: effective domain is empty")


def oracle_from_station_cost(c: StationCost, max_d: int, max_b: int) -> MConvexOracle:
    """The two-variable function (d, b) -> c(d, b) on [0, max_d] x [0, max_b]."""
    return MConvexOracle(
        lower=(0, 0),
        upper=(max_d, max_b),
        evaluate=lambda x: eval_station_cost(c, x[0], x[1]),
        name="station-cost",
    )


# ---------------------------------------------------------------------------
# Descent engine
# ---------------------------------------------------------------------------


class Termination(str, Enum):
    LOCAL_OPTIMUM = "local-optimum"
    BUDGET_EXHAUSTED = "budget-exhausted"
    TARGET_REACHED = "target-reached"


@dataclass(frozen=True)
class TraceStep:
    k: int
    x: IntVector
    objective: object
    distance: int


@dataclass
class DescentTrace:
    """Iterates of a descent; `len()` is the number of moves made."""

    steps: List[TraceStep] = field(default_factory=list)
    reason: Termination = Termination.LOCAL_OPTIMUM

    def __len__(self) -> int:
        return max(0, len(self.steps) - 1)

    @property
    def objectives(self) -> List[object]:
        return [s.objective for s in self.steps]

    def is_strictly_decreasing(self) -> bool:
        values = self.objectives
        return all(b < a for a, b in zip(values, values[1:]))

    def moves_are_exchanges(self) -> bool:
        for a, b in zip(self.steps, self.steps[1:]):
            diff = sorted(q - p for p, q in zip(a.x, b.x) if q != p)
            if diff != [-1, 1]:
                return False
        return True


Moves = Callable[[IntVector], Iterable[Tuple[Optional[int], Optional[int]]]]


def _all_exchanges(n: int) -> Moves:
    pairs = list(ordered_pairs(range(n)))
    return lambda x: pairs


def _descend(
    score: Callable[[IntVector], object],
    x0: IntVector,
    center: IntVector,
    moves: Moves,
    max_steps: Optional[int] = None,
    start_k: int = 0,
    stop: Optional[Callable[[IntVector], bool]] = None,
) -> Tuple[IntVector, DescentTrace]:
    """Move to the best strictly improving neighbor until none exists.

    Neighbors are x + chi_i - chi_j for the (i, j) produced by `moves`, in
    order; the first of several equally good neighbors wins.
    """
    x = as_vector(x0)
    current = score(x)
    trace = DescentTrace([TraceStep(start_k, x, current, l1_distance(x, center))])
    while True:
        if stop is not None and stop(x):
            trace.reason = Termination.TARGET_REACHED
            break
        if max_steps is not None and len(trace) >= max_steps:
            trace.reason = Termination.BUDGET_EXHAUSTED
            break
        best, best_x = None, None
        for i, j in moves(x):
            y = exchange(x, i, j)
            value = score(y)
            if best is None or value < best:
                best, best_x = value, y
        if best is None or not best < current:
            trace.reason = Termination.LOCAL_OPTIMUM
            break
        x, current = best_x, best
        trace.steps.append(TraceStep(start_k + len(trace) + 1, x, current, l1_distance(x, center)))
    return x, trace


def steepest_descent(
    f: MConvexOracle, x0: Sequence[int], max_steps: Optional[int] = None
) -> Tuple[IntVector, DescentTrace]:
    """Steepest descent over exchanges x + chi_i - chi_j, started at x0.

    For an M-convex f the result is a global minimizer.
    """
    x0 = as_vector(x0)
    if f(x0) == INFINITY:
        raise InfeasibleError(f"{f.name}: start point {x0} is outside the effective domain")
    return _descend(f, x0, x0, _all_exchanges(f.n), max_steps=max_steps)


class LexOrder(str, Enum):
    F_THEN_DIST = "f-then-dist"
    DIST_THEN_F = "dist-then-f"


@dataclass(frozen=True)
class LexResult:
    x: IntVector
    value: ExtendedCost
    distance: int

    @property
    def half_distance(self) -> int:
        return self.distance // 2


def steepest_descent_lex(
    f: MConvexOracle,
    center: Sequence[int],
    order: LexOrder = LexOrder.F_THEN_DIST,
    start: Optional[Sequence[int]] = None,
    guard: Optional[EnumGuard] = None,
) -> LexResult:
    """Descent on f paired lexicographically with the L1 distance to center.

    F_THEN_DIST finds the minimizer of f nearest to center; DIST_THEN_F finds
    the point of dom f nearest to center with the least value among those.
    """
    center = as_vector(center)
    x0 = as_vector(start) if start is not None else f.find_feasible(guard)

    def score(x: IntVector) -> LexCost:
        value = f(x)
        if value == INFINITY:
            return LexCost.infinite()
        dist = l1_distance(x, center)
        if order is LexOrder.F_THEN_DIST:
            return LexCost(value, dist)
        return LexCost(dist, value)

    x, _ = _descend(score, x0, center, _all_exchanges(f.n))
    return LexResult(x, f(x), l1_distance(x, center))


def nearest_minimizer(f: MConvexOracle, center: Sequence[int], guard: Optional[EnumGuard] = None) -> LexResult:
    """x-bullet: the minimizer of f nearest to center (tau = distance / 2)."""
    return steepest_descent_lex(f, center, LexOrder.F_THEN_DIST, guard=guard)


def nearest_feasible(f: MConvexOracle, center: Sequence[int], guard: Optional[EnumGuard] = None) -> LexResult:
    """x-circle: the nearest point of dom f to center (sigma = distance / 2)."""
    return steepest_descent_lex(f, center, LexOrder.DIST_THEN_F, guard=guard)


def _require_center(f: MConvexOracle, center: IntVector) -> None:
    if f.level is not None and sum(center) != f.level:
        raise ValueError(f"center {center} does not lie on level {f.level}")


def steepest_descent_mml1(
    f: MConvexOracle, center: Sequence[int], gamma: int, guard: Optional[EnumGuard] = None
) -> Tuple[IntVector, DescentTrace]:
    """Minimize f over the ball ||x - center||_1 <= 2 * gamma.

    Starts from the nearest feasible point (distance 2 * sigma) and makes at
    most gamma - sigma steepest moves; every iterate x_k minimizes f over the
    ball of radius 2k. Stops early once no move strictly improves.

    Raises:
        InfeasibleError: If sigma > gamma
    """
    center = as_vector(center)
    _require_center(f, center)
    start = nearest_feasible(f, center, guard)
    sigma = start.half_distance
    if sigma > gamma:
        raise InfeasibleError(f"{f.name}: nearest feasible point needs radius {2 * sigma} > {2 * gamma}")
    x, trace = _descend(
        f, start.x, center, _all_exchanges(f.n), max_steps=gamma - sigma, start_k=sigma
    )
    solver_logger.debug(f"mml1 on {f.name}: sigma={sigma}, {len(trace)} moves, {trace.reason.value}")
    return x, trace


def reverse_steepest_descent_mml1(
    f: MConvexOracle, center: Sequence[int], gamma: int, guard: Optional[EnumGuard] = None
) -> IntVector:
    """Minimize f over the ball by walking back from the nearest minimizer.

    Each move is x - chi_i + chi_j with i in supp+(x - center) and
    j in supp-(x - center), so the distance to center drops by exactly 2.
    """
    center = as_vector(center)
    _require_center(f, center)
    if nearest_feasible(f, center, guard).half_distance > gamma:
        raise InfeasibleError(f"{f.name}: ball of radius {2 * gamma} misses dom f")
    x = nearest_minimizer(f, center, guard).x
    while l1_distance(x, center) > 2 * gamma:
        best, best_x = INFINITY, None
        for i in positive_support(x, center):
            for j in negative_support(x, center):
                y = exchange(x, j, i)
                value = f(y)
                if value < best:
                    best, best_x = value, y
        if best_x is None:
            raise InfeasibleError(f"{f.name}: no feasible move towards the center from {x}")
        x = best_x
    return x


@dataclass(frozen=True)
class MuProfile:
    """Optimal values mu_k of the radius-2k problems for k = sigma..tau."""

    sigma: int
    tau: int
    mu: Tuple[ExtendedCost, ...]
    witnesses: Tuple[IntVector, ...]

    def value(self, k: int) -> ExtendedCost:
        return self.mu[k - self.sigma]

    def witness(self, k: int) -> IntVector:
        return self.witnesses[k - self.sigma]

    def is_strictly_decreasing(self) -> bool:
        return all(b < a for a, b in zip(self.mu, self.mu[1:]))

    def is_convex(self) -> bool:
        return all(a + c >= 2 * b for a, b, c in zip(self.mu, self.mu[1:], self.mu[2:]))


def mu_profile(f: MConvexOracle, center: Sequence[int], guard: Optional[EnumGuard] = None) -> MuProfile:
    """Brute-force profile of the ball-constrained optimum over k in [sigma, tau]."""
    center = as_vector(center)
    values = f.domain(guard)
    if not values:
        raise InfeasibleError(f"{f.name}: effective domain is empty")
    dist = {x: l1_distance(x, center) for x in values}
    sigma = min(dist.values()) // 2
    best = min(values.values())
    tau = min(dist[x] for x, v in values.items() if v == best) // 2

    mu, witnesses = [], []
    for k in range(sigma, tau + 1):
        inside = [x for x in values if dist[x] <= 2 * k]
        mu_k = min(values[x] for x in inside)
        # A minimizer at the boundary exists for k <= tau; fall back to the
        # farthest one so a broken oracle shows up as a wrong distance.
        attaining = [x for x in inside if values[x] == mu_k]
        witnesses.append(min(attaining, key=lambda x: (-dist[x], x)))
        mu.append(mu_k)
    return MuProfile(sigma, tau, tuple(mu), tuple(witnesses))


def ball_minimum(
    f: MConvexOracle, center: Sequence[int], gamma: int, guard: Optional[EnumGuard] = None
) -> ExtendedCost:
    """min f over ||x - center||_1 <= 2 * gamma by enumeration."""
    center = as_vector(center)
    values = [v for x, v in f.domain(guard).items() if l1_distance(x, center) <= 2 * gamma]
    return min(values, default=INFINITY)


# ---------------------------------------------------------------------------
# Reduction to the function g on the coordinates outside supp+(x-bullet - c)
# ---------------------------------------------------------------------------


def _penalized(f: MConvexOracle, lower: Sequence[int], upper: Sequence[int], secondary) -> Callable:
    def score(x: IntVector) -> LexCost:
        if f(x) == INFINITY:
            return LexCost.infinite()
        return LexCost(box_excess(x, lower, upper), secondary(x))

    return score


def solve_mml1_via_g(
    f: MConvexOracle, center: Sequence[int], gamma: int, guard: Optional[EnumGuard] = None
) -> IntVector:
    """Minimize f over the ball through the M-convex function g.

    With P = supp+(x-bullet - center) the problem is equivalent to minimizing
    f on the box [l-hat, u-hat] subject to x(P) = center(P) + gamma. Fixing the
    coordinates outside P to y gives g(y) = min{f(x) | x in T(y)}, which is
    M-convex in y; g is minimized by steepest descent and every evaluation of
    g is itself a steepest descent over exchanges inside P.
    """
    if f.level is None:
        raise ValueError(f"{f.name}: the reduction needs an oracle with a level")
    center = as_vector(center)
    _require_center(f, center)
    feasible = nearest_feasible(f, center, guard)
    if feasible.half_distance > gamma:
        raise InfeasibleError(f"{f.name}: ball of radius {2 * gamma} misses dom f")
    bullet = nearest_minimizer(f, center, guard)
    if bullet.half_distance <= gamma:
        return bullet.x

    n = f.n
    plus = positive_support(bullet.x, center)
    rest = tuple(k for k in range(n) if k not in plus)
    lower, upper = [], []
    for k in range(n):
        if k in plus:
            lower.append(center[k])
            upper.append(min(bullet.x[k], center[k] + gamma))
        else:
            lower.append(max(bullet.x[k], center[k] - gamma))
            upper.append(center[k])
    target = total(center, plus) + gamma

    # Feasible start with x(P) = target: on the box x(P) - c(P) is half the
    # distance to center, so walk between the box points of least and
    # greatest x(P).
    low, _ = _descend(
        _penalized(f, lower, upper, lambda x: l1_distance(x, center)), feasible.x, center, _all_exchanges(n)
    )
    if box_excess(low, lower, upper) > 0:
        raise InfeasibleError(f"{f.name}: reduced box is empty")
    high, _ = _descend(_penalized(f, lower, upper, lambda x: -total(x, plus)), low, center, _all_exchanges(n))
    if not total(low, plus) <= target <= total(high, plus):
        raise InfeasibleError(f"{f.name}: no point of the reduced box reaches x(P) = {target}")
    start, _ = _descend(
        _penalized(f, lower, upper, lambda x: l1_distance(x, high)),
        low,
        center,
        _all_exchanges(n),
        stop=lambda x: total(x, plus) == target,
    )

    inner_pairs = list(ordered_pairs(plus))
    solutions: Dict[IntVector, IntVector] = {}

    def g(y: IntVector) -> ExtendedCost:
        t_lower = list(lower)
        t_upper = list(upper)
        for k, v in zip(rest, y):
            t_lower[k] = t_upper[k] = v
        x, _ = _descend(_penalized(f, t_lower, t_upper, lambda x: 0), start, center, _all_exchanges(n))
        if f(x) == INFINITY or box_excess(x, t_lower, t_upper) > 0:
            return INFINITY

        def inner(z: IntVector) -> ExtendedCost:
            return f(z) if within(z, t_lower, t_upper) else INFINITY

        x, _ = _descend(inner, x, center, lambda z: inner_pairs)
        solutions[y] = x
        return f(x)

    g_oracle = MConvexOracle(
        lower=tuple(lower[k] for k in rest),
        upper=tuple(upper[k] for k in rest),
        evaluate=g,
        level=f.level - target if f.level is not None else None,
        anchor=tuple(start[k] for k in rest),
        name=f"g[{f.name}]",
    ).cached()
    y, trace = steepest_descent(g_oracle, g_oracle.anchor)
    solver_logger.debug(f"g-reduction on {f.name}: |P|={len(plus)}, {len(trace)} outer moves")
    return solutions[y]


# ---------------------------------------------------------------------------
# Exchange-axiom checkers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExchangeReport:
    passed: bool
    x: Optional[IntVector] = None
    y: Optional[IntVector] = None
    i: Optional[int] = None
    pairs_checked: int = 0

    def __bool__(self) -> bool:
        return self.passed


def _check_exchange(f: MConvexOracle, allow_zero: bool, guard: Optional[EnumGuard]) -> ExchangeReport:
    values = f.domain(guard)
    points = sorted(values)
    checked = 0
    for x in points:
        for y in points:
            if x == y:
                continue
            checked += 1
            lhs = values[x] + values[y]
            partners: List[Optional[int]] = list(negative_support(x, y))
            if allow_zero:
                partners.append(None)
            for i in positive_support(x, y):
                if not any(lhs >= f(exchange(x, j, i)) + f(exchange(y, i, j)) for j in partners):
                    return ExchangeReport(False, x, y, i, checked)
    return ExchangeReport(True, pairs_checked=checked)


def check_m_exc(f: MConvexOracle, guard: Optional[EnumGuard] = None) -> ExchangeReport:
    """Enumerate dom f and test the M-convex exchange axiom on every pair."""
    return _check_exchange(f, False, guard)


def check_mnat_exc(f: MConvexOracle, guard: Optional[EnumGuard] = None) -> ExchangeReport:
    """As check_m_exc, also accepting the one-sided exchange (j = 0)."""
    return _check_exchange(f, True, guard)
