"""Optimal bike counts for fixed dock totals, and their incremental update.

For dock totals x the SRA problem chooses bikes 0 <= b <= x with
b(N) <= budget minimizing sum_i c_i(x_i - b_i, b_i). Each term is convex in
b_i (a consequence of multimodularity), so a greedy over unit increments is
exact. After a dock move x + chi_i - chi_j an optimal b changes in at most
three stations; `sra_incremental` finds it from six marginal-cost heaps.
"""

import copy
import heapq
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

from src.core.costs import INFINITY, ZERO, ExtendedCost, LexCost
from src.core.errors import InfeasibleError
from src.core.instance import Allocation, Instance
from src.services.allocation_problem import AllocationProblem
from src.utils.vectors import IntVector, as_vector, l1_distance, subtract


@dataclass(frozen=True)
class SraResult:
    b: IntVector
    value: ExtendedCost


def solve_sra(inst, x: Sequence[int]) -> SraResult:
    """Greedy optimum of the SRA problem for dock totals x.

    Starts from b = 0 and repeatedly adds the bike with the most negative
    marginal cost (smallest station index on ties) until the budget is spent
    or no addition improves.

    Args:
        inst: Instance or AllocationProblem supplying costs, bounds and budget
        x: Dock totals per station

    Raises:
        InfeasibleError: If x is negative or outside the station bounds
    """
    problem = AllocationProblem.of(inst)
    x = as_vector(x)
    if len(x) != problem.n:
        raise ValueError(f"expected {problem.n} dock totals, got {len(x)}")
    for i, (v, lo, hi) in enumerate(zip(x, problem.lower, problem.upper)):
        if v < 0 or not lo <= v <= hi:
            raise InfeasibleError(f"dock total {v} at station {i} outside [{max(lo, 0)}, {hi}]")

    b = [0] * problem.n
    current = [problem.station_cost(i, v, 0) for i, v in enumerate(x)]

    def increment(i: int) -> ExtendedCost:
        if b[i] >= x[i]:
            return INFINITY
        after = problem.station_cost(i, x[i] - b[i] - 1, b[i] + 1)
        if after == INFINITY or current[i] == INFINITY:
            return INFINITY
        return after - current[i]

    heap = [(increment(i), i) for i in range(problem.n)]
    heapq.heapify(heap)
    used = 0
    while heap and used < problem.budget:
        delta, i = heapq.heappop(heap)
        if not delta < 0:
            break
        b[i] += 1
        used += 1
        current[i] += delta
        heapq.heappush(heap, (increment(i), i))

    value = problem.cost(subtract(x, b), b)
    return SraResult(tuple(b), value)


class Marginal(Enum):
    """Single-station changes (delta d, delta b) tracked by the heaps."""

    D_UP = (1, 0)
    D_DOWN = (-1, 0)
    B_UP = (0, 1)
    B_DOWN = (0, -1)
    TO_DOCK = (1, -1)
    TO_BIKE = (-1, 1)

    @property
    def delta_d(self) -> int:
        return self.value[0]

    @property
    def delta_b(self) -> int:
        return self.value[1]


class MarginalHeap:
    """Min-heap of (key, station) with lazy deletion by version stamps."""

    def __init__(self):
        self._heap: List[Tuple[LexCost, int, int]] = []
        self._version: Dict[int, int] = {}

    def push(self, station: int, key: LexCost) -> None:
        version = self._version.get(station, 0) + 1
        self._version[station] = version
        heapq.heappush(self._heap, (key, station, version))
        if len(self._heap) > 4 * len(self._version) + 64:
            self._compact()

    def _compact(self) -> None:
        self._heap = [e for e in self._heap if self._version[e[1]] == e[2]]
        heapq.heapify(self._heap)

    def smallest(self, k: int) -> List[Tuple[LexCost, int]]:
        """Up to k current entries in increasing (key, station) order."""
        found = []
        while self._heap and len(found) < k:
            entry = heapq.heappop(self._heap)
            if self._version[entry[1]] == entry[2]:
                found.append(entry)
        for entry in found:
            heapq.heappush(self._heap, entry)
        return [(key, station) for key, station, _ in found]


@dataclass
class SraState:
    """Mutable (x, b) together with the six per-station marginal heaps.

    Marginals are taken at `step` (a move changes d or b by +-step). With a
    `center`, every key also carries the change of |x_i - center_i| as its
    secondary component, so ties in cost are broken towards the center.
    """

    problem: AllocationProblem
    x: List[int]
    b: List[int]
    step: int = 1
    center: Optional[IntVector] = None
    total_b: int = 0
    heaps: Dict[Marginal, MarginalHeap] = field(default_factory=dict)

    @classmethod
    def create(
        cls,
        problem: AllocationProblem,
        d: Sequence[int],
        b: Sequence[int],
        step: int = 1,
        center: Optional[Sequence[int]] = None,
    ) -> "SraState":
        if len(d) != problem.n or len(b) != problem.n:
            raise ValueError(f"expected {problem.n} stations")
        state = cls(
            problem=problem,
            x=[di + bi for di, bi in zip(d, b)],
            b=list(b),
            step=step,
            center=as_vector(center) if center is not None else None,
            total_b=sum(b),
            heaps={kind: MarginalHeap() for kind in Marginal},
        )
        for i in range(problem.n):
            state.refresh(i)
        return state

    @property
    def d(self) -> IntVector:
        return tuple(xi - bi for xi, bi in zip(self.x, self.b))

    @property
    def allocation(self) -> Allocation:
        return Allocation(self.d, tuple(self.b))

    def value(self) -> ExtendedCost:
        return self.problem.cost(self.d, self.b)

    def distance(self) -> int:
        return l1_distance(self.x, self.center) if self.center is not None else 0

    def marginal(self, kind: Marginal, i: int) -> LexCost:
        """Change of cost at station i when its (d, b) moves by kind * step."""
        d_i = self.x[i] - self.b[i]
        new_d = d_i + kind.delta_d * self.step
        new_b = self.b[i] + kind.delta_b * self.step
        new_x = new_d + new_b
        if new_d < 0 or new_b < 0:
            return LexCost.infinite()
        if new_x != self.x[i] and not self.problem.lower[i] <= new_x <= self.problem.upper[i]:
            return LexCost.infinite()
        after = self.problem.station_cost(i, new_d, new_b)
        before = self.problem.station_cost(i, d_i, self.b[i])
        if after == INFINITY or before == INFINITY:
            return LexCost.infinite()
        shift = 0
        if self.center is not None:
            c = self.center[i]
            shift = abs(new_x - c) - abs(self.x[i] - c)
        return LexCost(after - before, shift)

    def refresh(self, i: int) -> None:
        for kind, heap in self.heaps.items():
            heap.push(i, self.marginal(kind, i))

    def apply(self, changes: Sequence[Tuple[int, Marginal]]) -> None:
        for i, kind in changes:
            self.x[i] += (kind.delta_d + kind.delta_b) * self.step
            self.b[i] += kind.delta_b * self.step
            self.total_b += kind.delta_b * self.step
        for i in {i for i, _ in changes}:
            self.refresh(i)

    def clone(self) -> "SraState":
        other = copy.copy(self)
        other.x = list(self.x)
        other.b = list(self.b)
        other.heaps = {}
        for kind, heap in self.heaps.items():
            twin = MarginalHeap()
            twin._heap = list(heap._heap)
            twin._version = dict(heap._version)
            other.heaps[kind] = twin
        return other

    def budget_allows(self, changes: Sequence[Tuple[int, Marginal]]) -> bool:
        grow = sum(kind.delta_b for _, kind in changes) * self.step
        return self.total_b + grow <= self.problem.budget

    def combined_key(self, changes: Sequence[Tuple[int, Marginal]]) -> LexCost:
        key = ZERO
        for i, kind in changes:
            key = key + self.marginal(kind, i)
        return key


@dataclass(frozen=True)
class Move:
    """A neighbor of (d, b): per-station changes plus their total cost change."""

    key: LexCost
    family: int
    plus: int
    minus: int
    pivot: Optional[int]
    changes: Tuple[Tuple[int, Marginal], ...]

    @property
    def bike_shift(self) -> int:
        return sum(abs(kind.delta_b) for _, kind in self.changes)


# Dock moves x + chi_i - chi_j: (kind at i, kind at j, kind at a third station)
FAMILIES: Dict[int, Tuple[Marginal, Marginal, Optional[Marginal]]] = {
    1: (Marginal.D_UP, Marginal.D_DOWN, None),
    2: (Marginal.B_UP, Marginal.D_DOWN, None),
    3: (Marginal.D_UP, Marginal.B_DOWN, None),
    4: (Marginal.B_UP, Marginal.B_DOWN, None),
    5: (Marginal.B_UP, Marginal.D_DOWN, Marginal.TO_DOCK),
    6: (Marginal.D_UP, Marginal.B_DOWN, Marginal.TO_BIKE),
}


def _family_moves(state: SraState, family: int, plus: Optional[int] = None, minus: Optional[int] = None):
    kind_i, kind_j, kind_t = FAMILIES[family]
    width = 3 if kind_t is not None else 2
    heads = [state.heaps[kind_i].smallest(width) if plus is None else [(None, plus)]]
    heads.append(state.heaps[kind_j].smallest(width) if minus is None else [(None, minus)])
    thirds = state.heaps[kind_t].smallest(3) if kind_t is not None else [(None, None)]
    for _, i in heads[0]:
        for _, j in heads[1]:
            if i == j:
                continue
            for _, t in thirds:
                if t is not None and t in (i, j):
                    continue
                changes = [(i, kind_i), (j, kind_j)]
                if t is not None:
                    changes.append((t, kind_t))
                if not state.budget_allows(changes):
                    continue
                key = state.combined_key(changes)
                if key.is_finite:
                    yield Move(key, family, i, j, t, tuple(changes))


def _move_order(move: Move, state: SraState) -> tuple:
    b_after = list(state.b)
    for i, kind in move.changes:
        b_after[i] += kind.delta_b * state.step
    return (move.key, move.bike_shift, tuple(b_after), move.family)


def best_exchange(state: SraState) -> Optional[Move]:
    """Cheapest neighbor over the six families of dock moves, from the heaps."""
    best = None
    for family in FAMILIES:
        for move in _family_moves(state, family):
            order = (move.key, move.plus, move.minus, move.family, move.pivot if move.pivot is not None else -1)
            if best is None or order < best[0]:
                best = (order, move)
    return best[1] if best is not None else None


def pair_candidates(state: SraState, i: int, j: int) -> List[Move]:
    """All finite candidates for the dock move x + chi_i - chi_j."""
    moves = []
    for family in FAMILIES:
        moves.extend(_family_moves(state, family, plus=i, minus=j))
    return moves


def sra_incremental(inst, state: SraState, i: int, j: int, in_place: bool = False) -> SraState:
    """Bike-optimal state for dock totals x + chi_i - chi_j.

    `state` must hold an optimal b for its x. The new b differs from the old
    one in at most three stations; among equally good candidates the one
    closest to the old b (then lexicographically smallest) is taken.

    Raises:
        InfeasibleError: If the move leaves the bounds or no candidate is finite
    """
    problem = AllocationProblem.of(inst)
    if i == j:
        raise ValueError("a dock move needs two distinct stations")
    step = state.step
    if not problem.lower[i] <= state.x[i] + step <= problem.upper[i]:
        raise InfeasibleError(f"station {i} cannot gain {step} docks")
    if not problem.lower[j] <= state.x[j] - step <= problem.upper[j] or state.x[j] - step < 0:
        raise InfeasibleError(f"station {j} cannot lose {step} docks")

    candidates = pair_candidates(state, i, j)
    if not candidates:
        raise InfeasibleError(f"no feasible bike assignment after moving docks {j} -> {i}")
    move = min(candidates, key=lambda m: _move_order(m, state))
    target = state if in_place else state.clone()
    target.apply(move.changes)
    return target


def in_update_neighborhood(delta: Sequence[int], i: int, j: int) -> bool:
    """Whether a bike change after the dock move x + chi_i - chi_j is one of
    0, chi_i, -chi_j, chi_i - chi_j, chi_i - chi_t or chi_s - chi_j."""
    if any(abs(v) > 1 for v in delta):
        return False
    plus = [k for k, v in enumerate(delta) if v == 1]
    minus = [k for k, v in enumerate(delta) if v == -1]
    if len(plus) > 1 or len(minus) > 1:
        return False
    if plus and minus:
        return plus[0] == i or minus[0] == j
    if plus:
        return plus[0] == i
    if minus:
        return minus[0] == j
    return True


def rebalance_bikes(state: SraState) -> int:
    """Local search on b with x fixed until no bike move improves.

    Moves are b + step*chi_i, b - step*chi_j and b + step*(chi_i - chi_j);
    at step 1 the result is optimal for SRA(x). Returns the number of moves.
    """
    moves = 0
    while True:
        options = []
        ups = state.heaps[Marginal.TO_BIKE].smallest(2)
        downs = state.heaps[Marginal.TO_DOCK].smallest(2)
        for _, i in ups:
            options.append(((i, Marginal.TO_BIKE),))
        for _, j in downs:
            options.append(((j, Marginal.TO_DOCK),))
        for _, i in ups:
            for _, j in downs:
                if i != j:
                    options.append(((i, Marginal.TO_BIKE), (j, Marginal.TO_DOCK)))
        best_key, best = ZERO, None
        for changes in options:
            if not state.budget_allows(changes):
                continue
            key = state.combined_key(changes)
            if key < best_key:
                best_key, best = key, changes
        if best is None:
            return moves
        state.apply(best)
        moves += 1


def bike_optimal_allocation(inst: Instance) -> Allocation:
    """(xbar - b*, b*) with b* optimal for SRA(xbar)."""
    result = solve_sra(inst, inst.xbar)
    return Allocation(subtract(inst.xbar, result.b), result.b)
