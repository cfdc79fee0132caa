"""The dock/bike allocation problem shared by the SRA and (DA) solvers.

An `AllocationProblem` is a set of stations with separable costs c_i(d, b),
per-station bounds on the dock total x = d + b, a required total x(N) and a
bike budget b(N) <= budget. The (DA) problem, the sub-problems on either side
of a (DR-L) split and the bike-only SRA problem are all instances of it.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from src.core.costs import ExtendedCost, StationCost, add_costs, eval_station_cost
from src.core.instance import Allocation, Instance
from src.utils.vectors import IntVector, add, as_vector, fill_to_total


@dataclass(frozen=True)
class AllocationProblem:
    costs: Tuple[StationCost, ...]
    lower: IntVector
    upper: IntVector
    total: int
    budget: int
    # original station index of every local station
    stations: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "lower", as_vector(self.lower))
        object.__setattr__(self, "upper", as_vector(self.upper))
        if not self.stations:
            object.__setattr__(self, "stations", tuple(range(len(self.costs))))

    @classmethod
    def for_sra(cls, inst: Instance) -> "AllocationProblem":
        """Bounds [ell, u] only; used when x is fixed and b is optimized."""
        return cls(inst.costs, inst.ell, inst.u, inst.total, inst.B)

    @classmethod
    def for_da(cls, inst: Instance) -> "AllocationProblem":
        """The (DA) problem: (DR) without the L1 ball, keeping the xbar +- gamma box."""
        return cls(inst.costs, inst.box_lower, inst.box_upper, inst.total, inst.B)

    @classmethod
    def of(cls, source) -> "AllocationProblem":
        return cls.for_sra(source) if isinstance(source, Instance) else source

    @property
    def n(self) -> int:
        return len(self.costs)

    def with_budget(self, budget: int) -> "AllocationProblem":
        return AllocationProblem(self.costs, self.lower, self.upper, self.total, budget, self.stations)

    def restrict(
        self,
        stations: Sequence[int],
        lower: Sequence[int],
        upper: Sequence[int],
        total: int,
        budget: int,
    ) -> "AllocationProblem":
        """Sub-problem on `stations` with new bounds given for the full index set."""
        return AllocationProblem(
            costs=tuple(self.costs[k] for k in stations),
            lower=tuple(max(self.lower[k], lower[k]) for k in stations),
            upper=tuple(min(self.upper[k], upper[k]) for k in stations),
            total=total,
            budget=budget,
            stations=tuple(self.stations[k] for k in stations),
        )

    def station_cost(self, i: int, d: int, b: int) -> ExtendedCost:
        return eval_station_cost(self.costs[i], d, b)

    def cost(self, d: Sequence[int], b: Sequence[int]) -> ExtendedCost:
        return add_costs(*(self.station_cost(i, di, bi) for i, (di, bi) in enumerate(zip(d, b))))

    def is_feasible(self, d: Sequence[int], b: Sequence[int]) -> bool:
        x = add(d, b)
        return (
            all(v >= 0 for v in d)
            and all(v >= 0 for v in b)
            and sum(x) == self.total
            and sum(b) <= self.budget
            and all(lo <= v <= hi for v, lo, hi in zip(x, self.lower, self.upper))
        )

    def initial_allocation(self) -> Optional[Allocation]:
        """Some feasible point (no bikes, docks filled lowest index first), or None."""
        if self.budget < 0:
            return None
        x = fill_to_total(self.lower, self.upper, self.total)
        if x is None:
            return None
        return Allocation(x, (0,) * self.n)
