"""Dock re-allocation instances, allocations and instance validation."""

from dataclasses import dataclass
from typing import List, Sequence, Tuple

from src.core.costs import (
    INT64_MAX,
    ExtendedCost,
    QuadUVW,
    StationCost,
    TableCost,
    add_costs,
    check_multimodular,
    eval_station_cost,
)
from src.core.errors import ValidationError, Violation
from src.utils.vectors import IntVector, add, as_vector, l1_distance

# Violation codes meaning "the current allocation is not feasible"; every
# other code marks a structurally invalid instance.
INFEASIBLE_CODES = frozenset({"total-capacity", "bike-budget", "capacity-bounds"})


@dataclass(frozen=True)
class Instance:
    """A (DR) instance.

    Attributes:
        n: Number of stations
        D: Total open docks; D + B is the total dock count
        B: Total bike budget
        gamma: Half of the L1 radius around the current dock totals
        ell, u: Per-station bounds on the dock total d(i) + b(i)
        dbar, bbar: Current open docks and bikes per station
        costs: Station dissatisfaction functions c_i(d, b)
    """

    n: int
    D: int
    B: int
    gamma: int
    ell: IntVector
    u: IntVector
    dbar: IntVector
    bbar: IntVector
    costs: Tuple[StationCost, ...]

    def __post_init__(self):
        for name in ("ell", "u", "dbar", "bbar"):
            object.__setattr__(self, name, as_vector(getattr(self, name)))
        object.__setattr__(self, "costs", tuple(self.costs))

    @property
    def xbar(self) -> IntVector:
        """Current dock totals dbar + bbar."""
        return add(self.dbar, self.bbar)

    @property
    def total(self) -> int:
        return self.D + self.B

    @property
    def box_lower(self) -> IntVector:
        return tuple(max(lo, x - self.gamma) for lo, x in zip(self.ell, self.xbar))

    @property
    def box_upper(self) -> IntVector:
        return tuple(min(hi, x + self.gamma) for hi, x in zip(self.u, self.xbar))


@dataclass(frozen=True)
class Allocation:
    d: IntVector
    b: IntVector

    def __post_init__(self):
        object.__setattr__(self, "d", as_vector(self.d))
        object.__setattr__(self, "b", as_vector(self.b))

    @property
    def x(self) -> IntVector:
        return add(self.d, self.b)


def allocation_cost(inst: Instance, d: Sequence[int], b: Sequence[int]) -> ExtendedCost:
    """Sum of station costs; INFINITY if any station leaves its domain."""
    return add_costs(*(eval_station_cost(c, di, bi) for c, di, bi in zip(inst.costs, d, b)))


def is_dr_feasible(inst: Instance, alloc: Allocation, radius: bool = True) -> bool:
    """Check the (DR) constraints; `radius=False` drops the L1 ball (the (DA) problem)."""
    x = alloc.x
    if any(v < 0 for v in alloc.d + alloc.b):
        return False
    if sum(x) != inst.total or sum(alloc.b) > inst.B:
        return False
    if any(not lo <= v <= hi for v, lo, hi in zip(x, inst.box_lower, inst.box_upper)):
        return False
    return not radius or l1_distance(x, inst.xbar) <= 2 * inst.gamma


def _cost_violations(inst: Instance) -> List[Violation]:
    violations = []
    for i, (c, cap) in enumerate(zip(inst.costs, inst.u)):
        if isinstance(c, QuadUVW):
            if min(c.u[0], c.v[0], c.w[0]) < 0:
                violations.append(
                    Violation("coefficient-sign", "costs", i, "quadratic coefficients must be >= 0")
                )
            elif 4 * inst.n * c.bound(cap) > INT64_MAX:
                violations.append(
                    Violation("cost-range", "costs", i, "station cost sums may exceed 64 bits")
                )
        elif isinstance(c, TableCost):
            if not c.covers(cap, cap):
                violations.append(
                    Violation(
                        "cost-domain",
                        "costs",
                        i,
                        f"table is {c.max_d + 1}x{c.max_b + 1}, capacity needs {cap + 1}x{cap + 1}",
                    )
                )
                continue
            report = check_multimodular(c, cap, cap)
            if not report:
                violations.append(
                    Violation(
                        "multimodular",
                        "costs",
                        i,
                        f"inequality {report.inequality} fails at {report.point}",
                    )
                )
    return violations


def validate_instance(inst: Instance) -> List[Violation]:
    """Collect every violated instance rule; an empty list means valid."""
    violations = []
    if inst.n < 2:
        violations.append(Violation("station-count", "n", None, f"need n >= 2, got {inst.n}"))
    for name in ("ell", "u", "dbar", "bbar", "costs"):
        if len(getattr(inst, name)) != inst.n:
            violations.append(
                Violation("length", name, None, f"expected {inst.n} entries, got {len(getattr(inst, name))}")
            )
    if violations:
        return violations

    for name in ("D", "B", "gamma"):
        if getattr(inst, name) < 0:
            violations.append(Violation("negative", name, None, "must be >= 0"))
    for name in ("ell", "u", "dbar", "bbar"):
        for i, v in enumerate(getattr(inst, name)):
            if v < 0:
                violations.append(Violation("negative", name, i, f"{v} < 0"))
    for i, (lo, hi) in enumerate(zip(inst.ell, inst.u)):
        if lo > hi:
            violations.append(Violation("bound-order", "ell", i, f"ell {lo} > u {hi}"))
    violations.extend(_cost_violations(inst))

    for i, (lo, x, hi) in enumerate(zip(inst.ell, inst.xbar, inst.u)):
        if not lo <= x <= hi:
            violations.append(
                Violation("capacity-bounds", "xbar", i, f"{x} outside [{lo}, {hi}]")
            )
    if sum(inst.xbar) != inst.total:
        violations.append(
            Violation(
                "total-capacity",
                "xbar",
                None,
                f"dbar + bbar sums to {sum(inst.xbar)}, expected D + B = {inst.total}",
            )
        )
    if sum(inst.bbar) > inst.B:
        violations.append(
            Violation("bike-budget", "bbar", None, f"{sum(inst.bbar)} bikes exceed B = {inst.B}")
        )
    return violations


def require_valid(inst: Instance) -> Instance:
    violations = validate_instance(inst)
    if violations:
        raise ValidationError(violations)
    return inst


def is_structurally_valid(violations: Sequence[Violation]) -> bool:
    return all(v.code in INFEASIBLE_CODES for v in violations)
