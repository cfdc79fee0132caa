"""Dock re-allocation solvers.

The problem (DR): choose open docks d and bikes b per station minimizing
sum_i c_i(d_i, b_i) subject to

    d(N) + b(N) = D + B,  b(N) <= B,  ell <= d + b <= u,
    ||(d + b) - xbar||_1 <= 2 * gamma,

where xbar = dbar + bbar is the current dock allocation. Solvers:

- `solve_dr_greedy`: at most gamma steepest dock moves from (dbar, bbar).
- `solve_da_steepest` / `solve_da_scaling`: the problem (DA) without the L1
  ball (the xbar +- gamma box stays), by steepest descent and by proximity
  scaling.
- `solve_dr_poly`: (DA) first; if its nearest optimum is outside the ball,
  split the stations and binary-search the bike budget between the sides.
"""

import functools
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Optional, Tuple

from src.core.costs import INFINITY, ZERO, ExtendedCost
from src.core.errors import InfeasibleError
from src.core.instance import Allocation, Instance, allocation_cost
from src.services.allocation_problem import AllocationProblem
from src.services.mconvex_service import MConvexOracle
from src.services.sra_service import (
    SraState,
    best_exchange,
    bike_optimal_allocation,
    rebalance_bikes,
    solve_sra,
    sra_incremental,
)
from src.utils.logger import solver_logger
from src.utils.vectors import IntVector, exchange, l1_distance, ordered_pairs, positive_support, total


def make_f_oracle(inst: Instance) -> MConvexOracle:
    """f(x) = min over bikes of c(x - b, b): the SRA optimum as a function of x.

    Finite exactly on the xbar +- gamma box intersected with [ell, u] and the
    level x(N) = D + B.
    """
    return MConvexOracle(
        lower=inst.box_lower,
        upper=inst.box_upper,
        evaluate=lambda x: solve_sra(inst, x).value,
        level=inst.total,
        anchor=inst.xbar,
        name="f",
    ).cached()


def make_fhat_oracle(inst: Instance) -> MConvexOracle:
    """As make_f_oracle without the level constraint."""
    return MConvexOracle(
        lower=inst.box_lower,
        upper=inst.box_upper,
        evaluate=lambda x: solve_sra(inst, x).value,
        anchor=inst.xbar,
        name="f-hat",
    ).cached()


@dataclass(frozen=True)
class GreedyStep:
    k: int
    d: IntVector
    b: IntVector
    objective: ExtendedCost
    distance: int


@dataclass(frozen=True)
class DrSolution:
    allocation: Allocation
    objective: ExtendedCost
    iterations: int
    distance: int
    algorithm: str
    trace: Tuple[GreedyStep, ...] = ()
    details: Dict[str, object] = field(default_factory=dict)


def dr_solution(inst: Instance, alloc: Allocation, algorithm: str, iterations: int, **extra) -> DrSolution:
    return DrSolution(
        allocation=alloc,
        objective=allocation_cost(inst, alloc.d, alloc.b),
        iterations=iterations,
        distance=l1_distance(alloc.x, inst.xbar),
        algorithm=algorithm,
        **extra,
    )


def _step(k: int, state: SraState, xbar: IntVector) -> GreedyStep:
    return GreedyStep(k, state.d, tuple(state.b), state.value(), l1_distance(state.x, xbar))


# ---------------------------------------------------------------------------
# Greedy for (DR)
# ---------------------------------------------------------------------------


def solve_dr_greedy(inst: Instance, fast: bool = True) -> DrSolution:
    """At most gamma steepest dock moves from (dbar, bbar).

    Bikes are first made optimal for xbar. Every iteration then moves to the
    best (d, b) whose dock totals differ by one exchange x + chi_i - chi_j;
    fast mode reads the candidates from the marginal heaps, slow mode re-solves
    SRA for every exchange. Stops early once no move strictly improves.
    """
    problem = AllocationProblem.for_da(inst)
    start = bike_optimal_allocation(inst)
    if fast:
        state = SraState.create(problem, start.d, start.b)
        trace = [_step(0, state, inst.xbar)]
        for k in range(1, inst.gamma + 1):
            move = best_exchange(state)
            if move is None or not move.key < ZERO:
                break
            sra_incremental(problem, state, move.plus, move.minus, in_place=True)
            trace.append(_step(k, state, inst.xbar))
        alloc = state.allocation
    else:
        f = make_f_oracle(inst)
        x, b = inst.xbar, start.b
        current = f(x)
        trace = [GreedyStep(0, start.d, start.b, current, 0)]
        for k in range(1, inst.gamma + 1):
            best, best_x = current, None
            for i, j in ordered_pairs(range(inst.n)):
                y = exchange(x, i, j)
                value = f(y)
                if value < best:
                    best, best_x = value, y
            if best_x is None:
                break
            x, current = best_x, best
            b = solve_sra(inst, x).b
            trace.append(GreedyStep(k, tuple(xi - bi for xi, bi in zip(x, b)), b, current, l1_distance(x, inst.xbar)))
        alloc = Allocation(tuple(xi - bi for xi, bi in zip(x, b)), b)

    iterations = len(trace) - 1
    solver_logger.info(f"greedy ({'fast' if fast else 'slow'}): {iterations} of at most {inst.gamma} iterations")
    return dr_solution(inst, alloc, "greedy" if fast else "greedy-slow", iterations, trace=tuple(trace))


# ---------------------------------------------------------------------------
# (DA): steepest descent and proximity scaling
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DescentStats:
    rebalance_steps: int
    descent_steps: int
    trace: Tuple[GreedyStep, ...] = ()


def _descend_da(
    problem: AllocationProblem,
    alloc: Allocation,
    step: int,
    center: Optional[IntVector] = None,
    record: Optional[IntVector] = None,
) -> Tuple[Allocation, DescentStats]:
    """Re-optimize bikes at `step`, then make steepest moves at `step` until none improves."""
    if not problem.is_feasible(alloc.d, alloc.b):
        raise InfeasibleError("start allocation is not feasible for the (DA) problem")
    state = SraState.create(problem, alloc.d, alloc.b, step=step, center=center)
    rebalance_steps = rebalance_bikes(state)
    trace = [_step(0, state, record)] if record is not None else []
    descent_steps = 0
    while True:
        move = best_exchange(state)
        if move is None or not move.key < ZERO:
            break
        sra_incremental(problem, state, move.plus, move.minus, in_place=True)
        descent_steps += 1
        if record is not None:
            trace.append(_step(descent_steps, state, record))
    return state.allocation, DescentStats(rebalance_steps, descent_steps, tuple(trace))


def solve_da_steepest(inst: Instance, start: Optional[Allocation] = None, step: int = 1) -> Allocation:
    """A step-optimal allocation for (DA) reached from `start` by moves of +-step.

    At step 1 the result is optimal for (DA). Defaults to (dbar, bbar).

    Raises:
        InfeasibleError: If start violates the (DA) constraints
    """
    alloc, _ = _descend_da(AllocationProblem.for_da(inst), start or Allocation(inst.dbar, inst.bbar), step)
    return alloc


def da_descent_with_stats(inst: Instance, start: Allocation, step: int = 1) -> Tuple[Allocation, DescentStats]:
    return _descend_da(AllocationProblem.for_da(inst), start, step, record=inst.xbar)


@dataclass(frozen=True)
class ScalingSchedule:
    """Step sizes of the scaling phases with the work done in each."""

    lambdas: Tuple[int, ...]
    descent_steps: Tuple[int, ...] = ()
    rebalance_steps: Tuple[int, ...] = ()
    phase_allocations: Tuple[Allocation, ...] = ()

    @staticmethod
    def initial_step(total_docks: int, n: int) -> int:
        return max(1, total_docks // (4 * n))

    @classmethod
    def planned(cls, total_docks: int, n: int) -> "ScalingSchedule":
        lambdas = [cls.initial_step(total_docks, n)]
        while lambdas[-1] > 1:
            lambdas.append(lambdas[-1] // 2)
        return cls(tuple(lambdas))

    @property
    def phases(self) -> int:
        return len(self.lambdas)

    @property
    def step_counts(self) -> Tuple[int, ...]:
        return tuple(d + r for d, r in zip(self.descent_steps, self.rebalance_steps))


def scale_da(
    problem: AllocationProblem, start: Allocation, center: Optional[IntVector] = None
) -> Tuple[Allocation, ScalingSchedule]:
    """Proximity scaling on an allocation problem from a feasible start.

    Each phase re-optimizes bikes and descends at step lambda, anchored at the
    previous phase's result; lambda halves until the unit-step phase.
    """
    planned = ScalingSchedule.planned(problem.total, problem.n)
    alloc = start
    descent, rebalance, outputs = [], [], []
    for lam in planned.lambdas:
        alloc, stats = _descend_da(problem, alloc, lam, center)
        descent.append(stats.descent_steps)
        rebalance.append(stats.rebalance_steps)
        outputs.append(alloc)
        solver_logger.debug(
            f"scaling phase lambda={lam}: {stats.rebalance_steps} bike moves, {stats.descent_steps} dock moves"
        )
    schedule = ScalingSchedule(planned.lambdas, tuple(descent), tuple(rebalance), tuple(outputs))
    return alloc, schedule


def solve_da_scaling(inst: Instance) -> Tuple[Allocation, ScalingSchedule]:
    """Optimal (DA) allocation by proximity scaling from (dbar, bbar)."""
    alloc, schedule = scale_da(AllocationProblem.for_da(inst), Allocation(inst.dbar, inst.bbar))
    solver_logger.info(f"da-scaling: lambdas {list(schedule.lambdas)}, steps {list(schedule.step_counts)}")
    return alloc, schedule


def nearest_da_optimum(inst: Instance, alloc: Allocation) -> Allocation:
    """From a (DA) optimum, the optimum whose dock totals are nearest to xbar."""
    nearest, _ = _descend_da(AllocationProblem.for_da(inst), alloc, 1, center=inst.xbar)
    return nearest


# ---------------------------------------------------------------------------
# (DR) through the split (DR-L) and the bike budget search
# ---------------------------------------------------------------------------


class Side(str, Enum):
    A = "A"
    B = "B"
    FULL = "full"


@dataclass(frozen=True)
class DrlSplit:
    """Stations P whose dock totals grow towards x-bullet, and the reduced bounds.

    With `signed` bounds every station of P stays in [xbar, min(x-bullet,
    xbar + gamma)] and every other station in [max(x-bullet, xbar - gamma),
    xbar]; the unsigned variant keeps only the (DA) box.
    """

    P: Tuple[int, ...]
    ell_hat: IntVector
    u_hat: IntVector
    gamma: int
    signed: bool = True

    @property
    def rest(self) -> Tuple[int, ...]:
        return tuple(k for k in range(len(self.ell_hat)) if k not in self.P)

    def as_printed(self, inst: Instance) -> "DrlSplit":
        return DrlSplit(self.P, inst.box_lower, inst.box_upper, self.gamma, signed=False)


def build_split(inst: Instance, bullet: IntVector) -> DrlSplit:
    xbar, gamma = inst.xbar, inst.gamma
    P = positive_support(bullet, xbar)
    lower, upper = [], []
    for k in range(inst.n):
        if k in P:
            lower.append(xbar[k])
            upper.append(min(bullet[k], xbar[k] + gamma))
        else:
            lower.append(max(bullet[k], xbar[k] - gamma))
            upper.append(xbar[k])
    return DrlSplit(P, tuple(lower), tuple(upper), gamma)


def _side_problem(inst: Instance, split: Optional[DrlSplit], side: Side, alpha: int) -> AllocationProblem:
    problem = AllocationProblem.for_da(inst)
    if side is Side.FULL:
        return problem.with_budget(alpha)
    stations = split.P if side is Side.A else split.rest
    shift = split.gamma if side is Side.A else -split.gamma
    budget = alpha if side is Side.A else inst.B - alpha
    return problem.restrict(stations, split.ell_hat, split.u_hat, total(inst.xbar, stations) + shift, budget)


def _solve_side(inst: Instance, split: Optional[DrlSplit], side: Side, alpha: int) -> Tuple[ExtendedCost, Optional[Allocation]]:
    problem = _side_problem(inst, split, side, alpha)
    start = problem.initial_allocation()
    if start is None:
        return INFINITY, None
    alloc, _ = scale_da(problem, start)
    return problem.cost(alloc.d, alloc.b), alloc


def psi(inst: Instance, split: Optional[DrlSplit], side: Side, alpha: int) -> ExtendedCost:
    """Optimal value of one side of the split with bike budget alpha (B - alpha for side B).

    Side FULL is the whole (DA) problem with bike budget alpha.
    """
    if not 0 <= alpha <= inst.B:
        raise ValueError(f"alpha {alpha} outside [0, {inst.B}]")
    value, _ = _solve_side(inst, split, side, alpha)
    return value


def minimize_convex_sum(
    left: Callable[[int], ExtendedCost], right: Callable[[int], ExtendedCost], lo: int, hi: int
) -> Tuple[Optional[int], ExtendedCost, int]:
    """Minimize left + right over [lo, hi] for convex left nonincreasing, right nondecreasing.

    Returns (argmin, value, number of distinct probes); argmin is None when the
    sum is infinite everywhere.
    """
    left = functools.lru_cache(maxsize=None)(left)
    right = functools.lru_cache(maxsize=None)(right)

    # finite region of left is [a, hi], of right is [lo, b]
    a_lo, a_hi = lo, hi + 1
    while a_lo < a_hi:
        mid = (a_lo + a_hi) // 2
        if left(mid) != INFINITY:
            a_hi = mid
        else:
            a_lo = mid + 1
    b_lo, b_hi = lo - 1, hi
    while b_lo < b_hi:
        mid = (b_lo + b_hi + 1) // 2
        if right(mid) != INFINITY:
            b_lo = mid
        else:
            b_hi = mid - 1
    start, end = a_lo, b_lo
    if start > end:
        return None, INFINITY, left.cache_info().currsize + right.cache_info().currsize

    def value(alpha: int) -> ExtendedCost:
        return left(alpha) + right(alpha)

    while start < end:
        mid = (start + end) // 2
        if value(mid + 1) < value(mid):
            start = mid + 1
        else:
            end = mid
    probes = left.cache_info().currsize + right.cache_info().currsize
    return start, value(start), probes


def solve_drl(inst: Instance, split: DrlSplit) -> Tuple[Optional[Allocation], ExtendedCost, Optional[int]]:
    """Minimize psi_A + psi_B over the bike budget alpha of side A."""
    alpha, value, probes = minimize_convex_sum(
        lambda a: psi(inst, split, Side.A, a),
        lambda a: psi(inst, split, Side.B, a),
        0,
        inst.B,
    )
    solver_logger.debug(f"alpha search over [0, {inst.B}]: alpha={alpha}, {probes} probes")
    if alpha is None:
        return None, INFINITY, None

    d, b = [0] * inst.n, [0] * inst.n
    for side, budget in ((Side.A, alpha), (Side.B, alpha)):
        _, part = _solve_side(inst, split, side, budget)
        problem = _side_problem(inst, split, side, budget)
        for local, station in enumerate(problem.stations):
            d[station], b[station] = part.d[local], part.b[local]
    return Allocation(tuple(d), tuple(b)), value, alpha


def solve_dr_poly(inst: Instance, nearest: bool = True) -> DrSolution:
    """Optimal (DR) allocation through (DA) and the bike budget search.

    Args:
        inst: Valid instance
        nearest: Replace the (DA) optimum by the one nearest to xbar before
            building the split
    """
    alloc, schedule = solve_da_scaling(inst)
    if nearest:
        alloc = nearest_da_optimum(inst, alloc)
    distance = l1_distance(alloc.x, inst.xbar)
    if distance <= 2 * inst.gamma:
        return dr_solution(
            inst, alloc, "poly", sum(schedule.step_counts), details={"phases": schedule.phases, "split": False}
        )

    split = build_split(inst, alloc.x)
    drl_alloc, value, alpha = solve_drl(inst, split)
    if drl_alloc is None:
        raise InfeasibleError("split problem has no feasible bike budget")
    return dr_solution(
        inst,
        drl_alloc,
        "poly",
        sum(schedule.step_counts),
        details={"phases": schedule.phases, "split": True, "alpha": alpha, "P": list(split.P)},
    )
