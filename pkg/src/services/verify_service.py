"""Brute-force oracles and the theorem-check suite.

The `brute_force_*` functions use nothing but station-cost evaluation; they
are the reference every solver is compared against. `check_theorem_suite`
runs the structural checks (exchange axioms, optimal-value profiles, greedy
trajectories, proximity, convexity in the bike budget, solver agreement) on
one instance.
"""

import itertools
import random
from dataclasses import asdict, dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from src.config.defaults import theorem_checks
from src.core.costs import INFINITY, ExtendedCost, check_multimodular, check_multimodular_consequences, eval_station_cost
from src.core.errors import DrsolveError
from src.core.instance import Allocation, Instance, allocation_cost
from src.services.allocation_problem import AllocationProblem
from src.services.dock_service import (
    Side,
    build_split,
    da_descent_with_stats,
    make_f_oracle,
    make_fhat_oracle,
    minimize_convex_sum,
    nearest_da_optimum,
    psi,
    solve_da_scaling,
    solve_da_steepest,
    solve_dr_greedy,
    solve_dr_poly,
    solve_drl,
)
from src.services.mconvex_service import (
    check_m_exc,
    check_mnat_exc,
    mu_profile,
    oracle_from_station_cost,
    reverse_steepest_descent_mml1,
    solve_mml1_via_g,
    steepest_descent,
    steepest_descent_mml1,
)
from src.services.sra_service import (
    SraState,
    bike_optimal_allocation,
    in_update_neighborhood,
    solve_sra,
    sra_incremental,
)
from src.utils.enumeration import EnumGuard, iter_box
from src.utils.logger import solver_logger
from src.utils.vectors import IntVector, as_vector, l1_distance, subtract

__all__ = [
    "BruteForceResult",
    "CheckResult",
    "EnumGuard",
    "TheoremReport",
    "brute_force_da",
    "brute_force_dr",
    "brute_force_sra",
    "check_lambda_optimal",
    "check_theorem_suite",
]


@dataclass(frozen=True)
class BruteForceResult:
    objective: ExtendedCost
    optima: Tuple[Allocation, ...]


def _station_tables(inst: Instance) -> List[Dict[Tuple[int, int], ExtendedCost]]:
    return [
        {(d, b): eval_station_cost(c, d, b) for d in range(cap + 1) for b in range(cap + 1 - d)}
        for c, cap in zip(inst.costs, inst.u)
    ]


def _enumerate(inst: Instance, guard: Optional[EnumGuard], radius: Optional[int]) -> BruteForceResult:
    guard = guard or EnumGuard()
    tables = _station_tables(inst)
    best, optima, visited = INFINITY, [], 0
    for x in iter_box(inst.box_lower, inst.box_upper, guard, level=inst.total):
        if radius is not None and l1_distance(x, inst.xbar) > radius:
            continue
        count = 1
        for v in x:
            count *= v + 1
        visited += count
        guard.check(visited, "allocations")
        for b in itertools.product(*(range(v + 1) for v in x)):
            if sum(b) > inst.B:
                continue
            value = sum(tables[i][(v - bi, bi)] for i, (v, bi) in enumerate(zip(x, b)))
            if value < best:
                best, optima = value, [Allocation(subtract(x, b), b)]
            elif value == best:
                optima.append(Allocation(subtract(x, b), b))
    return BruteForceResult(best, tuple(optima))


def brute_force_dr(inst: Instance, guard: Optional[EnumGuard] = None) -> BruteForceResult:
    """Exact (DR) optimum and all optimal allocations by full enumeration of (d, b)."""
    return _enumerate(inst, guard, 2 * inst.gamma)


def brute_force_da(inst: Instance, guard: Optional[EnumGuard] = None) -> BruteForceResult:
    """As brute_force_dr without the L1 ball."""
    return _enumerate(inst, guard, None)


def brute_force_sra(inst: Instance, x: Sequence[int], guard: Optional[EnumGuard] = None) -> Tuple[IntVector, ExtendedCost]:
    """Lexicographically smallest optimal b for dock totals x, by enumeration."""
    guard = guard or EnumGuard()
    x = as_vector(x)
    best, best_b = INFINITY, None
    for b in iter_box((0,) * len(x), x, guard):
        if sum(b) > inst.B:
            continue
        value = allocation_cost(inst, subtract(x, b), b)
        if value < best:
            best, best_b = value, b
    return best_b, best


def check_lambda_optimal(inst: Instance, alloc: Allocation, step: int) -> Optional[Allocation]:
    """Return a cheaper (DA)-feasible allocation differing by 0 or +-step per entry, if any."""
    problem = AllocationProblem.for_da(inst)
    base = problem.cost(alloc.d, alloc.b)
    moves = (-step, 0, step)
    for delta in itertools.product(moves, repeat=2 * inst.n):
        d = tuple(v + s for v, s in zip(alloc.d, delta[: inst.n]))
        b = tuple(v + s for v, s in zip(alloc.b, delta[inst.n :]))
        if problem.is_feasible(d, b) and problem.cost(d, b) < base:
            return Allocation(d, b)
    return None


# ---------------------------------------------------------------------------
# Theorem suite
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    witness: Optional[str] = None


@dataclass
class TheoremReport:
    label: str
    results: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failures(self) -> List[CheckResult]:
        return [r for r in self.results if not r.passed]

    def result(self, name: str) -> CheckResult:
        return next(r for r in self.results if r.name == name)

    def to_dict(self) -> dict:
        return {"label": self.label, "passed": self.passed, "results": [asdict(r) for r in self.results]}

    def format_lines(self) -> List[str]:
        lines = []
        for r in self.results:
            status = "ok  " if r.passed else "FAIL"
            line = f"{self.label} {status} {r.name}"
            if r.detail:
                line += f": {r.detail}"
            if r.witness:
                line += f" [witness {r.witness}]"
            lines.append(line)
        return lines


def _check_multimodular(inst: Instance, guard: EnumGuard) -> CheckResult:
    for i, (c, cap) in enumerate(zip(inst.costs, inst.u)):
        report = check_multimodular(c, cap, cap)
        if not report:
            return CheckResult(
                "multimodular", False, f"station {i}, inequality {report.inequality}", str(report.point)
            )
        if not check_multimodular_consequences(c, cap, cap):
            return CheckResult("multimodular", False, f"station {i}: derived exchange inequality fails")
        if not check_mnat_exc(oracle_from_station_cost(c, cap, cap), guard):
            return CheckResult("multimodular", False, f"station {i}: multimodular but not M-natural-convex")
    return CheckResult("multimodular", True)


def _check_exchange(name: str, report) -> CheckResult:
    if report:
        return CheckResult(name, True, f"{report.pairs_checked} pairs")
    return CheckResult(name, False, f"no exchange for i={report.i}", f"x={report.x} y={report.y}")


def _check_trajectory(inst: Instance, profile) -> CheckResult:
    solution = solve_dr_greedy(inst, fast=True)
    limit = min(inst.gamma, profile.tau)
    if solution.iterations != limit:
        return CheckResult("trajectory", False, f"{solution.iterations} iterations, expected {limit}")
    for step in solution.trace:
        if step.objective != profile.value(step.k) or step.distance != 2 * step.k:
            return CheckResult(
                "trajectory",
                False,
                f"iteration {step.k}: value {step.objective} at distance {step.distance}, "
                f"expected {profile.value(step.k)} at {2 * step.k}",
            )
    return CheckResult("trajectory", True, f"{limit} iterations")


def _check_sra_update(inst: Instance, rng: random.Random, samples: int, guard: EnumGuard) -> CheckResult:
    problem = AllocationProblem.for_sra(inst)
    points = list(iter_box(inst.ell, inst.u, guard, level=inst.total))
    tried = 0
    for _ in range(samples):
        x = rng.choice(points)
        i, j = rng.sample(range(inst.n), 2)
        if x[i] + 1 > inst.u[i] or x[j] - 1 < inst.ell[j]:
            continue
        tried += 1
        start = solve_sra(inst, x)
        state = SraState.create(problem, subtract(x, start.b), start.b)
        after = sra_incremental(inst, state, i, j)
        moved = subtract(after.b, start.b)
        _, expected = brute_force_sra(inst, after.x, guard)
        if after.value() != expected or not in_update_neighborhood(moved, i, j):
            return CheckResult("sra-update", False, f"move {j}->{i} from {x}", f"b={start.b} -> {tuple(after.b)}")
    return CheckResult("sra-update", True, f"{tried} moves")


def _check_proximity(inst: Instance, da_optima: Sequence[Allocation]) -> CheckResult:
    start = Allocation(inst.dbar, inst.bbar)
    outputs = [(lam, solve_da_steepest(inst, start, lam)) for lam in (2, 4)]
    _, schedule = solve_da_scaling(inst)
    outputs += list(zip(schedule.lambdas, schedule.phase_allocations))
    for lam, alloc in outputs:
        better = check_lambda_optimal(inst, alloc, lam)
        if better is not None:
            return CheckResult("proximity", False, f"step {lam} result not step-optimal", str(better))
        gap = min(l1_distance(opt.x, alloc.x) for opt in da_optima)
        if gap > 8 * lam * inst.n:
            return CheckResult("proximity", False, f"step {lam}: nearest optimum at {gap} > {8 * lam * inst.n}")
    return CheckResult("proximity", True, f"{len(outputs)} step-optimal allocations")


def _is_convex(values: Sequence[ExtendedCost]) -> bool:
    finite = [v for v in values if v != INFINITY]
    return all(a + c >= 2 * b for a, b, c in zip(finite, finite[1:], finite[2:]))


def _check_psi(inst: Instance) -> CheckResult:
    alphas = range(inst.B + 1)
    full = [psi(inst, None, Side.FULL, a) for a in alphas]
    if not _is_convex(full) or any(b > a for a, b in zip(full, full[1:])):
        return CheckResult("psi-convex", False, "full problem not convex nonincreasing in the bike budget")
    alloc, _ = solve_da_scaling(inst)
    alloc = nearest_da_optimum(inst, alloc)
    if l1_distance(alloc.x, inst.xbar) <= 2 * inst.gamma:
        return CheckResult("psi-convex", True, "nearest (DA) optimum inside the ball")
    split = build_split(inst, alloc.x)
    side_a = [psi(inst, split, Side.A, a) for a in alphas]
    side_b = [psi(inst, split, Side.B, a) for a in alphas]
    if not (_is_convex(side_a) and _is_convex(side_b)):
        return CheckResult("psi-convex", False, "side values not convex", f"A={side_a} B={side_b}")
    if any(b > a for a, b in zip(side_a, side_a[1:])) or any(b < a for a, b in zip(side_b, side_b[1:])):
        return CheckResult("psi-convex", False, "side values not monotone", f"A={side_a} B={side_b}")
    grid = min(a + b for a, b in zip(side_a, side_b))
    _, searched, _ = minimize_convex_sum(
        lambda a: side_a[a], lambda a: side_b[a], 0, inst.B
    )
    if searched != grid:
        return CheckResult("psi-convex", False, f"search found {searched}, sweep {grid}")
    _, printed, _ = solve_drl(inst, split.as_printed(inst))
    detail = f"P={list(split.P)}"
    if printed != grid:
        solver_logger.info(f"{inst_label(inst)}: unsigned split gives {printed}, signed {grid}")
        detail += f", unsigned split {printed}"
    return CheckResult("psi-convex", True, detail)


def _check_equivalence(inst: Instance, brute: BruteForceResult, da_brute: BruteForceResult) -> CheckResult:
    values = {
        "greedy": solve_dr_greedy(inst, fast=True).objective,
        "greedy-slow": solve_dr_greedy(inst, fast=False).objective,
        "poly": solve_dr_poly(inst).objective,
        "poly-any-da": solve_dr_poly(inst, nearest=False).objective,
    }
    f = make_f_oracle(inst)
    x_forward, _ = steepest_descent_mml1(f, inst.xbar, inst.gamma)
    values["mml1"] = f(x_forward)
    values["reverse"] = f(reverse_steepest_descent_mml1(f, inst.xbar, inst.gamma))
    values["g-reduction"] = f(solve_mml1_via_g(f, inst.xbar, inst.gamma))
    wrong = {name: v for name, v in values.items() if v != brute.objective}

    da_values = {
        "da": _cost(inst, solve_da_steepest(inst)),
        "da-scaling": _cost(inst, solve_da_scaling(inst)[0]),
    }
    wrong.update({name: v for name, v in da_values.items() if v != da_brute.objective})
    if wrong:
        return CheckResult(
            "equivalence", False, f"brute force {brute.objective} / {da_brute.objective}", str(wrong)
        )
    return CheckResult("equivalence", True, f"objective {brute.objective}")


def _cost(inst: Instance, alloc: Allocation) -> ExtendedCost:
    return allocation_cost(inst, alloc.d, alloc.b)


def inst_label(inst: Instance) -> str:
    return f"n={inst.n} D={inst.D} B={inst.B} gamma={inst.gamma}"


def check_theorem_suite(
    inst: Instance,
    checks: Optional[Iterable[str]] = None,
    guard: Optional[EnumGuard] = None,
    seed: int = 0,
    label: Optional[str] = None,
    samples: int = 20,
) -> TheoremReport:
    """Run the named checks (all by default) on one instance.

    A check that raises is reported as failed with the error message; the
    remaining checks still run.
    """
    guard = guard or EnumGuard()
    wanted = list(checks) if checks is not None else list(theorem_checks)
    unknown = [c for c in wanted if c not in theorem_checks]
    if unknown:
        raise ValueError(f"unknown checks: {', '.join(unknown)}")

    report = TheoremReport(label or inst_label(inst))
    cache: Dict[str, object] = {}

    def profile():
        if "profile" not in cache:
            cache["profile"] = mu_profile(make_f_oracle(inst), inst.xbar, guard)
        return cache["profile"]

    def brute(kind: str) -> BruteForceResult:
        if kind not in cache:
            cache[kind] = brute_force_dr(inst, guard) if kind == "dr" else brute_force_da(inst, guard)
        return cache[kind]

    def run(name: str) -> CheckResult:
        if name == "multimodular":
            return _check_multimodular(inst, guard)
        if name == "m-exc":
            return _check_exchange(name, check_m_exc(make_f_oracle(inst), guard))
        if name == "mnat-exc":
            return _check_exchange(name, check_mnat_exc(make_fhat_oracle(inst), guard))
        if name == "mu-monotone":
            p = profile()
            return CheckResult(name, p.is_strictly_decreasing(), f"mu={list(p.mu)}")
        if name == "mu-convex":
            p = profile()
            return CheckResult(name, p.is_convex(), f"mu={list(p.mu)}")
        if name == "trajectory":
            return _check_trajectory(inst, profile())
        if name == "exact-tau":
            _, trace = steepest_descent(make_f_oracle(inst), inst.xbar)
            tau = profile().tau
            return CheckResult(name, len(trace) == tau, f"{len(trace)} moves, tau={tau}")
        if name == "sra-update":
            return _check_sra_update(inst, random.Random(seed), samples, guard)
        if name == "da-steps":
            _, stats = da_descent_with_stats(inst, bike_optimal_allocation(inst), 1)
            nu = min(l1_distance(opt.x, inst.xbar) for opt in brute("da").optima)
            return CheckResult(name, stats.descent_steps * 2 == nu, f"{stats.descent_steps} moves, nu={nu}")
        if name == "proximity":
            return _check_proximity(inst, brute("da").optima)
        if name == "psi-convex":
            return _check_psi(inst)
        if name == "equivalence":
            return _check_equivalence(inst, brute("dr"), brute("da"))
        raise ValueError(name)

    for name in wanted:
        try:
            result = run(name)
        except DrsolveError as e:
            result = CheckResult(name, False, f"{type(e).__name__}: {e}")
        report.results.append(result)
    return report

def summarize_reports(reports: Sequence[TheoremReport]) -> dict:
    counts: Dict[str, Dict[str, int]] = {}
    for report in reports:
        for r in report.results:
            bucket = counts.setdefault(r.name, {"passed": 0, "failed": 0})
            bucket["passed" if r.passed else "failed"] += 1
    return {
        "instances": len(reports),
        "passed": sum(1 for r in reports if r.passed),
        "checks": counts,
        "failures": [r.to_dict() for r in reports if not r.passed],
    }

