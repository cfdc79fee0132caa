"""Command line entry point: solve, gen, check and bench."""

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional

from src.config import DRSOLVE_WORKERS, defaults
from src.core.errors import EnumerationLimitError, InfeasibleError, InstanceFormatError
from src.core.instance import Allocation, Instance, is_structurally_valid, validate_instance
from src.services.bench_service import run_benchmark, write_csv
from src.services.dock_service import (
    DrSolution,
    GreedyStep,
    da_descent_with_stats,
    dr_solution,
    make_f_oracle,
    solve_da_scaling,
    solve_dr_greedy,
    solve_dr_poly,
)
from src.services.mconvex_service import (
    reverse_steepest_descent_mml1,
    solve_mml1_via_g,
    steepest_descent_mml1,
)
from src.services.sra_service import solve_sra
from src.services.verify_service import brute_force_dr, check_theorem_suite, summarize_reports
from src.utils.generator import generate_corpus, generate_instance
from src.utils.logger import app_logger
from src.utils.persistence import SolutionFile, TraceRecord, load_instance, save_instance, save_solution
from src.utils.vectors import IntVector, subtract

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_INFEASIBLE = 2
EXIT_CHECK_FAILED = 3


def _from_dock_totals(inst: Instance, x: IntVector, algorithm: str, iterations: int = 0) -> DrSolution:
    b = solve_sra(inst, x).b
    return dr_solution(inst, Allocation(subtract(x, b), b), algorithm, iterations)


def run_algorithm(inst: Instance, algo: str) -> DrSolution:
    """Solve a validated instance with the named algorithm."""
    if algo == "greedy":
        return solve_dr_greedy(inst, fast=True)
    if algo == "greedy-slow":
        return solve_dr_greedy(inst, fast=False)
    if algo == "poly":
        return solve_dr_poly(inst)
    if algo == "da":
        alloc, stats = da_descent_with_stats(inst, Allocation(inst.dbar, inst.bbar))
        return dr_solution(inst, alloc, "da", stats.rebalance_steps + stats.descent_steps)
    if algo == "da-scaling":
        alloc, schedule = solve_da_scaling(inst)
        return dr_solution(inst, alloc, "da-scaling", sum(schedule.step_counts))
    if algo == "brute":
        result = brute_force_dr(inst)
        return dr_solution(inst, result.optima[0], "brute", iterations=0)

    f = make_f_oracle(inst)
    if algo == "mml1":
        x, trace = steepest_descent_mml1(f, inst.xbar, inst.gamma)
        return _from_dock_totals(inst, x, algo, len(trace))
    if algo == "reverse":
        return _from_dock_totals(inst, reverse_steepest_descent_mml1(f, inst.xbar, inst.gamma), algo)
    if algo == "g-reduction":
        return _from_dock_totals(inst, solve_mml1_via_g(f, inst.xbar, inst.gamma), algo)
    raise ValueError(f"unknown algorithm {algo!r}")


def _trace_records(trace: List[GreedyStep]) -> List[TraceRecord]:
    return [
        TraceRecord(k=s.k, d=list(s.d), b=list(s.b), objective=s.objective, distance=s.distance)
        for s in trace
    ]


def _load_valid(path: str) -> tuple:
    """(instance, exit code); the instance is None unless it is valid."""
    try:
        inst = load_instance(path)
    except InstanceFormatError as e:
        app_logger.error(f"Invalid instance file: {e}")
        return None, EXIT_INVALID
    violations = validate_instance(inst)
    for v in violations:
        app_logger.error(f"{path}: {v}")
    if not violations:
        return inst, EXIT_OK
    return None, EXIT_INFEASIBLE if is_structurally_valid(violations) else EXIT_INVALID


def cmd_solve(args) -> int:
    inst, code = _load_valid(args.input)
    if inst is None:
        return code
    try:
        solution = run_algorithm(inst, args.algo)
    except InfeasibleError as e:
        app_logger.error(f"Infeasible: {e}")
        return EXIT_INFEASIBLE
    except EnumerationLimitError as e:
        app_logger.error(f"Instance too large for {args.algo}: {e}")
        return EXIT_INVALID

    app_logger.info(
        f"{args.algo}: objective {solution.objective}, distance {solution.distance}, "
        f"{solution.iterations} iterations"
    )
    save_solution(
        SolutionFile(
            d=list(solution.allocation.d),
            b=list(solution.allocation.b),
            objective=solution.objective,
            iterations=solution.iterations,
            distance=solution.distance,
            algorithm=solution.algorithm,
            trace=_trace_records(solution.trace) if args.trace and solution.trace else None,
        ),
        args.output,
    )
    return EXIT_OK


def cmd_gen(args) -> int:
    inst = generate_instance(args.n, args.umax, args.seed, kind=args.kind, gamma=args.gamma)
    violations = validate_instance(inst)
    if violations:
        for v in violations:
            app_logger.error(f"generated instance is invalid: {v}")
        return EXIT_INVALID
    save_instance(inst, args.output)
    app_logger.info(f"Wrote {args.kind} instance n={args.n} seed={args.seed} to {args.output}")
    return EXIT_OK


def _parse_suite(raw: str) -> List[str]:
    if raw == "all":
        return list(defaults.theorem_checks)
    names = [name.strip() for name in raw.split(",") if name.strip()]
    unknown = [name for name in names if name not in defaults.theorem_checks]
    if unknown:
        raise argparse.ArgumentTypeError(f"unknown checks: {', '.join(unknown)}")
    return names


def _check_job(job: tuple):
    inst, checks, seed, label = job
    return check_theorem_suite(inst, checks, seed=seed, label=label)


def cmd_check(args) -> int:
    if args.input:
        inst, code = _load_valid(args.input)
        if inst is None:
            return code
        jobs = [(inst, args.suite, args.seed, args.input)]
    else:
        corpus = generate_corpus(args.random, args.seed, umax=args.umax)
        jobs = [(inst, args.suite, args.seed + k, f"seed={args.seed + k}") for k, inst in enumerate(corpus)]

    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            reports = list(pool.map(_check_job, jobs))
    else:
        reports = [_check_job(job) for job in jobs]

    for report in reports:
        for line in report.format_lines():
            print(line)
    summary = summarize_reports(reports)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as f:
            json.dump(summary, f, indent=2)
            f.write("\n")
    failed = summary["instances"] - summary["passed"]
    if failed:
        app_logger.error(f"{failed} of {summary['instances']} instances failed a check")
        return EXIT_CHECK_FAILED
    app_logger.info(f"All checks passed on {summary['instances']} instances")
    return EXIT_OK


def cmd_bench(args) -> int:
    rows = run_benchmark(args.family, args.n, args.capacity, args.seed, args.instances, args.workers)
    write_csv(rows, args.csv)
    app_logger.info(f"Wrote {len(rows)} {args.family} rows to {args.csv}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="drsolve", description="Dock re-allocation solvers")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="Solve an instance file")
    solve.add_argument("--input", required=True)
    solve.add_argument("--algo", choices=defaults.algorithms, default="greedy")
    solve.add_argument("--trace", action="store_true", help="Include the per-iteration trace")
    solve.add_argument("--output", help="Solution file (default: stdout)")
    solve.set_defaults(func=cmd_solve)

    gen = sub.add_parser("gen", help="Generate a random valid instance")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--umax", type=int, required=True)
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--kind", choices=("quad", "table"), default="quad")
    gen.add_argument("--gamma", type=int)
    gen.add_argument("--output", required=True)
    gen.set_defaults(func=cmd_gen)

    check = sub.add_parser("check", help="Run the theorem checks")
    source = check.add_mutually_exclusive_group(required=True)
    source.add_argument("--input")
    source.add_argument("--random", type=int, metavar="N")
    check.add_argument("--seed", type=int, default=0)
    check.add_argument("--umax", type=int, default=4)
    check.add_argument("--suite", type=_parse_suite, default=list(defaults.theorem_checks))
    check.add_argument("--json", help="Write a JSON summary here")
    check.add_argument("--workers", type=int, default=DRSOLVE_WORKERS)
    check.set_defaults(func=cmd_check)

    bench = sub.add_parser("bench", help="Benchmark the solvers")
    bench.add_argument("--family", choices=("scaling", "greedy"), required=True)
    bench.add_argument("--n", type=int, required=True)
    bench.add_argument("--capacity", type=int, required=True)
    bench.add_argument("--seed", type=int, required=True)
    bench.add_argument("--instances", type=int, default=1)
    bench.add_argument("--csv", required=True)
    bench.add_argument("--workers", type=int, default=DRSOLVE_WORKERS)
    bench.set_defaults(func=cmd_bench)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
