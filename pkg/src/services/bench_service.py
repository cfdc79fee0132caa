"""Benchmark runs for the scaling and greedy solvers, written as CSV rows."""

import csv
import math
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, Iterable, List

from src.config import defaults
from src.core.instance import allocation_cost
from src.services.dock_service import ScalingSchedule, solve_da_scaling, solve_dr_greedy
from src.utils.generator import generate_instance, generate_large_instance
from src.utils.logger import app_logger


def phase_bound(lambda1: int) -> int:
    """Number of scaling phases: ceil(log2 lambda1) + 1."""
    return math.ceil(math.log2(lambda1)) + 1 if lambda1 > 1 else 1


def step_bound(n: int) -> int:
    """Unit steps per phase after the first: 8n descent moves plus n bike moves."""
    return 9 * n


def run_scaling(n: int, capacity: int, seed: int) -> Dict[str, object]:
    inst = generate_large_instance(n, capacity, seed)
    started = time.perf_counter()
    alloc, schedule = solve_da_scaling(inst)
    seconds = time.perf_counter() - started
    lambda1 = ScalingSchedule.initial_step(inst.total, inst.n)
    return {
        "family": "scaling",
        "seed": seed,
        "n": n,
        "total": inst.total,
        "gamma": inst.gamma,
        "lambda1": lambda1,
        "phases": schedule.phases,
        "max_descent_steps_after_first": max(schedule.descent_steps[1:], default=0),
        "max_rebalance_steps_after_first": max(schedule.rebalance_steps[1:], default=0),
        "phase_bound": phase_bound(lambda1),
        "step_bound": step_bound(n),
        "iterations": sum(schedule.step_counts),
        "objective": allocation_cost(inst, alloc.d, alloc.b),
        "seconds": round(seconds, 4),
    }


def run_greedy(n: int, capacity: int, seed: int) -> Dict[str, object]:
    inst = generate_instance(n, capacity, seed)
    started = time.perf_counter()
    solution = solve_dr_greedy(inst, fast=True)
    seconds = time.perf_counter() - started
    return {
        "family": "greedy",
        "seed": seed,
        "n": n,
        "total": inst.total,
        "gamma": inst.gamma,
        "lambda1": "",
        "phases": "",
        "max_descent_steps_after_first": "",
        "max_rebalance_steps_after_first": "",
        "phase_bound": "",
        "step_bound": inst.gamma,
        "iterations": solution.iterations,
        "objective": solution.objective,
        "seconds": round(seconds, 4),
    }


RUNNERS = {"scaling": run_scaling, "greedy": run_greedy}


def _run(job: tuple) -> Dict[str, object]:
    family, n, capacity, seed = job
    return RUNNERS[family](n, capacity, seed)


def run_benchmark(family: str, n: int, capacity: int, seed: int, instances: int = 1, workers: int = 1) -> List[Dict[str, object]]:
    """One row per instance (seeds seed, seed + 1, ...), in seed order."""
    if family not in RUNNERS:
        raise ValueError(f"unknown benchmark family {family!r}")
    jobs = [(family, n, capacity, seed + k) for k in range(instances)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run, jobs))
    else:
        rows = [_run(job) for job in jobs]
    for row in rows:
        app_logger.info(
            f"bench {family} seed={row['seed']}: {row['iterations']} steps in {row['seconds']}s"
        )
    return rows


def write_csv(rows: Iterable[Dict[str, object]], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=list(defaults.bench_columns))
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
