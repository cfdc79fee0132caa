"""Static defaults for instance generation, benchmarks and solver names."""

# Random instance generator (small corpora that stay enumerable)
station_count_choices = (2, 3, 4)
capacity_range = (2, 6)
coefficient_range = (0, 5)
gamma_range = (0, 4)

# Large synthetic instances used by the scaling benchmark
large_station_count = 50
large_totals = (10_000, 100_000, 1_000_000)

# Algorithms accepted by `solve --algo`
algorithms = (
    "greedy",
    "greedy-slow",
    "poly",
    "da",
    "da-scaling",
    "brute",
    "mml1",
    "reverse",
    "g-reduction",
)

# Theorem checks accepted by `check --suite`
theorem_checks = (
    "multimodular",
    "m-exc",
    "mnat-exc",
    "mu-monotone",
    "mu-convex",
    "trajectory",
    "exact-tau",
    "sra-update",
    "da-steps",
    "proximity",
    "psi-convex",
    "equivalence",
)

# Column order of `bench --csv`
bench_columns = (
    "family",
    "seed",
    "n",
    "total",
    "gamma",
    "lambda1",
    "phases",
    "max_descent_steps_after_first",
    "max_rebalance_steps_after_first",
    "phase_bound",
    "step_bound",
    "iterations",
    "objective",
    "seconds",
)
