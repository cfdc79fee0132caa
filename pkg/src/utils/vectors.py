"""Integer vector helpers; vectors are plain tuples of ints."""

from typing import Iterable, Iterator, Optional, Sequence, Tuple

IntVector = Tuple[int, ...]


def as_vector(values: Iterable[int]) -> IntVector:
    return tuple(int(v) for v in values)


def total(x: Sequence[int], subset: Optional[Iterable[int]] = None) -> int:
    """x(N), or x(S) for a subset S of indices."""
    if subset is None:
        return sum(x)
    return sum(x[i] for i in subset)


def l1_distance(x: Sequence[int], y: Sequence[int]) -> int:
    return sum(abs(a - b) for a, b in zip(x, y))


def add(x: Sequence[int], y: Sequence[int]) -> IntVector:
    return tuple(a + b for a, b in zip(x, y))


def subtract(x: Sequence[int], y: Sequence[int]) -> IntVector:
    return tuple(a - b for a, b in zip(x, y))


def exchange(x: Sequence[int], i: Optional[int], j: Optional[int], step: int = 1) -> IntVector:
    """x + step*chi_i - step*chi_j; None stands for the zero vector chi_0."""
    y = list(x)
    if i is not None:
        y[i] += step
    if j is not None:
        y[j] -= step
    return tuple(y)


def positive_support(x: Sequence[int], y: Sequence[int]) -> IntVector:
    """Indices where x exceeds y, i.e. supp+(x - y)."""
    return tuple(k for k, (a, b) in enumerate(zip(x, y)) if a > b)


def negative_support(x: Sequence[int], y: Sequence[int]) -> IntVector:
    """Indices where x is below y, i.e. supp-(x - y)."""
    return tuple(k for k, (a, b) in enumerate(zip(x, y)) if a < b)


def within(x: Sequence[int], lower: Sequence[int], upper: Sequence[int]) -> bool:
    return all(lo <= v <= hi for v, lo, hi in zip(x, lower, upper))


def box_excess(x: Sequence[int], lower: Sequence[int], upper: Sequence[int]) -> int:
    """L1 distance from x to the box [lower, upper]."""
    return sum(max(0, lo - v, v - hi) for v, lo, hi in zip(x, lower, upper))


def ordered_pairs(indices: Sequence[int]) -> Iterator[Tuple[int, int]]:
    """All (i, j) with i != j, in lexicographic order."""
    for i in indices:
        for j in indices:
            if i != j:
                yield i, j


def fill_to_total(lower: Sequence[int], upper: Sequence[int], target: int) -> Optional[IntVector]:
    """Smallest-index-first point of the box with coordinate sum `target`."""
    if not sum(lower) <= target <= sum(upper):
        return None
    x = list(lower)
    rest = target - sum(lower)
    for k, hi in enumerate(upper):
        room = min(rest, hi - x[k])
        x[k] += room
        rest -= room
    return tuple(x)
