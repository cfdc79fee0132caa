"""Guarded exhaustive enumeration of integer boxes."""

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from src.config import DRSOLVE_ENUM_GUARD
from src.core.errors import EnumerationLimitError
from src.utils.vectors import IntVector


@dataclass(frozen=True)
class EnumGuard:
    """Upper bound on the number of points an exhaustive routine may visit."""

    max_points: int = field(default_factory=lambda: DRSOLVE_ENUM_GUARD)

    def check(self, count: int, what: str) -> None:
        if count > self.max_points:
            raise EnumerationLimitError(what, count, self.max_points)


def box_volume(lower: Sequence[int], upper: Sequence[int]) -> int:
    return math.prod(max(0, hi - lo + 1) for lo, hi in zip(lower, upper))


def iter_box(
    lower: Sequence[int],
    upper: Sequence[int],
    guard: Optional[EnumGuard] = None,
    level: Optional[int] = None,
) -> Iterator[IntVector]:
    """Yield the integer points of [lower, upper] in lexicographic order.

    With `level`, only points whose coordinates sum to it are produced; the
    last coordinate is then implied by the others.
    """
    guard = guard or EnumGuard()
    n = len(lower)
    if level is None:
        guard.check(box_volume(lower, upper), "box")
        ranges = [range(lo, hi + 1) for lo, hi in zip(lower, upper)]
        yield from itertools.product(*ranges)
        return

    if n == 0:
        if level == 0:
            yield ()
        return
    guard.check(box_volume(lower[:-1], upper[:-1]), "level set")
    ranges = [range(lo, hi + 1) for lo, hi in zip(lower[:-1], upper[:-1])]
    for head in itertools.product(*ranges):
        last = level - sum(head)
        if lower[-1] <= last <= upper[-1]:
            yield head + (last,)
