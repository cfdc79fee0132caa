"""Exception hierarchy shared by the solvers, the verifiers and the CLI."""

from dataclasses import dataclass
from typing import List, Optional

from src.config import ConfigError


class DrsolveError(Exception):
    """Base class for every error raised by drsolve."""


class CostOverflowError(DrsolveError, ArithmeticError):
    """A cost or a sum of costs left the signed 64-bit range."""


class InfeasibleError(DrsolveError):
    """A solver was asked to work from a point or set that cannot be feasible."""


class EnumerationLimitError(DrsolveError):
    """An exhaustive enumeration would visit more points than its guard allows."""

    def __init__(self, what: str, count: int, limit: int):
        super().__init__(f"{what}: {count} points exceed the enumeration guard of {limit}")
        self.what = what
        self.count = count
        self.limit = limit


class InstanceFormatError(DrsolveError):
    """Malformed instance or solution file."""

    def __init__(self, path: str, problems: List[str]):
        super().__init__(f"{path}: " + "; ".join(problems))
        self.path = path
        self.problems = problems


@dataclass(frozen=True)
class Violation:
    """One failed validation rule."""

    code: str
    field: str
    index: Optional[int]
    message: str

    def __str__(self) -> str:
        where = self.field if self.index is None else f"{self.field}[{self.index}]"
        return f"{self.code} at {where}: {self.message}"


class ValidationError(DrsolveError):
    def __init__(self, violations: List[Violation]):
        super().__init__("; ".join(str(v) for v in violations))
        self.violations = violations


__all__ = [
    "ConfigError",
    "CostOverflowError",
    "DrsolveError",
    "EnumerationLimitError",
    "InfeasibleError",
    "InstanceFormatError",
    "ValidationError",
    "Violation",
]
