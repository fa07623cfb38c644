"""Structured pass/fail records shared by every checker."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class Witness:
    input: str
    expected: Any
    got: Any

    def to_json(self) -> dict:
        return {"input": self.input, "expected": _jsonable(self.expected), "got": _jsonable(self.got)}


@dataclass
class CheckReport:
    """Outcome of one check.

    ``passed`` is derived from ``residual <= tolerance``; exact checks use
    ``tolerance = 0`` and report ``residual = 0`` on success.  Extra
    structured information (counts, flags) lives in ``details``.
    """

    name: str
    residual: float = 0.0
    tolerance: float = 0.0
    witnesses: list[Witness] = field(default_factory=list)
    details: dict = field(default_factory=dict)
    passed: bool | None = None

    def __post_init__(self):
        if self.passed is None:
            self.passed = self.residual <= self.tolerance

    def fail(self, input: str, expected, got, residual: float = 1.0):
        """Record a violation; keeps ``passed`` consistent with ``residual``."""
        self.witnesses.append(Witness(input, expected, got))
        self.residual = max(self.residual, residual)
        self.passed = self.residual <= self.tolerance

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "residual": _jsonable(self.residual),
            "tolerance": _jsonable(self.tolerance),
            "witnesses": [w.to_json() for w in self.witnesses],
            "details": _jsonable(self.details),
        }

    def __str__(self):
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: residual={self.residual:.3g} tol={self.tolerance:.3g}"


def _jsonable(x):
    from fractions import Fraction

    from .scalars import QSqrt2

    if isinstance(x, float):
        if x != x or x in (float("inf"), float("-inf")):
            return repr(x)
        return x
    if isinstance(x, (bool, int, str)) or x is None:
        return x
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, QSqrt2):
        return x.to_json()
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return str(x)
