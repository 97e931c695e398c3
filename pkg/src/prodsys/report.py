"""Check records and reports emitted by every verification routine."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any


@dataclass
class Check:
    """One measured quantity compared with a tolerance.

    ``kind`` selects the comparison: ``"defect"`` passes when
    ``measured <= tolerance``, ``"lower"`` when ``measured >= tolerance``,
    ``"equal"`` when ``measured == expected`` exactly, and ``"flag"`` when
    ``measured`` is truthy.
    """

    name: str
    paper_ref: str
    measured: Any
    tolerance: Any = 0.0
    kind: str = "defect"
    expected: Any = None

    @property
    def passed(self) -> bool:
        m = self.measured
        if self.kind == "defect":
            return m is not None and not (isinstance(m, float) and math.isnan(m)) and m <= self.tolerance
        if self.kind == "lower":
            return m >= self.tolerance
        if self.kind == "equal":
            return m == self.expected
        if self.kind == "flag":
            return bool(m)
        raise ValueError(f"unknown check kind {self.kind!r}")

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "paper_ref": self.paper_ref,
            "passed": bool(self.passed),
            "measured": _jsonable(self.measured),
            "tolerance": _jsonable(self.tolerance if self.kind != "equal" else self.expected),
        }
        return d


def _jsonable(x):
    if isinstance(x, (bool, int, str)) or x is None:
        return x
    if isinstance(x, complex):
        return abs(x)
    try:
        return float(x)
    except (TypeError, ValueError):
        return str(x)


@dataclass
class Report:
    """A named list of checks plus free-form info."""

    name: str
    checks: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    def add(self, name, paper_ref, measured, tolerance=0.0, kind="defect", expected=None) -> Check:
        c = Check(name, paper_ref, measured, tolerance, kind, expected)
        self.checks.append(c)
        return c

    def extend(self, other: "Report", prefix: str = ""):
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.paper_ref, c.measured, c.tolerance, c.kind, c.expected))
        return self

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def measured(self, name):
        return self[name].measured

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "checks": [c.to_dict() for c in sorted(self.checks, key=lambda c: c.name)],
            "info": {k: _jsonable(v) if not isinstance(v, (list, dict)) else v for k, v in self.info.items()},
        }

    def summary(self) -> str:
        lines = [f"{self.name}: {'PASS' if self.passed else 'FAIL'}"]
        for c in sorted(self.checks, key=lambda c: c.name):
            lines.append(f"  [{'ok' if c.passed else 'FAIL'}] {c.name}: measured={_jsonable(c.measured)!r} tol={_jsonable(c.tolerance)!r}")
        return "\n".join(lines)
