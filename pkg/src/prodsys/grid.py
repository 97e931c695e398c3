"""Dyadic times and ordered compositions of an interval on a fixed grid."""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import LevelTooCoarse, TotalMismatch


@dataclass(frozen=True, order=False)
class DyadicTime:
    """Positive dyadic rational ``numerator / 2**level`` in lowest terms."""

    numerator: int
    level: int = 0

    def __post_init__(self):
        n, lv = int(self.numerator), int(self.level)
        if n <= 0 or lv < 0:
            raise ValueError(f"dyadic time must be positive, got {n}/2^{lv}")
        while lv > 0 and n % 2 == 0:
            n //= 2
            lv -= 1
        object.__setattr__(self, "numerator", n)
        object.__setattr__(self, "level", lv)

    @classmethod
    def from_cells(cls, m: int, level: int) -> "DyadicTime":
        return cls(m, level)

    @classmethod
    def parse(cls, text: str) -> "DyadicTime":
        s = text.strip()
        m = re.fullmatch(r"(\d+)\s*/\s*2\^(\d+)", s)
        if m:
            return cls(int(m.group(1)), int(m.group(2)))
        f = Fraction(s)
        den = f.denominator
        lv = den.bit_length() - 1
        if den != 1 << lv:
            raise ValueError(f"{text!r} is not dyadic")
        return cls(f.numerator, lv)

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.level)

    def __float__(self):
        return self.numerator / (1 << self.level)

    def cells(self, level: int) -> int:
        """Number of grid cells of width 2**-level making up this time."""
        if level < self.level:
            raise LevelTooCoarse(f"{self} is not a multiple of 2^-{level}")
        return self.numerator << (level - self.level)

    def __add__(self, other: "DyadicTime") -> "DyadicTime":
        return _from_fraction(self.value + other.value)

    def __sub__(self, other: "DyadicTime") -> "DyadicTime":
        return _from_fraction(self.value - other.value)

    def __lt__(self, other):
        return self.value < other.value

    def __le__(self, other):
        return self.value <= other.value

    def __gt__(self, other):
        return self.value > other.value

    def __ge__(self, other):
        return self.value >= other.value

    def __str__(self):
        return f"{self.numerator}/2^{self.level}"

    def __repr__(self):
        return f"DyadicTime({self.numerator}/2^{self.level})"


def _from_fraction(f: Fraction) -> DyadicTime:
    den = f.denominator
    lv = den.bit_length() - 1
    if den != 1 << lv:
        raise ValueError("result is not dyadic")
    return DyadicTime(f.numerator, lv)


def as_time(t) -> DyadicTime:
    if isinstance(t, DyadicTime):
        return t
    if isinstance(t, str):
        return DyadicTime.parse(t)
    return _from_fraction(Fraction(t))


@dataclass(frozen=True)
class DyadicPartition:
    """Ordered composition of a dyadic time into positive dyadic durations."""

    durations: tuple

    def __init__(self, durations: Iterable):
        ds = tuple(as_time(d) for d in durations)
        if not ds:
            raise ValueError("a partition needs at least one duration")
        object.__setattr__(self, "durations", ds)

    @classmethod
    def from_cells(cls, cells: Sequence[int], level: int) -> "DyadicPartition":
        return cls(DyadicTime(c, level) for c in cells)

    def total(self) -> DyadicTime:
        return _from_fraction(sum((d.value for d in self.durations), Fraction(0)))

    def cells(self, level: int) -> tuple:
        return tuple(d.cells(level) for d in self.durations)

    def __len__(self):
        return len(self.durations)

    def __iter__(self):
        return iter(self.durations)

    def __str__(self):
        return "(" + ", ".join(str(d) for d in self.durations) + ")"

    def to_json(self) -> list:
        return [str(d) for d in self.durations]

    @classmethod
    def from_json(cls, items) -> "DyadicPartition":
        return cls(DyadicTime.parse(s) for s in items)


def concat(p: DyadicPartition, q: DyadicPartition) -> DyadicPartition:
    """Concatenate two partitions: durations of p followed by those of q."""
    return DyadicPartition(p.durations + q.durations)


def refines(coarse: DyadicPartition, fine: DyadicPartition):
    """Group ``fine`` into consecutive blocks summing to the durations of ``coarse``.

    Returns the list of blocks (each a DyadicPartition) when ``fine`` refines
    ``coarse`` and ``None`` otherwise.
    """
    if coarse.total() != fine.total():
        raise TotalMismatch(f"{coarse} and {fine} have different totals")
    blocks, cur, acc = [], [], Fraction(0)
    targets = iter(d.value for d in coarse.durations)
    target = next(targets)
    for d in fine.durations:
        cur.append(d)
        acc += d.value
        if acc == target:
            blocks.append(DyadicPartition(cur))
            cur, acc = [], Fraction(0)
            target = next(targets, None)
        elif acc > target:
            return None
    return blocks


def cell_blocks(coarse: Sequence[int], fine: Sequence[int]):
    """Integer version of :func:`refines` on cell counts."""
    if sum(coarse) != sum(fine):
        raise TotalMismatch(f"{tuple(coarse)} and {tuple(fine)} have different totals")
    blocks, cur, acc = [], [], 0
    it = iter(coarse)
    target = next(it)
    for f in fine:
        cur.append(f)
        acc += f
        if acc == target:
            blocks.append(tuple(cur))
            cur, acc = [], 0
            target = next(it, None)
        elif acc > target:
            return None
    return blocks


def compositions(m: int):
    """All ordered compositions of the integer m >= 1 (2**(m-1) of them)."""
    for cuts in itertools.product((False, True), repeat=m - 1):
        parts, run = [], 1
        for c in cuts:
            if c:
                parts.append(run)
                run = 1
            else:
                run += 1
        parts.append(run)
        yield tuple(parts)


def all_partitions(t, level: int) -> list[DyadicPartition]:
    """Every composition of t into positive multiples of 2**-level."""
    t = as_time(t)
    m = t.cells(level)
    return [DyadicPartition.from_cells(c, level) for c in compositions(m)]


def finest(t, level: int) -> DyadicPartition:
    t = as_time(t)
    return DyadicPartition.from_cells((1,) * t.cells(level), level)
