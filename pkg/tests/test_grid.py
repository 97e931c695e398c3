from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from prodsys.errors import LevelTooCoarse, TotalMismatch
from prodsys.grid import (
    DyadicPartition,
    DyadicTime,
    all_partitions,
    as_time,
    cell_blocks,
    compositions,
    concat,
    finest,
    refines,
)

times = st.builds(DyadicTime, st.integers(1, 200), st.integers(0, 8))


@given(times)
def test_text_round_trip(t):
    assert DyadicTime.parse(str(t)) == t
    assert as_time(t.value) == t


def test_canonical_form():
    assert DyadicTime(4, 3) == DyadicTime(1, 1)
    assert str(DyadicTime(6, 3)) == "3/2^2"
    assert DyadicTime.parse("0.75") == DyadicTime(3, 2)


@given(times, times)
def test_addition_matches_fractions(a, b):
    assert (a + b).value == a.value + b.value
    assert (a < b) == (a.value < b.value)


def test_cells_and_level_errors():
    t = DyadicTime(3, 2)
    assert t.cells(4) == 12
    with pytest.raises(LevelTooCoarse):
        t.cells(1)
    with pytest.raises(ValueError):
        DyadicTime.parse("1/3")
    with pytest.raises(ValueError):
        DyadicTime(0, 1)


@given(st.integers(1, 10))
def test_composition_count(m):
    comps = list(compositions(m))
    assert len(comps) == 2 ** (m - 1)
    assert len(set(comps)) == len(comps)
    assert all(sum(c) == m for c in comps)


def test_refines_returns_blocks():
    coarse = DyadicPartition(["1/2^1", "1/2^1"])
    fine = DyadicPartition.from_cells((1, 1, 2), 2)
    blocks = refines(coarse, fine)
    assert [b.cells(2) for b in blocks] == [(1, 1), (2,)]
    assert refines(DyadicPartition.from_cells((1, 3), 2), DyadicPartition.from_cells((2, 2), 2)) is None
    with pytest.raises(TotalMismatch):
        refines(coarse, DyadicPartition(["1/2^1"]))


def test_cell_blocks_and_helpers():
    assert cell_blocks((2, 2), (1, 1, 1, 1)) == [(1, 1), (1, 1)]
    assert cell_blocks((1, 3), (2, 2)) is None
    p = DyadicPartition.from_cells((1, 2), 3)
    assert concat(p, p).total().value == Fraction(6, 8)
    assert DyadicPartition.from_json(p.to_json()) == p
    assert len(all_partitions("1/2^1", 2)) == 2
    assert finest(DyadicTime(1, 1), 3).cells(3) == (1, 1, 1, 1)
