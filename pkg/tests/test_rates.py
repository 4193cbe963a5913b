import json
from decimal import Decimal
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from editlens.exceptions import InvalidTable
from editlens.rates import RateBand, RateBandTable, band_for, default_table, weighted_wordcount


@pytest.fixture
def table():
    return default_table()


@pytest.mark.parametrize(
    "sim, mult",
    [
        (1, "0.1"),
        (Fraction(1), "0.1"),
        (Fraction(99, 100), "0.3"),
        (Fraction(95, 100), "0.3"),
        (Fraction(949, 1000), "0.6"),
        (Fraction(85, 100), "0.6"),
        (Fraction(84, 100), "1.0"),
        (0, "1.0"),
    ],
)
def test_band_lookup(table, sim, mult):
    assert band_for(sim, table)[1] == Decimal(mult)


def test_band_bound_is_inclusive_for_exact_inputs(table):
    assert band_for(Decimal("0.95"), table)[1] == Decimal("0.3")
    assert band_for(Fraction(17, 20), table)[1] == Decimal("0.6")


@pytest.mark.parametrize(
    "segments, expected",
    [
        ([], Decimal(0)),
        ([(10, 1)], Decimal("1.0")),
        ([(10, Fraction(9, 10)), (10, Fraction(1, 2))], Decimal("16.0")),
    ],
)
def test_weighted_wordcount(table, segments, expected):
    got = weighted_wordcount(segments, table)
    assert isinstance(got, Decimal)
    assert got == expected


def test_no_float_drift(table):
    # 0.1 summed as floats drifts; Decimal arithmetic does not.
    got = weighted_wordcount([(1, 1)] * 1000, table)
    assert got == Decimal("100.0")
    assert sum([0.1] * 1000) != 100.0


@pytest.mark.parametrize(
    "bands",
    [
        [],
        [{"min_similarity": "0.5", "multiplier": "1"}],
        [{"min_similarity": "0.5", "multiplier": "1"}, {"min_similarity": "0.7", "multiplier": "1"}, {"min_similarity": "0", "multiplier": "1"}],
        [{"min_similarity": "1.5", "multiplier": "1"}, {"min_similarity": "0", "multiplier": "1"}],
        [{"min_similarity": "0", "multiplier": "2"}],
        [{"min_similarity": "abc", "multiplier": "1"}],
        [{"multiplier": "1"}],
    ],
)
def test_invalid_tables(bands):
    with pytest.raises(InvalidTable):
        RateBandTable.from_dict({"bands": bands})


def test_invalid_json():
    with pytest.raises(InvalidTable):
        RateBandTable.from_json("{nope")


def test_round_trip(table):
    assert RateBandTable.from_json(json.dumps(table.to_dict())) == table


def test_non_monotone_tables_are_allowed():
    t = RateBandTable((RateBand(Decimal("0.5"), Decimal("0.2")), RateBand(Decimal("0"), Decimal("0.1"))))
    assert band_for(Fraction(1, 4), t)[1] == Decimal("0.1")


def test_out_of_range_similarity(table):
    with pytest.raises(ValueError):
        band_for(Fraction(3, 2), table)


@given(st.fractions(min_value=0, max_value=1))
def test_totality(sim):
    table = default_table()
    band, _ = band_for(sim, table)
    matching = [b for b in table.bands if sim >= b.lower_bound]
    assert band == matching[0]


@given(st.lists(st.tuples(st.integers(0, 50), st.fractions(min_value=0, max_value=1)), min_size=1, max_size=6), st.data())
def test_monotone_wordcount_for_non_increasing_tables(segments, data):
    table = default_table()
    i = data.draw(st.integers(0, len(segments) - 1))
    count, sim = segments[i]
    higher = data.draw(st.fractions(min_value=sim, max_value=1))
    bumped = segments[:i] + [(count, higher)] + segments[i + 1 :]
    assert weighted_wordcount(bumped, table) <= weighted_wordcount(segments, table)
