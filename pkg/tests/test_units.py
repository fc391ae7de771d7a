from datetime import datetime, timedelta, timezone

import pytest
from hypothesis import given
from hypothesis import strategies as st

from halvingcast import units


def test_conversion_constants():
    assert units.MINUTES_PER_UNIT["hour"] == 60
    assert units.MINUTES_PER_UNIT["day"] == 1440
    assert units.MINUTES_PER_UNIT["week"] == 10080
    assert units.MINUTES_PER_UNIT["month"] == 43830
    assert units.MINUTES_PER_UNIT["year"] == 526000


def test_to_unit_examples():
    assert units.to_unit(57600, "day") == 40
    assert units.to_unit(10080, "week") == 1
    assert units.to_unit(20160, "week") == 2
    assert units.to_unit(54760, "day") == pytest.approx(38.0277, abs=1e-3)


def test_from_unit_examples():
    assert units.from_unit(2, "week") == 20160
    assert units.from_unit(1.5, "hour") == 90


def test_unknown_unit_rejected():
    with pytest.raises(ValueError, match="unknown unit"):
        units.to_unit(10, "fortnight")
    with pytest.raises(ValueError, match="unknown unit"):
        units.from_unit(10, "")


@given(
    st.floats(min_value=-1e9, max_value=1e9, allow_nan=False),
    st.sampled_from(sorted(units.MINUTES_PER_UNIT)),
)
def test_round_trip_through_unit(minutes, unit):
    back = units.from_unit(units.to_unit(minutes, unit), unit)
    assert back == pytest.approx(minutes, rel=1e-12, abs=1e-9)


def test_add_minutes_worked_dates():
    start = datetime(2016, 6, 2, 23, 50, tzinfo=timezone.utc)
    assert units.add_minutes(start, 54760) == datetime(
        2016, 7, 11, 0, 30, tzinfo=timezone.utc
    )
    assert units.add_minutes(start, 54760 - 740) == datetime(
        2016, 7, 10, 12, 10, tzinfo=timezone.utc
    )
    assert units.add_minutes(start, 54760 + 740) == datetime(
        2016, 7, 11, 12, 50, tzinfo=timezone.utc
    )


def test_add_minutes_accepts_naive_input_as_utc():
    start = datetime(2016, 6, 2, 23, 50)
    shifted = units.add_minutes(start, 10)
    assert shifted.tzinfo == timezone.utc
    assert shifted.hour == 0 and shifted.minute == 0


@given(
    st.floats(min_value=-1e6, max_value=1e6, allow_nan=False),
    st.floats(min_value=-1e6, max_value=1e6, allow_nan=False),
)
def test_add_minutes_composes(a, b):
    start = datetime(2020, 1, 1, tzinfo=timezone.utc)
    one_hop = units.add_minutes(start, a + b)
    two_hops = units.add_minutes(units.add_minutes(start, a), b)
    assert abs(one_hop - two_hops) <= timedelta(microseconds=2)


def test_parse_timestamp_variants():
    expected = datetime(2016, 7, 11, 1, 0, tzinfo=timezone.utc)
    assert units.parse_timestamp("2016-07-11T01:00Z") == expected
    assert units.parse_timestamp("2016-07-11 01:00") == expected
    assert units.parse_timestamp("2016-07-11T01:00:00+00:00") == expected
    # offsets normalize to UTC
    assert units.parse_timestamp("2016-07-11T03:00+02:00") == expected


def test_parse_timestamp_rejects_garbage():
    with pytest.raises(ValueError, match="ISO 8601"):
        units.parse_timestamp("July 11th")


def test_format_timestamp_minute_resolution():
    instant = datetime(2016, 7, 5, 8, 45, 49, tzinfo=timezone.utc)
    assert units.format_timestamp(instant) == "2016-07-05 08:46"
    assert units.format_timestamp_iso(instant) == "2016-07-05T08:46Z"
    early = datetime(2016, 7, 5, 8, 45, 29, tzinfo=timezone.utc)
    assert units.format_timestamp(early) == "2016-07-05 08:45"


def test_format_mixed():
    assert units.format_mixed(54760) == "38day+40min"
    assert units.format_mixed(740) == "12hr+20min"
    assert units.format_mixed(8174) == "5day+16hr+14min"
    assert units.format_mixed(0) == "0min"
    assert units.format_mixed(0.4) == "0min"
    assert units.format_mixed(-90) == "-1hr+30min"
    assert units.format_mixed(1440) == "1day"


@given(st.integers(min_value=0, max_value=10_000_000))
def test_format_mixed_parts_recompose(total):
    text = units.format_mixed(total)
    minutes = 0
    for part in text.split("+"):
        for label, size in (("day", 1440), ("hr", 60), ("min", 1)):
            if part.endswith(label):
                minutes += int(part[: -len(label)]) * size
                break
        else:
            pytest.fail(f"unparseable part {part!r} in {text!r}")
    assert minutes == total
