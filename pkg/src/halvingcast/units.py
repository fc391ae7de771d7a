"""Time units and UTC calendar arithmetic.

All model math in this package runs in real-valued minutes; conversion to
display units happens only at the presentation edge. The month and year
constants are the fixed civil values 43830 and 526000 minutes (30.4375 days
and roughly 365.28 days), not calendar-aware durations.
"""

from __future__ import annotations

from datetime import datetime, timedelta, timezone

BLOCK_TARGET_MINUTES = 10.0

MINUTES_PER_UNIT: dict[str, float] = {
    "minute": 1.0,
    "hour": 60.0,
    "day": 1440.0,
    "week": 10080.0,
    "month": 43830.0,
    "year": 526000.0,
}

_MIXED_PARTS = (("day", 1440), ("hr", 60), ("min", 1))


def to_unit(minutes: float, unit: str) -> float:
    """Convert a duration in minutes to ``unit`` (see MINUTES_PER_UNIT)."""
    return minutes / _unit_minutes(unit)


def from_unit(value: float, unit: str) -> float:
    """Convert a duration expressed in ``unit`` to minutes."""
    return value * _unit_minutes(unit)


def _unit_minutes(unit: str) -> float:
    try:
        return MINUTES_PER_UNIT[unit]
    except KeyError:
        known = ", ".join(sorted(MINUTES_PER_UNIT))
        raise ValueError(f"unknown unit {unit!r}; expected one of: {known}") from None


def as_utc(instant: datetime) -> datetime:
    """Return ``instant`` as an aware UTC datetime.

    Naive datetimes are taken to already be UTC; aware ones are converted.
    """
    if instant.tzinfo is None:
        return instant.replace(tzinfo=timezone.utc)
    return instant.astimezone(timezone.utc)


def add_minutes(instant: datetime, minutes: float) -> datetime:
    """Shift ``instant`` by a signed number of minutes, calendar-correct, in UTC."""
    return as_utc(instant) + timedelta(minutes=minutes)


def from_unix_seconds(seconds: int | float) -> datetime:
    return datetime.fromtimestamp(seconds, tz=timezone.utc)


def parse_timestamp(text: str) -> datetime:
    """Parse an ISO 8601 timestamp (a trailing ``Z`` is accepted) to aware UTC.

    A bare date or a date with minute resolution both work; naive inputs are
    interpreted as UTC.
    """
    cleaned = text.strip()
    if cleaned.endswith(("Z", "z")):
        cleaned = cleaned[:-1] + "+00:00"
    try:
        parsed = datetime.fromisoformat(cleaned)
    except ValueError:
        raise ValueError(f"could not parse timestamp {text!r} as ISO 8601") from None
    return as_utc(parsed)


def round_to_minute(instant: datetime) -> datetime:
    """Round an aware datetime to the nearest whole minute (half rounds up)."""
    instant = as_utc(instant)
    base = instant.replace(second=0, microsecond=0)
    if instant.second * 1_000_000 + instant.microsecond >= 30_000_000:
        base += timedelta(minutes=1)
    return base


def format_timestamp(instant: datetime) -> str:
    """Render an instant as ``YYYY-MM-DD HH:MM`` in UTC, minute resolution."""
    return round_to_minute(instant).strftime("%Y-%m-%d %H:%M")


def format_timestamp_iso(instant: datetime) -> str:
    """Render an instant as ISO 8601 with a ``Z`` suffix, minute resolution."""
    return round_to_minute(instant).strftime("%Y-%m-%dT%H:%MZ")


def format_mixed(minutes: float) -> str:
    """Render a duration as mixed day/hr/min parts, e.g. ``38day+40min``.

    The duration is rounded to a whole number of minutes first; zero-valued
    parts are omitted, and an exact zero renders as ``0min``. Negative
    durations get a single leading sign.
    """
    total = round(minutes)
    sign = "-" if total < 0 else ""
    total = abs(total)
    parts = []
    for label, size in _MIXED_PARTS:
        count, total = divmod(total, size)
        if count:
            parts.append(f"{count}{label}")
    if not parts:
        return "0min"
    return sign + "+".join(parts)
