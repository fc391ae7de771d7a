"""ETA corrections for changes in network hashrate.

Retargeting pins the long-run pace back to one interval per two weeks, so a
hashrate move mostly costs (or saves) time during the interval in which it
happens, before difficulty catches up. The rules here are first-order point
corrections to the expected time, negative meaning the halving comes
sooner. They deliberately leave the variance alone: a defensible variance
model for hashrate moves would need assumptions about their timing and
persistence that this library does not make.

Sign convention throughout: ``fraction`` is the relative rate change, so
+0.10 means hashrate rose 10 percent.
"""

from __future__ import annotations

import dataclasses
import math
import warnings

from .retarget import DEFAULT_PARAMS, RetargetParams

# Beyond this relative step the first-order rule visibly diverges from the
# exact mean shift, which scales with x/(1+x) rather than x.
STEP_LINEAR_LIMIT = 0.15


def step_shift_far(
    fraction: float, params: RetargetParams = DEFAULT_PARAMS
) -> float:
    """ETA shift in minutes for a one-off rate step well before the halving.

    A step of relative size x makes the interval it lands in run about x
    faster, worth -x * retarget_target minutes once difficulty resets. The
    rule is linear; outside |x| <= 0.15 it emits a warning and keeps going,
    since the exact effect grows like x/(1+x).
    """
    _check_fraction(fraction)
    if abs(fraction) > STEP_LINEAR_LIMIT:
        warnings.warn(
            f"step of {fraction:+.0%} is outside the linear range "
            f"(+/-{STEP_LINEAR_LIMIT:.0%}); the first-order shift "
            "overstates the true effect",
            stacklevel=2,
        )
    return -fraction * params.retarget_target_minutes


def gradual_shift(
    old_rate: float, new_rate: float, params: RetargetParams = DEFAULT_PARAMS
) -> float:
    """ETA shift in minutes for a smooth rate drift from old_rate to new_rate.

    Integrating the per-interval saving over a continuous drift turns the
    linear factor into a logarithm: -ln(new/old) * retarget_target. Growth
    by half (ratio 1.5) is worth about 0.405 of an interval, a bit over
    five and a half days sooner on Bitcoin.
    """
    if not old_rate > 0 or not new_rate > 0:
        raise ValueError("hash rates must be positive")
    return -math.log(new_rate / old_rate) * params.retarget_target_minutes


def step_shift_near(
    fraction: float,
    blocks_remaining: int,
    params: RetargetParams = DEFAULT_PARAMS,
) -> float:
    """ETA shift for a rate step with the halving inside the current interval.

    Difficulty will not reset again before the halving, so only the
    remaining blocks speed up: -x * blocks_remaining * block_target. With a
    full interval still to go this reproduces step_shift_far.
    """
    _check_fraction(fraction)
    if not 0 <= blocks_remaining <= params.interval_blocks:
        raise ValueError(
            "blocks_remaining must be within the current retarget interval"
        )
    return -fraction * blocks_remaining * params.block_target_minutes


def apply_shift(prediction, shift_minutes: float):
    """Translate a prediction's ETA and intervals by ``shift_minutes``.

    Works on any prediction record with ``eta_minutes`` and ``intervals``
    fields. The spread is untouched, so every interval endpoint moves by
    the same amount.
    """
    moved = tuple(
        dataclasses.replace(
            ci,
            lower_minutes=ci.lower_minutes + shift_minutes,
            upper_minutes=ci.upper_minutes + shift_minutes,
        )
        for ci in prediction.intervals
    )
    return dataclasses.replace(
        prediction,
        eta_minutes=prediction.eta_minutes + shift_minutes,
        intervals=moved,
    )


def _check_fraction(fraction: float) -> None:
    if fraction <= -1.0:
        raise ValueError("fraction must be above -1 (rate cannot go negative)")
