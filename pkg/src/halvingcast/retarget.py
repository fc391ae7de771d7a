"""Difficulty-retarget-aware halving estimator.

Proof-of-work difficulty is reset every ``interval_blocks`` blocks (2016 on
Bitcoin) so that an interval is expected to take ``retarget_target_minutes``
(two weeks). Within one interval the block rate is constant, so the
interval's normalized duration, actual time over expected time, is an
Erlang(k, k) variable r with mean 1. The reset rule divides the target time
by the observed time, which couples consecutive intervals: a fast interval
raises difficulty and stretches the one after it. Writing R for the interval
target in minutes, interval i+1 lasts (r_{i+1} / r_i) * R, and a final
partial interval of M blocks lasts (r_n / r_{n-1}) * M * b minutes with
r_n ~ Erlang(M, M) and b the per-block target.

Two consequences shape everything here. First, expected block time under
retargeting is not the nominal target but k/(k-1) times it, a small upward
drift from the reciprocal of an Erlang ratio (2016/2015 on Bitcoin). Second,
adjacent intervals are negatively correlated, and the time-to-halving
variance has interval, final-interval, and covariance contributions.

Covariance conventions
----------------------
Two closed forms for the adjacent-pair covariance coefficient circulate:

* ``CovarianceMode.DERIVED``: -k/(k-1)**2, with the final mixed pair scaled
  by the partial-interval length M. This follows from the Erlang ratio
  moments and agrees with simulation; it is the default.
* ``CovarianceMode.PRINTED``: -k/(k+1)**2, with an M-independent final
  mixed pair. This reproduces widely quoted headline figures (for example
  1100 square minutes of added variance per interval at k=2016) and is kept
  so those numbers can be recomputed, but simulation rejects it.

The Monte Carlo suite distinguishes the two conventions at many standard
errors; see halvingcast.simulate.adjudicate_covariance_mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from . import naive
from .schedule import next_halving_height
from .units import BLOCK_TARGET_MINUTES

DEFAULT_INTERVAL_BLOCKS = 2016

# Constant numerator of the closed-form variance shortcut below; equals
# k*(2k-1)*(k+1)/(k-1) rounded to the nearest thousand at k=2016.
_SIMPLIFIED_INTERVAL_COEFF = 8_133_000.0


class CovarianceMode(str, Enum):
    """Which adjacent-interval covariance convention variance math uses."""

    DERIVED = "derived"
    PRINTED = "printed"


DEFAULT_COVARIANCE_MODE = CovarianceMode.DERIVED


@dataclass(frozen=True)
class RetargetParams:
    """Retarget window size and per-block target time.

    ``interval_blocks`` of 2 is accepted so the drift factor stays defined
    at its lower bound, but the variance and moment machinery needs at
    least 3 (second inverse moments of Erlang(k, k) diverge below that)
    and raises otherwise.
    """

    interval_blocks: int = DEFAULT_INTERVAL_BLOCKS
    block_target_minutes: float = BLOCK_TARGET_MINUTES

    def __post_init__(self) -> None:
        if self.interval_blocks < 2:
            raise ValueError("interval_blocks must be at least 2")
        if not self.block_target_minutes > 0:
            raise ValueError("block_target_minutes must be positive")

    @property
    def retarget_target_minutes(self) -> float:
        """Nominal duration of one full interval (20160 min on Bitcoin)."""
        return self.interval_blocks * self.block_target_minutes


DEFAULT_PARAMS = RetargetParams()


@dataclass(frozen=True)
class RetargetPosition:
    """Where the next halving sits relative to the retarget grid.

    ``intervals_remaining`` counts retarget intervals from the current one
    through the one containing the halving, so it is at least 1.
    ``final_interval_blocks`` is how many blocks into that last interval
    the halving lands (1..interval_blocks).
    """

    intervals_remaining: int
    final_interval_blocks: int

    def __post_init__(self) -> None:
        if self.intervals_remaining < 1:
            raise ValueError("intervals_remaining must be at least 1")
        if self.final_interval_blocks < 1:
            raise ValueError("final_interval_blocks must be at least 1")


@dataclass(frozen=True)
class ErlangMoments:
    """Closed-form moments of an Erlang(shape, shape) normalized duration."""

    mean: float
    second: float
    variance: float
    mean_inverse: float
    second_inverse: float


@dataclass(frozen=True)
class RetargetPrediction:
    blocks_remaining: int
    position: RetargetPosition
    eta_minutes: float
    variance_min2: float
    stddev_minutes: float
    intervals: tuple[naive.ConfidenceInterval, ...]
    covariance_mode: CovarianceMode


def schedule_drift_factor(params: RetargetParams = DEFAULT_PARAMS) -> float:
    """Mean block-time inflation caused by retargeting: k/(k-1).

    The reset law divides by the previous interval's duration, and the mean
    of that reciprocal is k/(k-1), not 1, so every expected time under
    retargeting sits this factor above the nominal schedule.
    """
    k = params.interval_blocks
    return k / (k - 1.0)


def erlang_moments(shape: int, rate: float | None = None) -> ErlangMoments:
    """Moments of Erlang(shape, rate); rate defaults to shape (mean 1).

    Requires shape >= 3 so the second inverse moment exists. The closed
    forms (at rate == shape) are mean 1, second moment (k+1)/k, variance
    1/k, mean inverse k/(k-1), and second inverse k**2/((k-1)(k-2)).
    """
    k = shape
    if k < 3:
        raise ValueError("shape must be at least 3 for inverse moments to exist")
    if rate is None:
        rate = float(k)
    if not rate > 0:
        raise ValueError("rate must be positive")
    scale = k / rate  # rescale from the normalized (rate == shape) forms
    return ErlangMoments(
        mean=1.0 * scale,
        second=(k + 1.0) / k * scale**2,
        variance=1.0 / k * scale**2,
        mean_inverse=k / (k - 1.0) / scale,
        second_inverse=k**2 / ((k - 1.0) * (k - 2.0)) / scale**2,
    )


def adjacent_covariance_coefficient(
    interval_blocks: int, mode: CovarianceMode = DEFAULT_COVARIANCE_MODE
) -> float:
    """Cov(t_i/R, t_{i+1}/R) for consecutive full intervals.

    Consecutive normalized durations r_i/r_{i-1} and r_{i+1}/r_i share the
    ratio r_i, once plain and once inverted, so their product telescopes to
    r_{i+1}/r_{i-1} with mean k/(k-1) while each factor alone also has mean
    k/(k-1). DERIVED mode returns that difference,
    k/(k-1) - (k/(k-1))**2 = -k/(k-1)**2; PRINTED mode returns the
    alternative -k/(k+1)**2 convention.
    """
    k = interval_blocks
    if k < 2:
        raise ValueError("interval_blocks must be at least 2")
    if mode is CovarianceMode.PRINTED:
        return -k / (k + 1.0) ** 2
    return -k / (k - 1.0) ** 2


def retarget_eta(
    position: RetargetPosition, params: RetargetParams = DEFAULT_PARAMS
) -> float:
    """Expected minutes to the halving from the start of the current interval.

    Each of the n-1 full intervals contributes drift * R and the final
    partial one drift * M * b, so the total is the naive ETA of the same
    block count inflated by the drift factor k/(k-1).
    """
    _check_variance_ready(params)
    k = params.interval_blocks
    _check_position(position, k)
    n = position.intervals_remaining
    m_final = position.final_interval_blocks
    nominal = (n - 1) * params.retarget_target_minutes
    nominal += m_final * params.block_target_minutes
    return schedule_drift_factor(params) * nominal


def retarget_variance(
    position: RetargetPosition,
    params: RetargetParams = DEFAULT_PARAMS,
    mode: CovarianceMode = DEFAULT_COVARIANCE_MODE,
) -> float:
    """Variance in square minutes of the time to the halving.

    Sums three pieces: per full interval, the variance of a ratio of two
    independent Erlang(k, k) draws; for the final partial interval, the
    variance of (r_n / r_{n-1}) * M * b with r_n ~ Erlang(M, M); and the
    adjacent-pair covariances, two per shared ratio. With a single interval
    remaining there are no shared ratios, so both covariance sums vanish.
    """
    _check_variance_ready(params)
    k = params.interval_blocks
    _check_position(position, k)
    n = position.intervals_remaining
    m_final = position.final_interval_blocks
    target = params.retarget_target_minutes
    block = params.block_target_minutes

    denom = (k - 2.0) * (k - 1.0) ** 2
    full_term = target**2 * k * (2.0 * k - 1.0) * (n - 1) / denom
    final_term = block**2 * m_final * k**2 * (k + m_final - 1.0) / denom

    coeff = adjacent_covariance_coefficient(k, mode)
    full_pairs = 2.0 * target**2 * max(n - 2, 0) * coeff
    if n >= 2:
        if mode is CovarianceMode.PRINTED:
            mixed_pair = 2.0 * target * block * coeff
        else:
            mixed_pair = 2.0 * target * m_final * block * coeff
    else:
        mixed_pair = 0.0
    return full_term + final_term + full_pairs + mixed_pair


def retarget_stddev(
    position: RetargetPosition,
    params: RetargetParams = DEFAULT_PARAMS,
    mode: CovarianceMode = DEFAULT_COVARIANCE_MODE,
) -> float:
    return math.sqrt(retarget_variance(position, params, mode))


def marginal_variance_per_interval(
    params: RetargetParams = DEFAULT_PARAMS,
    mode: CovarianceMode = DEFAULT_COVARIANCE_MODE,
) -> float:
    """Variance added by one more full interval, once n is past 2.

    In DERIVED mode this is the interval variance plus two adjacent-pair
    covariances, R**2 * 3k / ((k-2)(k-1)**2), about 301 square minutes at
    k=2016. PRINTED mode gives R**2 * k(11k**2 - 10k + 3) /
    ((k-2)(k**2-1)**2) instead, about 1100 at k=2016, the commonly quoted
    figure. Either way the retarget process adds far less uncertainty per
    interval than constant difficulty does over the same 2016 blocks.
    """
    _check_variance_ready(params)
    k = params.interval_blocks
    target2 = params.retarget_target_minutes ** 2
    if mode is CovarianceMode.PRINTED:
        numer = k * (11.0 * k**2 - 10.0 * k + 3.0)
        return target2 * numer / ((k - 2.0) * (k**2 - 1.0) ** 2)
    return target2 * 3.0 * k / ((k - 2.0) * (k - 1.0) ** 2)


def simplified_variance(
    final_interval_blocks: int, params: RetargetParams = DEFAULT_PARAMS
) -> float:
    """Large-k variance shortcut b**2 * (M + M**2/k + 8133000/k).

    The first two terms approximate the final partial interval, the third
    folds the whole chain of full-interval and covariance contributions
    into one constant calibrated at k=2016. At M=672, k=2016 this gives
    about 493000 square minutes, a standard deviation near 702 minutes.
    """
    _check_variance_ready(params)
    k = params.interval_blocks
    m_final = final_interval_blocks
    if not 1 <= m_final <= k:
        raise ValueError("final_interval_blocks must be in 1..interval_blocks")
    block2 = params.block_target_minutes ** 2
    return block2 * (m_final + m_final**2 / k + _SIMPLIFIED_INTERVAL_COEFF / k)


def position_from_heights(
    current_height: int,
    halving_height: int | None = None,
    params: RetargetParams = DEFAULT_PARAMS,
) -> RetargetPosition:
    """Locate the next halving on the retarget grid seen from a tip height.

    ``halving_height`` defaults to the next subsidy halving above the tip.
    When the halving lands exactly on a retarget boundary the final
    interval is full: M normalizes to interval_blocks rather than 0, with
    one fewer interval remaining.
    """
    k = params.interval_blocks
    if current_height < 0:
        raise ValueError("current_height must be non-negative")
    if halving_height is None:
        halving_height = next_halving_height(current_height)
    if halving_height <= current_height:
        raise ValueError("halving_height must be above current_height")
    final_start = (halving_height - 1) // k * k
    m_final = halving_height - final_start
    current_start = current_height // k * k
    intervals = (final_start - current_start) // k + 1
    return RetargetPosition(intervals, m_final)


def elapsed_in_interval(height: int, params: RetargetParams = DEFAULT_PARAMS) -> int:
    """Blocks already mined inside the retarget interval containing ``height``."""
    if height < 0:
        raise ValueError("height must be non-negative")
    return height % params.interval_blocks


def predict_from_height(
    current_height: int,
    halving_height: int | None = None,
    params: RetargetParams = DEFAULT_PARAMS,
    mode: CovarianceMode = DEFAULT_COVARIANCE_MODE,
    levels: tuple[float, ...] = naive.DEFAULT_LEVELS,
) -> RetargetPrediction:
    """Retarget-aware prediction for a halving seen from a chain tip.

    The expected time is exact for any tip: by memorylessness each of the
    N remaining blocks costs drift * b expected minutes regardless of where
    the interval boundaries fall. The variance is exact when the tip sits
    on a retarget boundary. Off-boundary tips are approximated: with the
    halving inside the current interval the remaining N blocks are treated
    as the final partial interval, and otherwise the boundary-start formula
    for the tip's grid position is used unchanged. The approximation is
    worst for tips deep inside their interval, where the already-elapsed
    blocks would slightly shrink the first interval's contribution.
    """
    _check_variance_ready(params)
    if halving_height is None:
        halving_height = next_halving_height(current_height)
    position = position_from_heights(current_height, halving_height, params)
    blocks_remaining = halving_height - current_height
    eta = (
        schedule_drift_factor(params)
        * blocks_remaining
        * params.block_target_minutes
    )
    if position.intervals_remaining == 1:
        variance = _final_interval_variance(blocks_remaining, params)
    else:
        variance = retarget_variance(position, params, mode)
    stddev = math.sqrt(variance)
    intervals = tuple(
        naive.confidence_interval(eta, stddev, level) for level in levels
    )
    return RetargetPrediction(
        blocks_remaining=blocks_remaining,
        position=position,
        eta_minutes=eta,
        variance_min2=variance,
        stddev_minutes=stddev,
        intervals=intervals,
        covariance_mode=mode,
    )


def _final_interval_variance(blocks: int, params: RetargetParams) -> float:
    # Variance of (Erlang(M, M) / Erlang(k, k)) * M * b for M remaining blocks.
    k = params.interval_blocks
    block = params.block_target_minutes
    denom = (k - 2.0) * (k - 1.0) ** 2
    return block**2 * blocks * k**2 * (k + blocks - 1.0) / denom


def _check_position(position: RetargetPosition, interval_blocks: int) -> None:
    if position.final_interval_blocks > interval_blocks:
        raise ValueError(
            "final_interval_blocks exceeds the retarget interval "
            f"({position.final_interval_blocks} > {interval_blocks})"
        )


def _check_variance_ready(params: RetargetParams) -> None:
    if params.interval_blocks < 3:
        raise ValueError(
            "interval_blocks must be at least 3 for moment formulas; "
            "2 only supports the drift factor"
        )
