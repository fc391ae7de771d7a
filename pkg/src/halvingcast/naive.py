"""Constant-difficulty halving estimator.

When difficulty is held fixed and matched to the network hashrate, block
arrivals form a Poisson process and each block time is an independent
exponential draw with a 10 minute mean. The time to a halving N blocks out
is then a sum of N such draws: mean 10*N minutes and variance 100*N square
minutes, so the standard deviation is 10*sqrt(N), or equivalently
sqrt(10 * eta) when only the expected time is at hand.

For large N the total is close to normal and two-sided normal quantiles
give usable confidence intervals. The approximation degrades below roughly
N = 30; nothing here enforces that, the caller owns the judgement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist

from .units import BLOCK_TARGET_MINUTES

BLOCK_VARIANCE_MIN2 = BLOCK_TARGET_MINUTES ** 2

DEFAULT_LEVELS = (0.683, 0.955)

_STANDARD_NORMAL = NormalDist()


@dataclass(frozen=True)
class ConfidenceInterval:
    level: float
    lower_minutes: float
    upper_minutes: float


@dataclass(frozen=True)
class NaivePrediction:
    blocks_remaining: int
    eta_minutes: float
    variance_min2: float
    stddev_minutes: float
    intervals: tuple[ConfidenceInterval, ...]


def naive_eta(blocks_remaining: int) -> float:
    """Expected minutes until the halving, 10 per remaining block."""
    _check_blocks(blocks_remaining)
    return BLOCK_TARGET_MINUTES * blocks_remaining


def naive_variance(blocks_remaining: int) -> float:
    _check_blocks(blocks_remaining)
    return BLOCK_VARIANCE_MIN2 * blocks_remaining


def naive_stddev(blocks_remaining: int) -> float:
    """Standard deviation in minutes: 10 * sqrt(blocks remaining)."""
    return math.sqrt(naive_variance(blocks_remaining))


def naive_stddev_from_eta(eta_minutes: float) -> float:
    """Standard deviation recovered from the expected time alone.

    Substituting N = eta/10 into 10*sqrt(N) gives sqrt(10 * eta), handy when
    a forecast arrives as a duration rather than a block count.
    """
    if eta_minutes < 0:
        raise ValueError("eta_minutes must be non-negative")
    return math.sqrt(BLOCK_TARGET_MINUTES * eta_minutes)


def normal_quantile(level: float) -> float:
    """Two-sided standard normal quantile: the z with P(|Z| <= z) = level."""
    if not 0.0 < level < 1.0:
        raise ValueError("confidence level must be strictly between 0 and 1")
    return _STANDARD_NORMAL.inv_cdf((1.0 + level) / 2.0)


def confidence_interval(
    eta_minutes: float, stddev_minutes: float, level: float
) -> ConfidenceInterval:
    """Normal-approximation interval eta +/- z(level) * stddev, in minutes."""
    if stddev_minutes < 0:
        raise ValueError("stddev_minutes must be non-negative")
    half_width = normal_quantile(level) * stddev_minutes
    return ConfidenceInterval(level, eta_minutes - half_width, eta_minutes + half_width)


def predict(
    blocks_remaining: int, levels: tuple[float, ...] = DEFAULT_LEVELS
) -> NaivePrediction:
    """Full constant-difficulty prediction with intervals at each level."""
    eta = naive_eta(blocks_remaining)
    variance = naive_variance(blocks_remaining)
    stddev = math.sqrt(variance)
    intervals = tuple(confidence_interval(eta, stddev, lv) for lv in levels)
    return NaivePrediction(blocks_remaining, eta, variance, stddev, intervals)


def _check_blocks(blocks_remaining: int) -> None:
    if blocks_remaining < 0:
        raise ValueError("blocks_remaining must be non-negative")
