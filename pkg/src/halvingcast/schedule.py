"""Block subsidy schedule: halving heights, rewards, and the supply cap.

The subsidy model here is the idealized geometric one (real-valued BTC,
no satoshi truncation), which is what the timing estimators need.
"""

from __future__ import annotations

HALVING_INTERVAL_BLOCKS = 210_000
INITIAL_SUBSIDY_BTC = 50.0


def subsidy_epoch(height: int) -> int:
    """Zero-based halving epoch containing ``height``."""
    if height < 0:
        raise ValueError("height must be non-negative")
    return height // HALVING_INTERVAL_BLOCKS


def block_subsidy(height: int) -> float:
    """Reward in BTC for the block at ``height``: 50 halved once per epoch."""
    return INITIAL_SUBSIDY_BTC * 0.5 ** subsidy_epoch(height)


def next_halving_height(height: int) -> int:
    """First height strictly above ``height`` where the subsidy halves."""
    return (subsidy_epoch(height) + 1) * HALVING_INTERVAL_BLOCKS


def blocks_to_next_halving(height: int) -> int:
    return next_halving_height(height) - height


def supply_cap_btc() -> float:
    """Total BTC ever issued under the idealized schedule.

    The geometric series 210000 * 50 * sum(2**-e) telescopes to exactly
    twice the first epoch's issuance.
    """
    return 2.0 * HALVING_INTERVAL_BLOCKS * INITIAL_SUBSIDY_BTC


def cumulative_supply_btc(epochs: int) -> float:
    """BTC issued by the first ``epochs`` complete epochs (closed form)."""
    if epochs < 0:
        raise ValueError("epochs must be non-negative")
    return supply_cap_btc() * (1.0 - 0.5 ** epochs)
