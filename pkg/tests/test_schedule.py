import pytest
from hypothesis import given
from hypothesis import strategies as st

from halvingcast import schedule


def test_subsidy_at_epoch_boundaries():
    assert schedule.block_subsidy(0) == 50.0
    assert schedule.block_subsidy(209_999) == 50.0
    assert schedule.block_subsidy(210_000) == 25.0
    assert schedule.block_subsidy(419_999) == 25.0
    assert schedule.block_subsidy(420_000) == 12.5


def test_next_halving_height_examples():
    assert schedule.next_halving_height(414_524) == 420_000
    assert schedule.next_halving_height(0) == 210_000
    assert schedule.next_halving_height(419_999) == 420_000
    # a halving block itself points at the following halving
    assert schedule.next_halving_height(420_000) == 630_000


def test_blocks_to_next_halving():
    assert schedule.blocks_to_next_halving(414_524) == 5_476
    assert schedule.blocks_to_next_halving(419_328) == 672


def test_supply_cap_exact():
    # the geometric series telescopes to exactly 21 million
    assert schedule.supply_cap_btc() == 21_000_000.0


def test_cumulative_supply_partial_sums():
    assert schedule.cumulative_supply_btc(0) == 0.0
    assert schedule.cumulative_supply_btc(1) == 10_500_000.0
    assert schedule.cumulative_supply_btc(2) == 15_750_000.0
    assert schedule.cumulative_supply_btc(3) == 18_375_000.0


def test_cumulative_supply_matches_per_epoch_sum():
    # closed form versus literally adding up epoch issuance
    total = 0.0
    for epoch in range(12):
        total += schedule.HALVING_INTERVAL_BLOCKS * 50.0 * 0.5**epoch
        assert schedule.cumulative_supply_btc(epoch + 1) == pytest.approx(
            total, rel=1e-12
        )


def test_negative_inputs_rejected():
    with pytest.raises(ValueError):
        schedule.block_subsidy(-1)
    with pytest.raises(ValueError):
        schedule.cumulative_supply_btc(-1)


@given(st.integers(min_value=0, max_value=10_000_000))
def test_halving_step_halves_subsidy(height):
    nxt = schedule.next_halving_height(height)
    assert height < nxt <= height + schedule.HALVING_INTERVAL_BLOCKS
    assert schedule.block_subsidy(nxt) == schedule.block_subsidy(height) / 2


@given(st.integers(min_value=0, max_value=60))
def test_supply_approaches_cap_from_below(epochs):
    supply = schedule.cumulative_supply_btc(epochs)
    assert supply <= schedule.supply_cap_btc()
    gap = schedule.supply_cap_btc() - supply
    assert gap == pytest.approx(21_000_000.0 * 0.5**epochs, rel=1e-9, abs=1e-6)
