import dataclasses
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from halvingcast import hashrate, naive
from halvingcast.retarget import RetargetParams
from halvingcast.simulate import HashrateStep, SimulationConfig, run


def test_step_shift_examples():
    # +10% hashrate pulls the halving in by a tenth of an interval
    assert hashrate.step_shift_far(0.10) == pytest.approx(-2016.0)
    assert hashrate.step_shift_far(0.0) == 0.0
    assert hashrate.step_shift_far(-0.10) == pytest.approx(2016.0)


def test_step_shift_warns_outside_linear_range():
    with pytest.warns(UserWarning, match="linear range"):
        value = hashrate.step_shift_far(0.5)
    assert value == pytest.approx(-10080.0)
    with pytest.warns(UserWarning):
        hashrate.step_shift_far(-0.2)


def test_step_shift_quiet_inside_linear_range():
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("error")
        hashrate.step_shift_far(0.15)
        hashrate.step_shift_far(-0.15)


def test_step_shift_rejects_impossible_fraction():
    with pytest.raises(ValueError):
        hashrate.step_shift_far(-1.0)


def test_gradual_shift_examples():
    # growth by half: ln(1.5) of an interval, about 5 2/3 days sooner
    shift = hashrate.gradual_shift(1.0, 1.5)
    assert shift == pytest.approx(-math.log(1.5) * 20160.0, rel=1e-12)
    assert shift == pytest.approx(-8174.18, abs=0.01)
    assert hashrate.gradual_shift(3e12, 3e12) == 0.0


def test_gradual_shift_rejects_nonpositive_rates():
    with pytest.raises(ValueError):
        hashrate.gradual_shift(0.0, 1.0)
    with pytest.raises(ValueError):
        hashrate.gradual_shift(1.0, -2.0)


@given(
    st.floats(min_value=0.1, max_value=10.0),
    st.floats(min_value=0.1, max_value=10.0),
)
def test_gradual_shift_antisymmetric(a, b):
    there = hashrate.gradual_shift(a, b)
    back = hashrate.gradual_shift(b, a)
    assert there == pytest.approx(-back, rel=1e-9, abs=1e-9)


@given(
    st.floats(min_value=0.1, max_value=10.0),
    st.floats(min_value=0.1, max_value=10.0),
    st.floats(min_value=0.1, max_value=10.0),
)
def test_gradual_shift_composes(a, b, c):
    direct = hashrate.gradual_shift(a, c)
    staged = hashrate.gradual_shift(a, b) + hashrate.gradual_shift(b, c)
    assert direct == pytest.approx(staged, rel=1e-9, abs=1e-6)


@given(st.floats(min_value=-0.15, max_value=0.15))
def test_small_steps_agree_with_gradual_rule(x):
    # for small relative changes the two rules coincide to second order
    step = hashrate.step_shift_far(x)
    gradual = hashrate.gradual_shift(1.0, 1.0 + x)
    assert abs(step - gradual) <= x * x * 20160.0 + 1e-9


def test_step_near_examples():
    assert hashrate.step_shift_near(0.05, 300) == pytest.approx(-150.0)
    assert hashrate.step_shift_near(0.0, 500) == 0.0
    assert hashrate.step_shift_near(0.05, 0) == 0.0
    # a full interval left reduces to the far rule
    assert hashrate.step_shift_near(0.1, 2016) == pytest.approx(
        hashrate.step_shift_far(0.1), rel=1e-12
    )


def test_step_near_rejects_blocks_outside_interval():
    with pytest.raises(ValueError):
        hashrate.step_shift_near(0.05, 2017)
    with pytest.raises(ValueError):
        hashrate.step_shift_near(0.05, -1)


@given(
    st.floats(min_value=-0.15, max_value=0.15),
    st.integers(min_value=0, max_value=2016),
)
def test_step_near_linear_in_blocks(x, blocks):
    whole = hashrate.step_shift_near(x, blocks)
    assert whole == pytest.approx(-x * blocks * 10.0, rel=1e-12, abs=1e-12)


def test_apply_shift_translates_prediction():
    base = naive.predict(5476)
    moved = hashrate.apply_shift(base, -2016.0)
    assert moved.eta_minutes == base.eta_minutes - 2016.0
    assert moved.stddev_minutes == base.stddev_minutes
    assert moved.variance_min2 == base.variance_min2
    for before, after in zip(base.intervals, moved.intervals):
        assert after.lower_minutes == before.lower_minutes - 2016.0
        assert after.upper_minutes == before.upper_minutes - 2016.0
        assert after.level == before.level


def test_apply_shift_round_trips():
    base = naive.predict(100)
    back = hashrate.apply_shift(hashrate.apply_shift(base, 77.5), -77.5)
    assert back == base


def test_step_shift_oracle_against_simulation():
    # A +10% step at a retarget boundary, two intervals before the halving.
    # Exactly: blocks after the step run 1/1.1 as long until the next reset,
    # after which difficulty has caught up, so the mean moves by
    # drift * R * x/(1+x). The linear rule -x*R is a first-order stand-in
    # (about 7% high at x=0.1). Same seed for both runs, so the pooled
    # standard error is a conservative bound on the paired difference.
    k, x = 50, 0.10
    params = RetargetParams(interval_blocks=k)
    common = dict(
        interval_blocks=k,
        intervals=4,
        final_interval_blocks=k,
        trials=100_000,
        seed=77,
        granularity="per_block",
    )
    base = run(SimulationConfig(**common))
    stepped = run(
        SimulationConfig(**common, hashrate_step=HashrateStep(1.0 + x, k))
    )
    observed = stepped.mean_minutes - base.mean_minutes
    exact = -params.retarget_target_minutes * (k / (k - 1)) * x / (1 + x)
    se = math.hypot(base.se_mean_minutes, stepped.se_mean_minutes)
    assert abs(observed - exact) < 3 * se
    # the far rule stays within 10% of the truth at this step size
    linear = hashrate.step_shift_far(x, params)
    assert abs(linear - exact) / abs(exact) < 0.10
