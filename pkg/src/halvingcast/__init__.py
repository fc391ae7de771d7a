"""Halving-time estimation for proof-of-work block subsidy schedules.

The package answers one question three ways: how long until the next
block-reward halving, and how sure can you be. ``naive`` prices each block
at an independent exponential; ``retarget`` accounts for the difficulty
reset rule and its small upward drift and negative interval coupling;
``hashrate`` layers point corrections for rate changes on top. ``simulate``
is the seeded Monte Carlo that cross-checks every closed form, and
``ingest`` turns chain header windows into model inputs.
"""

from .hashrate import (
    apply_shift,
    gradual_shift,
    step_shift_far,
    step_shift_near,
)
from .naive import (
    ConfidenceInterval,
    NaivePrediction,
    confidence_interval,
    naive_eta,
    naive_stddev,
    naive_stddev_from_eta,
    normal_quantile,
)
from .retarget import (
    CovarianceMode,
    ErlangMoments,
    RetargetParams,
    RetargetPosition,
    RetargetPrediction,
    erlang_moments,
    marginal_variance_per_interval,
    position_from_heights,
    predict_from_height,
    retarget_eta,
    retarget_stddev,
    retarget_variance,
    schedule_drift_factor,
    simplified_variance,
)
from .schedule import (
    HALVING_INTERVAL_BLOCKS,
    block_subsidy,
    next_halving_height,
    supply_cap_btc,
)
from .simulate import (
    SimulationConfig,
    SimulationSummary,
    adjudicate_covariance_mode,
    estimate_covariance,
    run,
    run_with_samples,
    sample_erlang,
)
from .units import BLOCK_TARGET_MINUTES, from_unit, to_unit

__version__ = "0.1.0"

__all__ = [
    "BLOCK_TARGET_MINUTES",
    "HALVING_INTERVAL_BLOCKS",
    "ConfidenceInterval",
    "CovarianceMode",
    "ErlangMoments",
    "NaivePrediction",
    "RetargetParams",
    "RetargetPosition",
    "RetargetPrediction",
    "SimulationConfig",
    "SimulationSummary",
    "adjudicate_covariance_mode",
    "apply_shift",
    "block_subsidy",
    "confidence_interval",
    "erlang_moments",
    "estimate_covariance",
    "from_unit",
    "gradual_shift",
    "marginal_variance_per_interval",
    "naive_eta",
    "naive_stddev",
    "naive_stddev_from_eta",
    "next_halving_height",
    "normal_quantile",
    "position_from_heights",
    "predict_from_height",
    "retarget_eta",
    "retarget_stddev",
    "retarget_variance",
    "run",
    "run_with_samples",
    "sample_erlang",
    "schedule_drift_factor",
    "simplified_variance",
    "step_shift_far",
    "step_shift_near",
    "supply_cap_btc",
    "to_unit",
]
