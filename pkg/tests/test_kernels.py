import importlib
import sys
from unittest import mock

import numpy as np
import pytest

from halvingcast import _kernels


def _inputs(blocks=37, trials=211, seed=3):
    rng = np.random.default_rng(seed)
    draws = rng.standard_exponential((blocks, trials))
    difficulty = rng.uniform(0.5, 2.0, trials)
    weights = rng.uniform(5.0, 15.0, blocks)
    return draws, difficulty, weights


def test_numpy_kernel_accumulates_expected_sums():
    draws, difficulty, weights = _inputs()
    out = np.zeros(difficulty.size)
    _kernels.interval_sums_numpy(draws, difficulty, weights, out)
    reference = (draws * weights[:, None]).sum(axis=0) * difficulty
    np.testing.assert_allclose(out, reference, rtol=1e-12)


def test_numpy_kernel_extends_existing_accumulation():
    draws, difficulty, weights = _inputs()
    out = np.zeros(difficulty.size)
    _kernels.interval_sums_numpy(draws[:20], difficulty, weights[:20], out)
    _kernels.interval_sums_numpy(draws[20:], difficulty, weights[20:], out)
    whole = np.zeros(difficulty.size)
    _kernels.interval_sums_numpy(draws, difficulty, weights, whole)
    # same per-element addition chain, so equality is exact
    np.testing.assert_array_equal(out, whole)


@pytest.mark.skipif(
    _kernels.interval_sums_numba is None, reason="numba not importable"
)
def test_backends_agree_bitwise():
    draws, difficulty, weights = _inputs(blocks=64, trials=1000)
    via_numpy = np.zeros(difficulty.size)
    via_numba = np.zeros(difficulty.size)
    _kernels.interval_sums_numpy(draws, difficulty, weights, via_numpy)
    _kernels.interval_sums_numba(draws, difficulty, weights, via_numba)
    np.testing.assert_array_equal(via_numpy, via_numba)


def test_env_flag_forces_numpy_backend(monkeypatch):
    monkeypatch.setenv("HALVINGCAST_NO_NUMBA", "1")
    reloaded = importlib.reload(_kernels)
    try:
        assert reloaded.BACKEND == "numpy"
        assert reloaded.interval_sums is reloaded.interval_sums_numpy
    finally:
        monkeypatch.delenv("HALVINGCAST_NO_NUMBA")
        importlib.reload(_kernels)


def test_missing_numba_falls_back(monkeypatch):
    monkeypatch.delenv("HALVINGCAST_NO_NUMBA", raising=False)
    with mock.patch.dict(sys.modules, {"numba": None}):
        reloaded = importlib.reload(_kernels)
        assert reloaded.BACKEND == "numpy"
        assert reloaded.interval_sums_numba is None
        assert reloaded.interval_sums is reloaded.interval_sums_numpy
    importlib.reload(_kernels)


def test_default_backend_prefers_numba_when_present():
    if _kernels.interval_sums_numba is None:
        pytest.skip("numba not importable in this environment")
    assert _kernels.BACKEND == "numba"
    assert _kernels.interval_sums is _kernels.interval_sums_numba
