"""Hot per-block accumulation kernel, jitted when numba is available.

The per-block simulation spends nearly all its time folding standard
exponential draws into per-trial interval times. Both implementations below
accumulate in the same order (blocks ascending, one multiply chain per
element), so the jitted and plain numpy paths produce bit-identical output
and either can back the public simulator.

Set ``HALVINGCAST_NO_NUMBA=1`` before import to force the numpy path; the
benchmark and the fallback tests use this. The module also falls back by
itself when numba is not importable.
"""

from __future__ import annotations

import os

import numpy as np


def interval_sums_numpy(draws: np.ndarray, difficulty: np.ndarray,
                        weights: np.ndarray, out: np.ndarray) -> None:
    """Accumulate out[j] += difficulty[j] * weights[b] * draws[b, j] over b.

    ``draws`` has shape (blocks, trials); ``difficulty`` and ``out`` have
    shape (trials,); ``weights`` has shape (blocks,). Rows are folded in
    ascending block order so repeated calls extend the same accumulation
    chain.
    """
    for b in range(draws.shape[0]):
        out += difficulty * weights[b] * draws[b]


try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:
    _HAVE_NUMBA = False

if _HAVE_NUMBA:

    @njit(cache=True, nogil=True)
    def interval_sums_numba(draws, difficulty, weights, out):
        blocks, trials = draws.shape
        for b in range(blocks):
            w = weights[b]
            for j in range(trials):
                out[j] += difficulty[j] * w * draws[b, j]

else:
    interval_sums_numba = None


def _flag_disables_numba() -> bool:
    return os.environ.get("HALVINGCAST_NO_NUMBA", "").strip().lower() in (
        "1",
        "true",
        "yes",
    )


USING_NUMBA = _HAVE_NUMBA and not _flag_disables_numba()
interval_sums = interval_sums_numba if USING_NUMBA else interval_sums_numpy
BACKEND = "numba" if USING_NUMBA else "numpy"
