"""Benchmark the per-block accumulation kernel: numba JIT vs numpy loop.

The kernel is the hot path of per-block simulation: it folds a slab of
exponential draws into per-trial interval sums, scaling each block row by
the prevailing difficulty and a per-block weight. Both backends share one
accumulation order so results are bit-identical; this script measures how
much the JIT buys at realistic slab shapes.

Run from the repository root:

    python benchmarks/bench_kernels.py
    python benchmarks/bench_kernels.py --trials 65536 --repeats 7

An end-to-end comparison (full simulation under each backend, separate
processes so the import-time backend choice applies) runs unless
--kernel-only is given.
"""

import argparse
import os
import statistics
import subprocess
import sys
import time

import numpy as np

from halvingcast import _kernels

END_TO_END_SNIPPET = """
import time
from halvingcast import _kernels
from halvingcast.simulate import SimulationConfig, run

config = SimulationConfig(
    interval_blocks=2016,
    intervals=1,
    final_interval_blocks=672,
    trials={trials},
    seed=7,
    granularity="per_block",
)
run(config)  # warm the JIT and page in the generators
t0 = time.perf_counter()
run(config)
print(_kernels.BACKEND, time.perf_counter() - t0)
"""


def time_callable(fn, repeats):
    """Best-of-N wall time in seconds; N runs, minimum reported."""
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return min(samples), statistics.median(samples)


def bench_kernel(blocks, trials, repeats, rng):
    draws = rng.standard_exponential((blocks, trials))
    difficulty = np.ones(trials)
    weights = np.full(blocks, 10.0)
    out = np.empty(trials)

    def run_numpy():
        out.fill(0.0)
        _kernels.interval_sums_numpy(draws, difficulty, weights, out)

    rows = []
    best, median = time_callable(run_numpy, repeats)
    rows.append(("numpy", best, median))

    if _kernels.interval_sums_numba is not None:
        def run_numba():
            out.fill(0.0)
            _kernels.interval_sums_numba(draws, difficulty, weights, out)

        run_numba()  # JIT compile outside the timed region
        best, median = time_callable(run_numba, repeats)
        rows.append(("numba", best, median))

    return rows


def print_table(title, rows, cells_per_call):
    print(title)
    print(f"  {'backend':<8} {'best':>10} {'median':>10} {'throughput':>16}")
    baseline = rows[0][1]
    for name, best, median in rows:
        rate = cells_per_call / best / 1e6
        speedup = f"  ({baseline / best:.2f}x vs numpy)" if name != "numpy" else ""
        print(
            f"  {name:<8} {best * 1e3:>8.2f}ms {median * 1e3:>8.2f}ms"
            f" {rate:>10.1f} Mcell/s{speedup}"
        )


def bench_end_to_end(trials):
    print(f"\nend-to-end: one 672-block interval, per-block, {trials} trials")
    for flag in ("0", "1"):
        env = dict(os.environ, HALVINGCAST_NO_NUMBA=flag)
        proc = subprocess.run(
            [sys.executable, "-c", END_TO_END_SNIPPET.format(trials=trials)],
            env=env,
            capture_output=True,
            text=True,
            check=True,
        )
        backend, seconds = proc.stdout.split()
        print(f"  {backend:<8} {float(seconds) * 1e3:>8.0f}ms")


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--blocks", type=int, default=256,
                        help="slab height in blocks (default 256)")
    parser.add_argument("--trials", type=int, default=16384,
                        help="slab width in trials (default 16384)")
    parser.add_argument("--repeats", type=int, default=5,
                        help="timed repetitions per backend (default 5)")
    parser.add_argument("--end-to-end-trials", type=int, default=100_000,
                        help="trial count for the full-simulation timing")
    parser.add_argument("--kernel-only", action="store_true",
                        help="skip the subprocess end-to-end comparison")
    args = parser.parse_args(argv)

    print(f"active backend at import: {_kernels.BACKEND}")
    if _kernels.interval_sums_numba is None:
        print("numba unavailable or disabled; timing the numpy path only")

    rng = np.random.default_rng(12345)
    rows = bench_kernel(args.blocks, args.trials, args.repeats, rng)
    print_table(
        f"\nkernel slab {args.blocks} blocks x {args.trials} trials",
        rows,
        args.blocks * args.trials,
    )

    if not args.kernel_only:
        bench_end_to_end(args.end_to_end_trials)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
