"""Command line interface.

Four subcommands: ``predict`` (halving ETA with confidence intervals from a
height, block count, snapshot file, or HTTP endpoint), ``adjust`` (hashrate
corrections applied to a base ETA), ``simulate`` (the seeded Monte Carlo),
and ``schedule`` (the subsidy table). Every subcommand takes ``--json`` for
machine-readable output; given the same arguments and seed, that output is
byte-stable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import datetime, timezone

from . import hashrate, ingest, naive, retarget, simulate, units
from .schedule import next_halving_height

DEFAULT_HALVING_HEIGHT = 420_000


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="halvingcast",
        description="Estimate when a block-reward halving will happen.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    predict = sub.add_parser(
        "predict", help="estimate the time to the next halving"
    )
    source = predict.add_argument_group("input source (exactly one)")
    source.add_argument("--height", type=int, help="current chain height")
    source.add_argument(
        "--blocks-remaining", type=int, help="blocks left to the halving"
    )
    source.add_argument(
        "--snapshot", metavar="PATH", help="header window file (JSON lines)"
    )
    source.add_argument(
        "--endpoint",
        metavar="URL",
        help=f"header endpoint (falls back to ${ingest.ENDPOINT_ENV})",
    )
    predict.add_argument(
        "--window",
        type=int,
        default=ingest.DEFAULT_WINDOW,
        help="headers to fetch from the endpoint (default %(default)s)",
    )
    predict.add_argument(
        "--model",
        choices=("naive", "retarget"),
        default="retarget",
        help="constant-difficulty or retarget-aware estimate (default %(default)s)",
    )
    predict.add_argument(
        "--covariance",
        choices=tuple(m.value for m in retarget.CovarianceMode),
        default=retarget.DEFAULT_COVARIANCE_MODE.value,
        help="adjacent-interval covariance convention (default %(default)s)",
    )
    predict.add_argument(
        "--level",
        type=float,
        action="append",
        metavar="P",
        help="confidence level in (0,1); repeatable (default 0.683 and 0.955)",
    )
    predict.add_argument(
        "--halving-height",
        type=int,
        help="halving height override (default: next halving above the tip, "
        f"or {DEFAULT_HALVING_HEIGHT} with --blocks-remaining)",
    )
    predict.add_argument(
        "--now",
        metavar="WHEN",
        help="anchor for dates: an ISO 8601 UTC timestamp, or 'auto' for the "
        "current time (default: the snapshot tip when one is given)",
    )
    predict.add_argument("--json", action="store_true", help="emit JSON")
    predict.set_defaults(func=cmd_predict)

    adjust = sub.add_parser(
        "adjust", help="shift a base ETA for a hashrate change"
    )
    base = adjust.add_mutually_exclusive_group(required=True)
    base.add_argument(
        "--base-eta", metavar="WHEN", help="base ETA as an ISO 8601 timestamp"
    )
    base.add_argument(
        "--base-eta-minutes", type=float, help="base ETA as minutes from now"
    )
    change = adjust.add_mutually_exclusive_group(required=True)
    change.add_argument(
        "--step",
        type=float,
        metavar="X",
        help="one-off relative rate step well before the halving (e.g. 0.1)",
    )
    change.add_argument(
        "--gradual",
        nargs=2,
        type=float,
        metavar=("OLD", "NEW"),
        help="smooth rate drift from OLD to NEW hashes/min",
    )
    change.add_argument(
        "--step-near",
        nargs=2,
        metavar=("X", "BLOCKS"),
        help="rate step with BLOCKS blocks left inside the final interval",
    )
    adjust.add_argument("--json", action="store_true", help="emit JSON")
    adjust.set_defaults(func=cmd_adjust)

    sim = sub.add_parser("simulate", help="run the Monte Carlo cross-check")
    sim.add_argument(
        "--interval-blocks",
        "--k",
        dest="interval_blocks",
        type=int,
        default=2016,
        help="blocks per retarget interval (default %(default)s)",
    )
    sim.add_argument(
        "--intervals",
        "--n",
        dest="intervals",
        type=int,
        default=1,
        help="retarget intervals up to and including the halving's "
        "(default %(default)s)",
    )
    sim.add_argument(
        "--final-blocks",
        "--M",
        dest="final_blocks",
        type=int,
        default=None,
        help="blocks into the final interval (default: a full interval)",
    )
    sim.add_argument("--trials", type=int, default=100_000)
    sim.add_argument(
        "--seed",
        type=int,
        default=simulate.DEFAULT_SEED,
        help="RNG seed (default %(default)s)",
    )
    sim.add_argument(
        "--granularity",
        choices=simulate.GRANULARITIES,
        default="per_interval",
    )
    sim.add_argument(
        "--fixed-difficulty",
        action="store_true",
        help="disable retargeting (constant difficulty throughout)",
    )
    sim.add_argument(
        "--difficulty",
        type=float,
        default=1.0,
        help="starting difficulty (default %(default)s)",
    )
    sim.add_argument(
        "--hashrate",
        type=float,
        default=None,
        help="hashes per minute (default: equilibrium for the difficulty)",
    )
    sim.add_argument(
        "--hashrate-step",
        nargs=2,
        metavar=("FACTOR", "AT_BLOCK"),
        default=None,
        help="multiply the rate by FACTOR from block AT_BLOCK on "
        "(per_block only)",
    )
    sim.add_argument(
        "--workers",
        type=int,
        default=1,
        help="threads over trial chunks; does not change the output bits",
    )
    sim.add_argument(
        "--emit-raw",
        metavar="PATH",
        help="write per-trial halving times, one per line, to PATH "
        "('-' for stdout, which then replaces the summary)",
    )
    sim.add_argument("--json", action="store_true", help="emit JSON")
    sim.set_defaults(func=cmd_simulate)

    sched = sub.add_parser("schedule", help="print the subsidy schedule")
    sched.add_argument(
        "--epochs",
        type=int,
        default=8,
        help="number of halving epochs to list (default %(default)s)",
    )
    sched.add_argument("--json", action="store_true", help="emit JSON")
    sched.set_defaults(func=cmd_schedule)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, ingest.IngestError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


# ---------------------------------------------------------------------------
# predict

def _resolve_anchor(args, snapshot) -> datetime | None:
    if args.now:
        if args.now == "auto":
            return datetime.now(timezone.utc)
        return units.parse_timestamp(args.now)
    if snapshot is not None:
        return units.from_unix_seconds(snapshot.tip.time)
    return None


def _interval_entry(ci, anchor):
    entry = {
        "level": ci.level,
        "lower_minutes": ci.lower_minutes,
        "upper_minutes": ci.upper_minutes,
        "lower_timestamp": None,
        "upper_timestamp": None,
    }
    if anchor is not None:
        entry["lower_timestamp"] = units.format_timestamp_iso(
            units.add_minutes(anchor, ci.lower_minutes)
        )
        entry["upper_timestamp"] = units.format_timestamp_iso(
            units.add_minutes(anchor, ci.upper_minutes)
        )
    return entry


def cmd_predict(args) -> int:
    sources = [
        name
        for name, given in (
            ("--height", args.height is not None),
            ("--blocks-remaining", args.blocks_remaining is not None),
            ("--snapshot", args.snapshot is not None),
            ("--endpoint", args.endpoint is not None),
        )
        if given
    ]
    if len(sources) > 1:
        raise ValueError(f"conflicting input sources: {' and '.join(sources)}")

    snapshot = None
    hashrate_estimate = None
    env_endpoint = os.environ.get(ingest.ENDPOINT_ENV)
    if args.snapshot is not None:
        snapshot = ingest.load_snapshot_file(args.snapshot)
    elif args.endpoint is not None or (not sources and env_endpoint):
        snapshot = ingest.fetch_snapshot_http(args.endpoint, window=args.window)
    elif not sources:
        raise ValueError(
            "no input source: pass --height, --blocks-remaining, --snapshot "
            f"or --endpoint (or set ${ingest.ENDPOINT_ENV})"
        )
    if snapshot is not None and len(snapshot) >= 2:
        hashrate_estimate = ingest.estimate_hashrate(snapshot)

    if snapshot is not None:
        current_height = snapshot.tip.height
    else:
        current_height = args.height

    if current_height is not None:
        halving_height = args.halving_height
        if halving_height is None:
            halving_height = next_halving_height(current_height)
        blocks_remaining = halving_height - current_height
    else:
        halving_height = args.halving_height
        if halving_height is None:
            halving_height = DEFAULT_HALVING_HEIGHT
        blocks_remaining = args.blocks_remaining
        current_height = halving_height - blocks_remaining
    if blocks_remaining < 0:
        raise ValueError("the halving height is below the current height")

    levels = tuple(args.level) if args.level else naive.DEFAULT_LEVELS
    mode = retarget.CovarianceMode(args.covariance)
    anchor = _resolve_anchor(args, snapshot)

    position = None
    if blocks_remaining == 0:
        eta = 0.0
        variance = 0.0
        intervals = tuple(
            naive.confidence_interval(0.0, 0.0, level) for level in levels
        )
    elif args.model == "naive":
        prediction = naive.predict(blocks_remaining, levels)
        eta = prediction.eta_minutes
        variance = prediction.variance_min2
        intervals = prediction.intervals
    else:
        prediction = retarget.predict_from_height(
            current_height, halving_height, mode=mode, levels=levels
        )
        eta = prediction.eta_minutes
        variance = prediction.variance_min2
        intervals = prediction.intervals
        position = prediction.position
    stddev = variance ** 0.5

    report = {
        "model": args.model,
        "covariance_mode": mode.value if args.model == "retarget" else None,
        "inputs": {
            "current_height": current_height,
            "halving_height": halving_height,
            "blocks_remaining": blocks_remaining,
            "intervals_remaining": position.intervals_remaining if position else None,
            "final_interval_blocks": position.final_interval_blocks if position else None,
            "hashrate_per_minute": hashrate_estimate,
            "anchor_timestamp": (
                units.format_timestamp_iso(anchor) if anchor else None
            ),
        },
        "eta_minutes": eta,
        "eta_timestamp": (
            units.format_timestamp_iso(units.add_minutes(anchor, eta))
            if anchor
            else None
        ),
        "variance_min2": variance,
        "stddev_minutes": stddev,
        "intervals": [_interval_entry(ci, anchor) for ci in intervals],
        "shift_minutes": None,
    }
    if args.json:
        _emit_json(report)
        return 0

    lines = [f"model:            {args.model}"]
    if args.model == "retarget":
        lines.append(f"covariance:       {mode.value}")
    lines.append(f"halving height:   {halving_height}")
    lines.append(f"blocks remaining: {blocks_remaining}")
    if position is not None:
        lines.append(
            f"position:         {position.intervals_remaining} interval(s), "
            f"halving {position.final_interval_blocks} blocks into the last"
        )
    if hashrate_estimate is not None:
        lines.append(f"hashrate:         {hashrate_estimate:.4g} hashes/min")
    lines.append(
        f"eta:              {eta:.1f} min ({units.format_mixed(eta)})"
    )
    if anchor is not None:
        lines.append(
            "eta date:         "
            f"{units.format_timestamp(units.add_minutes(anchor, eta))} UTC"
        )
    lines.append(
        f"stddev:           {stddev:.1f} min ({units.format_mixed(stddev)})"
    )
    lines.append(f"variance:         {variance:.1f} min^2")
    for ci in intervals:
        label = f"{ci.level * 100:.1f}%"
        lines.append(
            f"{label} interval:   "
            f"{ci.lower_minutes:.1f} .. {ci.upper_minutes:.1f} min"
        )
        if anchor is not None:
            low = units.format_timestamp(
                units.add_minutes(anchor, ci.lower_minutes)
            )
            high = units.format_timestamp(
                units.add_minutes(anchor, ci.upper_minutes)
            )
            lines.append(f"    dates:        {low} .. {high} UTC")
    print("\n".join(lines))
    return 0


# ---------------------------------------------------------------------------
# adjust

def cmd_adjust(args) -> int:
    if args.step is not None:
        shift = hashrate.step_shift_far(args.step)
        kind = "step"
    elif args.gradual is not None:
        old_rate, new_rate = args.gradual
        shift = hashrate.gradual_shift(old_rate, new_rate)
        kind = "gradual"
    else:
        fraction = float(args.step_near[0])
        blocks = int(args.step_near[1])
        shift = hashrate.step_shift_near(fraction, blocks)
        kind = "step_near"

    base_timestamp = None
    base_minutes = args.base_eta_minutes
    if args.base_eta is not None:
        base_timestamp = units.parse_timestamp(args.base_eta)

    report = {
        "adjustment": kind,
        "shift_minutes": shift,
        "base_eta_minutes": base_minutes,
        "base_eta_timestamp": (
            units.format_timestamp_iso(base_timestamp) if base_timestamp else None
        ),
        "shifted_eta_minutes": (
            base_minutes + shift if base_minutes is not None else None
        ),
        "shifted_eta_timestamp": (
            units.format_timestamp_iso(units.add_minutes(base_timestamp, shift))
            if base_timestamp
            else None
        ),
    }
    if args.json:
        _emit_json(report)
        return 0

    direction = "sooner" if shift < 0 else "later"
    magnitude = units.format_mixed(abs(shift))
    lines = [
        f"shift:       {shift:+.1f} min ({magnitude} {direction})"
        if shift
        else "shift:       +0.0 min (no change)"
    ]
    if base_timestamp is not None:
        lines.append(f"base eta:    {units.format_timestamp(base_timestamp)} UTC")
        shifted = units.add_minutes(base_timestamp, shift)
        lines.append(f"shifted eta: {units.format_timestamp(shifted)} UTC")
    if base_minutes is not None:
        lines.append(f"base eta:    {base_minutes:.1f} min")
        lines.append(f"shifted eta: {base_minutes + shift:.1f} min")
    print("\n".join(lines))
    return 0


# ---------------------------------------------------------------------------
# simulate

def cmd_simulate(args) -> int:
    step = None
    if args.hashrate_step is not None:
        step = simulate.HashrateStep(
            factor=float(args.hashrate_step[0]),
            at_block=int(args.hashrate_step[1]),
        )
    config = simulate.SimulationConfig(
        interval_blocks=args.interval_blocks,
        intervals=args.intervals,
        final_interval_blocks=args.final_blocks,
        trials=args.trials,
        seed=args.seed,
        granularity=args.granularity,
        retarget=not args.fixed_difficulty,
        initial_difficulty=args.difficulty,
        hashrate=args.hashrate,
        hashrate_step=step,
        workers=args.workers,
    )

    if args.emit_raw is not None:
        summary, samples = simulate.run_with_samples(config)
        raw_lines = "\n".join(repr(float(v)) for v in samples) + "\n"
        if args.emit_raw == "-":
            sys.stdout.write(raw_lines)
            return 0
        with open(args.emit_raw, "w", encoding="utf-8") as handle:
            handle.write(raw_lines)
    else:
        summary = simulate.run(config)

    report = {
        "trials": summary.trials,
        "granularity": summary.granularity,
        "backend": summary.backend,
        "seed": config.seed,
        "retarget": config.retarget,
        "mean_minutes": summary.mean_minutes,
        "variance_min2": summary.variance_min2,
        "stddev_minutes": summary.stddev_minutes,
        "se_mean_minutes": summary.se_mean_minutes,
        "se_variance_min2": summary.se_variance_min2,
        "cov_adjacent": summary.cov_adjacent,
    }
    if args.json:
        _emit_json(report)
        return 0

    lines = [
        f"granularity:  {summary.granularity} (backend {summary.backend})",
        f"trials:       {summary.trials} (seed {config.seed})",
        f"mean:         {summary.mean_minutes:.3f} min "
        f"(se {summary.se_mean_minutes:.3g})",
        f"stddev:       {summary.stddev_minutes:.3f} min",
        f"variance:     {summary.variance_min2:.3f} min^2 "
        f"(se {summary.se_variance_min2:.3g})",
    ]
    if summary.cov_adjacent is not None:
        lines.append(f"cov adjacent: {summary.cov_adjacent:.6f}")
    print("\n".join(lines))
    return 0


# ---------------------------------------------------------------------------
# schedule

def cmd_schedule(args) -> int:
    from . import schedule as sched

    if args.epochs < 1:
        raise ValueError("epochs must be at least 1")
    rows = []
    for epoch in range(args.epochs):
        rows.append(
            {
                "epoch": epoch,
                "start_height": epoch * sched.HALVING_INTERVAL_BLOCKS,
                "subsidy_btc": sched.block_subsidy(
                    epoch * sched.HALVING_INTERVAL_BLOCKS
                ),
                "cumulative_supply_btc": sched.cumulative_supply_btc(epoch + 1),
            }
        )
    if args.json:
        _emit_json({"epochs": rows, "supply_cap_btc": sched.supply_cap_btc()})
        return 0

    print(f"{'epoch':>5} {'start height':>12} {'subsidy':>12} {'cumulative BTC':>16}")
    for row in rows:
        print(
            f"{row['epoch']:>5} {row['start_height']:>12} "
            f"{row['subsidy_btc']:>12.8g} {row['cumulative_supply_btc']:>16.10g}"
        )
    print(f"supply cap: {sched.supply_cap_btc():.10g} BTC")
    return 0


def _emit_json(report: dict) -> None:
    sys.stdout.write(json.dumps(report, indent=2) + "\n")


if __name__ == "__main__":
    sys.exit(main())
