"""Chain snapshot ingestion: files, HTTP endpoints, and model inputs.

A snapshot is a window of consecutive block headers, the minimum the
estimators need: heights to place the halving on the retarget grid, and
timestamps plus difficulties to back out the network hashrate. The on-disk
form is line-delimited JSON, one header object per line with ``height``
(int), ``time`` (int, unix seconds, UTC) and ``difficulty`` (number) keys.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import requests

from .retarget import (
    DEFAULT_PARAMS,
    RetargetParams,
    RetargetPosition,
    position_from_heights,
)
from .schedule import next_halving_height
from .simulate import DIFFICULTY_HASH_SPACE

ENDPOINT_ENV = "HALVINGCAST_ENDPOINT"
TIMEOUT_ENV = "HALVINGCAST_HTTP_TIMEOUT"
DEFAULT_WINDOW = 2016
DEFAULT_TIMEOUT_SECONDS = 10.0


class IngestError(Exception):
    """Base class for snapshot acquisition and validation failures."""


class SnapshotFormatError(IngestError):
    """A snapshot file or payload violates the header-window format."""


class EndpointError(IngestError):
    """An HTTP header source was unreachable or answered unusably."""


@dataclass(frozen=True)
class HeaderRecord:
    height: int
    time: int  # unix seconds, UTC
    difficulty: float


@dataclass(frozen=True)
class ChainSnapshot:
    """A validated window of consecutive headers, oldest first."""

    records: tuple[HeaderRecord, ...]

    def __post_init__(self) -> None:
        if not self.records:
            raise SnapshotFormatError("snapshot is empty")
        for prev, cur in zip(self.records, self.records[1:]):
            if cur.height != prev.height + 1:
                raise SnapshotFormatError(
                    "snapshot heights must be consecutive and ascending: "
                    f"gap between {prev.height} and {cur.height}"
                )

    @property
    def tip(self) -> HeaderRecord:
        return self.records[-1]

    def __len__(self) -> int:
        return len(self.records)


def _record_from_obj(obj, where: str) -> HeaderRecord:
    if not isinstance(obj, dict):
        raise SnapshotFormatError(f"{where}: expected a JSON object")
    missing = [key for key in ("height", "time", "difficulty") if key not in obj]
    if missing:
        raise SnapshotFormatError(f"{where}: missing field {missing[0]!r}")
    height = obj["height"]
    time = obj["time"]
    difficulty = obj["difficulty"]
    if not isinstance(height, int) or isinstance(height, bool) or height < 0:
        raise SnapshotFormatError(f"{where}: 'height' must be a non-negative integer")
    if not isinstance(time, int) or isinstance(time, bool):
        raise SnapshotFormatError(f"{where}: 'time' must be an integer (unix seconds)")
    if not isinstance(difficulty, (int, float)) or isinstance(difficulty, bool):
        raise SnapshotFormatError(f"{where}: 'difficulty' must be a number")
    if not difficulty > 0:
        raise SnapshotFormatError(f"{where}: 'difficulty' must be positive")
    return HeaderRecord(height=height, time=time, difficulty=float(difficulty))


def load_snapshot_file(path: str | os.PathLike) -> ChainSnapshot:
    """Read a line-delimited JSON header window; errors carry line numbers."""
    records = []
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            where = f"{path}:{lineno}"
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SnapshotFormatError(f"{where}: invalid JSON ({exc.msg})") from None
            records.append(_record_from_obj(obj, where))
    if not records:
        raise SnapshotFormatError(f"{path}: snapshot is empty")
    return ChainSnapshot(tuple(records))


def write_snapshot_file(snapshot: ChainSnapshot, path: str | os.PathLike) -> None:
    """Write a snapshot in the same line-delimited JSON form load expects."""
    with open(path, "w", encoding="utf-8") as handle:
        for rec in snapshot.records:
            handle.write(
                json.dumps(
                    {
                        "height": rec.height,
                        "time": rec.time,
                        "difficulty": rec.difficulty,
                    }
                )
            )
            handle.write("\n")


def fetch_snapshot_http(
    base_url: str | None = None,
    window: int = DEFAULT_WINDOW,
    timeout: float | None = None,
) -> ChainSnapshot:
    """Fetch the most recent ``window`` headers from a JSON endpoint.

    Issues GET <base_url>/headers?count=<window> and expects a JSON array
    of header objects, oldest first. ``base_url`` falls back to the
    HALVINGCAST_ENDPOINT environment variable, the timeout to
    HALVINGCAST_HTTP_TIMEOUT (seconds, default 10). Transport problems,
    non-200 answers, and malformed payloads all raise EndpointError.
    """
    if base_url is None:
        base_url = os.environ.get(ENDPOINT_ENV)
    if not base_url:
        raise EndpointError(
            f"no endpoint configured: pass base_url or set {ENDPOINT_ENV}"
        )
    if window < 1:
        raise ValueError("window must be at least 1")
    if timeout is None:
        timeout = float(os.environ.get(TIMEOUT_ENV, DEFAULT_TIMEOUT_SECONDS))
    url = base_url.rstrip("/") + "/headers"
    try:
        response = requests.get(url, params={"count": window}, timeout=timeout)
    except requests.RequestException as exc:
        raise EndpointError(f"header request to {url} failed: {exc}") from exc
    if response.status_code != 200:
        raise EndpointError(
            f"header request to {url} returned HTTP {response.status_code}"
        )
    try:
        payload = response.json()
    except ValueError:
        raise EndpointError(f"response from {url} is not valid JSON") from None
    if not isinstance(payload, list):
        raise EndpointError(f"response from {url} is not a JSON array of headers")
    try:
        records = tuple(
            _record_from_obj(obj, f"{url} item {i}")
            for i, obj in enumerate(payload)
        )
        return ChainSnapshot(records)
    except SnapshotFormatError as exc:
        raise EndpointError(str(exc)) from None


def estimate_hashrate(snapshot: ChainSnapshot) -> float:
    """Estimate network hashrate in hashes per minute from a header window.

    Each block at difficulty D takes DIFFICULTY_HASH_SPACE * D expected
    hashes, so the window's mean difficulty times that constant, times
    blocks per elapsed minute, estimates the rate. Short windows are noisy:
    the relative error scales like 1/sqrt(blocks spanned).
    """
    if len(snapshot) < 2:
        raise IngestError("hashrate estimation needs at least 2 headers")
    spans = len(snapshot) - 1
    elapsed_minutes = (snapshot.tip.time - snapshot.records[0].time) / 60.0
    if elapsed_minutes <= 0:
        raise IngestError(
            "snapshot spans non-positive time; timestamps are unusable"
        )
    mean_difficulty = sum(rec.difficulty for rec in snapshot.records) / len(snapshot)
    return DIFFICULTY_HASH_SPACE * mean_difficulty * spans / elapsed_minutes


def model_inputs(
    snapshot: ChainSnapshot,
    halving_height: int | None = None,
    params: RetargetParams = DEFAULT_PARAMS,
) -> tuple[int, RetargetPosition]:
    """Blocks remaining and retarget-grid position for the snapshot tip."""
    tip_height = snapshot.tip.height
    if halving_height is None:
        halving_height = next_halving_height(tip_height)
    blocks_remaining = halving_height - tip_height
    position = position_from_heights(tip_height, halving_height, params)
    return blocks_remaining, position
