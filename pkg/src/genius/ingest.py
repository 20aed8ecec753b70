"""Parse signal logs and slice them into fixed-length scenarios.

A log is one test drive: a manifest (JSON) plus a columnar CSV of signals.
Segmentation tiles the log from its first timestamp in steps of the window
length; a trailing partial window is dropped so every scenario has the same
duration. Loading and segmentation are pure functions over immutable inputs.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Mapping

import numpy as np

from .errors import (
    EmptyLog,
    MalformedManifest,
    MalformedSignals,
    MissingFile,
    NonMonotonicTimestamps,
    NonNumericCell,
    RaggedColumns,
)

DEFAULT_WINDOW_S = 30.0

_MANIFEST_REQUIRED = {
    "vehicle",
    "log_id",
    "utc_start",
    "utc_end",
    "signals_file",
    "link_template",
}
_MANIFEST_OPTIONAL = {"frames_dir"}

TIMESTAMP_COLUMN = "timestamp"


@dataclass(frozen=True)
class LogManifest:
    """Provenance and file locations for one test drive."""

    vehicle: str
    log_id: str
    utc_start: datetime
    utc_end: datetime
    signals_file: Path
    frames_dir: Path | None
    link_template: str


class SignalLog:
    """One drive's signal table: strictly increasing timestamps, named columns."""

    def __init__(
        self,
        manifest: LogManifest,
        timestamps: np.ndarray,
        names: list[str],
        data: np.ndarray,
    ) -> None:
        self.manifest = manifest
        self.timestamps = timestamps
        self._names = names
        self._index = {name: i for i, name in enumerate(names)}
        self._data = data

    @property
    def n_rows(self) -> int:
        return int(self.timestamps.shape[0])

    @property
    def signal_names(self) -> list[str]:
        return list(self._names)

    @property
    def columns(self) -> Mapping[str, np.ndarray]:
        return {name: self._data[:, i] for i, name in enumerate(self._names)}

    def has_signal(self, name: str) -> bool:
        return name in self._index

    def column(self, name: str) -> np.ndarray:
        return self._data[:, self._index[name]]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SignalLog):
            return NotImplemented
        return (
            self.manifest == other.manifest
            and self._names == other._names
            and bool(np.array_equal(self.timestamps, other.timestamps))
            and bool(np.array_equal(self._data, other._data))
        )


@dataclass(frozen=True)
class Scenario:
    """A fixed-length window of one log, the atomic unit of retrieval."""

    scenario_id: str
    vehicle: str
    log_id: str
    window_start: float
    window_end: float
    signal_slice: tuple[int, int]
    frame_ref: Path | None
    link: str


def _parse_utc(value: object, key: str, path: Path) -> datetime:
    if not isinstance(value, str):
        raise MalformedManifest(f"{path}: {key} must be an ISO-8601 string")
    text = value[:-1] + "+00:00" if value.endswith("Z") else value
    try:
        return datetime.fromisoformat(text)
    except ValueError as exc:
        raise MalformedManifest(f"{path}: {key} {value!r} is not ISO-8601") from exc


def load_manifest(manifest_path: str | Path) -> LogManifest:
    """Parse a manifest JSON file; unknown keys are rejected."""
    path = Path(manifest_path)
    if not path.is_file():
        raise MissingFile(f"manifest file not found: {path}")
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedManifest(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(obj, dict):
        raise MalformedManifest(f"{path}: manifest must be a JSON object")

    keys = set(obj)
    unknown = keys - _MANIFEST_REQUIRED - _MANIFEST_OPTIONAL
    if unknown:
        raise MalformedManifest(f"{path}: unknown manifest keys {sorted(unknown)}")
    missing = _MANIFEST_REQUIRED - keys
    if missing:
        raise MalformedManifest(f"{path}: missing manifest keys {sorted(missing)}")

    for key in ("vehicle", "log_id", "signals_file", "link_template"):
        if not isinstance(obj[key], str):
            raise MalformedManifest(f"{path}: {key} must be a string")
    if not obj["vehicle"] or not obj["log_id"]:
        raise MalformedManifest(f"{path}: vehicle and log_id must be non-empty")

    utc_start = _parse_utc(obj["utc_start"], "utc_start", path)
    utc_end = _parse_utc(obj["utc_end"], "utc_end", path)
    if not utc_start < utc_end:
        raise MalformedManifest(
            f"{path}: utc_start {obj['utc_start']!r} must precede utc_end "
            f"{obj['utc_end']!r}"
        )

    base = path.parent
    signals_file = base / obj["signals_file"]
    frames_dir = None
    if "frames_dir" in obj:
        if not isinstance(obj["frames_dir"], str):
            raise MalformedManifest(f"{path}: frames_dir must be a string")
        frames_dir = base / obj["frames_dir"]

    return LogManifest(
        vehicle=obj["vehicle"],
        log_id=obj["log_id"],
        utc_start=utc_start,
        utc_end=utc_end,
        signals_file=signals_file,
        frames_dir=frames_dir,
        link_template=obj["link_template"],
    )


def load_log(manifest_path: str | Path) -> SignalLog:
    """Load the manifest and its signals CSV into a SignalLog.

    The CSV is UTF-8 with RFC-4180 quoting, ``timestamp`` first column,
    epoch-seconds decimal. Every cell must be a finite number; errors name
    the offending file, line, and column. Deterministic: identical file
    bytes produce identical SignalLog values.
    """
    manifest = load_manifest(manifest_path)
    path = manifest.signals_file
    if not path.is_file():
        raise MissingFile(f"signals file not found: {path}")

    timestamps: list[float] = []
    rows: list[list[float]] = []
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedSignals(f"{path}: empty file, expected a header row")
        if not header:
            raise MalformedSignals(f"{path}: empty header row")
        if header[0] != TIMESTAMP_COLUMN:
            raise MalformedSignals(
                f"{path}: first column must be {TIMESTAMP_COLUMN!r}, got {header[0]!r}"
            )
        names = header[1:]
        seen: set[str] = set()
        for name in names:
            if name in seen or name == TIMESTAMP_COLUMN:
                raise MalformedSignals(f"{path}: duplicate column name {name!r}")
            seen.add(name)
        width = len(header)

        prev_ts = -math.inf
        for line_no, row in enumerate(reader, start=2):
            if len(row) != width:
                raise RaggedColumns(
                    f"{path}: line {line_no} has {len(row)} cells, expected {width}"
                )
            values = []
            for col_i, cell in enumerate(row):
                try:
                    value = float(cell)
                except ValueError:
                    value = math.nan
                if not math.isfinite(value):
                    col_name = TIMESTAMP_COLUMN if col_i == 0 else names[col_i - 1]
                    raise NonNumericCell(
                        f"{path}: line {line_no}, column {col_name!r}: "
                        f"{cell!r} is not a finite number"
                    )
                values.append(value)
            ts = values[0]
            if ts <= prev_ts:
                raise NonMonotonicTimestamps(
                    f"{path}: line {line_no} timestamp {ts} does not increase "
                    f"past {prev_ts}"
                )
            prev_ts = ts
            timestamps.append(ts)
            rows.append(values[1:])

    data = (
        np.asarray(rows, dtype=np.float64)
        if rows
        else np.empty((0, len(names)), dtype=np.float64)
    )
    return SignalLog(
        manifest=manifest,
        timestamps=np.asarray(timestamps, dtype=np.float64),
        names=names,
        data=data,
    )


def segment(log: SignalLog, window_s: float = DEFAULT_WINDOW_S) -> list[Scenario]:
    """Tile the log into scenarios of ``window_s`` seconds.

    Windows start at the log's first timestamp and are contiguous; a window
    covers rows with window_start <= t < window_end. The trailing partial
    window is dropped. Scenario ids are ``{log_id}#{index}``; the frame
    reference points at ``frames_dir/{scenario_id}.jpg`` when that file
    exists.
    """
    if window_s <= 0:
        raise ValueError(f"window_s must be positive, got {window_s}")
    if log.n_rows == 0:
        raise EmptyLog(f"log {log.manifest.log_id!r} has no rows")

    ts = log.timestamps
    t_first = float(ts[0])
    t_last = float(ts[-1])
    manifest = log.manifest

    scenarios: list[Scenario] = []
    start = t_first
    index = 0
    while start + window_s <= t_last:
        end = start + window_s
        if end <= start:
            raise ValueError(
                f"window_s={window_s} vanishes against timestamps near {start}"
            )
        row_start = int(np.searchsorted(ts, start, side="left"))
        row_stop = int(np.searchsorted(ts, end, side="left"))
        scenario_id = f"{manifest.log_id}#{index}"
        frame_ref = None
        if manifest.frames_dir is not None:
            candidate = manifest.frames_dir / f"{scenario_id}.jpg"
            if candidate.is_file():
                frame_ref = candidate
        scenarios.append(
            Scenario(
                scenario_id=scenario_id,
                vehicle=manifest.vehicle,
                log_id=manifest.log_id,
                window_start=start,
                window_end=end,
                signal_slice=(row_start, row_stop),
                frame_ref=frame_ref,
                link=manifest.link_template.replace("{scenario_id}", scenario_id),
            )
        )
        start = end
        index += 1
    return scenarios
