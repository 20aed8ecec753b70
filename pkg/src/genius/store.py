"""Embedded-vector collection: add, exact top-N query, JSONL persistence.

Search is an exact brute-force scan over a contiguous float64 matrix --
collections here are small (10^2..10^5 records) and exactness is required
for metric reproducibility. Ties break by insertion order. The on-disk
format is line-oriented JSON with a trailing FNV-1a checksum so files are
human-inspectable, diff-able and round-trip exact.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Mapping

import numpy as np

from .errors import (
    CorruptStore,
    DimensionMismatch,
    DuplicateId,
    EmptyCollection,
    IoFailure,
)
from .fnv import fnv1a64

SCHEMA_VERSION = 1
METADATA_KEYS = frozenset({"vehicle", "log_id", "window_start", "link"})

_INITIAL_CAPACITY = 64


@dataclass(eq=False)
class EmbeddedRecord:
    """One stored scenario: id, unit vector, description, provenance metadata."""

    id: str
    vector: np.ndarray
    description: str
    metadata: dict
    # metadata carries exactly: vehicle, log_id, window_start, link

    def __post_init__(self) -> None:
        self.vector = np.asarray(self.vector, dtype=np.float64)
        keys = set(self.metadata)
        if keys != METADATA_KEYS:
            raise ValueError(
                f"record {self.id!r}: metadata keys {sorted(keys)} != "
                f"{sorted(METADATA_KEYS)}"
            )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EmbeddedRecord):
            return NotImplemented
        return (
            self.id == other.id
            and self.description == other.description
            and self.metadata == other.metadata
            and self.vector.shape == other.vector.shape
            and bool(np.array_equal(self.vector, other.vector))
        )


class Collection:
    """Ordered set of EmbeddedRecords bound to one (embedder_id, dim) pair."""

    def __init__(self, name: str, embedder_id: str, dim: int) -> None:
        if dim < 1:
            raise ValueError(f"dim must be positive, got {dim}")
        self.name = name
        self.embedder_id = embedder_id
        self.dim = dim
        self._records: list[EmbeddedRecord] = []
        self._row_by_id: dict[str, int] = {}
        self._matrix = np.empty((_INITIAL_CAPACITY, dim), dtype=np.float64)
        self._sq_norms = np.empty(_INITIAL_CAPACITY, dtype=np.float64)

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self) -> Iterator[EmbeddedRecord]:
        return iter(self._records)

    @property
    def records(self) -> tuple[EmbeddedRecord, ...]:
        return tuple(self._records)

    def get(self, record_id: str) -> EmbeddedRecord | None:
        row = self._row_by_id.get(record_id)
        return None if row is None else self._records[row]

    def add(self, record: EmbeddedRecord) -> "Collection":
        """Append one record; rejects duplicate ids and dimension mismatches."""
        if record.id in self._row_by_id:
            raise DuplicateId(f"id {record.id!r} already in collection {self.name!r}")
        if record.vector.shape != (self.dim,):
            raise DimensionMismatch(
                f"record {record.id!r} has dim {record.vector.shape[0]}, "
                f"collection {self.name!r} expects {self.dim}"
            )
        n = len(self._records)
        if n == self._matrix.shape[0]:
            grown = np.empty((2 * n, self.dim), dtype=np.float64)
            grown[:n] = self._matrix[:n]
            self._matrix = grown
            grown_norms = np.empty(2 * n, dtype=np.float64)
            grown_norms[:n] = self._sq_norms[:n]
            self._sq_norms = grown_norms
        self._matrix[n] = record.vector
        self._sq_norms[n] = float(np.dot(record.vector, record.vector))
        self._records.append(record)
        self._row_by_id[record.id] = n
        return self

    def query(self, q: np.ndarray, n: int) -> list[tuple[EmbeddedRecord, float]]:
        """Exact top-n by ascending squared Euclidean distance.

        Returns min(n, count) pairs; equal distances keep insertion order.
        """
        if n < 1:
            raise ValueError(f"n must be positive, got {n}")
        if not self._records:
            raise EmptyCollection(f"collection {self.name!r} has no records")
        q = np.asarray(q, dtype=np.float64)
        if q.shape != (self.dim,):
            raise DimensionMismatch(
                f"query vector has dim {q.shape[0] if q.ndim == 1 else q.shape}, "
                f"collection {self.name!r} expects {self.dim}"
            )
        count = len(self._records)
        rows = self._matrix[:count]
        # ||r - q||^2 = ||r||^2 + ||q||^2 - 2 r.q; clipped at 0 because the
        # expansion can round a few ulps negative for near-identical vectors.
        distances = self._sq_norms[:count] + float(np.dot(q, q)) - 2.0 * (rows @ q)
        np.maximum(distances, 0.0, out=distances)
        order = np.argsort(distances, kind="stable")[: min(n, count)]
        return [(self._records[i], float(distances[i])) for i in order]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Collection):
            return NotImplemented
        return (
            self.name == other.name
            and self.embedder_id == other.embedder_id
            and self.dim == other.dim
            and self._records == other._records
        )


def _format_float(v: float) -> str:
    # 17 significant digits: exact double round-trip, stable bytes on re-save.
    return f"{v:.17g}"


def _record_line(record: EmbeddedRecord) -> str:
    vector_json = "[" + ",".join(_format_float(v) for v in record.vector) + "]"
    meta_json = json.dumps(
        record.metadata, separators=(",", ":"), sort_keys=True, ensure_ascii=False
    )
    return (
        "{"
        + f'"id":{json.dumps(record.id, ensure_ascii=False)}'
        + f',"vector":{vector_json}'
        + f',"description":{json.dumps(record.description, ensure_ascii=False)}'
        + f',"metadata":{meta_json}'
        + "}"
    )


def save(collection: Collection, path: str | Path) -> None:
    """Persist to ``path`` atomically (write-to-temp-then-rename)."""
    path = Path(path)
    header = json.dumps(
        {
            "schema": SCHEMA_VERSION,
            "name": collection.name,
            "embedder_id": collection.embedder_id,
            "dim": collection.dim,
        },
        separators=(",", ":"),
        ensure_ascii=False,
    )
    lines = [header]
    lines.extend(_record_line(record) for record in collection)
    body = ("\n".join(lines) + "\n").encode("utf-8")
    checksum = json.dumps({"checksum": f"{fnv1a64(body):016x}"}, separators=(",", ":"))
    payload = body + checksum.encode("utf-8") + b"\n"
    try:
        fd, tmp_name = tempfile.mkstemp(
            dir=path.parent, prefix=path.name + ".", suffix=".tmp"
        )
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(payload)
            os.replace(tmp_name, path)
        except BaseException:
            os.unlink(tmp_name)
            raise
    except OSError as exc:
        raise IoFailure(f"cannot write store file {path}: {exc}") from exc


def load(path: str | Path) -> Collection:
    """Load a collection saved by :func:`save`; value-equal to the original."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise IoFailure(f"cannot read store file {path}: {exc}") from exc

    lines = raw.split(b"\n")
    if lines and lines[-1] == b"":
        lines.pop()
    if len(lines) < 2:
        raise CorruptStore(f"{path}: truncated store, no checksum line")

    checksum_line_no = len(lines)
    try:
        trailer = json.loads(lines[-1])
        stored_checksum = trailer["checksum"]
    except (json.JSONDecodeError, TypeError, KeyError) as exc:
        raise CorruptStore(
            f"{path}: line {checksum_line_no} is not a checksum line ({exc})"
        ) from exc

    body = b"\n".join(lines[:-1]) + b"\n"
    actual = f"{fnv1a64(body):016x}"
    if actual != stored_checksum:
        raise CorruptStore(
            f"{path}: line {checksum_line_no} checksum {stored_checksum!r} "
            f"does not match content ({actual!r})"
        )

    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise CorruptStore(f"{path}: line 1 is not a valid header ({exc})") from exc
    if not isinstance(header, dict) or header.get("schema") != SCHEMA_VERSION:
        raise CorruptStore(
            f"{path}: line 1 has schema {header.get('schema')!r}, "
            f"expected {SCHEMA_VERSION}"
        )
    try:
        collection = Collection(header["name"], header["embedder_id"], int(header["dim"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptStore(f"{path}: line 1 header incomplete ({exc})") from exc

    for line_no, line in enumerate(lines[1:-1], start=2):
        try:
            obj = json.loads(line)
            record = EmbeddedRecord(
                id=obj["id"],
                vector=np.asarray(obj["vector"], dtype=np.float64),
                description=obj["description"],
                metadata=obj["metadata"],
            )
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise CorruptStore(f"{path}: line {line_no} bad record ({exc})") from exc
        try:
            collection.add(record)
        except (DuplicateId, DimensionMismatch) as exc:
            raise CorruptStore(f"{path}: line {line_no}: {exc}") from exc
    return collection
