"""File-level plumbing between the CLI stages.

``genius ingest`` writes one scenario JSON per window; ``genius index``
reads them back, re-opens the parent logs, runs describe -> combine ->
embed -> add for every scenario, and saves the collection. Scenario files
reference their manifest so later stages can reload signal data without
re-segmenting.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Sequence

from .describe import (
    ScenarioDescription,
    SignalRule,
    TemplateCombiner,
    TextCombiner,
    VisionDescriber,
    describe_scenario,
)
from .embed import Embedder, batch_embed
from .errors import GeniusError, MalformedManifest, MissingFile
from .ingest import Scenario, SignalLog, load_log
from .store import Collection, EmbeddedRecord

_SCENARIO_KEYS = {
    "scenario_id",
    "vehicle",
    "log_id",
    "window_start",
    "window_end",
    "row_start",
    "row_stop",
    "frame_ref",
    "link",
    "manifest",
}


def scenario_to_dict(scenario: Scenario, manifest_path: Path) -> dict:
    return {
        "scenario_id": scenario.scenario_id,
        "vehicle": scenario.vehicle,
        "log_id": scenario.log_id,
        "window_start": scenario.window_start,
        "window_end": scenario.window_end,
        "row_start": scenario.signal_slice[0],
        "row_stop": scenario.signal_slice[1],
        "frame_ref": str(scenario.frame_ref) if scenario.frame_ref else None,
        "link": scenario.link,
        "manifest": str(Path(manifest_path).resolve()),
    }


def write_scenarios(
    scenarios: Sequence[Scenario], manifest_path: Path, out_dir: Path
) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for scenario in scenarios:
        path = out_dir / f"{scenario.scenario_id}.json"
        path.write_text(
            json.dumps(scenario_to_dict(scenario, manifest_path), indent=2, sort_keys=True)
            + "\n",
            encoding="utf-8",
        )
        written.append(path)
    return written


def read_scenario_file(path: Path) -> tuple[Scenario, Path]:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise GeniusError(f"cannot read scenario file {path}: {exc}") from exc
    if not isinstance(obj, dict) or set(obj) != _SCENARIO_KEYS:
        raise GeniusError(f"{path}: not a scenario file (unexpected keys)")
    scenario = Scenario(
        scenario_id=obj["scenario_id"],
        vehicle=obj["vehicle"],
        log_id=obj["log_id"],
        window_start=float(obj["window_start"]),
        window_end=float(obj["window_end"]),
        signal_slice=(int(obj["row_start"]), int(obj["row_stop"])),
        frame_ref=Path(obj["frame_ref"]) if obj["frame_ref"] else None,
        link=obj["link"],
    )
    return scenario, Path(obj["manifest"])


def read_scenario_dir(scenario_dir: Path) -> list[tuple[Scenario, Path]]:
    """Load every scenario file in a directory, ordered (log_id, window)."""
    scenario_dir = Path(scenario_dir)
    if not scenario_dir.is_dir():
        raise MissingFile(f"scenario directory not found: {scenario_dir}")
    entries = [read_scenario_file(p) for p in sorted(scenario_dir.glob("*.json"))]
    if not entries:
        raise GeniusError(f"no scenario files in {scenario_dir}")
    entries.sort(key=lambda e: (e[0].log_id, e[0].window_start))
    return entries


def describe_entries(
    entries: Sequence[tuple[Scenario, Path]],
    rules: Sequence[SignalRule],
    vision: VisionDescriber | None = None,
    combiner: TextCombiner | None = None,
    workers: int = 1,
    warnings: list[str] | None = None,
) -> list[ScenarioDescription]:
    """Describe every scenario, in input order, with bounded parallelism.

    All per-scenario failures are gathered into one report instead of
    stopping at the first.
    """
    combiner = combiner or TemplateCombiner()
    logs: dict[str, SignalLog] = {}
    for _, manifest_path in entries:
        key = str(manifest_path)
        if key not in logs:
            logs[key] = load_log(manifest_path)

    def produce(entry: tuple[Scenario, Path]) -> ScenarioDescription:
        scenario, manifest_path = entry
        log = logs[str(manifest_path)]
        if scenario.log_id != log.manifest.log_id:
            raise MalformedManifest(
                f"scenario {scenario.scenario_id!r} references manifest "
                f"{manifest_path} with log_id {log.manifest.log_id!r}"
            )
        return describe_scenario(
            scenario, log, rules, vision=vision, combiner=combiner, warnings=warnings
        )

    failures: list[str] = []
    descriptions: list[ScenarioDescription] = []
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(produce, entry) for entry in entries]
            for entry, future in zip(entries, futures):
                try:
                    descriptions.append(future.result())
                except GeniusError as exc:
                    failures.append(f"{entry[0].scenario_id}: {exc}")
    else:
        for entry in entries:
            try:
                descriptions.append(produce(entry))
            except GeniusError as exc:
                failures.append(f"{entry[0].scenario_id}: {exc}")
    if failures:
        raise GeniusError(
            f"{len(failures)} scenario(s) failed to describe:\n  "
            + "\n  ".join(failures)
        )
    return descriptions


def build_collection(
    entries: Sequence[tuple[Scenario, Path]],
    rules: Sequence[SignalRule],
    embedder: Embedder,
    name: str,
    vision: VisionDescriber | None = None,
    combiner: TextCombiner | None = None,
    workers: int = 1,
    warnings: list[str] | None = None,
) -> Collection:
    """Run the full indexing stage over scenario entries."""
    descriptions = describe_entries(
        entries, rules, vision=vision, combiner=combiner, workers=workers,
        warnings=warnings,
    )
    vectors = batch_embed([d.combined_text for d in descriptions], embedder)
    collection = Collection(name, embedder.embedder_id, int(vectors[0].shape[0]))
    for (scenario, _), description, vector in zip(entries, descriptions, vectors):
        collection.add(
            EmbeddedRecord(
                id=scenario.scenario_id,
                vector=vector,
                description=description.combined_text,
                metadata={
                    "vehicle": scenario.vehicle,
                    "log_id": scenario.log_id,
                    "window_start": scenario.window_start,
                    "link": scenario.link,
                },
            )
        )
    return collection
