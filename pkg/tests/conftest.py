import csv
import json
from pathlib import Path
from types import SimpleNamespace

import pytest

from genius.cli import main as cli_main


def write_signals_csv(path: Path, timestamps, columns: dict) -> None:
    """columns maps signal name -> sequence aligned with timestamps."""
    names = list(columns)
    with path.open("w", encoding="utf-8", newline="") as fh:
        csv.writer(fh, quoting=csv.QUOTE_ALL).writerow(["timestamp"] + names)
        writer = csv.writer(fh)
        for i, ts in enumerate(timestamps):
            writer.writerow([ts] + [columns[name][i] for name in names])


def write_manifest(directory: Path, **overrides) -> Path:
    manifest = {
        "vehicle": "veh-1",
        "log_id": "log-a",
        "utc_start": "2024-03-01T08:00:00+00:00",
        "utc_end": "2024-03-01T09:00:00+00:00",
        "signals_file": "signals.csv",
        "link_template": "https://viz.example/scenario/{scenario_id}",
    }
    manifest.update(overrides)
    path = directory / f"{manifest.get('log_id', 'log')}.manifest.json"
    path.write_text(json.dumps(manifest, indent=2), encoding="utf-8")
    return path


@pytest.fixture
def make_log(tmp_path):
    """Write a manifest + signals CSV pair; returns the manifest path."""

    def _make(timestamps, columns=None, **manifest_overrides):
        columns = columns if columns is not None else {"speed": [0.0] * len(timestamps)}
        directory = tmp_path / manifest_overrides.get("log_id", "log-a")
        directory.mkdir(parents=True, exist_ok=True)
        write_signals_csv(directory / "signals.csv", timestamps, columns)
        return write_manifest(directory, **manifest_overrides)

    return _make


@pytest.fixture(scope="session")
def demo_store(tmp_path_factory):
    """Demo corpus run once through the real CLI pipeline."""
    root = tmp_path_factory.mktemp("demo")
    corpus = root / "corpus"
    scenarios = root / "scenarios"
    store_path = root / "store.jsonl"
    assert cli_main(["demo", "--out", str(corpus)]) == 0
    assert (
        cli_main(
            ["ingest", "--manifest", str(corpus / "logs" / "*.manifest.json"),
             "--window", "30", "--out", str(scenarios)]
        )
        == 0
    )
    assert (
        cli_main(
            ["index", "--scenarios", str(scenarios),
             "--rules", str(corpus / "rules.json"), "--store", str(store_path)]
        )
        == 0
    )
    return SimpleNamespace(
        root=root,
        corpus=corpus,
        scenarios=scenarios,
        store=store_path,
        rules=corpus / "rules.json",
        queries=corpus / "queries.json",
        truth=corpus / "truth.json",
    )
