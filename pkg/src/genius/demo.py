"""Reproducible synthetic corpus: 8 scenario categories x N iterations.

Production drive data is proprietary, so the repo ships its own stand-in:
eight single-category drives whose signal rules render descriptions with
deliberately disjoint category vocabulary. Within a category, iterations
differ (varying speeds, detail phrases, interventions) so distances spread;
across categories only filler words are shared. Everything is arithmetic in
(category, iteration), no RNG, so regenerated corpora are byte-identical.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

DEMO_WINDOW_S = 30
DEMO_SAMPLE_HZ = 1
_BASE_EPOCH = 1709280000.0  # 2024-03-01T08:00:00Z
_LINK_TEMPLATE = "https://viz.example/scenario/{scenario_id}"


@dataclass(frozen=True)
class DemoCategory:
    name: str
    phrase: str
    details: tuple[str, ...]


# Content words are pairwise disjoint across categories; connective words
# ("a", "with", "and", ...) may repeat and act as symmetric noise. Detail
# phrases vary in length so description norms spread smoothly.
CATEGORIES: tuple[DemoCategory, ...] = (
    DemoCategory(
        "tunnel",
        "approaching a tunnel entrance with concrete walls and overhead lighting",
        (
            "ventilation fans humming",
            "sodium lamps",
            "tiled lining",
            "echoing",
            "portal beacons",
            "dim luminaires",
        ),
    ),
    DemoCategory(
        "snow",
        "snow covered surface with thick snowfall and icy patches",
        (
            "plowed banks",
            "drifting flurries",
            "studded tyres crunching",
            "frost",
            "slush furrows",
            "whiteout gusts",
        ),
    ),
    DemoCategory(
        "bridge",
        "passing under a bridge with steel girders shading the underpass",
        (
            "riveted trusses",
            "stained abutment",
            "clearance signage",
            "pillars",
            "expansion joints clunking",
            "girder shadows",
        ),
    ),
    DemoCategory(
        "accident",
        "traffic accident ahead with a damaged car and scattered debris",
        (
            "deployed airbags",
            "shattered glass",
            "tow rig",
            "flares",
            "cordon cones",
            "crumpled bonnet",
        ),
    ),
    DemoCategory(
        "roundabout",
        "entering a roundabout while yielding to circulating vehicles",
        (
            "gyratory flow",
            "splitter island",
            "exit spokes",
            "apex",
            "curbstones",
            "merging taxis",
        ),
    ),
    DemoCategory(
        "rain",
        "heavy rain with active wipers and puddles forming on the tarmac",
        (
            "downpour sheets",
            "spray plumes",
            "beaded droplets",
            "aquaplaning risk",
            "gutters gurgling",
            "drizzle bands",
        ),
    ),
    DemoCategory(
        "fog",
        "dense fog bank with low visibility and hazy outlines",
        (
            "mist veils",
            "halo glare",
            "murky hollows",
            "shrouded verges",
            "beacon loom",
            "haze",
        ),
    ),
    DemoCategory(
        "forest",
        "rural forest stretch with tall pines and a gravel shoulder",
        (
            "timber stacks",
            "moose fencing",
            "fern undergrowth",
            "logging spur",
            "thicket margins",
            "canopy shade",
        ),
    ),
)

# Queries whose vocabulary is absent from the corpus except for the filler
# word "at": every description overlaps them equally, so distances vary only
# through description norms and no scenario is a real answer.
ABSENT_QUERIES = (
    "waiting at petrol station pumps refuelling overnight",
    "reversing at warehouse depot loading trailer",
)

_VELOCITY_SIGNAL = "motion/longitudinal_velocity/meters_per_second"
_LAT_SIGNAL = "satellite/latitude/nanodegrees"
_LON_SIGNAL = "satellite/longitude/nanodegrees"
_LKA_SIDE_SIGNAL = "lka/intervention_side"
_LKA_ENABLED_SIGNAL = "lka/enabled"
_LKA_EMERGENCY_SIGNAL = "lka/emergency_enabled"


def _detail_active(category_i: int, iteration: int, detail_k: int) -> bool:
    return (iteration * 2 + detail_k * 3 + category_i) % 7 < 3


def _base_speed(category_i: int, iteration: int) -> float:
    return 12.0 + category_i + 2.0 * iteration


@dataclass(frozen=True)
class DemoLayout:
    """Paths the generator produced."""

    root: Path
    manifests: tuple[Path, ...]
    rules_path: Path
    queries_path: Path
    truth_path: Path
    manifest_glob: str


def demo_rules(categories: tuple[DemoCategory, ...] = CATEGORIES) -> list[dict]:
    rules: list[dict] = [
        {
            "rule_id": "velocity-summary",
            "signal": _VELOCITY_SIGNAL,
            "kind": "numeric_summary",
            "params": {},
            "template": (
                "driving at speeds between {min} and {max} meters per second "
                "averaging {mean}"
            ),
        },
        {
            "rule_id": "latitude",
            "signal": _LAT_SIGNAL,
            "kind": "geo_position",
            "params": {},
            "template": "near latitude {degrees} north",
        },
        {
            "rule_id": "longitude",
            "signal": _LON_SIGNAL,
            "kind": "geo_position",
            "params": {},
            "template": "near longitude {degrees} east",
        },
        {
            "rule_id": "lka-emergency-left",
            "signal": _LKA_SIDE_SIGNAL,
            "kind": "rising_edge",
            "params": {"guards": [_LKA_ENABLED_SIGNAL, _LKA_EMERGENCY_SIGNAL]},
            "template": "left side emergency lka intervention",
        },
    ]
    for category in categories:
        rules.append(
            {
                "rule_id": f"env-{category.name}",
                "signal": f"env/{category.name}/active",
                "kind": "boolean_condition",
                "params": {"min_fraction": 0.5},
                "template": category.phrase,
            }
        )
        for k, detail in enumerate(category.details):
            rules.append(
                {
                    "rule_id": f"env-{category.name}-detail{k}",
                    "signal": f"env/{category.name}/detail{k}",
                    "kind": "boolean_condition",
                    "params": {"min_fraction": 0.5},
                    "template": detail,
                }
            )
    return rules


def _signal_columns(categories: tuple[DemoCategory, ...]) -> list[str]:
    names = [_VELOCITY_SIGNAL, _LAT_SIGNAL, _LON_SIGNAL]
    names += [_LKA_SIDE_SIGNAL, _LKA_ENABLED_SIGNAL, _LKA_EMERGENCY_SIGNAL]
    for category in categories:
        names.append(f"env/{category.name}/active")
        names.extend(
            f"env/{category.name}/detail{k}" for k in range(len(category.details))
        )
    return names


def _cell_value(
    column: str,
    categories: tuple[DemoCategory, ...],
    category_i: int,
    row: int,
    window_rows: int,
) -> float:
    iteration = row // window_rows
    if column == _VELOCITY_SIGNAL:
        return _base_speed(category_i, iteration) + ((row % 5) - 2) * 0.4
    if column == _LAT_SIGNAL:
        return round((57.7 + 0.05 * category_i) * 1e9)
    if column == _LON_SIGNAL:
        return round((11.9 + 0.05 * category_i) * 1e9)
    own = categories[category_i]
    if column == _LKA_SIDE_SIGNAL:
        # Mid-window 0 -> 1 transition in even iterations of accident drives.
        if own.name == "accident" and iteration % 2 == 0:
            return 1.0 if row % window_rows >= window_rows // 2 else 0.0
        return 0.0
    if column in (_LKA_ENABLED_SIGNAL, _LKA_EMERGENCY_SIGNAL):
        return 1.0 if own.name == "accident" else 0.0
    prefix, _, rest = column.partition("/")
    assert prefix == "env"
    cat_name, _, flag = rest.partition("/")
    if cat_name != own.name:
        return 0.0
    if flag == "active":
        return 1.0
    detail_k = int(flag.removeprefix("detail"))
    return 1.0 if _detail_active(category_i, iteration, detail_k) else 0.0


def generate_demo(
    out_dir: str | Path,
    categories: int = len(CATEGORIES),
    iterations: int = 10,
) -> DemoLayout:
    """Write manifests, signal CSVs, rules, queries, and ground truth."""
    if not 1 <= categories <= len(CATEGORIES):
        raise ValueError(f"categories must be in 1..{len(CATEGORIES)}")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    chosen = CATEGORIES[:categories]

    root = Path(out_dir)
    logs_dir = root / "logs"
    logs_dir.mkdir(parents=True, exist_ok=True)

    window_rows = DEMO_WINDOW_S * DEMO_SAMPLE_HZ
    n_rows = iterations * window_rows + 1  # closing row completes the last window
    columns = _signal_columns(chosen)

    manifests = []
    for ci, category in enumerate(chosen):
        t0 = _BASE_EPOCH + ci * 3600.0
        csv_path = logs_dir / f"drive-{category.name}.csv"
        with csv_path.open("w", encoding="utf-8", newline="") as fh:
            # Signal names carry '/', so the header row is fully quoted.
            csv.writer(fh, quoting=csv.QUOTE_ALL).writerow(["timestamp"] + columns)
            writer = csv.writer(fh)
            for row in range(n_rows):
                cells = [f"{t0 + row / DEMO_SAMPLE_HZ:.1f}"]
                for column in columns:
                    value = _cell_value(column, chosen, ci, row, window_rows)
                    cells.append(f"{value:.12g}")
                writer.writerow(cells)

        manifest_path = logs_dir / f"drive-{category.name}.manifest.json"
        utc_start = datetime.fromtimestamp(t0, tz=timezone.utc)
        utc_end = datetime.fromtimestamp(
            t0 + (n_rows - 1) / DEMO_SAMPLE_HZ, tz=timezone.utc
        )
        manifest_path.write_text(
            json.dumps(
                {
                    "vehicle": f"veh-{ci + 1:03d}",
                    "log_id": f"drive-{category.name}",
                    "utc_start": utc_start.isoformat(),
                    "utc_end": utc_end.isoformat(),
                    "signals_file": csv_path.name,
                    "link_template": _LINK_TEMPLATE,
                },
                indent=2,
                sort_keys=True,
            )
            + "\n",
            encoding="utf-8",
        )
        manifests.append(manifest_path)

    rules_path = root / "rules.json"
    rules_path.write_text(
        json.dumps(demo_rules(chosen), indent=2) + "\n", encoding="utf-8"
    )

    queries = [category.phrase for category in chosen] + list(ABSENT_QUERIES)
    queries_path = root / "queries.json"
    queries_path.write_text(json.dumps(queries, indent=2) + "\n", encoding="utf-8")

    truth = [
        {
            "query": category.phrase,
            "correct_ids": [
                f"drive-{category.name}#{j}" for j in range(iterations)
            ],
        }
        for category in chosen
    ]
    truth += [{"query": q, "correct_ids": []} for q in ABSENT_QUERIES]
    truth_path = root / "truth.json"
    truth_path.write_text(json.dumps(truth, indent=2) + "\n", encoding="utf-8")

    return DemoLayout(
        root=root,
        manifests=tuple(manifests),
        rules_path=rules_path,
        queries_path=queries_path,
        truth_path=truth_path,
        manifest_glob=str(logs_dir / "*.manifest.json"),
    )
