"""Turn a scenario's signal slice and camera frame into one text description.

Signal text comes from an explicit, versioned rule set (config-driven signal
subset): each rule renders a template when its condition fires on the
scenario's rows. Vision text comes from a pluggable describer; the two texts
are merged by a pluggable combiner. Everything here is pure given fixed
adapters, so scenarios can be described in parallel.
"""

from __future__ import annotations

import json
import string
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Protocol, Sequence

import numpy as np

from .errors import EmptyDescription, MalformedRules
from .ingest import Scenario, SignalLog

RULE_KINDS = ("numeric_summary", "geo_position", "rising_edge", "boolean_condition")

# Placeholders each rule kind may use in its template.
KIND_PLACEHOLDERS: dict[str, frozenset[str]] = {
    "numeric_summary": frozenset({"min", "mean", "max"}),
    "geo_position": frozenset({"degrees"}),
    "rising_edge": frozenset({"count"}),
    "boolean_condition": frozenset(),
}

NANODEGREES_PER_DEGREE = 1e9
DEFAULT_MIN_FRACTION = 0.5


@dataclass(frozen=True)
class SignalRule:
    """One signal-to-text transformation."""

    rule_id: str
    signal: str
    kind: str
    params: Mapping[str, Any]
    template: str

    @property
    def guards(self) -> tuple[str, ...]:
        return tuple(self.params.get("guards", ()))

    @property
    def min_fraction(self) -> float:
        return float(self.params.get("min_fraction", DEFAULT_MIN_FRACTION))


@dataclass(frozen=True)
class ScenarioDescription:
    """Signal text + vision text + their combination for one scenario."""

    scenario_id: str
    signal_text: str
    vision_text: str
    combined_text: str


def _template_placeholders(template: str) -> set[str]:
    names = set()
    for _, field_name, format_spec, conversion in string.Formatter().parse(template):
        if field_name is None:
            continue
        if field_name == "" or field_name.isdigit():
            raise MalformedRules(
                f"template {template!r} uses positional placeholders; "
                "only named ones are allowed"
            )
        if format_spec or conversion:
            raise MalformedRules(
                f"template {template!r} uses a format spec on {field_name!r}; "
                "values are pre-formatted"
            )
        names.add(field_name)
    return names


def _validate_rule(rule: SignalRule) -> None:
    if not rule.rule_id:
        raise MalformedRules("rule_id must be non-empty")
    if rule.kind not in RULE_KINDS:
        raise MalformedRules(
            f"rule {rule.rule_id!r}: unknown kind {rule.kind!r}; "
            f"expected one of {', '.join(RULE_KINDS)}"
        )
    if not rule.signal:
        raise MalformedRules(f"rule {rule.rule_id!r}: signal must be non-empty")
    try:
        placeholders = _template_placeholders(rule.template)
    except ValueError as exc:
        raise MalformedRules(f"rule {rule.rule_id!r}: bad template ({exc})") from exc
    allowed = KIND_PLACEHOLDERS[rule.kind]
    extra = placeholders - allowed
    if extra:
        raise MalformedRules(
            f"rule {rule.rule_id!r}: template placeholders {sorted(extra)} are not "
            f"produced by kind {rule.kind!r} (allowed: {sorted(allowed) or 'none'})"
        )
    if rule.kind == "boolean_condition" and not 0.0 < rule.min_fraction <= 1.0:
        raise MalformedRules(
            f"rule {rule.rule_id!r}: min_fraction must be in (0, 1], "
            f"got {rule.min_fraction}"
        )
    if rule.kind == "rising_edge":
        if not all(isinstance(g, str) and g for g in rule.guards):
            raise MalformedRules(
                f"rule {rule.rule_id!r}: guards must be non-empty signal names"
            )


def parse_rules(source: str | Path) -> list[SignalRule]:
    """Load a rule set from a JSON array; rule_ids must be unique."""
    path = Path(source)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise MalformedRules(f"cannot read rules file {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedRules(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(raw, list):
        raise MalformedRules(f"{path}: rule set must be a JSON array")

    rules = []
    seen_ids: set[str] = set()
    for i, obj in enumerate(raw):
        if not isinstance(obj, dict):
            raise MalformedRules(f"{path}: rule {i} must be an object")
        unknown = set(obj) - {"rule_id", "signal", "kind", "params", "template"}
        if unknown:
            raise MalformedRules(f"{path}: rule {i} has unknown keys {sorted(unknown)}")
        try:
            rule = SignalRule(
                rule_id=obj["rule_id"],
                signal=obj["signal"],
                kind=obj["kind"],
                params=obj.get("params", {}),
                template=obj["template"],
            )
        except KeyError as exc:
            raise MalformedRules(f"{path}: rule {i} is missing {exc}") from exc
        _validate_rule(rule)
        if rule.rule_id in seen_ids:
            raise MalformedRules(f"{path}: duplicate rule_id {rule.rule_id!r}")
        seen_ids.add(rule.rule_id)
        rules.append(rule)
    return rules


def format_quantity(value: float) -> str:
    """Fixed-point, up to 9 fractional digits, trailing zeros trimmed but at
    least one decimal digit kept: 14 -> '14.0', 57.123456789 stays exact."""
    text = f"{value:.9f}".rstrip("0")
    if text.endswith("."):
        text += "0"
    return text


def count_rising_edges(signal: np.ndarray, guards: Sequence[np.ndarray]) -> int:
    """0 -> 1 transitions between consecutive rows while all guards equal 1."""
    count = 0
    for i in range(1, len(signal)):
        if signal[i - 1] == 0 and signal[i] == 1 and all(g[i] == 1 for g in guards):
            count += 1
    return count


def _render_rule(rule: SignalRule, log: SignalLog, lo: int, hi: int) -> str | None:
    if hi <= lo:
        return None
    values = log.column(rule.signal)[lo:hi]
    if rule.kind == "numeric_summary":
        return rule.template.format(
            min=format_quantity(float(values.min())),
            mean=format_quantity(float(values.mean())),
            max=format_quantity(float(values.max())),
        )
    if rule.kind == "geo_position":
        midpoint = float(values[(len(values) - 1) // 2])
        return rule.template.format(
            degrees=format_quantity(midpoint / NANODEGREES_PER_DEGREE)
        )
    if rule.kind == "rising_edge":
        guard_cols = [log.column(name)[lo:hi] for name in rule.guards]
        count = count_rising_edges(values, guard_cols)
        if count == 0:
            return None
        return rule.template.format(count=count)
    if rule.kind == "boolean_condition":
        fraction = float((values == 1).mean())
        if fraction < rule.min_fraction:
            return None
        return rule.template
    raise MalformedRules(f"rule {rule.rule_id!r}: unknown kind {rule.kind!r}")


def describe_signals(
    scenario: Scenario,
    log: SignalLog,
    rules: Sequence[SignalRule],
    warnings: list[str] | None = None,
) -> str:
    """Render every firing rule in rule order and join the fragments.

    Rules naming signals the log does not have are skipped; each skip is
    reported into ``warnings`` when a list is supplied. Deterministic for a
    fixed rule list (order is the explicit list order).
    """
    lo, hi = scenario.signal_slice
    fragments = []
    for rule in rules:
        missing = [
            name
            for name in (rule.signal, *rule.guards)
            if not log.has_signal(name)
        ]
        if missing:
            if warnings is not None:
                warnings.append(
                    f"rule {rule.rule_id!r}: unknown signal(s) "
                    f"{', '.join(repr(m) for m in missing)} in log "
                    f"{log.manifest.log_id!r}; rule skipped"
                )
            continue
        rendered = _render_rule(rule, log, lo, hi)
        if rendered is not None:
            fragments.append(rendered)
    return ". ".join(fragments)


class VisionDescriber(Protocol):
    """Produces natural-language text for one camera frame."""

    def describe(self, frame_ref: Path) -> str: ...


class StubVisionDescriber:
    """Canned frame texts keyed by the frame's filename stem (scenario id)."""

    def __init__(self, canned: Mapping[str, str], default: str = "") -> None:
        self._canned = dict(canned)
        self._default = default

    def describe(self, frame_ref: Path) -> str:
        return self._canned.get(Path(frame_ref).stem, self._default)


def describe_frame(frame_ref: Path | None, describer: VisionDescriber) -> str:
    """Describe one frame; an absent frame yields "" without calling the
    describer. The describer's text is returned stripped of surrounding
    whitespace."""
    if frame_ref is None or not Path(frame_ref).is_file():
        return ""
    return describer.describe(Path(frame_ref)).strip()


class TextCombiner(Protocol):
    """Merges signal text and vision text into one description."""

    def combine(self, signal_text: str, vision_text: str) -> str: ...


class TemplateCombiner:
    """Default deterministic combiner: labels each part, omits empty ones."""

    def combine(self, signal_text: str, vision_text: str) -> str:
        parts = []
        if signal_text:
            parts.append(f"Signals: {signal_text}")
        if vision_text:
            parts.append(f"Camera: {vision_text}")
        return " ".join(parts)


def combine(signal_text: str, vision_text: str, combiner: TextCombiner) -> str:
    """Merge the two texts; raises EmptyDescription when both are empty."""
    if not signal_text and not vision_text:
        raise EmptyDescription("both signal and vision texts are empty")
    return combiner.combine(signal_text, vision_text)


def describe_scenario(
    scenario: Scenario,
    log: SignalLog,
    rules: Sequence[SignalRule],
    vision: VisionDescriber | None = None,
    combiner: TextCombiner | None = None,
    warnings: list[str] | None = None,
) -> ScenarioDescription:
    """Full stage-one pipeline for one scenario: signals + frame -> combined."""
    signal_text = describe_signals(scenario, log, rules, warnings=warnings)
    vision_text = ""
    if vision is not None:
        vision_text = describe_frame(scenario.frame_ref, vision)
    combined = combine(signal_text, vision_text, combiner or TemplateCombiner())
    return ScenarioDescription(
        scenario_id=scenario.scenario_id,
        signal_text=signal_text,
        vision_text=vision_text,
        combined_text=combined,
    )
