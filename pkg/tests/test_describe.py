import json
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from genius.describe import (
    SignalRule,
    StubVisionDescriber,
    TemplateCombiner,
    combine,
    count_rising_edges,
    describe_frame,
    describe_scenario,
    describe_signals,
    format_quantity,
    parse_rules,
)
from genius.errors import EmptyDescription, MalformedRules
from genius.ingest import LogManifest, Scenario, SignalLog


def _log(columns: dict, timestamps=None) -> SignalLog:
    n = len(next(iter(columns.values())))
    ts = np.asarray(timestamps if timestamps is not None else range(n), dtype=float)
    manifest = LogManifest(
        vehicle="veh-1",
        log_id="log-a",
        utc_start=datetime(2024, 3, 1, tzinfo=timezone.utc),
        utc_end=datetime(2024, 3, 2, tzinfo=timezone.utc),
        signals_file=Path("unused.csv"),
        frames_dir=None,
        link_template="x/{scenario_id}",
    )
    names = list(columns)
    data = np.column_stack([np.asarray(columns[n], dtype=float) for n in names])
    return SignalLog(manifest, ts, names, data)


def _scenario(lo: int, hi: int, frame_ref=None) -> Scenario:
    return Scenario(
        scenario_id="log-a#0",
        vehicle="veh-1",
        log_id="log-a",
        window_start=float(lo),
        window_end=float(hi),
        signal_slice=(lo, hi),
        frame_ref=frame_ref,
        link="x/log-a#0",
    )


def _rule(kind, signal="s", template="t", params=None, rule_id="r1"):
    return SignalRule(
        rule_id=rule_id, signal=signal, kind=kind,
        params=params or {}, template=template,
    )


def test_numeric_summary_renders_min_mean_max():
    log = _log({"velocity": [14.0, 16.0, 15.0]})
    rule = _rule(
        "numeric_summary",
        signal="velocity",
        template="speed between {min} and {max} m/s, average {mean} m/s",
    )
    text = describe_signals(_scenario(0, 3), log, [rule])
    assert text == "speed between 14.0 and 16.0 m/s, average 15.0 m/s"


def test_geo_position_divides_nanodegrees():
    log = _log({"lat": [57123456789] * 4})
    rule = _rule("geo_position", signal="lat", template="at {degrees} degrees north")
    text = describe_signals(_scenario(0, 4), log, [rule])
    assert text == "at 57.123456789 degrees north"


def test_rising_edge_with_guards_fires_once():
    log = _log(
        {
            "lka_side": [0, 0, 1, 1],
            "enabled": [1, 1, 1, 1],
            "emergency": [1, 1, 1, 1],
        }
    )
    rule = _rule(
        "rising_edge",
        signal="lka_side",
        params={"guards": ["enabled", "emergency"]},
        template="left side emergency lka intervention",
    )
    assert (
        describe_signals(_scenario(0, 4), log, [rule])
        == "left side emergency lka intervention"
    )


def test_rising_edge_blocked_by_guard():
    log = _log({"lka_side": [0, 1, 0, 1], "enabled": [1, 0, 1, 0]})
    rule = _rule(
        "rising_edge", signal="lka_side", params={"guards": ["enabled"]}, template="hit"
    )
    assert describe_signals(_scenario(0, 4), log, [rule]) == ""


def test_rising_edge_count_placeholder():
    log = _log({"s": [0, 1, 0, 1, 0, 1]})
    rule = _rule("rising_edge", template="{count} interventions")
    assert describe_signals(_scenario(0, 6), log, [rule]) == "3 interventions"


@settings(max_examples=300, deadline=None)
@given(
    bits=st.lists(st.integers(min_value=0, max_value=1), min_size=1, max_size=40),
    guard_bits=st.lists(st.integers(min_value=0, max_value=1), min_size=40, max_size=40),
)
def test_rising_edge_matches_row_scan_oracle(bits, guard_bits):
    signal = np.asarray(bits, dtype=float)
    guard = np.asarray(guard_bits[: len(bits)], dtype=float)
    expected = sum(
        1
        for i in range(1, len(bits))
        if bits[i - 1] == 0 and bits[i] == 1 and guard_bits[i] == 1
    )
    assert count_rising_edges(signal, [guard]) == expected


def test_boolean_condition_threshold():
    log = _log({"flag": [1, 1, 0, 0]})
    rule = _rule("boolean_condition", signal="flag", template="snow on the road")
    assert describe_signals(_scenario(0, 4), log, [rule]) == "snow on the road"
    strict = _rule(
        "boolean_condition",
        signal="flag",
        params={"min_fraction": 0.75},
        template="snow on the road",
    )
    assert describe_signals(_scenario(0, 4), log, [strict]) == ""


def test_unknown_signal_skipped_with_warning():
    log = _log({"present": [1.0, 2.0]})
    rules = [
        _rule("numeric_summary", signal="missing", template="{mean}", rule_id="r1"),
        _rule("numeric_summary", signal="present", template="mean {mean}", rule_id="r2"),
    ]
    warnings: list[str] = []
    text = describe_signals(_scenario(0, 2), log, rules, warnings=warnings)
    assert text == "mean 1.5"
    assert len(warnings) == 1 and "missing" in warnings[0] and "r1" in warnings[0]


def test_unknown_guard_skips_rule():
    log = _log({"s": [0, 1]})
    rule = _rule("rising_edge", params={"guards": ["ghost"]}, template="hit")
    warnings: list[str] = []
    assert describe_signals(_scenario(0, 2), log, [rule], warnings=warnings) == ""
    assert warnings


def test_rules_render_in_list_order():
    log = _log({"a": [1, 1], "b": [1, 1]})
    r1 = _rule("boolean_condition", signal="a", template="first", rule_id="r1")
    r2 = _rule("boolean_condition", signal="b", template="second", rule_id="r2")
    assert describe_signals(_scenario(0, 2), log, [r1, r2]) == "first. second"
    assert describe_signals(_scenario(0, 2), log, [r2, r1]) == "second. first"


def test_empty_slice_fires_nothing():
    log = _log({"a": [1, 1]})
    rule = _rule("numeric_summary", signal="a", template="{mean}")
    assert describe_signals(_scenario(1, 1), log, [rule]) == ""


@pytest.mark.parametrize(
    "value, expected",
    [
        (14.0, "14.0"),
        (15.0, "15.0"),
        (0.5, "0.5"),
        (57.123456789, "57.123456789"),
        (-3.25, "-3.25"),
        (2.000000001, "2.000000001"),
        (2.0000000001, "2.0"),  # beyond 9 fractional digits rounds away
        (1.23456789049, "1.23456789"),
    ],
)
def test_format_quantity(value, expected):
    assert format_quantity(value) == expected


def test_parse_rules_round_trip(tmp_path):
    rules = [
        {
            "rule_id": "v",
            "signal": "velocity",
            "kind": "numeric_summary",
            "params": {},
            "template": "between {min} and {max}",
        }
    ]
    path = tmp_path / "rules.json"
    path.write_text(json.dumps(rules), encoding="utf-8")
    parsed = parse_rules(path)
    assert parsed[0].rule_id == "v"
    assert parsed[0].kind == "numeric_summary"


@pytest.mark.parametrize(
    "bad, match",
    [
        ({"kind": "nope"}, "unknown kind"),
        ({"template": "{oops}"}, "not.*produced|placeholders"),
        ({"template": "{}"}, "positional"),
        ({"template": "{min:.2f}"}, "format spec"),
        ({"kind": "boolean_condition", "template": "x", "params": {"min_fraction": 0}}, "min_fraction"),
        ({"signal": ""}, "non-empty"),
    ],
)
def test_parse_rules_rejects_bad_rules(tmp_path, bad, match):
    rule = {
        "rule_id": "r",
        "signal": "s",
        "kind": "numeric_summary",
        "params": {},
        "template": "{min}",
    }
    rule.update(bad)
    path = tmp_path / "rules.json"
    path.write_text(json.dumps([rule]), encoding="utf-8")
    with pytest.raises(MalformedRules, match=match):
        parse_rules(path)


def test_parse_rules_duplicate_id(tmp_path):
    rule = {"rule_id": "r", "signal": "s", "kind": "boolean_condition",
            "params": {}, "template": "x"}
    path = tmp_path / "rules.json"
    path.write_text(json.dumps([rule, rule]), encoding="utf-8")
    with pytest.raises(MalformedRules, match="duplicate"):
        parse_rules(path)


def test_parse_rules_missing_file(tmp_path):
    with pytest.raises(MalformedRules):
        parse_rules(tmp_path / "absent.json")


def test_describe_frame_absent_returns_empty():
    calls = []

    class Spy:
        def describe(self, frame_ref):
            calls.append(frame_ref)
            return "never"

    assert describe_frame(None, Spy()) == ""
    assert describe_frame(Path("/no/such/frame.jpg"), Spy()) == ""
    assert calls == []


def test_describe_frame_stub_passthrough(tmp_path):
    frame = tmp_path / "scenario_007.jpg"
    frame.write_bytes(b"jpg")
    stub = StubVisionDescriber({"scenario_007": "  snow-covered rural road \n"})
    assert describe_frame(frame, stub) == "snow-covered rural road"


def test_combine_template_omits_empty_parts():
    combiner = TemplateCombiner()
    assert combine("driving at 15 m/s", "", combiner) == "Signals: driving at 15 m/s"
    assert combine("", "snowy highway", combiner) == "Camera: snowy highway"
    assert (
        combine("driving at 15 m/s", "snowy highway", combiner)
        == "Signals: driving at 15 m/s Camera: snowy highway"
    )


def test_combine_both_empty_raises():
    with pytest.raises(EmptyDescription):
        combine("", "", TemplateCombiner())


@given(
    signal_text=st.text(st.characters(min_codepoint=32, max_codepoint=126), min_size=1),
    vision_text=st.text(st.characters(min_codepoint=32, max_codepoint=126), min_size=1),
)
def test_combine_contains_both_texts(signal_text, vision_text):
    combined = combine(signal_text, vision_text, TemplateCombiner())
    assert signal_text in combined and vision_text in combined


def test_describe_scenario_end_to_end(tmp_path):
    frame = tmp_path / "log-a#0.jpg"
    frame.write_bytes(b"jpg")
    log = _log({"velocity": [10.0, 20.0]})
    rule = _rule("numeric_summary", signal="velocity", template="avg {mean} m/s")
    description = describe_scenario(
        _scenario(0, 2, frame_ref=frame),
        log,
        [rule],
        vision=StubVisionDescriber({"log-a#0": "wet road"}),
    )
    assert description.signal_text == "avg 15.0 m/s"
    assert description.vision_text == "wet road"
    assert description.combined_text == "Signals: avg 15.0 m/s Camera: wet road"
