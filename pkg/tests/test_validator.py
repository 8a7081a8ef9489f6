"""Whole-model validation rules, positive and negative."""

from __future__ import annotations

import json

import pytest

from thimac import core
from thimac.core import ActionKind, JunctionMode
from thimac.dynamics import Polarity, define_event
from thimac.jsonio import model_from_dict, model_to_dict
from thimac.validate import validate_dynamic, validate_model, validate_static


def codes(report):
    return [f.code for f in report.findings]


def test_fixtures_validate_clean(fixture_models):
    for fixture_id, model in fixture_models.items():
        report = validate_model(model)
        assert report.ok, (fixture_id, codes(report))


def test_empty_model_validates():
    report = validate_model(core.new_model("empty"))
    assert report.ok and not report.findings


def broken_flow_model():
    model = core.new_model("m")
    core.add_thimac(model, "A")
    core.add_action(model, "A", ActionKind.CREATE, "c1")
    core.add_action(model, "A", ActionKind.TRANSFER, "t1")
    data = model_to_dict(model)
    data["flows"].append({"id": "_f99", "from": "c1", "to": "t1"})
    return model_from_dict(data)


def test_flow_adj_detected_on_imported_model():
    report = validate_static(broken_flow_model())
    assert "FLOW_ADJ" in codes(report)
    assert not report.ok


def test_xfer_pair_missing_receive():
    model = core.new_model("m")
    core.add_thimac(model, "A")
    core.add_thimac(model, "B")
    core.add_action(model, "A", ActionKind.RELEASE, "r1")
    core.add_action(model, "A", ActionKind.TRANSFER, "t1")
    core.add_action(model, "B", ActionKind.TRANSFER, "t2")
    core.add_action(model, "B", ActionKind.PROCESS, "p1")
    core.connect_flow(model, "r1", "t1")
    core.connect_flow(model, "t1", "t2")
    data = model_to_dict(model)
    data["flows"].append({"id": "_f99", "from": "t2", "to": "p1"})
    report = validate_static(model_from_dict(data))
    assert "XFER_PAIR" in codes(report)


def test_xfer_pair_missing_release():
    model = core.new_model("m")
    core.add_thimac(model, "A")
    core.add_thimac(model, "B")
    core.add_action(model, "A", ActionKind.TRANSFER, "t1")
    core.add_action(model, "B", ActionKind.TRANSFER, "t2")
    core.add_action(model, "B", ActionKind.RECEIVE, "rc")
    core.connect_flow(model, "t1", "t2")
    core.connect_flow(model, "t2", "rc")
    report = validate_static(model)
    assert "XFER_PAIR" in codes(report)


def test_junction_arity():
    model = core.new_model("m")
    core.add_thimac(model, "A")
    core.junction(model, "A", JunctionMode.OR, "j1")
    core.add_action(model, "A", ActionKind.PROCESS, "p1")
    core.add_action(model, "A", ActionKind.RELEASE, "r1")
    core.connect_flow(model, "p1", "j1")
    core.connect_flow(model, "j1", "r1")
    report = validate_static(model)
    assert "JUNCTION_ARITY" in codes(report)  # one incoming, needs two
    core.add_action(model, "A", ActionKind.PROCESS, "p2")
    core.connect_flow(model, "p2", "j1")
    assert "JUNCTION_ARITY" not in codes(validate_static(model))


def test_dangling_transfer():
    model = core.new_model("m")
    core.add_thimac(model, "A")
    core.add_action(model, "A", ActionKind.TRANSFER, "t1")
    report = validate_static(model)
    assert "DANGLING" in codes(report)


def test_containment_cycle_detected():
    model = core.new_model("m")
    core.add_thimac(model, "A")
    core.add_thimac(model, "B", parent="A")
    data = model_to_dict(model)
    data["thimacs"][0]["parent"] = "B"  # A inside B inside A
    report = validate_static(model_from_dict(data))
    assert "CONTAIN_ACYCLIC" in codes(report)


def test_unused_storage_is_warning_only():
    model = core.new_model("m")
    core.add_thimac(model, "A")
    core.attach_storage(model, "A", "st")
    report = validate_static(model)
    assert report.ok
    assert "UNUSED_STORAGE" in codes(report)


def test_absent_over_unrealizable_rejected():
    model = core.new_model("m")
    core.add_thimac(model, "round_square", realizable=False)
    define_event(model, "rs_absent", ["round_square"], polarity=Polarity.ABSENT)
    report = validate_dynamic(model)
    assert codes(report) == ["ABSENT_REALIZABLE"]


def test_present_over_unrealizable_rejected():
    model = core.new_model("m")
    core.add_thimac(model, "round_square", realizable=False)
    define_event(model, "rs_present", ["round_square"], polarity=Polarity.PRESENT)
    report = validate_dynamic(model)
    assert codes(report) == ["PRESENT_REALIZABLE"]


def test_realizability_rules_are_exclusive(fixture_models):
    # fig12: absent event over a realizable sub-thimac is fine.
    report = validate_dynamic(fixture_models["fig12_false_gold"])
    assert report.ok


def test_chronology_cycle_without_repeat_rejected():
    model = core.new_model("m")
    core.add_thimac(model, "A")
    core.add_action(model, "A", ActionKind.PROCESS, "p1")
    core.add_action(model, "A", ActionKind.PROCESS, "p2")
    define_event(model, "e1", ["p1"])
    define_event(model, "e2", ["p2"])
    core.add_chronology_edge(model, "e1", "e2")
    core.add_chronology_edge(model, "e2", "e1")
    report = validate_dynamic(model)
    assert "CHRONO_ACYCLIC" in codes(report)
    model.chronology[-1].repeat = True  # backward arrow is iteration, not a cycle
    assert "CHRONO_ACYCLIC" not in codes(validate_dynamic(model))


def test_event_cover_rejects_disconnected_imported_cover():
    model = core.new_model("m")
    core.add_thimac(model, "A")
    core.add_thimac(model, "B")
    data = model_to_dict(model)
    data["events"].append(
        {"id": "ev", "label": "ev", "covers": ["A", "B"], "polarity": "present",
         "duration": None, "tense": None}
    )
    report = validate_dynamic(model_from_dict(data))
    assert "EVENT_COVER" in codes(report)


def test_event_known_rejects_ghost_cover():
    model = core.new_model("m")
    core.add_thimac(model, "A")
    data = model_to_dict(model)
    data["events"].append(
        {"id": "ev", "label": "ev", "covers": ["ghost"], "polarity": "present",
         "duration": None, "tense": None}
    )
    report = validate_dynamic(model_from_dict(data))
    assert "EVENT_KNOWN" in codes(report)


def test_reports_are_deterministic_and_ordered():
    model = broken_flow_model()
    core.add_action(model, "A", ActionKind.TRANSFER, "t9")  # dangling, declared later
    first = validate_static(model)
    second = validate_static(model)
    assert first.to_json() == second.to_json()
    assert codes(first) == ["FLOW_ADJ", "DANGLING", "DANGLING"]


def test_persistent_findings_survive_edge_additions():
    model = broken_flow_model()
    before = {f.code for f in validate_static(model).findings if f.code == "FLOW_ADJ"}
    core.add_thimac(model, "C")
    core.add_action(model, "C", ActionKind.CREATE, "c9")
    core.add_action(model, "C", ActionKind.PROCESS, "p9")
    core.connect_flow(model, "c9", "p9")
    after = {f.code for f in validate_static(model).findings if f.code == "FLOW_ADJ"}
    assert before <= after


def test_report_json_shape():
    report = validate_static(broken_flow_model())
    payload = json.loads(report.to_json())
    assert payload["ok"] is False
    assert all({"severity", "code", "message"} <= set(f) for f in payload["findings"])


def test_ok_iff_no_error_findings():
    model = core.new_model("m")
    core.add_thimac(model, "A")
    core.attach_storage(model, "A", "st")
    report = validate_model(model)
    assert report.ok and any(f.severity.value == "warning" for f in report.findings)
