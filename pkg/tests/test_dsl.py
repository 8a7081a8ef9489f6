"""Parser and canonical pretty-printer."""

from __future__ import annotations

from hypothesis import given, settings
from hypothesis import strategies as st

from thimac import core
from thimac.dsl import parse_model, render_model


def parse_ok(source: str):
    result = parse_model(source)
    assert result.ok, [d.message for d in result.diagnostics]
    return result.model


def test_empty_model():
    model = parse_ok('model "empty" { }')
    assert model.name == "empty"
    assert not model.thimacs and not model.actions


def test_statue_fixture_has_four_thimacs(fixture_models):
    assert len(fixture_models["fig02_statue_clay"].thimacs) == 4


def test_nested_thimacs_and_members():
    model = parse_ok(
        """
        model "nest" {
          thimac outer {
            create c1
            thimac inner unrealizable {
              process p1 if not x
            }
            storage st
            junction and j1
          }
        }
        """
    )
    assert model.thimacs["inner"].parent == "outer"
    assert not model.thimacs["inner"].realizable
    assert model.actions["p1"].guard.name == "x"
    assert model.actions["p1"].guard.negated
    assert model.storages["st"].owner == "outer"
    assert model.junctions["j1"].mode.value == "and"


def test_illegal_flow_reported_at_flow_span():
    source = (
        'model "bad" {\n'
        "  thimac computer {\n"
        "    transfer t1\n"
        "    process p1\n"
        "  }\n"
        "  flow computer.t1 -> computer.p1\n"
        "}\n"
    )
    result = parse_model(source)
    assert result.model is None
    flow_errors = [d for d in result.diagnostics if d.code == "ILLEGAL_FLOW"]
    assert len(flow_errors) == 1
    assert flow_errors[0].span.line == 6
    assert flow_errors[0].span.column == 3


def test_duplicate_id_diagnostic():
    result = parse_model('model "dup" { thimac a { } thimac a { } }')
    assert result.model is None
    assert any(d.code == "DUPLICATE_ID" for d in result.diagnostics)


def test_unknown_path_diagnostic():
    result = parse_model('model "m" { thimac a { create c } flow a.c -> a.ghost }')
    assert result.model is None
    assert any(d.code == "UNKNOWN_ID" for d in result.diagnostics)


def test_path_must_match_containment():
    result = parse_model(
        'model "m" { thimac a { create c1 } thimac b { release r1 } flow b.c1 -> b.r1 }'
    )
    assert result.model is None
    assert any(d.code == "UNKNOWN_ID" for d in result.diagnostics)


def test_comments_are_ignored():
    model = parse_ok('# heading\nmodel "m" { # tail\n  thimac a { } # more\n}\n')
    assert "a" in model.thimacs


def test_event_covers_forward_references():
    model = parse_ok(
        'model "m" { event ev covers { late.c1 } thimac late { create c1 } }'
    )
    assert model.events["ev"].covers == ["c1"]


def test_disconnected_cover_diagnostic():
    result = parse_model(
        'model "m" { thimac a { } thimac b { } event ev covers { a, b } }'
    )
    assert result.model is None
    assert any(d.code == "DISCONNECTED_COVER" for d in result.diagnostics)


def test_render_parse_fixpoint_on_canonical_form(fixture_sources):
    for source in fixture_sources.values():
        canonical = render_model(parse_ok(source))
        assert render_model(parse_ok(canonical)) == canonical


def test_implicit_create_not_rendered():
    model = core.new_model("m")
    core.add_thimac(model, "thing")
    assert "create" not in render_model(model)


def test_guard_duration_tense_round_trip():
    source = (
        'model "m" {\n'
        "  thimac a {\n"
        "    process p1 if not x\n"
        "  }\n"
        "  event ev duration 1.5 hour tense past covers { a.p1 }\n"
        "}\n"
    )
    model = parse_ok(source)
    assert model.events["ev"].duration.magnitude == 1.5
    assert model.events["ev"].tense.value == "past"
    assert parse_ok(render_model(model)) == model


def test_syntax_error_has_span():
    result = parse_model('model "m" { thimac }')
    assert result.model is None
    assert all(d.span is not None for d in result.diagnostics)


@settings(max_examples=200, deadline=None)
@given(st.text(max_size=200))
def test_error_locality_spans_within_bounds(source):
    result = parse_model(source)
    if result.ok:
        return
    line_count = source.count("\n") + 1
    lines = source.split("\n")
    for diag in result.diagnostics:
        assert diag.span is not None
        assert 1 <= diag.span.line <= line_count
        assert 1 <= diag.span.column <= len(lines[diag.span.line - 1]) + 1
        assert diag.span.length >= 1


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=0, max_value=10**9))
def test_never_model_and_errors_together(seed):
    # Fuzz the parser with clipped fixture text: either a model or errors.
    source = ('model "m" { thimac a { create c1 } flow a.c1 -> a.c1 }')[: seed % 60]
    result = parse_model(source)
    has_errors = any(d.severity.value == "error" for d in result.diagnostics)
    assert (result.model is None) == has_errors
