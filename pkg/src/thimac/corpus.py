"""Fixture corpus: every worked figure as a ``.tm`` file plus its
machine-checkable expectation.

``corpus_run`` drives the whole pipeline over each fixture -- parse,
validate (static and dynamic), derive the chronology, build the timing
table, simulate, classify, and round-trip through both serializers --
then checks the fixture-specific expectation (class labels, trace
properties, timing bounds, scenario-matrix equivalence).
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable, Optional

from .classify import classify_model
from .core import Model
from .dsl import parse_model, render_model
from .dynamics import build_timing, derive_chronology, event_durations
from .jsonio import export_json, import_json
from .simulate import SimConfig, scenario_matrix, simulate
from .validate import validate_model

Check = Callable[[Model], list[str]]


@dataclass(frozen=True)
class Fixture:
    id: str
    filename: str
    expectation: str
    check: Optional[Check] = None


def _classify_check(
    group: str,
    vendler: Optional[str] = None,
    bach: Optional[str] = None,
    features: Optional[dict] = None,
) -> Check:
    def check(model: Model) -> list[str]:
        failures = []
        report = classify_model(model)
        if group not in report:
            return [f"no focus group {group!r} in classification report"]
        entry = report[group]
        if vendler is not None and entry["vendler"] != vendler:
            failures.append(f"{group}: expected {vendler}, classified {entry['vendler']}")
        if bach is not None and entry["bach"] != bach:
            failures.append(f"{group}: expected Bach {bach}, classified {entry['bach']}")
        for name, wanted in (features or {}).items():
            got = entry["features"].get(name)
            if got != wanted:
                failures.append(f"{group}: feature {name}={got}, expected {wanted}")
        return failures

    return check


def _absent_check(event_id: str) -> Check:
    def check(model: Model) -> list[str]:
        chronology = derive_chronology(model)
        trace = simulate(model, chronology)
        registrations = [r for r in trace.records if r.event == event_id and not r.action]
        firings = [r for r in trace.records if r.event == event_id and r.action]
        failures = []
        if len(registrations) != 1:
            failures.append(f"{event_id}: {len(registrations)} registration records, expected 1")
        if firings:
            failures.append(f"{event_id}: absent event fired {len(firings)} actions")
        return failures

    return check


def _statue_check(model: Model) -> list[str]:
    if len(model.thimacs) != 4:
        return [f"expected 4 thimacs, found {len(model.thimacs)}"]
    return []


def _timing_check(model: Model) -> list[str]:
    chronology = derive_chronology(model)
    timing = build_timing(chronology, event_durations(model))
    man = timing.interval("man_exists")
    walk = timing.interval("walking")
    failures = []
    if man != (0.0, 2.0) or walk != (1.0, 2.0):
        failures.append(f"expected man [0,2] walking [1,2], got {man} {walk}")
    strictly_inside = man[0] < walk[0] and walk[1] <= man[1] and walk != man
    if not strictly_inside:
        failures.append(f"walking {walk} not strictly inside man {man}")
    return failures


def _formula(a: bool, b: bool, c: bool) -> bool:
    return a or ((not a) and b) or c


def _matrix_check(model: Model) -> list[str]:
    chronology = derive_chronology(model)
    matrix = scenario_matrix(model, chronology, ["a", "b", "c"])
    failures = []
    for assignment, fired in matrix.rows:
        expected = _formula(assignment["a"], assignment["b"], assignment["c"])
        for outlet in ("d1", "d2"):
            if (outlet in fired) != expected:
                failures.append(f"{assignment}: {outlet} fired={outlet in fired}, expected {expected}")
    trace = simulate(model, chronology, SimConfig(inputs={"a": True}))
    fired = trace.events_fired()
    if "a1" not in fired or "d1" not in fired or fired.index("a1") > fired.index("d1"):
        failures.append(f"a=true trace should fire a1 then d1, fired {fired}")
    return failures


def _driving_check(model: Model) -> list[str]:
    chronology = derive_chronology(model)
    trace = simulate(model, chronology, SimConfig(max_repeats=1))
    drives = [r for r in trace.records if r.action == "drive"]
    if len(drives) != 2:
        return [f"drive fired {len(drives)} times with one repeat allowed, expected 2"]
    return []


FIXTURES: tuple[Fixture, ...] = (
    Fixture("fig02_statue_clay", "fig02_statue_clay.tm", "validates", _statue_check),
    Fixture("fig05_internet", "fig05_internet.tm", "trace property", _matrix_check),
    Fixture("fig08_man_walks", "fig08_man_walks.tm", "timing property", _timing_check),
    Fixture("fig12_false_gold", "fig12_false_gold.tm", "trace property", _absent_check("gold_absent")),
    Fixture("fig15_john_room", "fig15_john_room.tm", "trace property", _absent_check("john_absent")),
    Fixture(
        "fig17_run_all_over", "fig17_run_all_over.tm", "class labels",
        _classify_check("all", vendler="Activity"),
    ),
    Fixture(
        "fig18_run_mile", "fig18_run_mile.tm", "class labels",
        _classify_check("all", vendler="Accomplishment"),
    ),
    Fixture(
        "fig19_running_building", "fig19_running_building.tm", "class labels",
        lambda model: (
            _classify_check("running", vendler="Activity")(model)
            + _classify_check(
                "building",
                vendler="Accomplishment",
                features={"continued": True, "terminalized": True, "delimited": True},
            )(model)
        ),
    ),
    Fixture(
        "fig20_walked_hour", "fig20_walked_hour.tm", "class labels",
        _classify_check("all", vendler="Activity", features={"durative": True}),
    ),
    Fixture(
        "fig21_driving_now", "fig21_driving_now.tm", "class labels",
        lambda model: (
            _classify_check("all", vendler="Activity", features={"reflexive": True})(model)
            + _driving_check(model)
        ),
    ),
    Fixture(
        "fig22_five_houses", "fig22_five_houses.tm", "class labels",
        _classify_check("all", vendler="Accomplishment"),
    ),
    Fixture(
        "fig23_drawing_circle", "fig23_drawing_circle.tm", "class labels",
        _classify_check("all", vendler="Accomplishment"),
    ),
    Fixture("fig24_kiss", "fig24_kiss.tm", "class labels", _classify_check("all", bach="Atomic")),
    Fixture(
        "fig25_stumble_twist", "fig25_stumble_twist.tm", "class labels",
        _classify_check("all", bach="Plural"),
    ),
    Fixture("fig26_reporting", "fig26_reporting.tm", "validates", None),
    Fixture("fig27_perception", "fig27_perception.tm", "validates", None),
)


def fixture_source(fixture: Fixture, directory: Optional[Path] = None) -> str:
    if directory is not None:
        return (directory / fixture.filename).read_text(encoding="utf-8")
    return (resources.files("thimac") / "fixtures" / fixture.filename).read_text(encoding="utf-8")


def fixture_ids() -> list[str]:
    return [f.id for f in FIXTURES]


def run_fixture(fixture: Fixture, directory: Optional[Path] = None) -> list[str]:
    """Run the full pipeline plus the fixture's expectation; returns failures."""
    try:
        source = fixture_source(fixture, directory)
    except OSError as exc:
        return [f"cannot read fixture: {exc}"]
    result = parse_model(source)
    if not result.ok:
        return [f"parse: {d.message}" for d in result.diagnostics]
    model = result.model

    failures: list[str] = []
    report = validate_model(model)
    if not report.ok:
        failures.extend(f"validate: {f.code} {f.message}" for f in report.findings)
        return failures

    reparsed = parse_model(render_model(model))
    if not reparsed.ok or reparsed.model != model:
        failures.append("round trip: parse(render(m)) != m")
    elif render_model(reparsed.model) != render_model(model):
        failures.append("round trip: render not idempotent")
    if import_json(export_json(model)) != model:
        failures.append("round trip: import(export(m)) != m")

    try:
        chronology = derive_chronology(model)
    except Exception as exc:  # ChronoCycle and friends are fixture failures
        failures.append(f"chronology: {exc}")
        return failures
    derived = {(e.src, e.dst, e.kind.value) for e in chronology.edges}
    declared = {(d.src, d.dst, "repeat" if d.repeat else "precede") for d in model.chronology}
    if derived != declared:
        failures.append(
            f"chronology: derived {sorted(derived)} != declared {sorted(declared)}"
        )

    try:
        build_timing(chronology, event_durations(model))
    except Exception as exc:
        failures.append(f"timing: {exc}")

    first = simulate(model, chronology)
    second = simulate(model, chronology)
    if first.to_jsonl() != second.to_jsonl():
        failures.append("simulate: trace not deterministic")

    try:
        classify_model(model, chronology)
    except Exception as exc:
        failures.append(f"classify: {exc}")

    if fixture.check is not None:
        failures.extend(fixture.check(model))
    return failures


def corpus_run(directory: Optional[Path] = None) -> tuple[list[str], bool]:
    """Run every fixture; returns (output lines, all passed)."""
    lines: list[str] = []
    passed = 0
    for fixture in FIXTURES:
        failures = run_fixture(fixture, directory)
        if failures:
            lines.append(f"{fixture.id}: FAIL - " + "; ".join(failures))
        else:
            lines.append(f"{fixture.id}: PASS")
            passed += 1
    lines.append(f"{len(FIXTURES)} fixtures: {passed} passed, {len(FIXTURES) - passed} failed")
    return lines, passed == len(FIXTURES)
