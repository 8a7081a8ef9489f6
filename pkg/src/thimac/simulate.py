"""Deterministic token-flow execution of a validated dynamic model.

Events fire in a topological order of Precede edges (ties by declaration
order).  Within an event, tokens propagate along flow edges from source
actions; a trigger fires its target once its source has executed; an
Or-junction forwards on the first arriving input while an And-junction
waits for all of them; guarded Process nodes consume the configured boolean
inputs, and a false guard kills everything downstream of it.  Absent events
emit exactly one registration record and fire no actions.  Repeat edges
replay their target's previous execution up to ``max_repeats`` times.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from itertools import product
from typing import Optional

from .core import ActionKind, JunctionMode, Model
from .dynamics import ChronologyGraph, EdgeKind, Polarity, owner_event_map
from .errors import TooManyInputs, UnknownId


@dataclass
class SimConfig:
    max_repeats: int = 1
    inputs: dict[str, bool] = field(default_factory=dict)
    max_steps: int = 10000

    def __post_init__(self) -> None:
        if self.max_steps <= 0:
            raise ValueError("max_steps must be positive")
        if self.max_repeats < 0:
            raise ValueError("max_repeats must be >= 0")


class Outcome(Enum):
    COMPLETED = "Completed"
    DEADLOCK = "Deadlock"
    STEP_BUDGET_EXHAUSTED = "StepBudgetExhausted"


@dataclass(frozen=True)
class TraceRecord:
    step: int
    event: str
    action: str  # empty for absent-event registration records
    note: str = ""


@dataclass
class Trace:
    records: list[TraceRecord]
    outcome: Outcome

    def to_jsonl(self) -> str:
        lines = [
            json.dumps(
                {"step": r.step, "event": r.event, "action": r.action or None, "note": r.note}
            )
            for r in self.records
        ]
        lines.append(json.dumps({"outcome": self.outcome.value}))
        return "\n".join(lines) + "\n"

    def events_fired(self) -> list[str]:
        """Events with at least one action record, in first-record order."""
        fired: list[str] = []
        for record in self.records:
            if record.action and record.event not in fired:
                fired.append(record.event)
        return fired


class _Budget(Exception):
    pass


class _Run:
    def __init__(self, model: Model, chronology: ChronologyGraph, config: SimConfig):
        self.model = model
        self.chronology = chronology
        self.config = config
        self.owner = owner_event_map(model)
        self.records: list[TraceRecord] = []
        self.step = 0
        self.tokens: dict[str, int] = {}
        self.trigger_tokens: dict[str, int] = {}
        self.or_forwarded: set[str] = set()
        self.and_arrivals: dict[str, set[str]] = {}
        self.fire_counts: dict[str, int] = {eid: 0 for eid in chronology.events}
        self.fired_log: dict[str, list[str]] = {eid: [] for eid in chronology.events}
        self.executed_now: set[str] = set()
        self.active_event: Optional[str] = None
        self.queue: list[str] = []

    # -- records --------------------------------------------------------

    def emit(self, event_id: str, action_id: str, note: str = "") -> None:
        if self.step >= self.config.max_steps:
            raise _Budget()
        self.step += 1
        self.records.append(TraceRecord(self.step, event_id, action_id, note))

    # -- enabling -------------------------------------------------------

    def guard_passes(self, action_id: str) -> bool:
        guard = self.model.actions[action_id].guard
        if guard is None:
            return True
        value = self.config.inputs.get(guard.name, False)
        return value != guard.negated

    def is_source(self, action_id: str) -> bool:
        incoming, _ = self.model.flow_endpoints(action_id)
        gated = [e for e in incoming if self.model.index.get(e.src) != "storage"]
        triggered = any(t.dst == action_id for t in self.model.triggers.values())
        return not gated and not triggered

    def enabled(self, action_id: str) -> bool:
        if not self.guard_passes(action_id):
            return False
        if self.is_source(action_id):
            return True
        return self.tokens.get(action_id, 0) > 0 or self.trigger_tokens.get(action_id, 0) > 0

    # -- token movement ---------------------------------------------------

    def deliver_flow(self, edge_id: str, dst: str) -> None:
        cat = self.model.index.get(dst)
        if cat == "storage":
            return  # written; storages absorb
        if cat == "junction":
            self.junction_arrival(dst, edge_id)
            return
        self.tokens[dst] = self.tokens.get(dst, 0) + 1
        self.maybe_queue(dst)

    def junction_arrival(self, junction_id: str, edge_id: str) -> None:
        junc = self.model.junctions[junction_id]
        if junc.mode is JunctionMode.OR:
            if junction_id in self.or_forwarded:
                return
            self.or_forwarded.add(junction_id)
            self.forward_junction(junction_id)
        else:
            arrivals = self.and_arrivals.setdefault(junction_id, set())
            arrivals.add(edge_id)
            incoming, _ = self.model.flow_endpoints(junction_id)
            if len(arrivals) == len(incoming):
                self.forward_junction(junction_id)

    def forward_junction(self, junction_id: str) -> None:
        _, outgoing = self.model.flow_endpoints(junction_id)
        for edge in outgoing:
            self.deliver_flow(edge.id, edge.dst)

    def maybe_queue(self, action_id: str) -> None:
        if (
            self.active_event is not None
            and self.model.index.get(action_id) == "action"
            and self.owner.get(action_id) == self.active_event
            and action_id not in self.executed_now
        ):
            self.queue.append(action_id)

    # -- firing -----------------------------------------------------------

    def execute(self, action_id: str, event_id: str) -> None:
        self.executed_now.add(action_id)
        if not self.is_source(action_id):
            if self.tokens.get(action_id, 0) > 0:
                self.tokens[action_id] -= 1
            elif self.trigger_tokens.get(action_id, 0) > 0:
                self.trigger_tokens[action_id] -= 1
        self.emit(event_id, action_id)
        self.fired_log[event_id].append(action_id)
        _, outgoing = self.model.flow_endpoints(action_id)
        for edge in outgoing:
            self.deliver_flow(edge.id, edge.dst)
        for trig in self.model.triggers.values():
            if trig.src == action_id:
                self.trigger_tokens[trig.dst] = self.trigger_tokens.get(trig.dst, 0) + 1
                self.maybe_queue(trig.dst)

    def fire_event(self, event_id: str) -> None:
        event = self.model.events[event_id]
        self.fire_counts[event_id] += 1
        if event.polarity is Polarity.ABSENT:
            self.emit(event_id, "", "absent event registered; region cannot act")
            return
        self.active_event = event_id
        self.executed_now = set()
        self.queue = [
            action_id
            for action_id in self.model.actions
            if self.owner.get(action_id) == event_id
        ]
        while self.queue:
            action_id = self.queue.pop(0)
            if action_id in self.executed_now:
                continue
            if self.enabled(action_id):
                self.execute(action_id, event_id)
        self.active_event = None

    def replay(self, event_id: str) -> None:
        self.fire_counts[event_id] += 1
        for action_id in list(self.fired_log[event_id]):
            self.emit(event_id, action_id, "repeat")

    def run(self) -> Trace:
        try:
            order = self.chronology.topo_order()
            for event_id in order:
                self.fire_event(event_id)
                for edge in self.chronology.edges:
                    if edge.kind is not EdgeKind.REPEAT or edge.src != event_id:
                        continue
                    target = edge.dst
                    if self.fire_counts[target] == 0:
                        continue
                    while (
                        self.fire_counts[target] < 1 + self.config.max_repeats
                        and self.fired_log[target]
                    ):
                        self.replay(target)
        except _Budget:
            return Trace(self.records, Outcome.STEP_BUDGET_EXHAUSTED)
        for junc in self.model.junctions.values():
            if junc.mode is not JunctionMode.AND:
                continue
            arrivals = self.and_arrivals.get(junc.id, set())
            incoming, _ = self.model.flow_endpoints(junc.id)
            if arrivals and len(arrivals) < len(incoming):
                return Trace(self.records, Outcome.DEADLOCK)
        return Trace(self.records, Outcome.COMPLETED)


def simulate(model: Model, chronology: ChronologyGraph, config: Optional[SimConfig] = None) -> Trace:
    """Run the token game once; identical inputs yield identical traces."""
    return _Run(model, chronology, config or SimConfig()).run()


def guard_names(model: Model) -> list[str]:
    names: list[str] = []
    for action in model.actions.values():
        if action.guard is not None and action.guard.name not in names:
            names.append(action.guard.name)
    return names


@dataclass
class ScenarioMatrix:
    input_names: list[str]
    rows: list[tuple[dict[str, bool], list[str]]]

    def to_csv(self) -> str:
        lines = [",".join(self.input_names + ["fired"])]
        for assignment, fired in self.rows:
            cells = ["true" if assignment[n] else "false" for n in self.input_names]
            cells.append(";".join(fired))
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"


def scenario_matrix(
    model: Model,
    chronology: ChronologyGraph,
    input_names: list[str],
    config: Optional[SimConfig] = None,
) -> ScenarioMatrix:
    """One simulation per boolean assignment, rows in binary-counting order
    (first input is the most significant bit)."""
    if len(input_names) > 16:
        raise TooManyInputs(f"{len(input_names)} inputs; the matrix caps at 16")
    known = guard_names(model)
    for name in input_names:
        if name not in known:
            raise UnknownId(f"input {name!r} does not appear in the model as a boolean guard")
    base = config or SimConfig()
    rows: list[tuple[dict[str, bool], list[str]]] = []
    for bits in product((False, True), repeat=len(input_names)):
        assignment = dict(zip(input_names, bits))
        trace = simulate(model, chronology, replace(base, inputs=assignment))
        rows.append((assignment, trace.events_fired()))
    return ScenarioMatrix(input_names=list(input_names), rows=rows)
