"""Whole-model structural and semantic checks.

Static rules: FLOW_ADJ, XFER_PAIR, JUNCTION_ARITY, DANGLING, CONTAIN_ACYCLIC.
Dynamic rules: EVENT_KNOWN, EVENT_COVER, CHRONO_ACYCLIC, ABSENT_REALIZABLE,
PRESENT_REALIZABLE.  All listed rules are Errors; stylistic findings (unused
storage) are Warnings.  Findings are ordered by the declaration order of the
offending element, so reports are byte-stable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .core import ActionKind, Model, flow_is_legal, flow_row
from .dsl import Diagnostic, Severity
from .dynamics import COVERABLE, Event, Polarity, cover_is_connected


@dataclass
class ValidationReport:
    findings: list[Diagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not any(f.severity is Severity.ERROR for f in self.findings)

    def to_json(self) -> str:
        payload = {"ok": self.ok, "findings": [f.to_dict() for f in self.findings]}
        return json.dumps(payload, indent=2) + "\n"


def _decl_order(model: Model) -> dict[str, int]:
    return {eid: i for i, eid in enumerate(model.index)}


class _Collector:
    def __init__(self, model: Model):
        self.model = model
        self.order = _decl_order(model)
        self.raw: list[tuple[int, Diagnostic]] = []

    def error(self, code: str, element_id: str, message: str) -> None:
        self._add(Severity.ERROR, code, element_id, message)

    def warning(self, code: str, element_id: str, message: str) -> None:
        self._add(Severity.WARNING, code, element_id, message)

    def _add(self, severity: Severity, code: str, element_id: str, message: str) -> None:
        span = self.model.spans.get(element_id)
        self.raw.append(
            (self.order.get(element_id, len(self.order)), Diagnostic(severity, code, message, span))
        )

    def report(self) -> ValidationReport:
        self.raw.sort(key=lambda pair: pair[0])
        return ValidationReport(findings=[diag for _, diag in self.raw])


def _is_release_side(model: Model, node_id: str) -> bool:
    cat = model.index.get(node_id)
    if cat == "action":
        return model.actions[node_id].kind is ActionKind.RELEASE
    return cat in ("storage", "junction")


def _is_receive_side(model: Model, node_id: str) -> bool:
    cat = model.index.get(node_id)
    if cat == "action":
        return model.actions[node_id].kind is ActionKind.RECEIVE
    return cat in ("storage", "junction")


def validate_static(model: Model) -> ValidationReport:
    """Check the region-level laws of the whole model."""
    out = _Collector(model)

    # FLOW_ADJ: every edge occupies a row of the legal adjacency table.
    for flow in model.flows.values():
        if not (model.is_node(flow.src) and model.is_node(flow.dst)):
            out.error("FLOW_ADJ", flow.id, f"flow {flow.id} has a dangling endpoint")
            continue
        if not flow_is_legal(model, flow.src, flow.dst):
            src_kind, dst_kind, same = flow_row(model, flow.src, flow.dst)
            where = "same-owner" if same else "cross-owner"
            out.error(
                "FLOW_ADJ",
                flow.id,
                f"flow {flow.src} -> {flow.dst}: illegal {where} row ({src_kind} -> {dst_kind})",
            )

    # XFER_PAIR: a boundary crossing needs Release upstream, Receive downstream.
    for flow in model.flows.values():
        if model.index.get(flow.src) != "action" or model.index.get(flow.dst) != "action":
            continue
        src, dst = model.actions[flow.src], model.actions[flow.dst]
        if not (src.kind is ActionKind.TRANSFER and dst.kind is ActionKind.TRANSFER):
            continue
        if src.owner == dst.owner:
            continue
        upstream, _ = model.flow_endpoints(flow.src)
        _, downstream = model.flow_endpoints(flow.dst)
        if not any(_is_release_side(model, e.src) for e in upstream):
            out.error(
                "XFER_PAIR",
                flow.id,
                f"crossing {flow.src} -> {flow.dst} has no Release upstream of {flow.src}",
            )
        if not any(_is_receive_side(model, e.dst) for e in downstream):
            out.error(
                "XFER_PAIR",
                flow.id,
                f"crossing {flow.src} -> {flow.dst} has no Receive downstream of {flow.dst}",
            )

    # JUNCTION_ARITY: >= 2 incoming and >= 1 outgoing flow edges.
    for junc in model.junctions.values():
        incoming, outgoing = model.flow_endpoints(junc.id)
        if len(incoming) < 2:
            out.error(
                "JUNCTION_ARITY",
                junc.id,
                f"junction {junc.id} has {len(incoming)} incoming flows (needs >= 2)",
            )
        if len(outgoing) < 1:
            out.error("JUNCTION_ARITY", junc.id, f"junction {junc.id} has no outgoing flow")

    # DANGLING: a Transfer end wired to nothing is unreachable.
    for action in model.actions.values():
        if action.kind is ActionKind.TRANSFER:
            incoming, outgoing = model.flow_endpoints(action.id)
            if not incoming and not outgoing:
                out.error("DANGLING", action.id, f"transfer {action.id} has no incident flow")

    # CONTAIN_ACYCLIC: the containment forest must be a forest.
    for thimac in model.thimacs.values():
        seen = {thimac.id}
        cur = thimac.parent
        broken = False
        while cur is not None:
            if cur in seen:
                out.error(
                    "CONTAIN_ACYCLIC", thimac.id, f"thimac {thimac.id} contains itself via {cur}"
                )
                broken = True
                break
            seen.add(cur)
            cur = model.thimacs[cur].parent if cur in model.thimacs else None
        if broken:
            break

    # Style: storages nothing reads or writes.
    for storage in model.storages.values():
        incoming, outgoing = model.flow_endpoints(storage.id)
        if not incoming and not outgoing:
            out.warning("UNUSED_STORAGE", storage.id, f"storage {storage.id} is never read or written")

    return out.report()


def _touched_thimacs(model: Model, event: Event) -> list[str]:
    touched: list[str] = []
    for cid in model.expand_cover(event.covers):
        cat = model.index.get(cid)
        if cat == "thimac" and cid not in touched:
            touched.append(cid)
        elif cat in ("action", "storage", "junction"):
            owner = model.owner_of(cid)
            if owner not in touched:
                touched.append(owner)
    return touched


def validate_dynamic(model: Model) -> ValidationReport:
    """Check event covers, polarity rules and the declared chronology."""
    out = _Collector(model)

    for event in model.events.values():
        unknown = [cid for cid in event.covers if model.index.get(cid) not in COVERABLE]
        for cid in unknown:
            out.error("EVENT_KNOWN", event.id, f"event {event.id} covers unknown id {cid!r}")
        if unknown:
            continue
        if not event.covers or not cover_is_connected(model, event.covers):
            out.error(
                "EVENT_COVER",
                event.id,
                f"event {event.id} must cover a nonempty, weakly-connected region",
            )
            continue
        flagged = [
            tid for tid in _touched_thimacs(model, event) if not model.thimacs[tid].realizable
        ]
        if event.polarity is Polarity.ABSENT:
            for tid in flagged:
                out.error(
                    "ABSENT_REALIZABLE",
                    event.id,
                    f"absent event {event.id} covers unrealizable thimac {tid}: "
                    f"the negation of a never-realizable region has no event",
                )
        else:
            for tid in flagged:
                out.error(
                    "PRESENT_REALIZABLE",
                    event.id,
                    f"present event {event.id} covers unrealizable thimac {tid}",
                )

    # CHRONO_ACYCLIC: declared chronology minus repeat edges has no cycle.
    succ: dict[str, list[str]] = {}
    for edge in model.chronology:
        if not edge.repeat:
            succ.setdefault(edge.src, []).append(edge.dst)
    state: dict[str, int] = {}

    def cyclic(node: str) -> bool:
        state[node] = 1
        for nxt in succ.get(node, ()):
            mark = state.get(nxt)
            if mark == 1 or (mark is None and cyclic(nxt)):
                return True
        state[node] = 2
        return False

    for edge in model.chronology:
        if edge.repeat or state.get(edge.src) is not None:
            continue
        if cyclic(edge.src):
            out.error(
                "CHRONO_ACYCLIC",
                edge.src,
                f"declared chronology has a cycle through {edge.src}",
            )
            break

    return out.report()


def validate_model(model: Model) -> ValidationReport:
    """Static checks, then dynamic checks when the static level is sound."""
    report = validate_static(model)
    if report.ok:
        dynamic = validate_dynamic(model)
        report = ValidationReport(findings=report.findings + dynamic.findings)
    return report
