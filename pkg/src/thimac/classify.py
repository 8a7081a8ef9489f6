"""Graph-structure-based event classification.

Taxonomy labels are recovered from the shape of the model, never from
natural language: a reflexive repeat arrow, a completion-test branch, a
delimiter sub-thimac, a duration annotation.  Vendler rule priority:

  1. stative (Create-only region, no flow)          -> State
  2. punctual and delimited                         -> Achievement
  3. delimited or terminalized                      -> Accomplishment
  4. otherwise (reflexive / continued / plain)      -> Activity

Accomplishment is also reported under its "performance" alias.  Bach
eventualities: a unique culmination reachable from every other focus event
through a convergent (star-like) graph is Atomic; consecutive peer events
in a plain chain are Plural.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from enum import Enum
from typing import Optional

from .core import ActionKind, Model
from .dynamics import ChronologyGraph, EdgeKind, derive_chronology
from .errors import UnknownId


class Vendler(Enum):
    STATE = "State"
    ACTIVITY = "Activity"
    ACCOMPLISHMENT = "Accomplishment"
    ACHIEVEMENT = "Achievement"


class Bach(Enum):
    ATOMIC = "Atomic"
    PLURAL = "Plural"
    NOT_APPLICABLE = "NotApplicable"


@dataclass(frozen=True)
class FeatureVector:
    reflexive: bool = False
    continued: bool = False
    delimited: bool = False
    durative: bool = False
    punctual: bool = False
    terminalized: bool = False
    stative: bool = False
    branchy: bool = False
    chain_length: int = 1


@dataclass(frozen=True)
class EventClass:
    vendler: Vendler
    bach: Bach


def _focus_edges(chronology: ChronologyGraph, focus: set[str], kind: EdgeKind) -> list:
    return [
        e for e in chronology.edges if e.kind is kind and e.src in focus and e.dst in focus
    ]


def extract_features(model: Model, chronology: ChronologyGraph, focus: list[str]) -> FeatureVector:
    """Compute the structural feature vector of a focus group of events."""
    if not focus:
        raise UnknownId("focus must name at least one event")
    for eid in focus:
        if eid not in model.events:
            raise UnknownId(f"unknown focus event {eid!r}")
    focus_set = set(focus)
    repeats = _focus_edges(chronology, focus_set, EdgeKind.REPEAT)
    precedes = _focus_edges(chronology, focus_set, EdgeKind.PRECEDE)

    reflexive = any(e.src == e.dst for e in repeats)
    continued = any(e.src != e.dst for e in repeats)

    expansion: list[str] = []
    seen: set[str] = set()
    for eid in focus:
        for cid in model.expand_cover(model.events[eid].covers):
            if cid not in seen:
                seen.add(cid)
                expansion.append(cid)
    covered_actions = [model.actions[c] for c in expansion if model.index.get(c) == "action"]
    covered_nodes = {c for c in expansion if model.is_node(c)}

    moving = any(a.kind is not ActionKind.CREATE for a in covered_actions)
    internal_flow = any(
        f.src in covered_nodes and f.dst in covered_nodes for f in model.flows.values()
    )
    stative = not moving and not internal_flow

    durative = any(model.events[eid].duration is not None for eid in focus)

    successors = {eid: set() for eid in focus}
    predecessors = {eid: set() for eid in focus}
    for e in precedes:
        successors[e.src].add(e.dst)
        predecessors[e.dst].add(e.src)

    # A completion test: the event covers a guarded Process (does the thing
    # pass its finishing condition?) and something in focus comes after it.
    guarded = {
        eid
        for eid in focus
        if any(
            model.actions[c].guard is not None
            for c in model.expand_cover(model.events[eid].covers)
            if model.index.get(c) == "action"
        )
    }
    terminalized = any(eid in guarded and successors[eid] for eid in focus)

    delimiter_near = _delimiter_present(model, expansion)
    delimited = terminalized or delimiter_near

    single = len(focus) == 1
    only = model.events[focus[0]] if single else None
    punctual = (
        single
        and len(only.covers) == 1
        and model.index.get(only.covers[0]) == "action"
    )

    branchy = any(len(successors[eid]) >= 2 for eid in focus)
    chain_length = _longest_chain(focus, predecessors)

    return FeatureVector(
        reflexive=reflexive,
        continued=continued,
        delimited=delimited,
        durative=durative,
        punctual=punctual,
        terminalized=terminalized,
        stative=stative,
        branchy=branchy,
        chain_length=chain_length,
    )


def _delimiter_present(model: Model, expansion: list[str]) -> bool:
    for cid in expansion:
        if model.index.get(cid) == "thimac" and model.thimacs[cid].delimiter:
            return True
    # Delimiters also count from the covered region's immediate context:
    # a "one mile" sub-thimac sits beside the run it delimits.
    for cid in expansion:
        if not model.is_node(cid):
            continue
        owner = model.thimacs[model.owner_of(cid)]
        for child in owner.children:
            if model.index.get(child) == "thimac" and model.thimacs[child].delimiter:
                return True
    return False


def _longest_chain(focus: list[str], predecessors: dict[str, set]) -> int:
    depth: dict[str, int] = {}

    def visit(eid: str) -> int:
        if eid in depth:
            return depth[eid]
        depth[eid] = 1  # cycle guard; precede subgraph is acyclic by construction
        depth[eid] = 1 + max((visit(p) for p in predecessors[eid]), default=0)
        return depth[eid]

    return max(visit(eid) for eid in focus)


def classify_vendler(features: FeatureVector) -> Vendler:
    """Total function: every feature combination gets exactly one class."""
    if features.stative:
        return Vendler.STATE
    if features.punctual and features.delimited:
        return Vendler.ACHIEVEMENT
    if features.delimited or features.terminalized:
        return Vendler.ACCOMPLISHMENT
    return Vendler.ACTIVITY


def classify_bach(chronology: ChronologyGraph, focus: list[str]) -> Bach:
    """Atomic, Plural, or NotApplicable for a focus group."""
    if not focus:
        return Bach.NOT_APPLICABLE
    if len(focus) == 1:
        return Bach.ATOMIC
    focus_set = set(focus)
    edges = _focus_edges(chronology, focus_set, EdgeKind.PRECEDE)
    if not edges:
        return Bach.NOT_APPLICABLE
    successors: dict[str, set] = {eid: set() for eid in focus}
    indegree: dict[str, int] = {eid: 0 for eid in focus}
    for e in edges:
        if e.dst not in successors[e.src]:
            successors[e.src].add(e.dst)
            indegree[e.dst] += 1
    sinks = [eid for eid in focus if not successors[eid]]
    convergent = any(count >= 2 for count in indegree.values())
    if len(sinks) == 1 and convergent:
        sink = sinks[0]
        if all(_reaches(successors, eid, sink) for eid in focus if eid != sink):
            return Bach.ATOMIC
    return Bach.PLURAL


def _reaches(successors: dict[str, set], src: str, dst: str) -> bool:
    seen = {src}
    queue = [src]
    while queue:
        for nxt in successors[queue.pop()]:
            if nxt == dst:
                return True
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return False


def classify_group(model: Model, chronology: ChronologyGraph, focus: list[str]) -> dict:
    features = extract_features(model, chronology, focus)
    vendler = classify_vendler(features)
    bach = classify_bach(chronology, focus)
    entry = {
        "vendler": vendler.value,
        "bach": bach.value,
        "features": asdict(features),
    }
    if vendler is Vendler.ACCOMPLISHMENT:
        entry["aka"] = ["performance"]
    return entry


def classify_model(model: Model, chronology: Optional[ChronologyGraph] = None) -> dict[str, dict]:
    """Classify every declared focus group, or all events as one group."""
    if chronology is None:
        chronology = derive_chronology(model)
    if model.focus:
        groups = model.focus
    elif model.events:
        groups = {"all": list(model.events.keys())}
    else:
        return {}
    return {name: classify_group(model, chronology, members) for name, members in groups.items()}
