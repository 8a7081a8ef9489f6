"""The dynamic level: events as timed subregions of the static model.

An event is a region subgraph fused with time.  Precedence between events
is derived from the static edges that run between their covered regions;
modeler-declared ``repeat`` arrows become Repeat edges (iteration), and
cycles inside a single cover become Repeat self-edges.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .core import Model
from .errors import ChronoCycle, DisconnectedCover, InvalidDuration, UnknownId


class Polarity(Enum):
    PRESENT = "present"
    ABSENT = "absent"


class Tense(Enum):
    PAST = "past"
    NOW = "now"


@dataclass(frozen=True)
class Duration:
    magnitude: float
    unit: str


@dataclass
class Event:
    id: str
    label: str
    covers: list[str]
    polarity: Polarity = Polarity.PRESENT
    duration: Optional[Duration] = None
    tense: Optional[Tense] = None


class EdgeKind(Enum):
    PRECEDE = "precede"
    REPEAT = "repeat"


@dataclass(frozen=True)
class ChronoEdge:
    src: str
    dst: str
    kind: EdgeKind


@dataclass
class ChronologyGraph:
    """Precedence + repeat edges over events, plus region-containment pairs.

    ``containment`` records (container, contained) event pairs whose covered
    regions nest; the timing pass stretches container rows over their
    contained events.
    """

    events: list[str]
    edges: list[ChronoEdge]
    containment: list[tuple[str, str]] = field(default_factory=list)

    def precede_edges(self) -> list[ChronoEdge]:
        return [e for e in self.edges if e.kind is EdgeKind.PRECEDE]

    def repeat_edges(self) -> list[ChronoEdge]:
        return [e for e in self.edges if e.kind is EdgeKind.REPEAT]

    def predecessors(self, event_id: str) -> list[str]:
        return [e.src for e in self.edges if e.kind is EdgeKind.PRECEDE and e.dst == event_id]

    def successors(self, event_id: str) -> list[str]:
        return [e.dst for e in self.edges if e.kind is EdgeKind.PRECEDE and e.src == event_id]

    def topo_order(self) -> list[str]:
        """Topological order of Precede edges, ties by declaration order."""
        pending = {eid: len(set(self.predecessors(eid))) for eid in self.events}
        order: list[str] = []
        done: set[str] = set()
        while len(order) < len(self.events):
            ready = [eid for eid in self.events if eid not in done and pending[eid] == 0]
            if not ready:
                cyclic = [eid for eid in self.events if eid not in done]
                raise ChronoCycle(f"precedence cycle among events: {', '.join(cyclic)}")
            nxt = ready[0]
            done.add(nxt)
            order.append(nxt)
            for succ in set(self.successors(nxt)):
                pending[succ] -= 1
        return order


@dataclass
class TimingTable:
    """Event id -> [start, end] interval in abstract time units."""

    rows: dict[str, tuple[float, float]]
    stretched: set[str] = field(default_factory=set)

    def interval(self, event_id: str) -> tuple[float, float]:
        return self.rows[event_id]

    def to_csv(self) -> str:
        lines = ["event_id,start,end,duration"]
        for eid, (start, end) in self.rows.items():
            lines.append(f"{eid},{start:g},{end:g},{end - start:g}")
        return "\n".join(lines) + "\n"


COVERABLE = ("thimac", "action", "storage", "junction", "flow", "trigger")


def cover_links(model: Model, covers: list[str]) -> dict[str, set[str]]:
    """Undirected adjacency among covered ids.

    Two covered elements are linked by a flow/trigger edge between them, by
    ancestor/descendant containment, or by sharing a direct container (the
    paper's event boxes enclose visually adjacent regions of one thimac).
    A covered edge id links to its covered endpoints.
    """
    cover_set = set(covers)
    links: dict[str, set[str]] = {cid: set() for cid in covers}

    def link(a: str, b: str) -> None:
        if a != b and a in cover_set and b in cover_set:
            links[a].add(b)
            links[b].add(a)

    for edge in list(model.flows.values()) + list(model.triggers.values()):
        link(edge.src, edge.dst)
        if edge.id in cover_set:
            link(edge.id, edge.src)
            link(edge.id, edge.dst)
    for a in covers:
        for b in covers:
            if a >= b:
                continue
            if a in model.ancestors(b) or b in model.ancestors(a):
                link(a, b)
            else:
                ca, cb = model.container_of(a), model.container_of(b)
                if ca is not None and ca == cb:
                    link(a, b)
    return links


def cover_is_connected(model: Model, covers: list[str]) -> bool:
    if not covers:
        return False
    links = cover_links(model, covers)
    seen = {covers[0]}
    queue = [covers[0]]
    while queue:
        for nxt in sorted(links[queue.pop()]):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return len(seen) == len(covers)


def define_event(
    model: Model,
    event_id: str,
    covers: list[str],
    label: Optional[str] = None,
    polarity: Polarity = Polarity.PRESENT,
    duration: Optional[Duration] = None,
    tense: Optional[Tense] = None,
) -> Event:
    """Register a timed subregion of the static model as an event."""
    for cid in covers:
        cat = model.index.get(cid)
        if cat is None:
            raise UnknownId(f"event {event_id!r} covers unknown id {cid!r}")
        if cat not in COVERABLE:
            raise UnknownId(f"event {event_id!r} covers non-static id {cid!r} ({cat})")
    if not covers:
        raise DisconnectedCover(f"event {event_id!r} covers nothing")
    if not cover_is_connected(model, covers):
        raise DisconnectedCover(f"event {event_id!r} covers a disconnected region")
    if duration is not None and duration.magnitude < 0:
        raise InvalidDuration(f"event {event_id!r} has negative duration")
    model._register(event_id, "event")
    event = Event(
        id=event_id,
        label=label if label is not None else event_id,
        covers=list(covers),
        polarity=polarity,
        duration=duration,
        tense=tense,
    )
    model.events[event_id] = event
    return event


def covered_nodes(model: Model, event: Event) -> set[str]:
    """Node ids covered by the event, closed over thimac containment."""
    return {cid for cid in model.expand_cover(event.covers) if model.is_node(cid)}


def _covered_thimac_set(model: Model, event: Event) -> set[str]:
    return {cid for cid in model.expand_cover(event.covers) if model.index.get(cid) == "thimac"}


def _region_contains(model: Model, container: Event, contained: Event) -> bool:
    """True when every element contained covers lies inside a thimac covered
    by the container event."""
    thimacs = _covered_thimac_set(model, container)
    if not thimacs:
        return False
    for cid in contained.covers:
        cat = model.index.get(cid)
        if cat == "thimac":
            if cid not in thimacs:
                return False
        elif cat in ("action", "storage", "junction"):
            if model.owner_of(cid) not in thimacs:
                return False
        elif cat == "flow":
            edge = model.flows[cid]
            if model.owner_of(edge.src) not in thimacs or model.owner_of(edge.dst) not in thimacs:
                return False
        elif cat == "trigger":
            edge = model.triggers[cid]
            if model.owner_of(edge.src) not in thimacs or model.owner_of(edge.dst) not in thimacs:
                return False
    return True


def _has_internal_cycle(model: Model, nodes: set[str]) -> bool:
    out: dict[str, list[str]] = {n: [] for n in nodes}
    for edge in list(model.flows.values()) + list(model.triggers.values()):
        if edge.src in nodes and edge.dst in nodes:
            if edge.src == edge.dst:
                return True
            out[edge.src].append(edge.dst)
    state: dict[str, int] = {}

    def visit(n: str) -> bool:
        state[n] = 1
        for m in out[n]:
            mark = state.get(m)
            if mark == 1:
                return True
            if mark is None and visit(m):
                return True
        state[n] = 2
        return False

    return any(state.get(n) is None and visit(n) for n in nodes)


def derive_chronology(model: Model, events: Optional[list[Event]] = None) -> ChronologyGraph:
    """Derive the behavioral model from static edges between event covers.

    A Precede edge e -> e' exists iff some flow or trigger edge runs from a
    node covered by e to a node covered by e' -- unless the modeler declared
    ``repeat e -> e'``, in which case the pair is a Repeat edge (a backward
    arrow).  A cycle inside one event's own cover yields a Repeat self-edge.
    Raises ChronoCycle on a Precede cycle or a forward-pointing repeat.
    """
    if events is None:
        events = list(model.events.values())
    ids = [e.id for e in events]
    idx = {eid: i for i, eid in enumerate(ids)}
    nodes = {e.id: covered_nodes(model, e) for e in events}
    declared_repeats = [
        (d.src, d.dst) for d in model.chronology if d.repeat and d.src in idx and d.dst in idx
    ]
    repeat_set = set(declared_repeats)

    precede: set[tuple[str, str]] = set()
    repeats: set[tuple[str, str]] = set(declared_repeats)
    static_edges = list(model.flows.values()) + list(model.triggers.values())
    for a in ids:
        for b in ids:
            if a == b:
                continue
            if any(e.src in nodes[a] and e.dst in nodes[b] for e in static_edges):
                if (a, b) in repeat_set:
                    continue  # the modeler drew this witness as a backward arrow
                precede.add((a, b))
    for e in events:
        if _has_internal_cycle(model, nodes[e.id]):
            repeats.add((e.id, e.id))

    edges = [ChronoEdge(a, b, EdgeKind.PRECEDE) for (a, b) in precede]
    edges += [ChronoEdge(a, b, EdgeKind.REPEAT) for (a, b) in repeats]
    edges.sort(key=lambda e: (idx[e.src], idx[e.dst], e.kind.value))

    containment = [
        (a.id, b.id)
        for a in events
        for b in events
        if a.id != b.id and _region_contains(model, a, b)
    ]
    graph = ChronologyGraph(events=ids, edges=edges, containment=containment)
    graph.topo_order()  # raises ChronoCycle on a Precede cycle
    _check_repeats_point_backward(graph)
    return graph


def _check_repeats_point_backward(graph: ChronologyGraph) -> None:
    for edge in graph.repeat_edges():
        if edge.src == edge.dst:
            continue
        # The target must be an earlier event: it must Precede-reach the source.
        seen = {edge.dst}
        queue = [edge.dst]
        while queue:
            for nxt in graph.successors(queue.pop()):
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        if edge.src not in seen:
            raise ChronoCycle(
                f"repeat edge {edge.src} -> {edge.dst} does not point to an earlier event"
            )


def owner_event_map(model: Model, events: Optional[list[Event]] = None) -> dict[str, str]:
    """Node id -> the event that owns its execution.

    When covers overlap (an event covering a whole thimac plus a generic
    event covering one action inside it) the node belongs to the covering
    event with the smallest covered-node set, ties by declaration order.
    """
    if events is None:
        events = list(model.events.values())
    best: dict[str, tuple[int, int, str]] = {}
    for idx, event in enumerate(events):
        nodes = covered_nodes(model, event)
        for node_id in nodes:
            key = (len(nodes), idx, event.id)
            if node_id not in best or key < best[node_id]:
                best[node_id] = key
    return {node_id: key[2] for node_id, key in best.items()}


def event_durations(model: Model) -> dict[str, float]:
    return {e.id: e.duration.magnitude for e in model.events.values() if e.duration is not None}


def build_timing(chronology: ChronologyGraph, durations: Optional[dict[str, float]] = None) -> TimingTable:
    """Longest-path schedule over Precede edges; default duration one unit.

    Containment rows are stretched afterwards so that a container event's
    interval covers every event nested in its region.
    """
    durations = durations or {}
    for eid, magnitude in durations.items():
        if magnitude < 0:
            raise InvalidDuration(f"event {eid!r} has negative duration")
    rows: dict[str, tuple[float, float]] = {}
    for eid in chronology.topo_order():
        preds = chronology.predecessors(eid)
        start = max((rows[p][1] for p in preds), default=0.0)
        rows[eid] = (start, start + durations.get(eid, 1.0))
    rows = {eid: rows[eid] for eid in chronology.events}

    stretched: set[str] = set()
    changed = True
    while changed:
        changed = False
        for container, contained in chronology.containment:
            cs, ce = rows[container]
            bs, be = rows[contained]
            merged = (min(cs, bs), max(ce, be))
            if merged != (cs, ce):
                rows[container] = merged
                stretched.add(container)
                changed = True
    return TimingTable(rows=rows, stretched=stretched)
