"""In-memory graph representation of a static TM model.

A model is a forest of nested thimacs plus the nodes they own (actions,
storages, junctions) and the flow/trigger edges between nodes.  Construction
is single-writer; after validation a model is treated as immutable and is
safe for concurrent readers.  All collections preserve declaration order,
which every downstream pass uses for deterministic tie-breaking.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Iterable, Optional

from .errors import (
    DuplicateId,
    IllegalFlow,
    InvalidKind,
    InvalidName,
    ModelError,
    RedundantTrigger,
    UnknownId,
)

if TYPE_CHECKING:  # pragma: no cover
    from .dynamics import Event


class ActionKind(Enum):
    """The five generic actions; no other kinds exist."""

    CREATE = "create"
    PROCESS = "process"
    RELEASE = "release"
    TRANSFER = "transfer"
    RECEIVE = "receive"


class JunctionMode(Enum):
    OR = "or"
    AND = "and"


@dataclass(frozen=True)
class Guard:
    """Boolean scenario input attached to a Process node.

    The node executes only when the named input (negated if requested)
    evaluates true; a false guard suppresses everything downstream of it.
    """

    name: str
    negated: bool = False


@dataclass
class Thimac:
    id: str
    name: str
    parent: Optional[str] = None
    realizable: bool = True
    delimiter: bool = False
    # Sub-thimac and owned-node ids in declaration order.
    children: list[str] = field(default_factory=list)


@dataclass
class ActionNode:
    id: str
    kind: ActionKind
    owner: str
    label: Optional[str] = None
    implicit: bool = False
    guard: Optional[Guard] = None


@dataclass
class FlowEdge:
    id: str
    src: str
    dst: str


@dataclass
class TriggerEdge:
    id: str
    src: str
    dst: str


@dataclass
class StorageNode:
    id: str
    owner: str
    label: str


@dataclass
class JunctionNode:
    id: str
    owner: str
    mode: JunctionMode


@dataclass
class DeclaredEdge:
    """A chronology edge written by the modeler (``a -> b`` or ``repeat a -> b``)."""

    src: str
    dst: str
    repeat: bool = False


# Legal flow adjacency.  Same-owner rows:
SAME_OWNER_ROWS = frozenset(
    {
        (ActionKind.CREATE, ActionKind.PROCESS),
        (ActionKind.CREATE, ActionKind.RELEASE),
        (ActionKind.RECEIVE, ActionKind.PROCESS),
        (ActionKind.RECEIVE, ActionKind.RELEASE),
        (ActionKind.PROCESS, ActionKind.RELEASE),
        (ActionKind.RELEASE, ActionKind.TRANSFER),
        (ActionKind.TRANSFER, ActionKind.RECEIVE),
    }
)
# Crossing a machine boundary is only ever Transfer -> Transfer:
CROSS_OWNER_ROWS = frozenset({(ActionKind.TRANSFER, ActionKind.TRANSFER)})


class Model:
    """A static TM model plus any events/chronology/focus data declared on it."""

    def __init__(self, name: str):
        self.name = name
        self.thimacs: dict[str, Thimac] = {}
        self.actions: dict[str, ActionNode] = {}
        self.flows: dict[str, FlowEdge] = {}
        self.triggers: dict[str, TriggerEdge] = {}
        self.storages: dict[str, StorageNode] = {}
        self.junctions: dict[str, JunctionNode] = {}
        self.events: dict[str, "Event"] = {}
        self.chronology: list[DeclaredEdge] = []
        self.focus: dict[str, list[str]] = {}
        # id -> element category ("thimac", "action", ...); single namespace.
        self.index: dict[str, str] = {}
        # Source spans recorded by the parser; not part of model identity.
        self.spans: dict[str, object] = {}

    # ------------------------------------------------------------------
    # Identity
    # ------------------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Model):
            return NotImplemented
        return (
            self.name == other.name
            and list(self.thimacs.items()) == list(other.thimacs.items())
            and list(self.actions.items()) == list(other.actions.items())
            and list(self.flows.items()) == list(other.flows.items())
            and list(self.triggers.items()) == list(other.triggers.items())
            and list(self.storages.items()) == list(other.storages.items())
            and list(self.junctions.items()) == list(other.junctions.items())
            and list(self.events.items()) == list(other.events.items())
            and self.chronology == other.chronology
            and list(self.focus.items()) == list(other.focus.items())
        )

    def __repr__(self) -> str:
        return (
            f"<Model {self.name!r}: {len(self.thimacs)} thimacs, "
            f"{len(self.actions)} actions, {len(self.flows)} flows>"
        )

    # ------------------------------------------------------------------
    # Lookup helpers
    # ------------------------------------------------------------------

    def category(self, element_id: str) -> Optional[str]:
        return self.index.get(element_id)

    def is_node(self, element_id: str) -> bool:
        return self.index.get(element_id) in ("action", "storage", "junction")

    def owner_of(self, node_id: str) -> str:
        cat = self.index.get(node_id)
        if cat == "action":
            return self.actions[node_id].owner
        if cat == "storage":
            return self.storages[node_id].owner
        if cat == "junction":
            return self.junctions[node_id].owner
        raise UnknownId(f"{node_id!r} is not a node")

    def container_of(self, element_id: str) -> Optional[str]:
        """Direct containing thimac: parent for thimacs, owner for nodes."""
        cat = self.index.get(element_id)
        if cat == "thimac":
            return self.thimacs[element_id].parent
        if cat in ("action", "storage", "junction"):
            return self.owner_of(element_id)
        return None

    def ancestors(self, element_id: str) -> list[str]:
        """Containing thimacs from the direct container outward."""
        chain = []
        cur = self.container_of(element_id)
        while cur is not None:
            chain.append(cur)
            cur = self.thimacs[cur].parent
        return chain

    def thimac_subtree(self, thimac_id: str) -> list[str]:
        """The thimac plus all descendant thimac ids, pre-order."""
        out = [thimac_id]
        for child in self.thimacs[thimac_id].children:
            if self.index.get(child) == "thimac":
                out.extend(self.thimac_subtree(child))
        return out

    def owned_node_ids(self, thimac_id: str) -> list[str]:
        return [c for c in self.thimacs[thimac_id].children if self.is_node(c)]

    def expand_cover(self, covers: Iterable[str]) -> list[str]:
        """Close a cover over thimac containment.

        A covered thimac contributes its whole subtree (thimacs and owned
        nodes); nodes and edge ids contribute themselves.  Order preserved,
        duplicates dropped.
        """
        out: list[str] = []
        seen: set[str] = set()

        def add(element_id: str) -> None:
            if element_id not in seen:
                seen.add(element_id)
                out.append(element_id)

        for cid in covers:
            if self.index.get(cid) == "thimac":
                for tid in self.thimac_subtree(cid):
                    add(tid)
                    for nid in self.owned_node_ids(tid):
                        add(nid)
            else:
                add(cid)
        return out

    def flow_endpoints(self, node_id: str) -> tuple[list[FlowEdge], list[FlowEdge]]:
        """(incoming, outgoing) flow edges of a node, declaration order."""
        inc = [f for f in self.flows.values() if f.dst == node_id]
        out = [f for f in self.flows.values() if f.src == node_id]
        return inc, out

    # ------------------------------------------------------------------
    # Internal registration
    # ------------------------------------------------------------------

    def _register(self, element_id: str, category: str) -> None:
        if element_id in self.index:
            raise DuplicateId(f"identifier {element_id!r} already declared")
        self.index[element_id] = category

    def _fresh_edge_id(self, prefix: str, count: int) -> str:
        eid = f"_{prefix}{count}"
        while eid in self.index:
            count += 1
            eid = f"_{prefix}{count}"
        return eid


# ----------------------------------------------------------------------
# Constructor operations
# ----------------------------------------------------------------------


def new_model(name: str) -> Model:
    """Create an empty model; the name must be nonempty."""
    if not name:
        raise InvalidName("model name must be nonempty")
    return Model(name)


def implicit_create_id(thimac_id: str) -> str:
    return f"_create_{thimac_id}"


def add_thimac(
    model: Model,
    name: str,
    parent: Optional[str] = None,
    realizable: bool = True,
    delimiter: bool = False,
) -> str:
    """Add a thimac and register its implicit Create node.

    The implicit Create is removed again if an explicit Create is later
    declared for the same thimac.  Returns the thimac id (== name).
    """
    if not name:
        raise InvalidName("thimac name must be nonempty")
    if parent is not None and parent not in model.thimacs:
        raise UnknownId(f"unknown parent thimac {parent!r}")
    model._register(name, "thimac")
    thimac = Thimac(id=name, name=name, parent=parent, realizable=realizable, delimiter=delimiter)
    model.thimacs[name] = thimac
    if parent is not None:
        model.thimacs[parent].children.append(name)
    # Minimal actionality: every thimac has a Create until one is declared.
    cid = implicit_create_id(name)
    model._register(cid, "action")
    model.actions[cid] = ActionNode(id=cid, kind=ActionKind.CREATE, owner=name, implicit=True)
    thimac.children.append(cid)
    return name


def add_action(
    model: Model,
    owner: str,
    kind: ActionKind | str,
    action_id: str,
    label: Optional[str] = None,
    guard: Optional[Guard] = None,
) -> str:
    """Append an action node to a thimac; kind must be one of the five."""
    if owner not in model.thimacs:
        raise UnknownId(f"unknown thimac {owner!r}")
    if isinstance(kind, str):
        try:
            kind = ActionKind(kind.lower())
        except ValueError:
            raise InvalidKind(f"{kind!r} is not one of the five actions") from None
    if guard is not None and kind is not ActionKind.PROCESS:
        raise InvalidKind("guards attach to Process nodes only")
    if kind is ActionKind.CREATE:
        _displace_implicit_create(model, owner)
    model._register(action_id, "action")
    node = ActionNode(id=action_id, kind=kind, owner=owner, label=label, guard=guard)
    model.actions[action_id] = node
    model.thimacs[owner].children.append(action_id)
    return action_id


def _displace_implicit_create(model: Model, owner: str) -> None:
    cid = implicit_create_id(owner)
    if cid not in model.actions:
        return
    referenced = (
        any(f.src == cid or f.dst == cid for f in model.flows.values())
        or any(t.src == cid or t.dst == cid for t in model.triggers.values())
        or any(cid in ev.covers for ev in model.events.values())
    )
    if referenced:
        raise ModelError(
            f"cannot declare an explicit Create for {owner!r}: "
            f"its implicit Create {cid!r} is already referenced"
        )
    del model.actions[cid]
    del model.index[cid]
    model.thimacs[owner].children.remove(cid)


def _effective_kind(model: Model, node_id: str, as_source: bool) -> tuple[str, Optional[ActionKind], str]:
    """(category, action-kind-or-None, owner) with storage endpoints mapped
    to Release (read) or Receive (write)."""
    cat = model.index.get(node_id)
    if cat == "action":
        node = model.actions[node_id]
        return cat, node.kind, node.owner
    if cat == "storage":
        kind = ActionKind.RELEASE if as_source else ActionKind.RECEIVE
        return cat, kind, model.storages[node_id].owner
    if cat == "junction":
        return cat, None, model.junctions[node_id].owner
    raise UnknownId(f"unknown node {node_id!r}")


def flow_row(model: Model, src: str, dst: str) -> tuple[str, str, bool]:
    """The (source kind, target kind, same-owner) row a flow edge would occupy."""
    src_cat, src_kind, src_owner = _effective_kind(model, src, as_source=True)
    dst_cat, dst_kind, dst_owner = _effective_kind(model, dst, as_source=False)
    src_name = "junction" if src_cat == "junction" else src_kind.value
    dst_name = "junction" if dst_cat == "junction" else dst_kind.value
    return (src_name, dst_name, src_owner == dst_owner)


def flow_is_legal(model: Model, src: str, dst: str) -> bool:
    src_cat, src_kind, src_owner = _effective_kind(model, src, as_source=True)
    dst_cat, dst_kind, dst_owner = _effective_kind(model, dst, as_source=False)
    same_owner = src_owner == dst_owner
    if dst_cat == "junction":
        # Junctions accept any incoming kind from anywhere.
        return True
    if src_cat == "junction":
        # Junctions emit only to same-owner non-Create actions.
        if not same_owner or dst_cat == "storage":
            return False
        return dst_kind is not ActionKind.CREATE
    if same_owner:
        return (src_kind, dst_kind) in SAME_OWNER_ROWS
    return (src_kind, dst_kind) in CROSS_OWNER_ROWS


def connect_flow(model: Model, src: str, dst: str) -> str:
    """Add a flow edge after checking the adjacency table."""
    if not model.is_node(src):
        raise UnknownId(f"unknown node {src!r}")
    if not model.is_node(dst):
        raise UnknownId(f"unknown node {dst!r}")
    if not flow_is_legal(model, src, dst):
        row = flow_row(model, src, dst)
        where = "same-owner" if row[2] else "cross-owner"
        raise IllegalFlow(f"illegal flow {row[0]} -> {row[1]} ({where})", row)
    eid = model._fresh_edge_id("f", len(model.flows) + 1)
    model._register(eid, "flow")
    model.flows[eid] = FlowEdge(id=eid, src=src, dst=dst)
    return eid


def connect_trigger(model: Model, src: str, dst: str) -> str:
    """Add a trigger (dashed) edge between two actions."""
    for node_id in (src, dst):
        if node_id not in model.index:
            raise UnknownId(f"unknown node {node_id!r}")
        if model.index[node_id] != "action":
            raise InvalidKind(f"trigger endpoint {node_id!r} must be an action")
    if any(f.src == src and f.dst == dst for f in model.flows.values()):
        raise RedundantTrigger(f"a flow edge {src} -> {dst} already exists")
    eid = model._fresh_edge_id("t", len(model.triggers) + 1)
    model._register(eid, "trigger")
    model.triggers[eid] = TriggerEdge(id=eid, src=src, dst=dst)
    return eid


def attach_storage(model: Model, owner: str, storage_id: str, label: Optional[str] = None) -> str:
    if owner not in model.thimacs:
        raise UnknownId(f"unknown thimac {owner!r}")
    model._register(storage_id, "storage")
    model.storages[storage_id] = StorageNode(id=storage_id, owner=owner, label=label or storage_id)
    model.thimacs[owner].children.append(storage_id)
    return storage_id


def junction(model: Model, owner: str, mode: JunctionMode | str, junction_id: str) -> str:
    if owner not in model.thimacs:
        raise UnknownId(f"unknown thimac {owner!r}")
    if isinstance(mode, str):
        try:
            mode = JunctionMode(mode.lower())
        except ValueError:
            raise InvalidKind(f"{mode!r} is not a junction mode") from None
    model._register(junction_id, "junction")
    model.junctions[junction_id] = JunctionNode(id=junction_id, owner=owner, mode=mode)
    model.thimacs[owner].children.append(junction_id)
    return junction_id


def add_focus(model: Model, name: str, event_ids: list[str]) -> None:
    """Declare a named focus group of events for the classifier."""
    if name in model.focus:
        raise DuplicateId(f"focus group {name!r} already declared")
    for eid in event_ids:
        if model.index.get(eid) != "event":
            raise UnknownId(f"focus group {name!r} names unknown event {eid!r}")
    model.focus[name] = list(event_ids)


def add_chronology_edge(model: Model, src: str, dst: str, repeat: bool = False) -> None:
    """Record a modeler-declared chronology edge."""
    for eid in (src, dst):
        if model.index.get(eid) != "event":
            raise UnknownId(f"chronology names unknown event {eid!r}")
    model.chronology.append(DeclaredEdge(src=src, dst=dst, repeat=repeat))


def top_level_thimacs(model: Model) -> list[Thimac]:
    return [t for t in model.thimacs.values() if t.parent is None]
