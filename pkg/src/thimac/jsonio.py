"""Lossless JSON export/import of models.

Schema (arrays in declaration order)::

    {name, thimacs[], actions[], flows[], triggers[], storages[],
     junctions[], events[], chronology[], focus[]}

``import_json(export_json(m))`` reproduces ``m`` exactly, including
iteration order and implicit Create nodes.  Import performs no structural
checking beyond id uniqueness, so the validator can be exercised on
hand-broken payloads.
"""

from __future__ import annotations

import json

from .core import (
    ActionKind,
    ActionNode,
    DeclaredEdge,
    FlowEdge,
    Guard,
    JunctionMode,
    JunctionNode,
    Model,
    StorageNode,
    Thimac,
    TriggerEdge,
)
from .dynamics import Duration, Event, Polarity, Tense


def model_to_dict(model: Model) -> dict:
    return {
        "name": model.name,
        "thimacs": [
            {
                "id": t.id,
                "name": t.name,
                "parent": t.parent,
                "realizable": t.realizable,
                "delimiter": t.delimiter,
                "children": list(t.children),
            }
            for t in model.thimacs.values()
        ],
        "actions": [
            {
                "id": a.id,
                "kind": a.kind.value,
                "owner": a.owner,
                "label": a.label,
                "implicit": a.implicit,
                "guard": None
                if a.guard is None
                else {"name": a.guard.name, "negated": a.guard.negated},
            }
            for a in model.actions.values()
        ],
        "flows": [{"id": f.id, "from": f.src, "to": f.dst} for f in model.flows.values()],
        "triggers": [{"id": t.id, "from": t.src, "to": t.dst} for t in model.triggers.values()],
        "storages": [
            {"id": s.id, "owner": s.owner, "label": s.label} for s in model.storages.values()
        ],
        "junctions": [
            {"id": j.id, "owner": j.owner, "mode": j.mode.value} for j in model.junctions.values()
        ],
        "events": [
            {
                "id": e.id,
                "label": e.label,
                "covers": list(e.covers),
                "polarity": e.polarity.value,
                "duration": None
                if e.duration is None
                else {"magnitude": e.duration.magnitude, "unit": e.duration.unit},
                "tense": None if e.tense is None else e.tense.value,
            }
            for e in model.events.values()
        ],
        "chronology": [
            {"from": d.src, "to": d.dst, "repeat": d.repeat} for d in model.chronology
        ],
        "focus": [{"name": n, "events": list(members)} for n, members in model.focus.items()],
    }


def export_json(model: Model) -> str:
    return json.dumps(model_to_dict(model), indent=2) + "\n"


def model_from_dict(data: dict) -> Model:
    model = Model(data["name"])
    for t in data.get("thimacs", ()):
        model._register(t["id"], "thimac")
        model.thimacs[t["id"]] = Thimac(
            id=t["id"],
            name=t.get("name", t["id"]),
            parent=t.get("parent"),
            realizable=t.get("realizable", True),
            delimiter=t.get("delimiter", False),
            children=list(t.get("children", ())),
        )
    for a in data.get("actions", ()):
        model._register(a["id"], "action")
        guard = a.get("guard")
        model.actions[a["id"]] = ActionNode(
            id=a["id"],
            kind=ActionKind(a["kind"]),
            owner=a["owner"],
            label=a.get("label"),
            implicit=a.get("implicit", False),
            guard=None if guard is None else Guard(guard["name"], guard.get("negated", False)),
        )
    for f in data.get("flows", ()):
        model._register(f["id"], "flow")
        model.flows[f["id"]] = FlowEdge(id=f["id"], src=f["from"], dst=f["to"])
    for t in data.get("triggers", ()):
        model._register(t["id"], "trigger")
        model.triggers[t["id"]] = TriggerEdge(id=t["id"], src=t["from"], dst=t["to"])
    for s in data.get("storages", ()):
        model._register(s["id"], "storage")
        model.storages[s["id"]] = StorageNode(id=s["id"], owner=s["owner"], label=s.get("label", s["id"]))
    for j in data.get("junctions", ()):
        model._register(j["id"], "junction")
        model.junctions[j["id"]] = JunctionNode(
            id=j["id"], owner=j["owner"], mode=JunctionMode(j["mode"])
        )
    for e in data.get("events", ()):
        model._register(e["id"], "event")
        duration = e.get("duration")
        tense = e.get("tense")
        model.events[e["id"]] = Event(
            id=e["id"],
            label=e.get("label", e["id"]),
            covers=list(e.get("covers", ())),
            polarity=Polarity(e.get("polarity", "present")),
            duration=None if duration is None else Duration(duration["magnitude"], duration["unit"]),
            tense=None if tense is None else Tense(tense),
        )
    for d in data.get("chronology", ()):
        model.chronology.append(DeclaredEdge(src=d["from"], dst=d["to"], repeat=d.get("repeat", False)))
    for g in data.get("focus", ()):
        model.focus[g["name"]] = list(g.get("events", ()))
    return model


def import_json(text: str) -> Model:
    return model_from_dict(json.loads(text))
