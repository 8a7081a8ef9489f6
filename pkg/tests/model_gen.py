"""Seeded generator of random valid models for round-trip properties.

Members are populated depth-first per thimac, mirroring the order a parse
of the rendered text would rebuild them, so generated models compare equal
through parse(render(m)) including iteration order.
"""

from __future__ import annotations

import random

from thimac import core
from thimac.core import ActionKind, Guard, JunctionMode, Model
from thimac.dynamics import Duration, Polarity, Tense, cover_is_connected, define_event
from thimac.errors import ModelError

KINDS = tuple(ActionKind)
GUARD_NAMES = ("x", "y", "z")
UNITS = ("unit", "hour", "day")
MAGNITUDES = (1.0, 2.0, 3.0, 0.5, 1.5)


def random_model(seed: int) -> Model:
    rng = random.Random(seed)
    model = core.new_model(f"gen_{seed}")
    counter = 0

    def fresh(prefix: str) -> str:
        nonlocal counter
        counter += 1
        return f"{prefix}{counter}"

    def populate(thimac_id: str, depth: int) -> None:
        for _ in range(rng.randint(0, 4)):
            roll = rng.random()
            if roll < 0.55:
                kind = rng.choice(KINDS)
                guard = None
                if kind is ActionKind.PROCESS and rng.random() < 0.3:
                    guard = Guard(rng.choice(GUARD_NAMES), negated=rng.random() < 0.5)
                core.add_action(model, thimac_id, kind, fresh("n"), guard=guard)
            elif roll < 0.7:
                core.attach_storage(model, thimac_id, fresh("s"))
            elif roll < 0.8:
                core.junction(model, thimac_id, rng.choice(tuple(JunctionMode)), fresh("j"))
            elif depth < 2:
                sub = core.add_thimac(
                    model,
                    fresh("t"),
                    parent=thimac_id,
                    realizable=rng.random() > 0.1,
                    delimiter=rng.random() < 0.15,
                )
                populate(sub, depth + 1)

    for _ in range(rng.randint(1, 4)):
        top = core.add_thimac(
            model,
            fresh("t"),
            realizable=rng.random() > 0.1,
            delimiter=rng.random() < 0.1,
        )
        populate(top, 0)

    nodes = [nid for nid in model.index if model.is_node(nid)]
    pairs = [(u, v) for u in nodes for v in nodes if u != v]
    rng.shuffle(pairs)
    budget = len(nodes)
    for u, v in pairs:
        if budget <= 0:
            break
        if core.flow_is_legal(model, u, v) and rng.random() < 0.5:
            core.connect_flow(model, u, v)
            budget -= 1

    actions = list(model.actions)
    for _ in range(rng.randint(0, 5)):
        if not actions:
            break
        try:
            core.connect_trigger(model, rng.choice(actions), rng.choice(actions))
        except ModelError:
            pass

    elements = [
        eid
        for eid, cat in model.index.items()
        if cat in ("thimac", "action", "storage", "junction")
    ]
    event_ids: list[str] = []
    for _ in range(rng.randint(0, 4)):
        cover = [rng.choice(elements)]
        for _ in range(rng.randint(0, 3)):
            candidate = rng.choice(elements)
            if candidate not in cover and cover_is_connected(model, cover + [candidate]):
                cover.append(candidate)
        duration = None
        if rng.random() < 0.4:
            duration = Duration(rng.choice(MAGNITUDES), rng.choice(UNITS))
        event_id = fresh("e")
        define_event(
            model,
            event_id,
            cover,
            polarity=Polarity.ABSENT if rng.random() < 0.2 else Polarity.PRESENT,
            duration=duration,
            tense=rng.choice((None, Tense.PAST, Tense.NOW)),
        )
        event_ids.append(event_id)

    if len(event_ids) >= 2:
        for _ in range(rng.randint(0, 4)):
            src, dst = rng.sample(event_ids, 2)
            core.add_chronology_edge(model, src, dst, repeat=rng.random() < 0.25)
    if event_ids and rng.random() < 0.5:
        members = [eid for eid in event_ids if rng.random() < 0.7] or [event_ids[0]]
        core.add_focus(model, fresh("g"), members)
    return model
