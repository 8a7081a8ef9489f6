"""DOT export: thimacs as nested clusters, solid flows, dashed triggers.

The static level draws the region diagram (one cluster per thimac); the
dynamic level redraws it with one cluster per event grouping the nodes the
event covers, which is how the dynamic figures superimpose event boxes on
the static model.
"""

from __future__ import annotations

from .core import Model, Thimac, top_level_thimacs
from .dynamics import Polarity, owner_event_map
from .errors import NoEvents


def _q(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _node_lines(model: Model, node_id: str, pad: str) -> str:
    cat = model.index[node_id]
    if cat == "action":
        node = model.actions[node_id]
        label = node.kind.value if node.implicit else f"{node.kind.value} {node.id}"
        if node.guard is not None:
            test = f"¬{node.guard.name}" if node.guard.negated else node.guard.name
            label += f" [{test}]"
        return f"{pad}{_q(node_id)} [label={_q(label)}];"
    if cat == "storage":
        return f"{pad}{_q(node_id)} [shape=cylinder, label={_q(model.storages[node_id].label)}];"
    mode = model.junctions[node_id].mode.value.upper()
    return f"{pad}{_q(node_id)} [shape=box, style=filled, fillcolor=black, fontcolor=white, label={_q(mode)}];"


def _edge_lines(model: Model, indent: str) -> list[str]:
    lines = []
    for flow in model.flows.values():
        lines.append(f"{indent}{_q(flow.src)} -> {_q(flow.dst)};")
    for trig in model.triggers.values():
        lines.append(f"{indent}{_q(trig.src)} -> {_q(trig.dst)} [style=dashed];")
    return lines


def _static_clusters(model: Model, thimac: Thimac, depth: int, lines: list[str]) -> None:
    pad = "  " * depth
    lines.append(f"{pad}subgraph {_q('cluster_' + thimac.id)} {{")
    label = thimac.id if thimac.realizable else f"{thimac.id} (unrealizable)"
    lines.append(f"{pad}  label={_q(label)};")
    if not thimac.realizable:
        lines.append(f"{pad}  style=dashed;")
    for child in thimac.children:
        if model.index.get(child) == "thimac":
            _static_clusters(model, model.thimacs[child], depth + 1, lines)
        else:
            lines.append(_node_lines(model, child, pad + "  "))
    lines.append(f"{pad}}}")


def export_dot(model: Model, level: str = "static") -> str:
    """Render the model as DOT text at the static or dynamic level."""
    if level not in ("static", "dynamic"):
        raise ValueError(f"unknown level {level!r}")
    if level == "dynamic" and not model.events:
        raise NoEvents("dynamic export requires at least one event")
    lines = [f"digraph {_q(model.name)} {{", "  rankdir=LR;", "  node [shape=box];"]
    if level == "static":
        for thimac in top_level_thimacs(model):
            _static_clusters(model, thimac, 1, lines)
    else:
        owners = owner_event_map(model)
        grouped: dict[str, list[str]] = {eid: [] for eid in model.events}
        loose: list[str] = []
        for node_id in model.index:
            if not model.is_node(node_id):
                continue
            event_id = owners.get(node_id)
            if event_id is None:
                loose.append(node_id)
            else:
                grouped[event_id].append(node_id)
        for event in model.events.values():
            lines.append(f"  subgraph {_q('cluster_' + event.id)} {{")
            label = event.label
            if event.polarity is Polarity.ABSENT:
                label += " (absent)"
            lines.append(f"    label={_q(label)};")
            if event.polarity is Polarity.ABSENT:
                lines.append("    style=dashed;")
            for node_id in grouped[event.id]:
                lines.append(_node_lines(model, node_id, "    "))
            lines.append("  }")
        for node_id in loose:
            lines.append(_node_lines(model, node_id, "  "))
    lines.extend(_edge_lines(model, "  "))
    lines.append("}")
    return "\n".join(lines) + "\n"
