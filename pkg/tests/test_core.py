"""Constructor operations and the legal flow adjacency table."""

from __future__ import annotations

from itertools import product

import pytest

from thimac import core
from thimac.core import ActionKind, Guard, JunctionMode
from thimac.errors import (
    DuplicateId,
    IllegalFlow,
    InvalidKind,
    InvalidName,
    ModelError,
    RedundantTrigger,
    UnknownId,
)

SAME_OWNER_LEGAL = {
    (ActionKind.CREATE, ActionKind.PROCESS),
    (ActionKind.CREATE, ActionKind.RELEASE),
    (ActionKind.RECEIVE, ActionKind.PROCESS),
    (ActionKind.RECEIVE, ActionKind.RELEASE),
    (ActionKind.PROCESS, ActionKind.RELEASE),
    (ActionKind.RELEASE, ActionKind.TRANSFER),
    (ActionKind.TRANSFER, ActionKind.RECEIVE),
}


def two_thimacs():
    model = core.new_model("m")
    core.add_thimac(model, "A")
    core.add_thimac(model, "B")
    return model


def test_new_model_is_empty():
    model = core.new_model("demo")
    assert model.name == "demo"
    assert not model.thimacs and not model.actions and not model.flows
    assert not model.triggers and not model.storages and not model.junctions


def test_new_model_rejects_empty_name():
    with pytest.raises(InvalidName):
        core.new_model("")


def test_add_thimac_registers_implicit_create():
    model = core.new_model("m")
    core.add_thimac(model, "computer")
    creates = [a for a in model.actions.values() if a.owner == "computer"]
    assert len(creates) == 1
    assert creates[0].kind is ActionKind.CREATE and creates[0].implicit


def test_explicit_create_displaces_implicit():
    model = core.new_model("m")
    core.add_thimac(model, "A")
    core.add_action(model, "A", ActionKind.CREATE, "c1")
    creates = [a for a in model.actions.values() if a.owner == "A"]
    assert [a.id for a in creates] == ["c1"]
    assert not creates[0].implicit


def test_explicit_create_rejected_once_implicit_is_referenced():
    model = core.new_model("m")
    core.add_thimac(model, "A")
    implicit = core.implicit_create_id("A")
    core.add_action(model, "A", ActionKind.PROCESS, "p1")
    core.connect_flow(model, implicit, "p1")
    with pytest.raises(ModelError):
        core.add_action(model, "A", ActionKind.CREATE, "c1")


def test_nested_thimac_and_unknown_parent():
    model = core.new_model("m")
    core.add_thimac(model, "image")
    core.add_thimac(model, "eyes", parent="image")
    assert model.thimacs["eyes"].parent == "image"
    assert "eyes" in model.thimacs["image"].children
    with pytest.raises(UnknownId):
        core.add_thimac(model, "nose", parent="face")


def test_duplicate_identifiers_rejected():
    model = core.new_model("m")
    core.add_thimac(model, "A")
    with pytest.raises(DuplicateId):
        core.add_thimac(model, "A")
    core.add_action(model, "A", ActionKind.PROCESS, "p1")
    with pytest.raises(DuplicateId):
        core.add_action(model, "A", ActionKind.RELEASE, "p1")


def test_unrealizable_flag_is_declared_not_computed():
    model = core.new_model("m")
    core.add_thimac(model, "round_square", realizable=False)
    assert model.thimacs["round_square"].realizable is False


def test_add_action_rejects_folded_kinds():
    model = core.new_model("m")
    core.add_thimac(model, "computer")
    with pytest.raises(InvalidKind):
        core.add_action(model, "computer", "Arrive", "a1")
    with pytest.raises(InvalidKind):
        core.add_action(model, "computer", "accept", "a2")


def test_guard_only_on_process():
    model = core.new_model("m")
    core.add_thimac(model, "A")
    with pytest.raises(InvalidKind):
        core.add_action(model, "A", ActionKind.RELEASE, "r1", guard=Guard("x"))


@pytest.mark.parametrize("src_kind,dst_kind", product(list(ActionKind), repeat=2))
def test_adjacency_same_owner_exhaustive(src_kind, dst_kind):
    model = two_thimacs()
    core.add_action(model, "A", src_kind, "u")
    core.add_action(model, "A", dst_kind, "v")
    if (src_kind, dst_kind) in SAME_OWNER_LEGAL:
        assert core.connect_flow(model, "u", "v")
    else:
        with pytest.raises(IllegalFlow) as err:
            core.connect_flow(model, "u", "v")
        assert err.value.row == (src_kind.value, dst_kind.value, True)


@pytest.mark.parametrize("src_kind,dst_kind", product(list(ActionKind), repeat=2))
def test_adjacency_cross_owner_exhaustive(src_kind, dst_kind):
    model = two_thimacs()
    core.add_action(model, "A", src_kind, "u")
    core.add_action(model, "B", dst_kind, "v")
    legal = src_kind is ActionKind.TRANSFER and dst_kind is ActionKind.TRANSFER
    if legal:
        assert core.connect_flow(model, "u", "v")
    else:
        with pytest.raises(IllegalFlow):
            core.connect_flow(model, "u", "v")


def test_storage_endpoints_act_as_release_and_receive():
    model = two_thimacs()
    core.attach_storage(model, "A", "st")
    core.add_action(model, "A", ActionKind.TRANSFER, "t1")
    core.connect_flow(model, "st", "t1")  # read: storage -> Transfer (Release row)
    core.add_action(model, "A", ActionKind.TRANSFER, "t2")
    core.connect_flow(model, "t2", "st")  # write: Transfer -> storage (Receive row)
    core.add_action(model, "A", ActionKind.PROCESS, "p1")
    with pytest.raises(IllegalFlow):
        core.connect_flow(model, "st", "p1")  # Release -> Process is not a row


def test_junction_accepts_any_incoming_emits_same_owner():
    model = two_thimacs()
    core.junction(model, "A", JunctionMode.OR, "j1")
    core.add_action(model, "A", ActionKind.PROCESS, "p1")
    core.add_action(model, "B", ActionKind.PROCESS, "p2")
    core.connect_flow(model, "p1", "j1")
    core.connect_flow(model, "p2", "j1")  # cross-owner into a junction is fine
    core.add_action(model, "A", ActionKind.RELEASE, "r1")
    core.connect_flow(model, "j1", "r1")
    core.add_action(model, "B", ActionKind.RELEASE, "r2")
    with pytest.raises(IllegalFlow):
        core.connect_flow(model, "j1", "r2")  # emission is same-owner only


def test_flow_into_create_is_forbidden():
    model = two_thimacs()
    core.add_action(model, "A", ActionKind.CREATE, "c1")
    core.add_action(model, "A", ActionKind.RELEASE, "r1")
    with pytest.raises(IllegalFlow):
        core.connect_flow(model, "r1", "c1")
    core.junction(model, "A", JunctionMode.OR, "j1")
    with pytest.raises(IllegalFlow):
        core.connect_flow(model, "j1", "c1")


def test_trigger_rules():
    model = two_thimacs()
    core.add_action(model, "A", ActionKind.PROCESS, "p1")
    core.add_action(model, "A", ActionKind.RELEASE, "r1")
    core.add_action(model, "B", ActionKind.CREATE, "c1")
    core.connect_trigger(model, "p1", "c1")  # creation by triggering
    core.connect_flow(model, "p1", "r1")
    with pytest.raises(RedundantTrigger):
        core.connect_trigger(model, "p1", "r1")  # parallel flow exists
    core.attach_storage(model, "A", "st")
    with pytest.raises(InvalidKind):
        core.connect_trigger(model, "st", "p1")
    with pytest.raises(UnknownId):
        core.connect_trigger(model, "ghost", "p1")


def test_closure_every_endpoint_resolves():
    model = two_thimacs()
    core.add_action(model, "A", ActionKind.RELEASE, "r1")
    core.add_action(model, "A", ActionKind.TRANSFER, "t1")
    core.add_action(model, "B", ActionKind.TRANSFER, "t2")
    core.connect_flow(model, "r1", "t1")
    core.connect_flow(model, "t1", "t2")
    for edge in list(model.flows.values()) + list(model.triggers.values()):
        assert model.is_node(edge.src) and model.is_node(edge.dst)


def build_sample():
    model = core.new_model("m")
    core.add_thimac(model, "A")
    core.add_thimac(model, "B", parent="A")
    core.add_action(model, "B", ActionKind.CREATE, "c1")
    core.add_action(model, "B", ActionKind.PROCESS, "p1", guard=Guard("x", negated=True))
    core.connect_flow(model, "c1", "p1")
    core.attach_storage(model, "A", "st")
    core.connect_trigger(model, "p1", "c1")
    return model


def test_identical_sequences_compare_equal_including_order():
    assert build_sample() == build_sample()


def test_five_kind_exhaustiveness():
    model = build_sample()
    assert {a.kind for a in model.actions.values()} <= set(ActionKind)


def test_unknown_owner_errors():
    model = core.new_model("m")
    with pytest.raises(UnknownId):
        core.add_action(model, "ghost", ActionKind.CREATE, "c1")
    with pytest.raises(UnknownId):
        core.attach_storage(model, "ghost", "s1")
    with pytest.raises(UnknownId):
        core.junction(model, "ghost", JunctionMode.AND, "j1")
