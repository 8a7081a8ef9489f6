"""Executable toolkit for Thinging Machine (TM) conceptual models.

Parse the textual TM DSL into a graph model, validate its structural laws,
superimpose timed events, simulate flows and triggers deterministically,
and classify events by graph structure.
"""

from .core import (
    ActionKind,
    ActionNode,
    FlowEdge,
    Guard,
    JunctionMode,
    JunctionNode,
    Model,
    StorageNode,
    Thimac,
    TriggerEdge,
    add_action,
    add_chronology_edge,
    add_focus,
    add_thimac,
    attach_storage,
    connect_flow,
    connect_trigger,
    junction,
    new_model,
)
from .classify import (
    Bach,
    EventClass,
    FeatureVector,
    Vendler,
    classify_bach,
    classify_model,
    classify_vendler,
    extract_features,
)
from .dot import export_dot
from .dsl import Diagnostic, ParseResult, SourceSpan, parse_model, render_model
from .dynamics import (
    ChronologyGraph,
    Duration,
    Event,
    Polarity,
    Tense,
    TimingTable,
    build_timing,
    define_event,
    derive_chronology,
    event_durations,
)
from .errors import (
    ChronoCycle,
    DisconnectedCover,
    DuplicateId,
    IllegalFlow,
    InvalidDuration,
    InvalidKind,
    InvalidName,
    ModelError,
    NoEvents,
    RedundantTrigger,
    TooManyInputs,
    UnknownId,
)
from .jsonio import export_json, import_json
from .simulate import Outcome, SimConfig, Trace, scenario_matrix, simulate
from .validate import ValidationReport, validate_dynamic, validate_model, validate_static

__version__ = "0.1.0"

__all__ = [
    "ActionKind", "ActionNode", "Bach", "ChronoCycle", "ChronologyGraph",
    "Diagnostic", "DisconnectedCover", "DuplicateId", "Duration", "Event",
    "EventClass", "FeatureVector", "FlowEdge", "Guard", "IllegalFlow",
    "InvalidDuration", "InvalidKind", "InvalidName", "JunctionMode",
    "JunctionNode", "Model", "ModelError", "NoEvents", "Outcome",
    "ParseResult", "Polarity", "RedundantTrigger", "SimConfig", "SourceSpan",
    "StorageNode", "Tense", "Thimac", "TimingTable", "TooManyInputs", "Trace",
    "TriggerEdge", "UnknownId", "ValidationReport", "Vendler",
    "add_action", "add_chronology_edge", "add_focus", "add_thimac",
    "attach_storage", "build_timing", "classify_bach", "classify_model",
    "classify_vendler", "connect_flow", "connect_trigger", "define_event",
    "derive_chronology", "event_durations", "export_dot", "export_json",
    "extract_features", "import_json", "junction", "new_model", "parse_model",
    "render_model", "scenario_matrix", "simulate", "validate_dynamic",
    "validate_model", "validate_static",
]
