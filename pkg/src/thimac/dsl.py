"""Concrete syntax for TM models: parser and canonical pretty-printer.

Wire format (``.tm`` files, UTF-8, ``#`` comments)::

    model      := "model" STRING "{" item* "}"
    item       := thimac | flow | trigger | event | chronology | focus
    thimac     := "thimac" IDENT ["unrealizable"] ["delimiter"] "{" member* "}"
    member     := actiondecl | thimac | "storage" IDENT
                | "junction" ("or"|"and") IDENT
    actiondecl := ("create"|"process"|"release"|"transfer"|"receive") IDENT
                  ["if" ["not"] IDENT]          # guard, process only
    flow       := "flow" path "->" path
    trigger    := "trigger" path "=>" path
    event      := "event" IDENT ["absent"] ["duration" NUMBER IDENT]
                  ["tense" ("past"|"now")] "covers" "{" path ("," path)* "}"
    chronology := "chronology" "{" (["repeat"] IDENT "->" IDENT)* "}"
    focus      := "focus" IDENT "{" IDENT ("," IDENT)* "}"
    path       := IDENT ("." IDENT)*

``->`` mirrors solid (flow) arrows, ``=>`` dashed (trigger) arrows, and
``repeat`` the backward/reflexive arrows of the behavioral model.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from . import core
from .core import ActionKind, Guard, Model
from .dynamics import Duration, Polarity, Tense, define_event
from .errors import ModelError, UnknownId


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    length: int = 1


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass
class Diagnostic:
    severity: Severity
    code: str
    message: str
    span: Optional[SourceSpan] = None

    def to_dict(self) -> dict:
        out: dict = {"severity": self.severity.value, "code": self.code, "message": self.message}
        if self.span is not None:
            out["span"] = {
                "line": self.span.line,
                "column": self.span.column,
                "length": self.span.length,
            }
        return out


@dataclass
class ParseResult:
    model: Optional[Model]
    diagnostics: list[Diagnostic]

    @property
    def ok(self) -> bool:
        return self.model is not None


KEYWORDS = frozenset(
    {
        "model", "thimac", "unrealizable", "delimiter",
        "create", "process", "release", "transfer", "receive",
        "storage", "junction", "or", "and",
        "flow", "trigger", "event", "absent", "duration", "tense",
        "past", "now", "covers", "chronology", "repeat", "focus",
        "if", "not",
    }
)

ACTION_KEYWORDS = frozenset({"create", "process", "release", "transfer", "receive"})


@dataclass(frozen=True)
class Token:
    kind: str  # ident / keyword / string / number / symbol / eof
    text: str
    line: int
    column: int

    @property
    def span(self) -> SourceSpan:
        return SourceSpan(self.line, self.column, max(1, len(self.text)))


class SyntaxErr(Exception):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(message)
        self.span = span


def _lex(source: str) -> list[Token]:
    tokens: list[Token] = []
    line, col, i = 1, 1, 0
    n = len(source)

    def bump(text: str) -> None:
        nonlocal line, col
        for ch in text:
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1

    while i < n:
        ch = source[i]
        if ch in " \t\r\n":
            bump(ch)
            i += 1
            continue
        if ch == "#":
            j = source.find("\n", i)
            j = n if j < 0 else j
            bump(source[i:j])
            i = j
            continue
        start_line, start_col = line, col
        if ch.isalpha():
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            text = source[i:j]
            kind = "keyword" if text in KEYWORDS else "ident"
            tokens.append(Token(kind, text, start_line, start_col))
            bump(text)
            i = j
            continue
        if ch.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            if j < n and source[j] == "." and j + 1 < n and source[j + 1].isdigit():
                j += 1
                while j < n and source[j].isdigit():
                    j += 1
            text = source[i:j]
            tokens.append(Token("number", text, start_line, start_col))
            bump(text)
            i = j
            continue
        if ch == '"':
            j = i + 1
            value = []
            while j < n and source[j] != '"':
                if source[j] == "\n":
                    raise SyntaxErr("unterminated string", SourceSpan(start_line, start_col, j - i))
                if source[j] == "\\" and j + 1 < n and source[j + 1] in ('"', "\\"):
                    value.append(source[j + 1])
                    j += 2
                else:
                    value.append(source[j])
                    j += 1
            if j >= n:
                raise SyntaxErr("unterminated string", SourceSpan(start_line, start_col, j - i))
            raw = source[i : j + 1]
            tokens.append(Token("string", "".join(value), start_line, start_col))
            bump(raw)
            i = j + 1
            continue
        for sym in ("->", "=>"):
            if source.startswith(sym, i):
                tokens.append(Token("symbol", sym, start_line, start_col))
                bump(sym)
                i += len(sym)
                break
        else:
            if ch in "{}.,":
                tokens.append(Token("symbol", ch, start_line, start_col))
                bump(ch)
                i += 1
            else:
                raise SyntaxErr(f"unexpected character {ch!r}", SourceSpan(line, col, 1))
    tokens.append(Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.diagnostics: list[Diagnostic] = []
        self.model: Optional[Model] = None
        # Deferred items so that forward references parse: (kind, payload, span).
        self.pending_events: list[tuple] = []
        self.pending_chrono: list[tuple] = []
        self.pending_focus: list[tuple] = []

    # -- token plumbing -------------------------------------------------

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def expect(self, kind: str, text: Optional[str] = None) -> Token:
        tok = self.peek()
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text if text is not None else kind
            got = tok.text if tok.text else tok.kind
            raise SyntaxErr(f"expected {want!r}, found {got!r}", tok.span)
        return self.advance()

    def at(self, kind: str, text: Optional[str] = None) -> bool:
        tok = self.peek()
        return tok.kind == kind and (text is None or tok.text == text)

    def semantic_error(self, exc: ModelError, span: SourceSpan) -> None:
        self.diagnostics.append(Diagnostic(Severity.ERROR, exc.code, str(exc), span))

    # -- grammar --------------------------------------------------------

    def parse(self) -> None:
        self.expect("keyword", "model")
        name = self.expect("string")
        try:
            self.model = core.new_model(name.text)
        except ModelError as exc:
            self.semantic_error(exc, name.span)
            self.model = Model(name.text or "?")
        self.expect("symbol", "{")
        while not self.at("symbol", "}"):
            self.parse_item()
        self.expect("symbol", "}")
        self.expect("eof")
        self.apply_pending()

    def parse_item(self) -> None:
        tok = self.peek()
        if self.at("keyword", "thimac"):
            self.parse_thimac(parent=None)
        elif self.at("keyword", "flow"):
            self.parse_edge(trigger=False)
        elif self.at("keyword", "trigger"):
            self.parse_edge(trigger=True)
        elif self.at("keyword", "event"):
            self.parse_event()
        elif self.at("keyword", "chronology"):
            self.parse_chronology()
        elif self.at("keyword", "focus"):
            self.parse_focus()
        else:
            raise SyntaxErr(f"expected an item, found {tok.text or tok.kind!r}", tok.span)

    def parse_thimac(self, parent: Optional[str]) -> None:
        self.expect("keyword", "thimac")
        name = self.expect("ident")
        realizable, delimiter = True, False
        while True:
            if self.at("keyword", "unrealizable"):
                self.advance()
                realizable = False
            elif self.at("keyword", "delimiter"):
                self.advance()
                delimiter = True
            else:
                break
        declared = None
        try:
            declared = core.add_thimac(
                self.model, name.text, parent=parent, realizable=realizable, delimiter=delimiter
            )
            self.model.spans[declared] = name.span
        except ModelError as exc:
            self.semantic_error(exc, name.span)
        self.expect("symbol", "{")
        while not self.at("symbol", "}"):
            self.parse_member(declared)
        self.expect("symbol", "}")

    def parse_member(self, owner: Optional[str]) -> None:
        tok = self.peek()
        if tok.kind == "keyword" and tok.text in ACTION_KEYWORDS:
            self.advance()
            name = self.expect("ident")
            guard = None
            if self.at("keyword", "if"):
                if_tok = self.advance()
                negated = False
                if self.at("keyword", "not"):
                    self.advance()
                    negated = True
                guard_name = self.expect("ident")
                guard = Guard(name=guard_name.text, negated=negated)
                if tok.text != "process":
                    self.semantic_error(
                        ModelError("guards attach to process declarations only"), if_tok.span
                    )
                    guard = None
            if owner is None:
                return
            try:
                core.add_action(self.model, owner, tok.text, name.text, guard=guard)
                self.model.spans[name.text] = name.span
            except ModelError as exc:
                self.semantic_error(exc, name.span)
        elif self.at("keyword", "thimac"):
            self.parse_thimac(parent=owner)
        elif self.at("keyword", "storage"):
            self.advance()
            name = self.expect("ident")
            if owner is None:
                return
            try:
                core.attach_storage(self.model, owner, name.text)
                self.model.spans[name.text] = name.span
            except ModelError as exc:
                self.semantic_error(exc, name.span)
        elif self.at("keyword", "junction"):
            self.advance()
            mode = self.peek()
            if not (self.at("keyword", "or") or self.at("keyword", "and")):
                raise SyntaxErr("expected 'or' or 'and'", mode.span)
            self.advance()
            name = self.expect("ident")
            if owner is None:
                return
            try:
                core.junction(self.model, owner, mode.text, name.text)
                self.model.spans[name.text] = name.span
            except ModelError as exc:
                self.semantic_error(exc, name.span)
        else:
            raise SyntaxErr(
                f"expected an action, thimac, storage or junction, found {tok.text!r}", tok.span
            )

    def parse_path(self) -> tuple[list[str], SourceSpan]:
        first = self.expect("ident")
        segments = [first.text]
        while self.at("symbol", "."):
            self.advance()
            segments.append(self.expect("ident").text)
        return segments, first.span

    def resolve_path(self, segments: list[str]) -> str:
        target = segments[-1]
        if target not in self.model.index:
            raise UnknownId(f"unknown identifier {'.'.join(segments)!r}")
        prefix = segments[:-1]
        ancestry = self.model.ancestors(target)  # inner -> outer
        if len(prefix) > len(ancestry) or list(reversed(prefix)) != ancestry[: len(prefix)]:
            raise UnknownId(f"path {'.'.join(segments)!r} does not match containment")
        return target

    def parse_edge(self, trigger: bool) -> None:
        keyword = self.advance()
        src_segments, _ = self.parse_path()
        self.expect("symbol", "=>" if trigger else "->")
        dst_segments, _ = self.parse_path()
        try:
            src = self.resolve_path(src_segments)
            dst = self.resolve_path(dst_segments)
            if trigger:
                eid = core.connect_trigger(self.model, src, dst)
            else:
                eid = core.connect_flow(self.model, src, dst)
            self.model.spans[eid] = keyword.span
        except ModelError as exc:
            self.semantic_error(exc, keyword.span)

    def parse_event(self) -> None:
        self.expect("keyword", "event")
        name = self.expect("ident")
        polarity = Polarity.PRESENT
        duration = None
        tense = None
        if self.at("keyword", "absent"):
            self.advance()
            polarity = Polarity.ABSENT
        if self.at("keyword", "duration"):
            self.advance()
            magnitude = self.expect("number")
            unit = self.expect("ident")
            duration = Duration(magnitude=float(magnitude.text), unit=unit.text)
        if self.at("keyword", "tense"):
            self.advance()
            tok = self.peek()
            if not (self.at("keyword", "past") or self.at("keyword", "now")):
                raise SyntaxErr("expected 'past' or 'now'", tok.span)
            self.advance()
            tense = Tense(tok.text)
        self.expect("keyword", "covers")
        self.expect("symbol", "{")
        paths: list[tuple[list[str], SourceSpan]] = []
        if not self.at("symbol", "}"):
            paths.append(self.parse_path())
            while self.at("symbol", ","):
                self.advance()
                paths.append(self.parse_path())
        self.expect("symbol", "}")
        self.pending_events.append((name, polarity, duration, tense, paths))

    def parse_chronology(self) -> None:
        self.expect("keyword", "chronology")
        self.expect("symbol", "{")
        while not self.at("symbol", "}"):
            repeat = False
            if self.at("keyword", "repeat"):
                self.advance()
                repeat = True
            src = self.expect("ident")
            self.expect("symbol", "->")
            dst = self.expect("ident")
            self.pending_chrono.append((src, dst, repeat))
        self.expect("symbol", "}")

    def parse_focus(self) -> None:
        self.expect("keyword", "focus")
        name = self.expect("ident")
        self.expect("symbol", "{")
        members = [self.expect("ident")]
        while self.at("symbol", ","):
            self.advance()
            members.append(self.expect("ident"))
        self.expect("symbol", "}")
        self.pending_focus.append((name, members))

    def apply_pending(self) -> None:
        # Events (then chronology/focus) resolve after the whole static model
        # is known, so covers may reference later declarations.
        for name, polarity, duration, tense, paths in self.pending_events:
            try:
                covers = [self.resolve_path(seg) for seg, _span in paths]
                define_event(
                    self.model, name.text, covers,
                    polarity=polarity, duration=duration, tense=tense,
                )
                self.model.spans[name.text] = name.span
            except ModelError as exc:
                self.semantic_error(exc, name.span)
        for src, dst, repeat in self.pending_chrono:
            try:
                core.add_chronology_edge(self.model, src.text, dst.text, repeat=repeat)
            except ModelError as exc:
                self.semantic_error(exc, src.span)
        for name, members in self.pending_focus:
            try:
                core.add_focus(self.model, name.text, [m.text for m in members])
            except ModelError as exc:
                self.semantic_error(exc, name.span)


def parse_model(source: str) -> ParseResult:
    """Parse DSL text; returns a model or error diagnostics, never both."""
    try:
        tokens = _lex(source)
    except SyntaxErr as exc:
        return ParseResult(None, [Diagnostic(Severity.ERROR, "SYNTAX", str(exc), exc.span)])
    parser = _Parser(tokens)
    try:
        parser.parse()
    except SyntaxErr as exc:
        parser.diagnostics.append(Diagnostic(Severity.ERROR, "SYNTAX", str(exc), exc.span))
        return ParseResult(None, parser.diagnostics)
    if any(d.severity is Severity.ERROR for d in parser.diagnostics):
        return ParseResult(None, parser.diagnostics)
    return ParseResult(parser.model, parser.diagnostics)


# ----------------------------------------------------------------------
# Canonical pretty-printer
# ----------------------------------------------------------------------


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def full_path(model: Model, element_id: str) -> str:
    chain = list(reversed(model.ancestors(element_id)))
    return ".".join(chain + [element_id])


def _magnitude(value: float) -> str:
    return f"{value:g}"


def render_model(model: Model) -> str:
    """Canonical text: two-space indent, declaration order, implicit Creates
    omitted.  parse(render(m)) == m for every DSL-expressible model."""
    lines: list[str] = [f"model {_quote(model.name)} {{"]

    def emit_thimac(thimac: core.Thimac, depth: int) -> None:
        pad = "  " * depth
        flags = ""
        if not thimac.realizable:
            flags += " unrealizable"
        if thimac.delimiter:
            flags += " delimiter"
        lines.append(f"{pad}thimac {thimac.id}{flags} {{")
        for child in thimac.children:
            cat = model.index.get(child)
            if cat == "thimac":
                emit_thimac(model.thimacs[child], depth + 1)
            elif cat == "action":
                node = model.actions[child]
                if node.implicit:
                    continue
                guard = ""
                if node.guard is not None:
                    guard = f" if not {node.guard.name}" if node.guard.negated else f" if {node.guard.name}"
                lines.append(f"{pad}  {node.kind.value} {node.id}{guard}")
            elif cat == "storage":
                lines.append(f"{pad}  storage {child}")
            elif cat == "junction":
                lines.append(f"{pad}  junction {model.junctions[child].mode.value} {child}")
        lines.append(f"{pad}}}")

    for thimac in core.top_level_thimacs(model):
        emit_thimac(thimac, 1)
    for flow in model.flows.values():
        lines.append(f"  flow {full_path(model, flow.src)} -> {full_path(model, flow.dst)}")
    for trig in model.triggers.values():
        lines.append(f"  trigger {full_path(model, trig.src)} => {full_path(model, trig.dst)}")
    for event in model.events.values():
        parts = [f"event {event.id}"]
        if event.polarity is Polarity.ABSENT:
            parts.append("absent")
        if event.duration is not None:
            parts.append(f"duration {_magnitude(event.duration.magnitude)} {event.duration.unit}")
        if event.tense is not None:
            parts.append(f"tense {event.tense.value}")
        covers = ", ".join(full_path(model, cid) for cid in event.covers)
        parts.append(f"covers {{ {covers} }}")
        lines.append("  " + " ".join(parts))
    if model.chronology:
        lines.append("  chronology {")
        for edge in model.chronology:
            prefix = "repeat " if edge.repeat else ""
            lines.append(f"    {prefix}{edge.src} -> {edge.dst}")
        lines.append("  }")
    for name, members in model.focus.items():
        lines.append(f"  focus {name} {{ {', '.join(members)} }}")
    lines.append("}")
    return "\n".join(lines) + "\n"
