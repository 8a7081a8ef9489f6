"""Command-line front end: parse, validate, simulate, classify, export,
and the fixture corpus.

Exit codes: 0 success, 1 findings or expectation mismatch, 2 usage errors
(including unreadable input files).  Diagnostics go to stderr; canonical
output (rendered models, traces, reports, exports) goes to stdout.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from .classify import classify_model
from .corpus import FIXTURES, corpus_run
from .core import Model
from .dot import export_dot
from .dsl import Diagnostic, parse_model, render_model
from .dynamics import derive_chronology
from .errors import ModelError
from .jsonio import export_json
from .simulate import SimConfig, simulate
from .validate import validate_model


def _print_diagnostics(diagnostics: list[Diagnostic]) -> None:
    for diag in diagnostics:
        where = ""
        if diag.span is not None:
            where = f" (line {diag.span.line}, col {diag.span.column})"
        print(f"{diag.severity.value}: {diag.code}: {diag.message}{where}", file=sys.stderr)


def _load(path: str) -> Optional[Model]:
    """Parse a .tm file; prints diagnostics and returns None on failure."""
    try:
        source = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        raise SystemExit(2)
    result = parse_model(source)
    if not result.ok:
        _print_diagnostics(result.diagnostics)
        return None
    return result.model


def _load_validated(path: str) -> Optional[Model]:
    model = _load(path)
    if model is None:
        return None
    report = validate_model(model)
    if not report.ok:
        _print_diagnostics(report.findings)
        return None
    return model


def _parse_input(pair: str) -> tuple[str, bool]:
    name, eq, value = pair.partition("=")
    truthy = {"true": True, "1": True, "yes": True, "false": False, "0": False, "no": False}
    if not eq or value.lower() not in truthy:
        raise argparse.ArgumentTypeError(f"expected NAME=true|false, got {pair!r}")
    return name, truthy[value.lower()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="thimac", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse a .tm file and print its canonical form")
    p.add_argument("file")

    p = sub.add_parser("validate", help="run static and dynamic checks")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("simulate", help="run the token game and print the trace")
    p.add_argument("file")
    p.add_argument("--max-repeats", type=int, default=1)
    p.add_argument("--max-steps", type=int, default=10000)
    p.add_argument("--input", action="append", type=_parse_input, default=[], metavar="NAME=BOOL")
    p.add_argument("--trace", metavar="OUT", help="write the JSONL trace to a file")

    p = sub.add_parser("classify", help="classify focus groups of events")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("export", help="export DOT or JSON")
    p.add_argument("file")
    p.add_argument("--format", choices=("dot", "json"), required=True)
    p.add_argument("--level", choices=("static", "dynamic"), default="static")

    p = sub.add_parser("corpus", help="list or run the fixture corpus")
    corpus_sub = p.add_subparsers(dest="corpus_command", required=True)
    corpus_sub.add_parser("list")
    runner = corpus_sub.add_parser("run")
    runner.add_argument("--dir", help="read fixtures from a directory instead of the package")

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "parse":
        model = _load(args.file)
        if model is None:
            return 1
        print(render_model(model), end="")
        return 0

    if args.command == "validate":
        model = _load(args.file)
        if model is None:
            return 1
        report = validate_model(model)
        if args.json:
            print(report.to_json(), end="")
        else:
            for finding in report.findings:
                where = ""
                if finding.span is not None:
                    where = f" (line {finding.span.line}, col {finding.span.column})"
                print(f"{finding.severity.value}: {finding.code}: {finding.message}{where}")
            print("ok" if report.ok else "invalid")
        return 0 if report.ok else 1

    if args.command == "simulate":
        model = _load_validated(args.file)
        if model is None:
            return 1
        try:
            chronology = derive_chronology(model)
            config = SimConfig(
                max_repeats=args.max_repeats,
                inputs=dict(args.input),
                max_steps=args.max_steps,
            )
        except (ModelError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        trace = simulate(model, chronology, config)
        payload = trace.to_jsonl()
        if args.trace:
            Path(args.trace).write_text(payload, encoding="utf-8")
            print(f"trace written to {args.trace} ({trace.outcome.value})")
        else:
            print(payload, end="")
        return 0

    if args.command == "classify":
        model = _load_validated(args.file)
        if model is None:
            return 1
        try:
            report = classify_model(model)
        except ModelError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        if args.json:
            print(json.dumps(report, indent=2))
        else:
            for group, entry in report.items():
                vendler = entry["vendler"]
                if vendler == "Accomplishment":
                    vendler = "Accomplishment/performance"
                print(f"{group}: {vendler} (Bach: {entry['bach']})")
        return 0

    if args.command == "export":
        model = _load(args.file)
        if model is None:
            return 1
        if args.format == "json":
            print(export_json(model), end="")
            return 0
        try:
            print(export_dot(model, level=args.level), end="")
        except ModelError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        return 0

    if args.command == "corpus":
        if args.corpus_command == "list":
            for fixture in FIXTURES:
                print(fixture.id)
            return 0
        directory = Path(args.dir) if args.dir else None
        if directory is not None and not directory.is_dir():
            print(f"error: {directory} is not a directory", file=sys.stderr)
            return 2
        lines, ok = corpus_run(directory)
        for line in lines:
            print(line)
        return 0 if ok else 1

    return 2  # pragma: no cover


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
