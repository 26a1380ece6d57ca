"""``quml`` command-line driver: check, infer, render, fmt, explain.

Exit codes: 0 clean, 1 model errors (or warnings with --deny-warnings, or
``fmt --check`` on a non-canonical file), 2 parse/IO failures and bad usage.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from quml import syntax
from quml.diagnostics import (Diagnostic, QumlError, Severity, explain,
                              sort_diagnostics)
from quml.inference import QuantumnessMap, infer
from quml.model import Model, message_payload, resolve
from quml.render import render_class_diagram, render_sequence_diagram
from quml.validator import validate

EXIT_OK, EXIT_ERRORS, EXIT_FAILURE = 0, 1, 2


@dataclass
class RunConfig:
    command: str
    inputs: list[str] = field(default_factory=list)
    output: str | None = None
    format: str = "text"
    diagram: str | None = None
    deny_warnings: bool = False
    check_only: bool = False
    code: str | None = None


@dataclass
class FileResult:
    path: str
    diagnostics: list[Diagnostic] = field(default_factory=list)
    failure: str | None = None  # IO message
    parse_failed: bool = False
    model: Model | None = None
    qmap: QuantumnessMap | None = None

    @property
    def exit_code(self) -> int:
        if self.failure or self.parse_failed:
            return EXIT_FAILURE
        return EXIT_ERRORS if any(d.severity is Severity.ERROR for d in self.diagnostics) else EXIT_OK


def analyze(path: str, run_validator: bool = True) -> FileResult:
    """Parse, resolve, infer and validate a single file."""
    res = FileResult(path)
    try:
        source = Path(path).read_bytes()
    except OSError as exc:
        res.failure = f"{path}: cannot read file: {exc.strerror or exc}"
        return res
    try:
        tree = syntax.parse(source, path)
    except QumlError as exc:
        res.parse_failed = True
        res.diagnostics = exc.diagnostics
        return res
    try:
        res.model = resolve(tree)
    except QumlError as exc:
        res.diagnostics = exc.diagnostics
        return res
    res.qmap = infer(res.model)
    if run_validator:
        res.diagnostics = validate(res.model, res.qmap)
    return res


def _status(results: list[FileResult], deny_warnings: bool) -> int:
    code = max((r.exit_code for r in results), default=EXIT_OK)
    if code == EXIT_OK and deny_warnings and any(d.severity is Severity.WARNING
                                                 for r in results for d in r.diagnostics):
        code = EXIT_ERRORS
    return code


def _emit_diagnostics(results: list[FileResult], fmt: str, out, err) -> None:
    for r in results:
        if r.failure:
            print(r.failure, file=err)
    diags = sort_diagnostics(d for r in results for d in r.diagnostics)
    if fmt == "json":
        print(json.dumps([d.to_json() for d in diags], indent=2), file=out)
    else:
        for d in diags:
            print(d.format_text(), file=out)


def cmd_check(cfg: RunConfig, out, err) -> int:
    with ThreadPoolExecutor() as pool:
        results = list(pool.map(analyze, sorted(cfg.inputs)))
    _emit_diagnostics(results, cfg.format, out, err)
    return _status(results, cfg.deny_warnings)


def inference_report(m: Model, q: QuantumnessMap) -> dict:
    classes = []
    for c in m.classes:
        classes.append({
            "name": c.name,
            "classification": q.class_of[c.name].value,
            "declared": c.declared_marker.value if c.declared_marker else None,
            "provenance": [str(r) for r in q.provenance(c.name)],
            "members": [{"name": e.name,
                         "kind": "attr" if e in c.attributes else "op",
                         "classification": q.element_of[(c.name, e.name)].value}
                        for e in c.members],
        })
    relationships = [{"kind": r.kind, "source": r.source, "target": r.target,
                      "classification": q.relationship_of[i].value}
                     for i, r in enumerate(m.relationships)]
    sequences = []
    for s in m.sequences:
        msgs = []
        for msg in s.messages:
            payload = message_payload(m, s, msg)
            msgs.append({"kind": msg.kind, "from": msg.sender, "to": msg.receiver,
                         "op": msg.op_name, "declared": msg.declared_marker.value,
                         "payload": payload.value if payload else None})
        sequences.append({"name": s.name, "messages": msgs})
    return {"model": m.name, "classes": classes, "relationships": relationships,
            "sequences": sequences}


def _infer_text(report: dict) -> str:
    lines = []
    for c in report["classes"]:
        why = f"  ({' <- '.join(c['provenance'])})" if c["provenance"] else ""
        hint = ""
        if (c["classification"] == "quantum") != (c["declared"] == "quantum"):
            hint = "  [declare as 'quantum class']" if c["classification"] == "quantum" \
                else "  [drop the 'quantum' marker]"
        lines.append(f"class {c['name']}: {c['classification']}{why}{hint}")
        for mb in c["members"]:
            lines.append(f"  {mb['kind']} {mb['name']}: {mb['classification']}")
    for r in report["relationships"]:
        lines.append(f"{r['kind']} {r['source']} -> {r['target']}: {r['classification']}")
    for s in report["sequences"]:
        lines.append(f"sequence {s['name']}:")
        for msg in s["messages"]:
            arrow = "->" if msg["kind"] == "call" else "-->"
            lines.append(f"  {msg['from']} {arrow} {msg['to']} : {msg['op']}: "
                         f"{msg['payload'] or 'unknown'}")
    return "\n".join(lines)


def cmd_infer(cfg: RunConfig, out, err) -> int:
    res = analyze(cfg.inputs[0])
    if res.model is not None:
        report = inference_report(res.model, res.qmap)
        if cfg.format == "json":
            print(json.dumps(report, indent=2), file=out)
        else:
            print(_infer_text(report), file=out)
    if res.failure:
        print(res.failure, file=err)
    for d in res.diagnostics:
        print(d.format_text(), file=err)
    return res.exit_code


def cmd_render(cfg: RunConfig, out, err) -> int:
    res = analyze(cfg.inputs[0], run_validator=False)
    if res.model is None:
        if res.failure:
            print(res.failure, file=err)
        for d in res.diagnostics:
            print(d.format_text(), file=err)
        return res.exit_code
    if cfg.diagram == "class":
        doc = render_class_diagram(res.model, res.qmap)
    else:
        name = cfg.diagram.split(":", 1)[1]
        try:
            doc = render_sequence_diagram(res.model, res.qmap, name)
        except KeyError:
            print(f"{cfg.inputs[0]}: no sequence named '{name}'", file=err)
            return EXIT_FAILURE
    try:
        Path(cfg.output).write_text(doc.content, encoding="utf-8", newline="\n")
    except OSError as exc:
        print(f"{cfg.output}: cannot write file: {exc.strerror or exc}", file=err)
        return EXIT_FAILURE
    return EXIT_OK


def cmd_fmt(cfg: RunConfig, out, err) -> int:
    path = cfg.inputs[0]
    try:
        source = Path(path).read_bytes()
    except OSError as exc:
        print(f"{path}: cannot read file: {exc.strerror or exc}", file=err)
        return EXIT_FAILURE
    try:
        tree = syntax.parse(source, path)
    except QumlError as exc:
        for d in exc.diagnostics:
            print(d.format_text(), file=err)
        return EXIT_FAILURE
    canonical = syntax.format(tree)
    if cfg.check_only:
        if canonical.encode("utf-8") != source:
            print(f"{path}: not canonically formatted", file=out)
            return EXIT_ERRORS
        return EXIT_OK
    if canonical.encode("utf-8") != source:
        try:
            Path(path).write_text(canonical, encoding="utf-8", newline="\n")
        except OSError as exc:
            print(f"{path}: cannot write file: {exc.strerror or exc}", file=err)
            return EXIT_FAILURE
    return EXIT_OK


def cmd_explain(cfg: RunConfig, out, err) -> int:
    try:
        print(explain(cfg.code), file=out)
    except KeyError:
        print(f"unknown diagnostic code '{cfg.code}'", file=err)
        return EXIT_FAILURE
    return EXIT_OK


def _diagram(value: str) -> str:
    if value == "class" or (value.startswith("seq:") and len(value) > 4):
        return value
    raise argparse.ArgumentTypeError("expected 'class' or 'seq:<name>'")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="quml", description="Q-UML model checker and renderer.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="report diagnostics for one or more models")
    c.add_argument("--format", choices=["text", "json"], default="text")
    c.add_argument("--deny-warnings", action="store_true")
    c.add_argument("inputs", nargs="+", metavar="file")

    i = sub.add_parser("infer", help="print inferred classifications with provenance")
    i.add_argument("--format", choices=["text", "json"], default="text")
    i.add_argument("inputs", nargs=1, metavar="file")

    r = sub.add_parser("render", help="write a class (DOT) or sequence (SVG) diagram")
    r.add_argument("--diagram", type=_diagram, required=True, metavar="class|seq:<name>")
    r.add_argument("--out", dest="output", required=True, metavar="path")
    r.add_argument("inputs", nargs=1, metavar="file")

    f = sub.add_parser("fmt", help="rewrite a model in canonical form")
    f.add_argument("--check", dest="check_only", action="store_true")
    f.add_argument("inputs", nargs=1, metavar="file")

    e = sub.add_parser("explain", help="describe a diagnostic code")
    e.add_argument("code")
    return p


_COMMANDS = {"check": cmd_check, "infer": cmd_infer, "render": cmd_render,
             "fmt": cmd_fmt, "explain": cmd_explain}


def run(cfg: RunConfig, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    return _COMMANDS[cfg.command](cfg, out, err)


def main(argv: list[str] | None = None) -> int:
    try:
        ns = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_FAILURE if exc.code else EXIT_OK
    cfg = RunConfig(**{k: v for k, v in vars(ns).items() if k in RunConfig.__dataclass_fields__})
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
