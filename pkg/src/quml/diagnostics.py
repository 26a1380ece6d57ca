"""Source spans, coded diagnostics and the rule catalogue behind ``quml explain``."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True, order=True)
class SourceSpan:
    """1-based, inclusive start / exclusive-ish end position inside ``file``."""

    file: str
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def to_json(self) -> dict:
        return {
            "start": {"line": self.start_line, "col": self.start_col},
            "end": {"line": self.end_line, "col": self.end_col},
        }

    def __str__(self) -> str:
        return f"{self.file}:{self.start_line}:{self.start_col}"


@dataclass(frozen=True)
class Diagnostic:
    code: str
    severity: Severity
    message: str
    span: SourceSpan
    related: tuple[tuple[SourceSpan, str], ...] = field(default=())

    @property
    def sort_key(self):
        return (self.span.file, self.span.start_line, self.span.start_col,
                self.span.end_line, self.span.end_col, self.code, self.message)

    def to_json(self) -> dict:
        return {
            "code": self.code,
            "severity": self.severity.value,
            "message": self.message,
            "file": self.span.file,
            **self.span.to_json(),
            "related": [{"file": s.file, **s.to_json(), "note": note}
                        for s, note in self.related],
        }

    def format_text(self) -> str:
        lines = [f"{self.span}: {self.severity.value} {self.code}: {self.message}"]
        for s, note in self.related:
            lines.append(f"  {s}: note: {note}")
        return "\n".join(lines)


def make(code: str, message: str, span: SourceSpan,
         related: tuple[tuple[SourceSpan, str], ...] = ()) -> Diagnostic:
    return Diagnostic(code, RULES[code].severity, message, span, related)


def sort_diagnostics(diags) -> list[Diagnostic]:
    return sorted(diags, key=lambda d: d.sort_key)


def has_errors(diags) -> bool:
    return any(d.severity is Severity.ERROR for d in diags)


class QumlError(Exception):
    """Raised by ``parse`` and ``resolve`` when error-severity findings block the result."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = sort_diagnostics(diagnostics)
        first = self.diagnostics[0].format_text() if self.diagnostics else "unknown error"
        super().__init__(first)


@dataclass(frozen=True)
class Rule:
    code: str
    severity: Severity
    title: str
    text: str


_RULES = [
    Rule("E001", Severity.ERROR, "syntax error",
         "The source does not match the Q-UML grammar. The parser reports the "
         "offending token and resumes at the next declaration."),
    Rule("E002", Severity.ERROR, "invalid literal",
         "A literal is out of range. Array lengths must be positive integers."),
    Rule("E010", Severity.ERROR, "unresolved name",
         "A name used as a type, class, lifeline or relationship end is not "
         "declared, or names a class where only a data type is allowed "
         "(operation parameters and return types)."),
    Rule("E011", Severity.ERROR, "duplicate declaration",
         "A class, type, member, parameter, sequence or lifeline name is declared "
         "twice in the same scope, or a user type shadows a built-in type."),
    Rule("E020", Severity.ERROR, "quantum class not marked quantum",
         "Principle 3 (Quantum Supremacy) and Principle 4 (Quantum Aggregation): a "
         "class that owns a quantum element, inherits from a quantum class, or "
         "composes/aggregates a quantum class is a quantum module and must be "
         "declared with `quantum class`."),
    Rule("W021", Severity.WARNING, "class marked quantum without quantum basis",
         "Principle 3 (Quantum Supremacy): a class with no quantum element, no "
         "quantum superclass and no quantum part is classical. Marking it quantum "
         "is conservative but unsupported by the model."),
    Rule("E022", Severity.ERROR, "element marker disagrees with its type",
         "Principle 2 (Quantum Elements): an attribute declared `quantum` must have "
         "a quantum data type (or be typed by a quantum class)."),
    Rule("E030", Severity.ERROR, "quantum payload sent as classical message",
         "Quantum communication: a message whose payload is quantum (a call with a "
         "quantum parameter, or the return of a quantum result) must be a `qmsg`."),
    Rule("E031", Severity.ERROR, "classical payload sent as quantum message",
         "Quantum communication: a message whose payload is entirely classical "
         "should travel over a classical channel; use `msg`."),
    Rule("E032", Severity.ERROR, "quantum message touches a classical module",
         "Principle 5 (Quantum Communication): quantum information can only be "
         "stored, sent or received by quantum modules. Both lifelines of a quantum "
         "message must belong to quantum classes."),
    Rule("E033", Severity.ERROR, "unknown operation in message",
         "A call must name a public operation of the receiver's class; a return "
         "must name a public operation of the sender's class."),
    Rule("E040", Severity.ERROR, "incompatible association",
         "Principle 5 (Quantum Communication): a quantum class associated with a "
         "classical class must expose a classical interface, i.e. at least one "
         "public operation with an all-classical signature or a public classical "
         "attribute."),
    Rule("E050", Severity.ERROR, "inheritance cycle",
         "Inheritance must be acyclic; a class cannot be its own ancestor."),
]

RULES: dict[str, Rule] = {r.code: r for r in _RULES}


def explain(code: str) -> str:
    """Return the rule text for ``code``; raises ``KeyError`` for unknown codes."""
    rule = RULES.get(code.upper())
    if rule is None:
        raise KeyError(code)
    return f"{rule.code} ({rule.severity.value}): {rule.title}\n\n{rule.text}"
