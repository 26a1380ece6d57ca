"""Lexer, recursive-descent parser and canonical formatter for ``.quml`` sources.

Grammar::

    model      := "model" IDENT { typedecl | classdef | reldef | seqdef }
    typedecl   := ("classical" | "quantum") "type" IDENT
    classdef   := ["quantum"] "class" IDENT "{" { member } "}"
    member     := attr | op
    attr       := ["quantum"] ["private"] "attr" IDENT ":" typeref
    op         := ["quantum"] ["private"] "op" IDENT "(" [param {"," param}] ")" ["->" typeref]
    param      := IDENT ":" typeref
    typeref    := IDENT ["[" INT "]"]
    reldef     := "inherit" IDENT "from" IDENT
                | ("compose" | "aggregate") IDENT "has" IDENT
                | "assoc" IDENT "with" IDENT
    seqdef     := "sequence" IDENT "{" { lifeline } { message } "}"
    lifeline   := "lifeline" IDENT ":" IDENT
    message    := ("msg" | "qmsg") IDENT ("->" | "-->") IDENT ":" IDENT

Keywords are reserved. ``//`` starts a comment running to the end of the line.
Comments are kept as leading trivia on the following declaration so that
``format`` does not drop them.

On a syntax error the parser records an E001 diagnostic and resynchronises at
the next member / message / top-level keyword, so one pass reports several
errors.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Union

from quml.diagnostics import Diagnostic, QumlError, SourceSpan, make

KEYWORDS = frozenset({
    "model", "type", "classical", "quantum", "class", "private", "attr", "op",
    "inherit", "from", "compose", "aggregate", "has", "assoc", "with",
    "sequence", "lifeline", "msg", "qmsg",
})

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<int>[0-9]+)
  | (?P<punct>-->|->|[{}()\[\]:,])
    """,
    re.VERBOSE | re.ASCII,
)

_NOSPAN = SourceSpan("<none>", 0, 0, 0, 0)


def _span_field():
    return field(default=_NOSPAN, compare=False, repr=False)


# ---------------------------------------------------------------------------
# Syntax tree. Spans are excluded from equality so trees compare structurally.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TypeRefNode:
    name: str
    array_len: int | None = None
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class ParamNode:
    name: str
    type: TypeRefNode
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class AttrNode:
    name: str
    type: TypeRefNode
    quantum: bool = False
    private: bool = False
    comments: tuple[str, ...] = ()
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class OpNode:
    name: str
    params: tuple[ParamNode, ...] = ()
    ret: TypeRefNode | None = None
    quantum: bool = False
    private: bool = False
    comments: tuple[str, ...] = ()
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class ClassNode:
    name: str
    quantum: bool = False
    members: tuple[Union[AttrNode, OpNode], ...] = ()
    comments: tuple[str, ...] = ()
    trailing_comments: tuple[str, ...] = ()
    span: SourceSpan = _span_field()
    name_span: SourceSpan = _span_field()


@dataclass(frozen=True)
class TypeDeclNode:
    name: str
    quantum: bool
    comments: tuple[str, ...] = ()
    span: SourceSpan = _span_field()


REL_KEYWORDS = {
    "inheritance": ("inherit", "from"),
    "composition": ("compose", "has"),
    "aggregation": ("aggregate", "has"),
    "association": ("assoc", "with"),
}
_REL_BY_KEYWORD = {kw: kind for kind, (kw, _) in REL_KEYWORDS.items()}


@dataclass(frozen=True)
class RelNode:
    kind: str  # inheritance | composition | aggregation | association
    source: str
    target: str
    comments: tuple[str, ...] = ()
    span: SourceSpan = _span_field()
    source_span: SourceSpan = _span_field()
    target_span: SourceSpan = _span_field()


@dataclass(frozen=True)
class LifelineNode:
    alias: str
    class_name: str
    comments: tuple[str, ...] = ()
    span: SourceSpan = _span_field()
    class_span: SourceSpan = _span_field()


@dataclass(frozen=True)
class MessageNode:
    sender: str
    receiver: str
    op: str
    is_return: bool = False
    quantum: bool = False
    comments: tuple[str, ...] = ()
    span: SourceSpan = _span_field()


@dataclass(frozen=True)
class SequenceNode:
    name: str
    lifelines: tuple[LifelineNode, ...] = ()
    messages: tuple[MessageNode, ...] = ()
    comments: tuple[str, ...] = ()
    trailing_comments: tuple[str, ...] = ()
    span: SourceSpan = _span_field()


Item = Union[TypeDeclNode, ClassNode, RelNode, SequenceNode]


@dataclass(frozen=True)
class ParsedModel:
    name: str
    items: tuple[Item, ...] = ()
    comments: tuple[str, ...] = ()
    trailing_comments: tuple[str, ...] = ()
    file: str = field(default="<input>", compare=False)
    span: SourceSpan = _span_field()


# ---------------------------------------------------------------------------
# Lexer
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Token:
    kind: str  # keyword/punctuation text itself, or IDENT / INT / EOF
    text: str
    span: SourceSpan
    comments: tuple[str, ...] = ()


def _describe(tok: Token) -> str:
    if tok.kind == "EOF":
        return "end of input"
    return f"'{tok.text}'"


def tokenize(source: str, file: str = "<input>") -> tuple[list[Token], list[Diagnostic]]:
    tokens: list[Token] = []
    diags: list[Diagnostic] = []
    pending: list[str] = []
    line, col = 1, 1
    pos, n = 0, len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            ch = source[pos]
            span = SourceSpan(file, line, col, line, col + 1)
            diags.append(make("E001", f"unexpected character {ch!r}", span))
            pos += 1
            if ch == "\n":
                line, col = line + 1, 1
            else:
                col += 1
            continue
        text = m.group()
        kind = m.lastgroup
        nl = text.count("\n")
        end_line = line + nl
        end_col = (len(text) - text.rfind("\n")) if nl else col + len(text)
        span = SourceSpan(file, line, col, end_line, end_col)
        if kind == "comment":
            pending.append(text[2:].rstrip())
        elif kind == "ident":
            tokens.append(Token(text if text in KEYWORDS else "IDENT", text, span, tuple(pending)))
            pending = []
        elif kind == "int":
            tokens.append(Token("INT", text, span, tuple(pending)))
            pending = []
        elif kind == "punct":
            tokens.append(Token(text, text, span, tuple(pending)))
            pending = []
        pos = m.end()
        line, col = end_line, end_col
    tokens.append(Token("EOF", "", SourceSpan(file, line, col, line, col), tuple(pending)))
    return tokens, diags


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

class _Bail(Exception):
    pass


_TOP_SYNC = frozenset({"classical", "quantum", "class", "inherit", "compose",
                       "aggregate", "assoc", "sequence", "EOF"})
# inside braces "quantum" starts a member, so only unambiguous top-level words end a block
_BLOCK_EXIT = frozenset({"classical", "class", "inherit", "compose", "aggregate",
                         "assoc", "sequence", "EOF"})
_MEMBER_SYNC = frozenset({"attr", "op", "quantum", "private", "}"}) | _BLOCK_EXIT
_SEQ_SYNC = frozenset({"lifeline", "msg", "qmsg", "}"}) | _BLOCK_EXIT


def _join(a: SourceSpan, b: SourceSpan) -> SourceSpan:
    return SourceSpan(a.file, a.start_line, a.start_col, b.end_line, b.end_col)


class _Parser:
    def __init__(self, tokens: list[Token], file: str):
        self.toks = tokens
        self.pos = 0
        self.file = file
        self.diags: list[Diagnostic] = []

    # navigation

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def at(self, *kinds: str) -> bool:
        return self.tok.kind in kinds

    def advance(self) -> Token:
        t = self.toks[self.pos]
        if t.kind != "EOF":
            self.pos += 1
        return t

    @property
    def prev(self) -> Token:
        return self.toks[self.pos - 1] if self.pos else self.toks[0]

    def expect(self, kind: str, what: str | None = None) -> Token:
        if self.tok.kind == kind:
            return self.advance()
        wanted = what or (f"'{kind}'" if kind not in ("IDENT", "INT") else
                          {"IDENT": "identifier", "INT": "integer"}[kind])
        self.error(f"expected {wanted}, found {_describe(self.tok)}")

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.tok
        self.diags.append(make("E001", message, tok.span))
        raise _Bail

    def sync(self, stop: frozenset[str]) -> None:
        while self.tok.kind not in stop:
            self.advance()

    # grammar

    def parse_model(self) -> ParsedModel | None:
        first = self.tok
        name = None
        try:
            self.expect("model", "'model' header")
            name = self.expect("IDENT").text
        except _Bail:
            self.sync(_TOP_SYNC)
        items: list[Item] = []
        while not self.at("EOF"):
            start = self.pos
            try:
                items.append(self.parse_item())
            except _Bail:
                if self.pos == start:
                    self.advance()
                self.sync(_TOP_SYNC)
        end = self.tok
        if name is None:
            return None
        return ParsedModel(name, tuple(items), first.comments, end.comments, self.file,
                           _join(first.span, self.prev.span))

    def parse_item(self) -> Item:
        t = self.tok
        if t.kind in ("classical", "quantum") and self.toks[self.pos + 1].kind == "type":
            self.advance()
            self.advance()
            name = self.expect("IDENT")
            return TypeDeclNode(name.text, t.kind == "quantum", t.comments, _join(t.span, name.span))
        if t.kind in ("quantum", "class"):
            return self.parse_class()
        if t.kind in _REL_BY_KEYWORD:
            return self.parse_rel()
        if t.kind == "sequence":
            return self.parse_sequence()
        self.error(f"expected a type, class, relationship or sequence declaration, "
                   f"found {_describe(t)}")

    def parse_class(self) -> ClassNode:
        first = self.tok
        quantum = False
        if self.at("quantum"):
            self.advance()
            quantum = True
        self.expect("class")
        name = self.expect("IDENT")
        self.expect("{")
        members = []
        while not self.at("}"):
            if self.tok.kind in _BLOCK_EXIT:
                self.error(f"expected '}}' to close class '{name.text}', found {_describe(self.tok)}")
            start = self.pos
            try:
                members.append(self.parse_member())
            except _Bail:
                if self.pos == start:
                    self.advance()
                self.sync(_MEMBER_SYNC)
                if self.tok.kind in _BLOCK_EXIT:
                    raise
        close = self.advance()
        return ClassNode(name.text, quantum, tuple(members), first.comments, close.comments,
                         _join(first.span, close.span), name.span)

    def parse_member(self) -> AttrNode | OpNode:
        first = self.tok
        quantum = private = False
        if self.at("quantum"):
            self.advance()
            quantum = True
        if self.at("private"):
            self.advance()
            private = True
        if self.at("attr"):
            self.advance()
            name = self.expect("IDENT")
            self.expect(":")
            tref = self.parse_typeref()
            return AttrNode(name.text, tref, quantum, private, first.comments,
                            _join(first.span, tref.span))
        if self.at("op"):
            self.advance()
            name = self.expect("IDENT")
            self.expect("(")
            params = []
            if not self.at(")"):
                params.append(self.parse_param())
                while self.at(","):
                    self.advance()
                    params.append(self.parse_param())
            close = self.expect(")", "',' or ')'")
            ret = None
            if self.at("->"):
                self.advance()
                ret = self.parse_typeref()
            end = ret.span if ret else close.span
            return OpNode(name.text, tuple(params), ret, quantum, private, first.comments,
                          _join(first.span, end))
        self.error(f"expected 'attr' or 'op', found {_describe(self.tok)}")

    def parse_param(self) -> ParamNode:
        name = self.expect("IDENT")
        self.expect(":")
        tref = self.parse_typeref()
        return ParamNode(name.text, tref, _join(name.span, tref.span))

    def parse_typeref(self) -> TypeRefNode:
        name = self.expect("IDENT", "type name")
        if not self.at("["):
            return TypeRefNode(name.text, None, name.span)
        self.advance()
        lit = self.expect("INT", "array length")
        close = self.expect("]")
        length = int(lit.text)
        if length <= 0:
            # recoverable: record and keep the (invalid) node
            self.diags.append(make("E002", f"array length must be a positive integer, got {lit.text}",
                                   lit.span))
        return TypeRefNode(name.text, length, _join(name.span, close.span))

    def parse_rel(self) -> RelNode:
        kw = self.advance()
        kind = _REL_BY_KEYWORD[kw.kind]
        joiner = REL_KEYWORDS[kind][1]
        src = self.expect("IDENT", "class name")
        self.expect(joiner)
        dst = self.expect("IDENT", "class name")
        return RelNode(kind, src.text, dst.text, kw.comments, _join(kw.span, dst.span),
                       src.span, dst.span)

    def parse_sequence(self) -> SequenceNode:
        first = self.advance()
        name = self.expect("IDENT")
        self.expect("{")
        lifelines, messages = [], []
        while not self.at("}"):
            if self.tok.kind in _BLOCK_EXIT:
                self.error(f"expected '}}' to close sequence '{name.text}', found {_describe(self.tok)}")
            start = self.pos
            try:
                if self.at("lifeline"):
                    if messages:
                        self.error("lifelines must be declared before the first message")
                    lifelines.append(self.parse_lifeline())
                elif self.at("msg", "qmsg"):
                    messages.append(self.parse_message())
                else:
                    self.error(f"expected 'lifeline', 'msg' or 'qmsg', found {_describe(self.tok)}")
            except _Bail:
                if self.pos == start:
                    self.advance()
                self.sync(_SEQ_SYNC)
                if self.tok.kind in _BLOCK_EXIT:
                    raise
        close = self.advance()
        return SequenceNode(name.text, tuple(lifelines), tuple(messages), first.comments,
                            close.comments, _join(first.span, close.span))

    def parse_lifeline(self) -> LifelineNode:
        kw = self.advance()
        alias = self.expect("IDENT")
        self.expect(":")
        cls = self.expect("IDENT", "class name")
        return LifelineNode(alias.text, cls.text, kw.comments, _join(kw.span, cls.span), cls.span)

    def parse_message(self) -> MessageNode:
        kw = self.advance()
        sender = self.expect("IDENT", "lifeline alias")
        if not self.at("->", "-->"):
            self.error(f"expected '->' or '-->', found {_describe(self.tok)}")
        arrow = self.advance()
        receiver = self.expect("IDENT", "lifeline alias")
        self.expect(":")
        op = self.expect("IDENT", "operation name")
        return MessageNode(sender.text, receiver.text, op.text, arrow.kind == "-->",
                           kw.kind == "qmsg", kw.comments, _join(kw.span, op.span))


def parse(source: str | bytes, file: str = "<input>") -> ParsedModel:
    """Parse Q-UML source text.

    Raises ``QumlError`` carrying every E001/E002 diagnostic when the source is
    not a valid model.
    """
    if isinstance(source, (bytes, bytearray)):
        try:
            source = bytes(source).decode("utf-8")
        except UnicodeDecodeError as exc:
            line = source[:exc.start].count(b"\n") + 1
            span = SourceSpan(file, line, 1, line, 1)
            raise QumlError([make("E001", f"source is not valid UTF-8 ({exc.reason})", span)]) from None
    tokens, diags = tokenize(source, file)
    parser = _Parser(tokens, file)
    tree = parser.parse_model()
    diags.extend(parser.diags)
    if diags or tree is None:
        raise QumlError(diags)
    return tree


# ---------------------------------------------------------------------------
# Formatter
# ---------------------------------------------------------------------------

INDENT = "  "


def format_typeref(t: TypeRefNode) -> str:
    return t.name if t.array_len is None else f"{t.name}[{t.array_len}]"


def _prefix(quantum: bool, private: bool) -> str:
    return ("quantum " if quantum else "") + ("private " if private else "")


def format_member(m: AttrNode | OpNode) -> str:
    if isinstance(m, AttrNode):
        return f"{_prefix(m.quantum, m.private)}attr {m.name}: {format_typeref(m.type)}"
    params = ", ".join(f"{p.name}: {format_typeref(p.type)}" for p in m.params)
    ret = f" -> {format_typeref(m.ret)}" if m.ret is not None else ""
    return f"{_prefix(m.quantum, m.private)}op {m.name}({params}){ret}"


def format_message(m: MessageNode) -> str:
    kw = "qmsg" if m.quantum else "msg"
    arrow = "-->" if m.is_return else "->"
    return f"{kw} {m.sender} {arrow} {m.receiver} : {m.op}"


def _comments(out: list[str], comments, depth: int) -> None:
    out.extend(f"{INDENT * depth}//{c}" for c in comments)


def _block(out, header, children, trailing, comments) -> None:
    _comments(out, comments, 0)
    if not children and not trailing:
        out.append(f"{header} {{}}")
        return
    out.append(f"{header} {{")
    for child_comments, text in children:
        _comments(out, child_comments, 1)
        out.append(INDENT + text)
    _comments(out, trailing, 1)
    out.append("}")


def _one_liner(item) -> bool:
    return isinstance(item, (TypeDeclNode, RelNode))


def format(m: ParsedModel) -> str:  # noqa: A001 - mirrors the CLI verb
    """Canonical source text for ``m``: two-space indent, one blank line between blocks."""
    out: list[str] = []
    _comments(out, m.comments, 0)
    out.append(f"model {m.name}")
    prev = None
    for item in m.items:
        if not (prev is not None and _one_liner(prev) and type(prev) is type(item)):
            out.append("")
        if isinstance(item, TypeDeclNode):
            _comments(out, item.comments, 0)
            out.append(f"{'quantum' if item.quantum else 'classical'} type {item.name}")
        elif isinstance(item, RelNode):
            kw, joiner = REL_KEYWORDS[item.kind]
            _comments(out, item.comments, 0)
            out.append(f"{kw} {item.source} {joiner} {item.target}")
        elif isinstance(item, ClassNode):
            header = f"{'quantum ' if item.quantum else ''}class {item.name}"
            _block(out, header, [(mb.comments, format_member(mb)) for mb in item.members],
                   item.trailing_comments, item.comments)
        else:
            children = [(ll.comments, f"lifeline {ll.alias}: {ll.class_name}") for ll in item.lifelines]
            children += [(msg.comments, format_message(msg)) for msg in item.messages]
            _block(out, f"sequence {item.name}", children, item.trailing_comments, item.comments)
        prev = item
    if m.trailing_comments:
        out.append("")
        _comments(out, m.trailing_comments, 0)
    return "\n".join(out) + "\n"
