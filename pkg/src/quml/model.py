"""Resolved Q-UML metamodel, built-in type registry and name resolution."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property

from quml.diagnostics import Diagnostic, QumlError, SourceSpan, make
from quml.syntax import (AttrNode, ClassNode, ParsedModel, RelNode, SequenceNode,
                         TypeDeclNode, TypeRefNode)


class Nature(str, Enum):
    CLASSICAL = "classical"
    QUANTUM = "quantum"

    @classmethod
    def of(cls, quantum: bool) -> "Nature":
        return cls.QUANTUM if quantum else cls.CLASSICAL

    @property
    def is_quantum(self) -> bool:
        return self is Nature.QUANTUM


_NOSPAN = SourceSpan("<none>", 0, 0, 0, 0)


def _span():
    return field(default=_NOSPAN, compare=False, repr=False)


@dataclass(frozen=True)
class TypeDecl:
    name: str
    nature: Nature
    origin: str = "user"  # builtin | user
    span: SourceSpan = _span()


BUILTIN_TYPES: dict[str, TypeDecl] = {
    **{n: TypeDecl(n, Nature.CLASSICAL, "builtin")
       for n in ("int", "uint", "float", "bool", "string", "void")},
    **{n: TypeDecl(n, Nature.QUANTUM, "builtin") for n in ("qubit", "qstate", "graphstate")},
}


@dataclass(frozen=True)
class TypeRef:
    """Reference to a data type (``nature`` set) or to a class (``nature`` is None)."""

    name: str
    nature: Nature | None = None
    array_len: int | None = None
    span: SourceSpan = _span()

    @property
    def is_class(self) -> bool:
        return self.nature is None

    def __str__(self) -> str:
        return self.name if self.array_len is None else f"{self.name}[{self.array_len}]"


VOID = TypeRef("void", Nature.CLASSICAL)


@dataclass(frozen=True)
class Attribute:
    name: str
    dtype: TypeRef
    declared_marker: Nature | None = None
    visibility: str = "public"
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Param:
    name: str
    dtype: TypeRef
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Operation:
    name: str
    params: tuple[Param, ...] = ()
    ret: TypeRef = VOID
    internal_quantum: bool = False
    visibility: str = "public"
    ret_declared: bool = field(default=False, compare=False)
    span: SourceSpan = _span()


Member = Attribute | Operation


@dataclass(frozen=True)
class ClassDef:
    name: str
    declared_marker: Nature | None = None
    attributes: tuple[Attribute, ...] = ()
    operations: tuple[Operation, ...] = ()
    span: SourceSpan = _span()
    name_span: SourceSpan = _span()

    @property
    def members(self) -> tuple[Member, ...]:
        return self.attributes + self.operations

    def operation(self, name: str) -> Operation | None:
        return next((o for o in self.operations if o.name == name), None)


@dataclass(frozen=True)
class Relationship:
    kind: str  # inheritance | aggregation | composition | association
    source: str  # subclass / whole / associating class
    target: str  # superclass / part / associated class
    span: SourceSpan = _span()

    def describe(self) -> str:
        return {
            "inheritance": f"inherit {self.source} from {self.target}",
            "composition": f"compose {self.source} has {self.target}",
            "aggregation": f"aggregate {self.source} has {self.target}",
            "association": f"assoc {self.source} with {self.target}",
        }[self.kind]


@dataclass(frozen=True)
class Lifeline:
    alias: str
    class_name: str
    span: SourceSpan = _span()


@dataclass(frozen=True)
class Message:
    sender: str
    receiver: str
    kind: str  # call | return
    op_name: str
    declared_marker: Nature
    span: SourceSpan = _span()


@dataclass(frozen=True)
class SequenceDiagram:
    name: str
    lifelines: tuple[Lifeline, ...] = ()
    messages: tuple[Message, ...] = ()
    span: SourceSpan = _span()

    def lifeline(self, alias: str) -> Lifeline | None:
        return next((ll for ll in self.lifelines if ll.alias == alias), None)


@dataclass(frozen=True)
class Model:
    name: str
    types: tuple[TypeDecl, ...] = ()
    classes: tuple[ClassDef, ...] = ()
    relationships: tuple[Relationship, ...] = ()
    sequences: tuple[SequenceDiagram, ...] = ()
    file: str = field(default="<input>", compare=False)

    @cached_property
    def class_map(self) -> dict[str, ClassDef]:
        return {c.name: c for c in self.classes}

    def sequence(self, name: str) -> SequenceDiagram | None:
        return next((s for s in self.sequences if s.name == name), None)


# ---------------------------------------------------------------------------
# Element-level classification
# ---------------------------------------------------------------------------

def typeref_quantumness(t: TypeRef) -> Nature:
    """Nature of a data-type reference; class references are classical at this level."""
    return t.nature if t.nature is not None else Nature.CLASSICAL


def element_quantumness(e: Member) -> Nature:
    """Classical/quantum label of one attribute or operation.

    Depends only on the element's own signature and flags. An attribute typed by
    a class is not quantum here; it acts as a composition edge during inference.
    """
    if isinstance(e, Attribute):
        return typeref_quantumness(e.dtype)
    quantum = (e.internal_quantum
               or any(typeref_quantumness(p.dtype).is_quantum for p in e.params)
               or typeref_quantumness(e.ret).is_quantum)
    return Nature.of(quantum)


def signature_is_classical(op: Operation) -> bool:
    """True if every parameter and the return value carry classical data."""
    return (not any(typeref_quantumness(p.dtype).is_quantum for p in op.params)
            and not typeref_quantumness(op.ret).is_quantum)


def message_payload(model: Model, seq: SequenceDiagram, msg: Message) -> Nature | None:
    """Payload nature of ``msg``; None if the named operation cannot be found.

    Calls carry the operation's arguments, returns carry its result. Lookup is on
    the receiver's class for calls and the sender's class for returns.
    """
    op = message_operation(model, seq, msg)
    if op is None:
        return None
    if msg.kind == "call":
        return Nature.of(any(typeref_quantumness(p.dtype).is_quantum for p in op.params))
    return typeref_quantumness(op.ret)


def message_operation(model: Model, seq: SequenceDiagram, msg: Message) -> Operation | None:
    alias = msg.receiver if msg.kind == "call" else msg.sender
    ll = seq.lifeline(alias)
    cls = model.class_map.get(ll.class_name) if ll else None
    if cls is None:
        return None
    op = cls.operation(msg.op_name)
    if op is None or op.visibility != "public":
        return None
    return op


# ---------------------------------------------------------------------------
# Resolution
# ---------------------------------------------------------------------------

def inheritance_cycles(classes, relationships) -> list[Diagnostic]:
    """One E050 per strongly connected group of inheritance edges."""
    edges = [r for r in relationships if r.kind == "inheritance"]
    succ: dict[str, set[str]] = {}
    for r in edges:
        succ.setdefault(r.source, set()).add(r.target)

    def reach(start: str) -> set[str]:
        seen, stack = set(), [start]
        while stack:
            for nxt in succ.get(stack.pop(), ()):
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return seen

    reach_of = {n: reach(n) for n in succ}
    cyclic = [r for r in edges if r.source in reach_of.get(r.target, ()) or r.source == r.target]
    diags, done = [], set()
    for r in sorted(cyclic, key=lambda r: r.span):
        if r.source in done:
            continue
        group = {r.source} | {n for n in reach_of[r.source] if r.source in reach_of.get(n, ())}
        done |= group
        members = sorted(group)
        others = tuple((e.span, f"part of the cycle: {e.describe()}")
                       for e in sorted(cyclic, key=lambda e: e.span)
                       if e is not r and e.source in group)
        if len(members) == 1:
            msg = f"class '{members[0]}' inherits from itself"
        else:
            msg = "inheritance cycle among " + ", ".join(f"'{m}'" for m in members)
        diags.append(make("E050", msg, r.span, others))
    return diags


def attribute_marker_mismatch(attr: Attribute, nature: Nature) -> bool:
    return attr.declared_marker is Nature.QUANTUM and nature is Nature.CLASSICAL


def resolve(ast: ParsedModel) -> Model:
    """Bind every name in ``ast``.

    Raises ``QumlError`` with E010/E011/E022/E050 diagnostics when any
    error-severity finding exists.
    """
    diags: list[Diagnostic] = []
    file = ast.file

    types: dict[str, TypeDecl] = dict(BUILTIN_TYPES)
    user_types: list[TypeDecl] = []
    class_nodes: dict[str, ClassNode] = {}
    for item in ast.items:
        if isinstance(item, TypeDeclNode):
            if item.name in BUILTIN_TYPES:
                diags.append(make("E011", f"type '{item.name}' shadows a built-in type", item.span))
            elif item.name in types or item.name in class_nodes:
                diags.append(make("E011", f"duplicate declaration of '{item.name}'", item.span))
            else:
                td = TypeDecl(item.name, Nature.of(item.quantum), "user", item.span)
                types[item.name] = td
                user_types.append(td)
        elif isinstance(item, ClassNode):
            if item.name in BUILTIN_TYPES:
                diags.append(make("E011", f"class '{item.name}' shadows a built-in type", item.name_span))
            elif item.name in class_nodes or item.name in types:
                diags.append(make("E011", f"duplicate declaration of '{item.name}'", item.name_span))
            else:
                class_nodes[item.name] = item

    def typeref(t: TypeRefNode, allow_class: bool) -> TypeRef | None:
        if t.name in types:
            return TypeRef(t.name, types[t.name].nature, t.array_len, t.span)
        if t.name in class_nodes:
            if allow_class:
                return TypeRef(t.name, None, t.array_len, t.span)
            diags.append(make("E010", f"'{t.name}' is a class; operation parameters and "
                                      f"return types must be data types", t.span))
            return None
        diags.append(make("E010", f"unresolved type '{t.name}'", t.span))
        return None

    classes: list[ClassDef] = []
    for node in class_nodes.values():
        attrs, ops, seen = [], [], set()
        for m in node.members:
            if m.name in seen:
                diags.append(make("E011", f"duplicate member '{m.name}' in class '{node.name}'", m.span))
                continue
            seen.add(m.name)
            vis = "private" if m.private else "public"
            if isinstance(m, AttrNode):
                t = typeref(m.type, allow_class=True)
                if t is None:
                    continue
                attr = Attribute(m.name, t, Nature.QUANTUM if m.quantum else None, vis, m.span)
                if not t.is_class and attribute_marker_mismatch(attr, t.nature):
                    diags.append(make("E022", f"attribute '{m.name}' is marked quantum but its type "
                                              f"'{t}' is classical", m.span))
                attrs.append(attr)
            else:
                params, pnames = [], set()
                for p in m.params:
                    if p.name in pnames:
                        diags.append(make("E011", f"duplicate parameter '{p.name}' in operation "
                                                  f"'{m.name}'", p.span))
                    pnames.add(p.name)
                    t = typeref(p.type, allow_class=False)
                    if t is not None:
                        params.append(Param(p.name, t, p.span))
                ret = VOID if m.ret is None else typeref(m.ret, allow_class=False)
                if ret is None:
                    continue
                ops.append(Operation(m.name, tuple(params), ret, m.quantum, vis,
                                     m.ret is not None, m.span))
        classes.append(ClassDef(node.name, Nature.QUANTUM if node.quantum else None,
                                tuple(attrs), tuple(ops), node.span, node.name_span))

    relationships: list[Relationship] = []
    for item in ast.items:
        if not isinstance(item, RelNode):
            continue
        ok = True
        for name, span in ((item.source, item.source_span), (item.target, item.target_span)):
            if name not in class_nodes:
                diags.append(make("E010", f"unresolved class '{name}'", span))
                ok = False
        if ok:
            relationships.append(Relationship(item.kind, item.source, item.target, item.span))
    diags.extend(inheritance_cycles(classes, relationships))

    sequences: list[SequenceDiagram] = []
    seq_names: set[str] = set()
    for item in ast.items:
        if not isinstance(item, SequenceNode):
            continue
        if item.name in seq_names:
            diags.append(make("E011", f"duplicate sequence '{item.name}'", item.span))
        seq_names.add(item.name)
        lifelines, aliases = [], set()
        for ll in item.lifelines:
            if ll.alias in aliases:
                diags.append(make("E011", f"duplicate lifeline '{ll.alias}'", ll.span))
                continue
            aliases.add(ll.alias)
            if ll.class_name not in class_nodes:
                diags.append(make("E010", f"unresolved class '{ll.class_name}'", ll.class_span))
            lifelines.append(Lifeline(ll.alias, ll.class_name, ll.span))
        messages = []
        for msg in item.messages:
            for alias in (msg.sender, msg.receiver):
                if alias not in aliases:
                    diags.append(make("E010", f"unresolved lifeline '{alias}' in sequence "
                                              f"'{item.name}'", msg.span))
            messages.append(Message(msg.sender, msg.receiver,
                                    "return" if msg.is_return else "call", msg.op,
                                    Nature.of(msg.quantum), msg.span))
        sequences.append(SequenceDiagram(item.name, tuple(lifelines), tuple(messages), item.span))

    if diags:
        raise QumlError(diags)
    return Model(ast.name, tuple(user_types), tuple(classes), tuple(relationships),
                 tuple(sequences), file)


def load(source: str | bytes, file: str = "<input>") -> Model:
    """Parse and resolve in one step."""
    from quml.syntax import parse
    return resolve(parse(source, file))
