"""Least-fixpoint quantumness inference over the class graph.

A class is quantum when it owns a quantum element, inherits from a quantum
class, composes or aggregates a quantum class, or has an attribute typed by a
quantum class. Quantumness flows part -> whole and superclass -> subclass;
associations never propagate. Declared markers are never read here.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable

from quml.model import (Attribute, ClassDef, Model, Nature, Relationship,
                        element_quantumness)


@dataclass(frozen=True)
class Reason:
    """Why a class became quantum: its own element, or an edge from another quantum class."""

    rule: str  # own-element | inheritance | composition | aggregation | attribute
    via: str  # member name for own-element, else the class it inherited the label from
    detail: str = ""

    def __str__(self) -> str:
        if self.rule == "own-element":
            return f"own element {self.via}{self.detail}"
        if self.rule == "inheritance":
            return f"via inheritance from {self.via}"
        if self.rule == "attribute":
            return f"via attribute {self.detail} of class {self.via}"
        return f"via {self.rule} of {self.via}"


@dataclass(frozen=True)
class QuantumnessMap:
    class_of: dict[str, Nature]
    element_of: dict[tuple[str, str], Nature]
    relationship_of: dict[int, Nature]  # keyed by index into Model.relationships
    reasons: dict[str, Reason]

    def provenance(self, cls: str) -> list[Reason]:
        """Rule chain from ``cls`` back to a class owning a quantum element."""
        chain: list[Reason] = []
        seen = set()
        while cls in self.reasons and cls not in seen:
            seen.add(cls)
            r = self.reasons[cls]
            chain.append(r)
            if r.rule == "own-element":
                break
            cls = r.via
        return chain

    def provenance_text(self, cls: str) -> str:
        return " <- ".join(str(r) for r in self.provenance(cls))

    def is_quantum(self, cls: str) -> bool:
        return self.class_of[cls].is_quantum


def _describe_element(e) -> str:
    if isinstance(e, Attribute):
        return f": {e.dtype}"
    return "()"


def propagation_edges(m: Model) -> list[tuple[str, str, str, str]]:
    """(from_class, to_class, rule, detail) edges along which quantumness flows."""
    edges = []
    for r in m.relationships:
        if r.kind == "inheritance":
            edges.append((r.target, r.source, "inheritance", ""))
        elif r.kind in ("composition", "aggregation"):
            edges.append((r.target, r.source, r.kind, ""))
    for c in m.classes:
        for a in c.attributes:
            if a.dtype.is_class:
                edges.append((a.dtype.name, c.name, "attribute", a.name))
    return edges


def own_quantum_element(c: ClassDef):
    return next((e for e in c.members if element_quantumness(e).is_quantum), None)


def infer(m: Model, order: Iterable[str] | None = None) -> QuantumnessMap:
    """Classify every class, member and relationship of ``m``.

    ``order`` optionally fixes the class visiting order; the classification is
    the same for every order, only the recorded provenance may differ.
    """
    names = list(order) if order is not None else [c.name for c in m.classes]
    classes = m.class_map
    out_edges: dict[str, list[tuple[str, str, str]]] = {n: [] for n in classes}
    for src, dst, rule, detail in propagation_edges(m):
        out_edges[src].append((dst, rule, detail))

    reasons: dict[str, Reason] = {}
    work: deque[str] = deque()
    for n in names:
        e = own_quantum_element(classes[n])
        if e is not None:
            reasons[n] = Reason("own-element", e.name, _describe_element(e))
            work.append(n)
    # each class enters the worklist at most once: at most |classes| rounds
    while work:
        n = work.popleft()
        for dst, rule, detail in out_edges[n]:
            if dst not in reasons:
                reasons[dst] = Reason(rule, n, detail)
                work.append(dst)

    class_of = {c.name: Nature.of(c.name in reasons) for c in m.classes}
    element_of: dict[tuple[str, str], Nature] = {}
    for c in m.classes:
        for a in c.attributes:
            element_of[(c.name, a.name)] = (class_of[a.dtype.name] if a.dtype.is_class
                                            else element_quantumness(a))
        for o in c.operations:
            element_of[(c.name, o.name)] = element_quantumness(o)
    qmap = QuantumnessMap(class_of, element_of, {}, reasons)
    for i, r in enumerate(m.relationships):
        qmap.relationship_of[i] = classify_relationship(r, qmap)
    return qmap


def classify_relationship(r: Relationship, qmap: QuantumnessMap) -> Nature:
    """Inheritance follows the superclass, composition/aggregation the part; associations stay classical."""
    if r.kind == "association":
        return Nature.CLASSICAL
    return qmap.class_of[r.target]
