"""Random Q-UML models for property tests and the oracle sweep scripts.

Models are built as syntax trees and printed with the formatter, so every
generated model also exercises parse/resolve. Inheritance edges always point
from a later class to an earlier one, which keeps them acyclic.
"""
from __future__ import annotations

import random
from dataclasses import replace

from quml.syntax import (AttrNode, ClassNode, ParamNode, ParsedModel, OpNode, RelNode,
                         TypeDeclNode, TypeRefNode)

CLASSICAL_TYPES = ("int", "uint", "float", "bool", "string")
QUANTUM_TYPES = ("qubit", "qstate", "graphstate")
USER_TYPES = (TypeDeclNode("Tq", True), TypeDeclNode("Tc", False))
REL_KINDS = ("inheritance", "composition", "aggregation", "association")


def _data_type(rng: random.Random, p_quantum: float) -> TypeRefNode:
    if rng.random() < p_quantum:
        name = rng.choice(QUANTUM_TYPES + ("Tq",))
    else:
        name = rng.choice(CLASSICAL_TYPES + ("Tc",))
    return TypeRefNode(name, rng.choice((None, None, None, 2, 8)))


def _is_quantum_type(name: str) -> bool:
    return name in QUANTUM_TYPES or name == "Tq"


def random_member(rng: random.Random, name: str, class_names: list[str],
                  p_quantum: float = 0.08) -> AttrNode | OpNode:
    if rng.random() < 0.45:
        if class_names and rng.random() < 0.15:
            t = TypeRefNode(rng.choice(class_names), rng.choice((None, 3)))
            return AttrNode(name, t, private=rng.random() < 0.3)
        t = _data_type(rng, p_quantum)
        # a quantum marker on a classical type is E022, which would block resolution
        marker = _is_quantum_type(t.name) and rng.random() < 0.5
        return AttrNode(name, t, quantum=marker, private=rng.random() < 0.3)
    params = tuple(ParamNode(f"p{i}", _data_type(rng, p_quantum / 2))
                   for i in range(rng.randint(0, 3)))
    ret = _data_type(rng, p_quantum / 2) if rng.random() < 0.6 else None
    return OpNode(name, params, ret, quantum=rng.random() < p_quantum / 2,
                  private=rng.random() < 0.3)


def random_relationship(rng: random.Random, n_classes: int) -> RelNode:
    kind = rng.choice(REL_KINDS)
    if kind == "inheritance":
        if n_classes < 2:
            kind = "composition"
        else:
            sub = rng.randrange(1, n_classes)
            return RelNode(kind, f"C{sub}", f"C{rng.randrange(sub)}")
    return RelNode(kind, f"C{rng.randrange(n_classes)}", f"C{rng.randrange(n_classes)}")


def random_model(rng: random.Random, max_classes: int = 12,
                 p_quantum: float = 0.08) -> ParsedModel:
    n = rng.randint(1, max_classes)
    names = [f"C{i}" for i in range(n)]
    classes = []
    for i in range(n):
        members = tuple(random_member(rng, f"m{j}", names, p_quantum)
                        for j in range(rng.randint(0, 4)))
        classes.append(ClassNode(names[i], quantum=rng.random() < 0.3, members=members))
    rels = tuple(random_relationship(rng, n) for _ in range(rng.randint(0, 2 * n)))
    return ParsedModel("random", USER_TYPES + tuple(classes) + rels)


def augment(rng: random.Random, tree: ParsedModel, p_quantum: float = 0.08) -> ParsedModel:
    """Add classes, members and/or relationships to ``tree``; never removes anything."""
    types = [i for i in tree.items if isinstance(i, TypeDeclNode)]
    classes = [i for i in tree.items if isinstance(i, ClassNode)]
    rels = [i for i in tree.items if isinstance(i, RelNode)]
    for _ in range(rng.randint(0, 2)):
        classes.append(ClassNode(f"C{len(classes)}", quantum=rng.random() < 0.3))
    names = [c.name for c in classes]
    for _ in range(rng.randint(0, 3)):
        k = rng.randrange(len(classes))
        c = classes[k]
        member = random_member(rng, f"m{len(c.members)}x", names, p_quantum)
        classes[k] = replace(c, members=c.members + (member,))
    for _ in range(rng.randint(0, 3)):
        rels.append(random_relationship(rng, len(classes)))
    return replace(tree, items=tuple(types) + tuple(classes) + tuple(rels))
