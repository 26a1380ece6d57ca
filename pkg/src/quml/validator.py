"""Rule checks over a resolved model and its inferred quantumness."""
from __future__ import annotations

from quml.diagnostics import Diagnostic, explain, make, sort_diagnostics
from quml.inference import QuantumnessMap
from quml.model import (ClassDef, Model, Nature, attribute_marker_mismatch,
                        inheritance_cycles, message_operation, message_payload,
                        signature_is_classical)

__all__ = ["validate", "explain", "has_classical_interface"]


def has_classical_interface(c: ClassDef, qmap: QuantumnessMap) -> bool:
    """A public all-classical operation or a public classical attribute exists."""
    if any(o.visibility == "public" and signature_is_classical(o) for o in c.operations):
        return True
    return any(a.visibility == "public" and not qmap.element_of[(c.name, a.name)].is_quantum
               for a in c.attributes)


def _check_classes(m: Model, q: QuantumnessMap) -> list[Diagnostic]:
    diags = []
    for c in m.classes:
        inferred = q.class_of[c.name]
        if inferred.is_quantum and c.declared_marker is not Nature.QUANTUM:
            diags.append(make(
                "E020",
                f"class '{c.name}' is quantum ({q.provenance_text(c.name)}) but is not "
                f"declared 'quantum class'", c.name_span))
        elif not inferred.is_quantum and c.declared_marker is Nature.QUANTUM:
            diags.append(make(
                "W021",
                f"class '{c.name}' is declared quantum but has no quantum element, "
                f"quantum superclass or quantum part", c.name_span))
        for a in c.attributes:
            if attribute_marker_mismatch(a, q.element_of[(c.name, a.name)]):
                what = f"class '{a.dtype}' is classical" if a.dtype.is_class else \
                    f"type '{a.dtype}' is classical"
                diags.append(make("E022", f"attribute '{a.name}' is marked quantum but its {what}",
                                  a.span))
    return diags


def _check_messages(m: Model, q: QuantumnessMap) -> list[Diagnostic]:
    diags = []
    for seq in m.sequences:
        for msg in seq.messages:
            op = message_operation(m, seq, msg)
            if op is None:
                owner_alias = msg.receiver if msg.kind == "call" else msg.sender
                ll = seq.lifeline(owner_alias)
                owner = ll.class_name if ll else "?"
                role = "receiver" if msg.kind == "call" else "sender"
                diags.append(make(
                    "E033",
                    f"{msg.kind} '{msg.op_name}': class '{owner}' of {role} "
                    f"'{owner_alias}' has no public operation '{msg.op_name}'", msg.span))
                continue
            payload = message_payload(m, seq, msg)
            carried = "argument" if msg.kind == "call" else "result"
            if payload.is_quantum and msg.declared_marker is Nature.CLASSICAL:
                diags.append(make(
                    "E030", f"{msg.kind} '{msg.op_name}' carries a quantum {carried} but is "
                            f"sent as 'msg'; use 'qmsg'", msg.span))
            elif not payload.is_quantum and msg.declared_marker is Nature.QUANTUM:
                diags.append(make(
                    "E031", f"{msg.kind} '{msg.op_name}' carries only classical data but is "
                            f"sent as 'qmsg'; use 'msg'", msg.span))
            if payload.is_quantum:
                for alias in (msg.sender, msg.receiver):
                    cls = seq.lifeline(alias).class_name
                    if not q.is_quantum(cls):
                        diags.append(make(
                            "E032", f"quantum {msg.kind} '{msg.op_name}' involves lifeline "
                                    f"'{alias}' of classical class '{cls}'", msg.span))
                        break
    return diags


def _check_associations(m: Model, q: QuantumnessMap) -> list[Diagnostic]:
    diags = []
    for r in m.relationships:
        if r.kind != "association":
            continue
        a, b = q.class_of[r.source], q.class_of[r.target]
        if a is b:
            continue
        quantum_end = r.source if a.is_quantum else r.target
        classical_end = r.target if a.is_quantum else r.source
        if not has_classical_interface(m.class_map[quantum_end], q):
            diags.append(make(
                "E040",
                f"quantum class '{quantum_end}' has no public classical operation or "
                f"attribute to interface with classical class '{classical_end}'", r.span))
    return diags


def validate(m: Model, q: QuantumnessMap) -> list[Diagnostic]:
    """All rule findings for ``m``, ordered by source position. Empty means conforming."""
    diags = _check_classes(m, q) + _check_messages(m, q) + _check_associations(m, q)
    # normally already rejected by resolve(); re-checked for models built directly
    diags += inheritance_cycles(m.classes, m.relationships)
    return sort_diagnostics(diags)
