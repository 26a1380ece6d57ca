"""DOT class diagrams and SVG sequence diagrams in Q-UML notation.

Quantum classes and members are set in bold; quantum relationships and
messages are drawn with two parallel strokes. Output is byte-deterministic:
integer geometry only, declaration order everywhere, no timestamps.
"""
from __future__ import annotations

from dataclasses import dataclass
from html import escape
from xml.sax.saxutils import quoteattr

from quml.inference import QuantumnessMap
from quml.model import (Attribute, ClassDef, Model, Operation, message_payload,
                        typeref_quantumness)


@dataclass(frozen=True)
class RenderDoc:
    format: str  # dot | svg
    content: str
    diagram: str  # "class" or "seq:<name>"


@dataclass(frozen=True)
class Geometry:
    lifeline_spacing: int = 160
    message_pitch: int = 40
    font_size: int = 12
    margin: int = 20
    box_width: int = 120
    box_height: int = 30
    double_gap: int = 2
    self_loop_width: int = 40
    self_loop_height: int = 20
    arrow_len: int = 8
    arrow_half: int = 4


DOUBLE_COLOR = "black:invis:black"
SINGLE_COLOR = "black"

_EDGE_STYLE = {
    "inheritance": "arrowhead=empty",
    "composition": "dir=back, arrowtail=diamond",
    "aggregation": "dir=back, arrowtail=odiamond",
    "association": "arrowhead=none",
}


def _b(text: str, bold: bool) -> str:
    return f"<b>{text}</b>" if bold else text


def _vis(member) -> str:
    return "+" if member.visibility == "public" else "-"


def _attr_line(a: Attribute, quantum: bool) -> str:
    return f"{_vis(a)} " + _b(escape(f"{a.name}: {a.dtype}"), quantum)


def _op_line(o: Operation, quantum: bool) -> str:
    params = ", ".join(_b(escape(f"{p.name}: {p.dtype}"), typeref_quantumness(p.dtype).is_quantum)
                       for p in o.params)
    line = f"{_vis(o)} {_b(escape(o.name), quantum)}({params})"
    if o.ret_declared:
        line += ": " + _b(escape(str(o.ret)), typeref_quantumness(o.ret).is_quantum)
    return line


def _compartment(lines: list[str]) -> str:
    if not lines:
        return '    <tr><td align="left" balign="left"> </td></tr>'
    body = "\n".join(f"      {ln}<br/>" for ln in lines)
    return f'    <tr><td align="left" balign="left">\n{body}\n    </td></tr>'


def _node(c: ClassDef, q: QuantumnessMap) -> str:
    title = _b(escape(c.name), q.is_quantum(c.name))
    attrs = [_attr_line(a, q.element_of[(c.name, a.name)].is_quantum) for a in c.attributes]
    ops = [_op_line(o, q.element_of[(c.name, o.name)].is_quantum) for o in c.operations]
    return "\n".join([
        f'  "{c.name}" [label=<',
        '  <table border="0" cellborder="1" cellspacing="0" cellpadding="4">',
        f"    <tr><td>{title}</td></tr>",
        _compartment(attrs),
        _compartment(ops),
        "  </table>>];",
    ])


def render_class_diagram(m: Model, q: QuantumnessMap) -> RenderDoc:
    g = Geometry()
    font = f'fontname="Helvetica", fontsize={g.font_size}'
    out = [
        f'digraph "{m.name}" {{',
        f"  graph [rankdir=BT, {font}];",
        f"  node [shape=plain, {font}];",
        f"  edge [{font}];",
    ]
    for c in m.classes:
        out.append(_node(c, q))
    for i, r in enumerate(m.relationships):
        color = DOUBLE_COLOR if q.relationship_of[i].is_quantum else SINGLE_COLOR
        out.append(f'  "{r.source}" -> "{r.target}" [{_EDGE_STYLE[r.kind]}, color="{color}"];')
    out.append("}")
    return RenderDoc("dot", "\n".join(out) + "\n", "class")


# ---------------------------------------------------------------------------
# Sequence diagrams
# ---------------------------------------------------------------------------

def _line(x1, y1, x2, y2, dashed) -> str:
    dash = ' stroke-dasharray="6,4"' if dashed else ""
    return (f'<line class="stroke" x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" '
            f'stroke="black" stroke-width="1"{dash}/>')


def _path(d, dashed) -> str:
    dash = ' stroke-dasharray="6,4"' if dashed else ""
    return f'<path class="stroke" d="{d}" fill="none" stroke="black" stroke-width="1"{dash}/>'


def _arrowhead(x, y, direction, filled, g: Geometry) -> str:
    bx = x - direction * g.arrow_len
    pts = f"{bx},{y - g.arrow_half} {x},{y} {bx},{y + g.arrow_half}"
    if filled:
        return f'<polygon class="head" points="{pts}" fill="black" stroke="black"/>'
    return f'<polyline class="head" points="{pts}" fill="none" stroke="black"/>'


def render_sequence_diagram(m: Model, q: QuantumnessMap, name: str) -> RenderDoc:
    """SVG for sequence ``name``; raises ``KeyError`` if no such sequence exists."""
    seq = m.sequence(name)
    if seq is None:
        raise KeyError(name)
    g = Geometry()
    n = max(len(seq.lifelines), 1)
    xs = {ll.alias: g.margin + g.box_width // 2 + i * g.lifeline_spacing
          for i, ll in enumerate(seq.lifelines)}
    top = g.margin + g.box_height
    first_y = top + g.message_pitch
    bottom = first_y + g.message_pitch * len(seq.messages)
    width = 2 * g.margin + g.box_width + (n - 1) * g.lifeline_spacing + g.self_loop_width
    height = bottom + g.margin

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="Helvetica, Arial, sans-serif" '
        f'font-size="{g.font_size}">',
        f"<title>{escape(seq.name)}</title>",
    ]
    for ll in seq.lifelines:
        x = xs[ll.alias]
        quantum = ll.class_name in q.class_of and q.is_quantum(ll.class_name)
        weight = ' font-weight="bold"' if quantum else ""
        nature = "quantum" if quantum else "classical"
        out += [
            f'<g class="lifeline {nature}" data-alias={quoteattr(ll.alias)} '
            f'data-class={quoteattr(ll.class_name)}>',
            f'  <rect x="{x - g.box_width // 2}" y="{g.margin}" width="{g.box_width}" '
            f'height="{g.box_height}" fill="white" stroke="black"/>',
            f'  <text x="{x}" y="{g.margin + g.box_height // 2 + g.font_size // 3}" '
            f'text-anchor="middle"{weight}>{escape(ll.alias)}: {escape(ll.class_name)}</text>',
            f'  <line x1="{x}" y1="{top}" x2="{x}" y2="{bottom}" stroke="black" '
            f'stroke-dasharray="4,4"/>',
            "</g>",
        ]
    for k, msg in enumerate(seq.messages):
        y = first_y + k * g.message_pitch
        payload = message_payload(m, seq, msg)
        quantum = payload is not None and payload.is_quantum
        dashed = msg.kind == "return"
        filled = msg.kind == "call"
        x1, x2 = xs[msg.sender], xs[msg.receiver]
        d = g.double_gap // 2
        nature = "quantum" if quantum else "classical"
        out.append(f'<g class="message {msg.kind} {nature}" data-op={quoteattr(msg.op_name)} '
                   f'data-from={quoteattr(msg.sender)} data-to={quoteattr(msg.receiver)}>')
        if x1 == x2:
            w, h = g.self_loop_width, g.self_loop_height
            if quantum:
                out.append("  " + _path(f"M{x1},{y - d} H{x1 + w + d} V{y + h + d} H{x1}", dashed))
                out.append("  " + _path(f"M{x1},{y + d} H{x1 + w - d} V{y + h - d} H{x1}", dashed))
            else:
                out.append("  " + _path(f"M{x1},{y} H{x1 + w} V{y + h} H{x1}", dashed))
            out.append("  " + _arrowhead(x1, y + h, -1, filled, g))
            label_x = x1 + w // 2
        else:
            if quantum:
                out.append("  " + _line(x1, y - d, x2, y - d, dashed))
                out.append("  " + _line(x1, y + d, x2, y + d, dashed))
            else:
                out.append("  " + _line(x1, y, x2, y, dashed))
            out.append("  " + _arrowhead(x2, y, 1 if x2 > x1 else -1, filled, g))
            label_x = (x1 + x2) // 2
        out.append(f'  <text x="{label_x}" y="{y - 6}" text-anchor="middle">'
                   f"{escape(msg.op_name)}</text>")
        out.append("</g>")
    out.append("</svg>")
    return RenderDoc("svg", "\n".join(out) + "\n", f"seq:{seq.name}")
