"""Q-UML: a textual modeling language for quantum-aware class and sequence diagrams."""
from quml.diagnostics import Diagnostic, QumlError, Severity, SourceSpan, explain
from quml.inference import QuantumnessMap, classify_relationship, infer
from quml.model import Model, Nature, element_quantumness, load, resolve
from quml.render import RenderDoc, render_class_diagram, render_sequence_diagram
from quml.syntax import ParsedModel, format, parse
from quml.validator import validate

__all__ = [
    "Diagnostic", "Model", "Nature", "ParsedModel", "QuantumnessMap", "QumlError",
    "RenderDoc", "Severity", "SourceSpan", "classify_relationship", "element_quantumness",
    "explain", "format", "infer", "load", "parse", "render_class_diagram",
    "render_sequence_diagram", "resolve", "validate",
]
