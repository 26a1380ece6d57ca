import random

from hypothesis import given, settings
from hypothesis import strategies as st

from quml import Nature, classify_relationship, format, infer, load
from quml.random_models import augment, random_model

from oracle import oracle_quantum_classes

CHAIN = """model chain
class ShorFactor { op factor(N: int) -> int }
class ShorOrder { op order(a: int, N: int) -> int }
class QFT_n { quantum attr state: qstate op qft() }
compose ShorFactor has ShorOrder
compose ShorOrder has QFT_n
"""


def quantum_set(qmap):
    return {c for c, n in qmap.class_of.items() if n.is_quantum}


def test_single_source():
    m = load("model m class QFT_n { quantum attr state: qstate }")
    qm = infer(m)
    assert qm.class_of == {"QFT_n": Nature.QUANTUM}
    assert qm.provenance_text("QFT_n") == "own element state: qstate"


def test_all_classical():
    m = load("""model m class A { attr x: int op f(a: float) -> bool }
class B { attr a: A } inherit B from A compose A has B assoc A with B""")
    qm = infer(m)
    assert not quantum_set(qm)
    assert set(qm.element_of.values()) == {Nature.CLASSICAL}
    assert set(qm.relationship_of.values()) == {Nature.CLASSICAL}


def test_composition_chain():
    qm = infer(load(CHAIN))
    assert quantum_set(qm) == {"ShorFactor", "ShorOrder", "QFT_n"}
    assert list(qm.relationship_of.values()) == [Nature.QUANTUM, Nature.QUANTUM]
    assert qm.provenance_text("ShorFactor") == (
        "via composition of ShorOrder <- via composition of QFT_n <- own element state: qstate")


def test_two_cycle_terminates():
    m = load("model m class A {} class B { attr q: qubit } compose A has B compose B has A")
    assert quantum_set(infer(m)) == {"A", "B"}


def test_inheritance_direction():
    m = load("""model m class Super { attr q: qubit } class Sub {}
class Base {} class Derived { attr q: qubit }
inherit Sub from Super inherit Derived from Base""")
    qm = infer(m)
    assert quantum_set(qm) == {"Super", "Sub", "Derived"}
    # the converse does not hold: a quantum subclass leaves the edge classical
    assert [qm.relationship_of[i] for i in range(2)] == [Nature.QUANTUM, Nature.CLASSICAL]


def test_composition_flows_part_to_whole_only():
    m = load("model m class Whole { quantum op run() } class Part { attr x: int } compose Whole has Part")
    qm = infer(m)
    assert quantum_set(qm) == {"Whole"}
    assert classify_relationship(m.relationships[0], qm) is Nature.CLASSICAL


def test_aggregation_propagates():
    m = load("model m class W {} class P { attr s: graphstate } aggregate W has P")
    qm = infer(m)
    assert quantum_set(qm) == {"W", "P"}
    assert qm.provenance_text("W") == "via aggregation of P <- own element s: graphstate"


def test_association_never_quantum():
    m = load("model m class Client {} class QFT_n { quantum attr s: qstate op qft() } assoc Client with QFT_n")
    qm = infer(m)
    assert quantum_set(qm) == {"QFT_n"}
    assert classify_relationship(m.relationships[0], qm) is Nature.CLASSICAL


def test_class_typed_attribute_propagates():
    m = load("model m class P { attr s: qstate } class W { attr part: P[2] }")
    qm = infer(m)
    assert quantum_set(qm) == {"P", "W"}
    assert qm.element_of[("W", "part")] is Nature.QUANTUM
    assert qm.provenance_text("W") == "via attribute part of class P <- own element s: qstate"


def test_internal_quantum_with_classical_interface():
    m = load("model m class Factor { quantum op factor(N: int) -> int }")
    assert quantum_set(infer(m)) == {"Factor"}


def test_declared_markers_are_ignored():
    a = infer(load("model m quantum class A { attr x: int } class B { attr q: qubit }"))
    b = infer(load("model m class A { attr x: int } quantum class B { attr q: qubit }"))
    assert a == b


def test_source_removal():
    without = CHAIN.replace("quantum attr state: qstate ", "")
    qm = infer(load(without))
    assert not quantum_set(qm)
    assert set(qm.relationship_of.values()) == {Nature.CLASSICAL}


def test_map_is_total(shor):
    m, qm = shor
    assert set(qm.class_of) == {c.name for c in m.classes}
    assert set(qm.element_of) == {(c.name, e.name) for c in m.classes for e in c.members}
    assert set(qm.relationship_of) == set(range(len(m.relationships)))


def test_provenance_terminates_in_own_element():
    rng = random.Random(3)
    for _ in range(200):
        m = load(format(random_model(rng)))
        qm = infer(m)
        for c in quantum_set(qm):
            chain = qm.provenance(c)
            assert chain and chain[-1].rule == "own-element"


def test_matches_oracle_random_models():
    rng = random.Random(11)
    seen = set()
    for _ in range(300):
        m = load(format(random_model(rng)))
        got = quantum_set(infer(m))
        assert got == oracle_quantum_classes(m)
        seen.add(len(got) == len(m.classes))
    assert seen == {True, False}


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32))
def test_oracle_equivalence_property(seed):
    m = load(format(random_model(random.Random(seed))))
    assert quantum_set(infer(m)) == oracle_quantum_classes(m)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32))
def test_monotonicity(seed):
    rng = random.Random(seed)
    tree = random_model(rng)
    before = infer(load(format(tree)))
    after = infer(load(format(augment(rng, tree))))
    for table in ("class_of", "element_of", "relationship_of"):
        old, new = getattr(before, table), getattr(after, table)
        assert all(new[k].is_quantum for k, v in old.items() if v.is_quantum)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32), st.randoms(use_true_random=False))
def test_order_independence(seed, shuffler):
    m = load(format(random_model(random.Random(seed))))
    order = [c.name for c in m.classes]
    shuffler.shuffle(order)
    assert infer(m, order).class_of == infer(m).class_of


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32))
def test_flipping_class_markers_changes_nothing(seed):
    from dataclasses import replace
    from quml.syntax import ClassNode
    tree = random_model(random.Random(seed))
    flipped = replace(tree, items=tuple(
        replace(i, quantum=not i.quantum) if isinstance(i, ClassNode) else i for i in tree.items))
    assert infer(load(format(tree))) == infer(load(format(flipped)))
