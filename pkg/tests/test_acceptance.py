"""Exit criteria for the toolchain, one test per criterion."""
import random
import subprocess
import sys
import time
from pathlib import Path

from quml import QumlError, format, infer, load, parse, validate
from quml.model import Nature, message_payload
from quml.random_models import augment, random_model
from quml.render import render_class_diagram, render_sequence_diagram

from conftest import CORPUS_FILES, PER_CODE_FILES, VALID_FILES, read
from oracle import oracle_quantum_classes
from test_render import check_dot_soundness, check_svg_soundness

ROOT = Path(__file__).resolve().parent.parent


def codes_of(src):
    try:
        m = load(src)
    except QumlError as exc:
        return exc.diagnostics
    return validate(m, infer(m))


def test_1_shor_conformance(criterion):
    t0 = time.perf_counter()
    m = load(read("shor.quml"), "shor.quml")
    q = infer(m)
    diags = validate(m, q)
    elapsed = time.perf_counter() - t0

    seq = m.sequence("factor")
    payload = {}
    for msg in seq.messages:
        payload.setdefault((msg.kind, msg.op_name, msg.sender, msg.receiver), set()).add(
            message_payload(m, seq, msg))
    comps = [q.relationship_of[i] for i, r in enumerate(m.relationships) if r.kind == "composition"]
    checks = {
        "zero diagnostics": diags == [],
        "3 classes quantum": len(m.classes) == 3 and all(n.is_quantum for n in q.class_of.values()),
        "2 compositions quantum": comps == [Nature.QUANTUM, Nature.QUANTUM],
        "set calls quantum": payload[("call", "set", "o", "q")] == {Nature.QUANTUM},
        "state returns quantum": payload[("return", "get", "q", "o")] == {Nature.QUANTUM},
        "qft call classical": payload[("call", "qft", "o", "q")] == {Nature.CLASSICAL},
        "qft_inverse call classical": payload[("call", "qft_inverse", "o", "q")] == {Nature.CLASSICAL},
        "factor<->order messages classical": payload[("call", "order", "f", "o")]
        == payload[("return", "order", "o", "f")] == {Nature.CLASSICAL},
        "runtime < 1 s": elapsed < 1.0,
    }
    failed = [k for k, v in checks.items() if not v]
    criterion(not failed, f"{elapsed * 1000:.1f} ms; failed: {failed}" if failed else
              f"{elapsed * 1000:.1f} ms")


def test_2_oracle_equivalence(criterion):
    rng = random.Random(20240101)
    t0 = time.perf_counter()
    mismatches = n_quantum = n_classes = 0
    n_models = 1000
    for _ in range(n_models):
        m = load(format(random_model(rng, max_classes=12)))
        got = {c for c, v in infer(m).class_of.items() if v.is_quantum}
        mismatches += got != oracle_quantum_classes(m)
        n_quantum += len(got)
        n_classes += len(m.classes)
    elapsed = time.perf_counter() - t0
    criterion(mismatches == 0 and elapsed < 30 and 0 < n_quantum < n_classes,
              f"{n_models} models, {mismatches} mismatches, {n_quantum}/{n_classes} classes "
              f"quantum, {elapsed:.1f} s")


def test_3_monotonicity(criterion):
    rng = random.Random(777)
    violations = 0
    pairs = 500
    for _ in range(pairs):
        tree = random_model(rng)
        before = infer(load(format(tree)))
        after = infer(load(format(augment(rng, tree))))
        for table in ("class_of", "element_of", "relationship_of"):
            old, new = getattr(before, table), getattr(after, table)
            violations += sum(1 for k, v in old.items() if v.is_quantum and not new[k].is_quantum)
    criterion(violations == 0, f"{pairs} pairs, {violations} violations")


def test_4_validator_exactness(criterion):
    problems = []
    for code, name in sorted(PER_CODE_FILES.items()):
        got = sorted({d.code for d in codes_of(read(name))})
        if got != [code]:
            problems.append(f"{name}: {got}")

    shor = read("shor.quml")
    # (a) strip the quantum marker from QFT_n and from the classes that are quantum through it
    unmarked = shor.replace("quantum class", "class")
    e020 = sorted(d.message.split("'")[1] for d in codes_of(unmarked) if d.code == "E020")
    if e020 != ["QFT_n", "ShorFactor", "ShorOrder"] or \
            {d.code for d in codes_of(unmarked)} != {"E020"}:
        problems.append(f"unmarked chain: {e020}")
    # only QFT_n's own marker removed: the other two are still declared quantum
    only_qft = shor.replace("quantum class QFT_n", "class QFT_n")
    if [d.message.split("'")[1] for d in codes_of(only_qft)] != ["QFT_n"]:
        problems.append("unmarking QFT_n alone")
    # (b) downgrade one quantum 'set' call
    downgraded = shor.replace("qmsg o -> q : set", "msg o -> q : set", 1)
    if [d.code for d in codes_of(downgraded)] != ["E030"]:
        problems.append(f"downgraded set: {[d.code for d in codes_of(downgraded)]}")
    criterion(not problems, "; ".join(problems) or f"{len(PER_CODE_FILES)} codes + 2 mutations")


def test_5_renderer_style_soundness(criterion):
    n_docs = 0
    identical = True
    for path in VALID_FILES:
        m = load(path.read_text())
        q = infer(m)
        check_dot_soundness(m, q)
        first = render_class_diagram(m, q).content
        identical &= first == render_class_diagram(m, infer(load(path.read_text()))).content
        n_docs += 1
        for seq in m.sequences:
            check_svg_soundness(m, q, seq)
            a = render_sequence_diagram(m, q, seq.name).content
            identical &= a == render_sequence_diagram(m, q, seq.name).content
            n_docs += 1
    criterion(identical, f"{n_docs} documents sound and byte-identical across runs")


def _fuzz_inputs(rng: random.Random, n: int):
    corpus = [p.read_bytes() for p in CORPUS_FILES]
    alphabet = b"modelclassattrop quantum{}()[]:,->-- \n\t//0123456789ABxyz_"
    for i in range(n):
        kind = i % 4
        if kind == 0:
            yield rng.randbytes(rng.randint(0, 256))
        elif kind == 1:
            yield bytes(rng.choice(alphabet) for _ in range(rng.randint(0, 120)))
        elif kind == 2:
            yield b"model m " + bytes(rng.randrange(32, 127) for _ in range(rng.randint(0, 80)))
        else:
            src = rng.choice(corpus)
            a = rng.randrange(len(src))
            b = min(len(src), a + rng.randint(0, 30))
            yield src[:a] + rng.randbytes(rng.randint(0, 6)) + src[b:]


def test_6_parser_robustness(criterion):
    rng = random.Random(42)
    n = 100_000
    crashes = accepted = 0
    for data in _fuzz_inputs(rng, n):
        try:
            parse(data)
            accepted += 1
        except QumlError as exc:
            if not exc.diagnostics:
                crashes += 1
        except Exception:  # noqa: BLE001 - anything else is a crash
            crashes += 1
    round_trip_failures = [p.name for p in CORPUS_FILES
                           if parse(format(parse(p.read_text()))) != parse(p.read_text())]
    criterion(crashes == 0 and not round_trip_failures,
              f"{n} fuzz inputs, {crashes} crashes, {accepted} accepted; "
              f"{len(CORPUS_FILES)} corpus files round-trip"
              + (f"; failures: {round_trip_failures}" if round_trip_failures else ""))


def test_7_cli_contract(criterion):
    res = subprocess.run([sys.executable, str(ROOT / "scripts" / "cli_e2e.py")],
                         capture_output=True, text=True)
    lines = res.stdout.strip().splitlines()
    failed = [ln for ln in lines if ln.startswith("FAIL")]
    criterion(res.returncode == 0 and not failed,
              lines[-1] if lines else res.stderr.strip()[-200:])
