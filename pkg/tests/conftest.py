from importlib.resources import files
from pathlib import Path

import pytest

from quml import infer, load

CORPUS = Path(str(files("quml") / "corpus"))
CORPUS_FILES = sorted(CORPUS.glob("*.quml"))
VALID_FILES = [p for p in CORPUS_FILES
               if not p.name.startswith(("e022", "e050"))]  # these fail resolution by design
SCHEMA = Path(str(files("quml") / "diagnostics.schema.json"))

PER_CODE_FILES = {
    "E020": "bad_unmarked.quml",
    "W021": "w021_overmarked.quml",
    "E022": "e022_marker_mismatch.quml",
    "E030": "e030_undermarked_message.quml",
    "E031": "e031_overmarked_message.quml",
    "E032": "e032_classical_endpoint.quml",
    "E033": "e033_unknown_operation.quml",
    "E040": "e040_incompatible_association.quml",
    "E050": "e050_inheritance_cycle.quml",
}


def read(name: str) -> str:
    return (CORPUS / name).read_text()


@pytest.fixture
def shor_source() -> str:
    return read("shor.quml")


@pytest.fixture
def shor(shor_source):
    m = load(shor_source, "shor.quml")
    return m, infer(m)


ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


@pytest.fixture
def criterion(request):
    """Record a pass/fail line for the acceptance summary printed at session end."""
    def record(ok: bool, detail: str = "") -> None:
        ACCEPTANCE_RESULTS.append((request.node.name, bool(ok), detail))
        assert ok, detail
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
