"""End-to-end CLI contract check over the bundled corpus.

Runs the installed ``quml`` entry point (falling back to ``python -m quml``) as a
subprocess and compares exit codes and JSON output with the expected table.
Prints one line per case and exits non-zero on any mismatch.
"""
from __future__ import annotations

import json
import shutil
import subprocess
import sys
import tempfile
from importlib.resources import files
from pathlib import Path

import jsonschema

CORPUS = Path(str(files("quml") / "corpus"))
SCHEMA = json.loads((files("quml") / "diagnostics.schema.json").read_text())

EXPECTED_CHECK = {
    "shor.quml": 0,
    "classical.quml": 0,
    "w021_overmarked.quml": 0,
    "bad_unmarked.quml": 1,
    "e022_marker_mismatch.quml": 1,
    "e030_undermarked_message.quml": 1,
    "e031_overmarked_message.quml": 1,
    "e032_classical_endpoint.quml": 1,
    "e033_unknown_operation.quml": 1,
    "e040_incompatible_association.quml": 1,
    "e050_inheritance_cycle.quml": 1,
}


def quml_cmd() -> list[str]:
    exe = shutil.which("quml")
    return [exe] if exe else [sys.executable, "-m", "quml"]


def run(*args: str) -> subprocess.CompletedProcess:
    return subprocess.run(quml_cmd() + list(args), capture_output=True, text=True)


def cases(tmp: Path):
    missing_corpus = sorted(set(EXPECTED_CHECK) ^ {p.name for p in CORPUS.glob("*.quml")})
    yield "corpus table covers every file", not missing_corpus, ", ".join(missing_corpus)
    for name, want in EXPECTED_CHECK.items():
        res = run("check", str(CORPUS / name))
        yield f"check {name} -> {want}", res.returncode == want, f"got {res.returncode}"
        res = run("check", "--format", "json", str(CORPUS / name))
        try:
            jsonschema.validate(json.loads(res.stdout), SCHEMA)
            ok, why = res.returncode == want, f"got {res.returncode}"
        except (ValueError, jsonschema.ValidationError) as exc:
            ok, why = False, str(exc).splitlines()[0]
        yield f"check --format json {name} -> {want} + schema", ok, why

    res = run("check", "--deny-warnings", str(CORPUS / "w021_overmarked.quml"))
    yield "check --deny-warnings on W021 -> 1", res.returncode == 1, f"got {res.returncode}"
    res = run("check", *[str(CORPUS / n) for n in EXPECTED_CHECK])
    yield "check over whole corpus -> 1", res.returncode == 1, f"got {res.returncode}"
    res = run("check", str(tmp / "nosuchfile.quml"))
    yield "check missing file -> 2", res.returncode == 2, f"got {res.returncode}"
    bad = tmp / "syntax.quml"
    bad.write_text("model m class A { attr x int }")
    res = run("check", str(bad))
    yield "check syntax error -> 2", res.returncode == 2, f"got {res.returncode}"
    res = run("check", str(bad), str(CORPUS / "shor.quml"))
    yield "check syntax error among valid files -> 2", res.returncode == 2, f"got {res.returncode}"

    res = run("infer", "--format", "json", str(CORPUS / "shor.quml"))
    yield "infer shor -> 0", res.returncode == 0 and json.loads(res.stdout)["model"] == "shor", \
        f"got {res.returncode}"
    res = run("infer", str(CORPUS / "bad_unmarked.quml"))
    yield "infer bad_unmarked -> 1", res.returncode == 1, f"got {res.returncode}"

    out = tmp / "shor.svg"
    res = run("render", "--diagram", "seq:factor", "--out", str(out), str(CORPUS / "shor.quml"))
    yield "render seq:factor -> 0", res.returncode == 0 and out.exists(), f"got {res.returncode}"
    res = run("render", "--diagram", "class", "--out", str(tmp / "shor.dot"), str(CORPUS / "shor.quml"))
    yield "render class -> 0", res.returncode == 0, f"got {res.returncode}"
    res = run("render", "--diagram", "seq:nope", "--out", str(out), str(CORPUS / "shor.quml"))
    yield "render unknown sequence -> 2", res.returncode == 2, f"got {res.returncode}"

    res = run("fmt", "--check", str(CORPUS / "shor.quml"))
    yield "fmt --check canonical -> 0", res.returncode == 0, f"got {res.returncode}"
    messy = tmp / "messy.quml"
    messy.write_text("model m class A{attr x:int}")
    res = run("fmt", "--check", str(messy))
    yield "fmt --check non-canonical -> 1", res.returncode == 1, f"got {res.returncode}"
    res = run("fmt", str(messy))
    res2 = run("fmt", "--check", str(messy))
    yield "fmt rewrites to canonical", res.returncode == 0 and res2.returncode == 0, \
        f"got {res.returncode}/{res2.returncode}"

    res = run("explain", "E040")
    yield "explain E040 -> 0", res.returncode == 0 and "Principle 5" in res.stdout, f"got {res.returncode}"
    res = run("explain", "Z999")
    yield "explain Z999 -> 2", res.returncode == 2, f"got {res.returncode}"
    res = run("frobnicate")
    yield "malformed argv -> 2", res.returncode == 2 and "usage" in res.stderr, f"got {res.returncode}"


def main() -> int:
    failures = 0
    with tempfile.TemporaryDirectory() as tmp:
        for name, ok, why in cases(Path(tmp)):
            print(f"{'PASS' if ok else 'FAIL'}  {name}" + ("" if ok else f"  ({why})"))
            failures += not ok
    print(f"{failures} failure(s)")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
