import json
import shutil
import subprocess
import sys

import jsonschema
import pytest

from quml.cli import main

from conftest import CORPUS, PER_CODE_FILES, SCHEMA, VALID_FILES


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_clean(capsys):
    assert run(capsys, "check", str(CORPUS / "shor.quml")) == (0, "", "")


def test_check_unmarked(capsys):
    code, out, _ = run(capsys, "check", str(CORPUS / "bad_unmarked.quml"))
    assert code == 1
    (line,) = out.splitlines()
    assert " E020: " in line and line.startswith(str(CORPUS / "bad_unmarked.quml") + ":4:7:")


def test_check_missing_file(capsys):
    code, out, err = run(capsys, "check", "nosuchfile.quml")
    assert code == 2 and "nosuchfile.quml" in err and out == ""


def test_check_syntax_error(tmp_path, capsys):
    p = tmp_path / "bad.quml"
    p.write_text("model m class A { attr x int }")
    code, out, _ = run(capsys, "check", str(p))
    assert code == 2 and "E001" in out


def test_resolution_error_is_exit_1(tmp_path, capsys):
    p = tmp_path / "bad.quml"
    p.write_text("model m class A { attr x: nope }")
    code, out, _ = run(capsys, "check", str(p))
    assert code == 1 and "E010" in out


def test_warnings(capsys):
    f = str(CORPUS / PER_CODE_FILES["W021"])
    assert run(capsys, "check", f)[0] == 0
    assert run(capsys, "check", "--deny-warnings", f)[0] == 1


def test_multiple_files_ordered_by_path(capsys):
    files = [str(CORPUS / n) for n in ("e031_overmarked_message.quml", "bad_unmarked.quml")]
    code, out, _ = run(capsys, "check", *files)
    assert code == 1
    assert [ln.split()[2] for ln in out.splitlines()] == ["E020:", "E031:"]


def test_json_matches_schema_and_text(capsys):
    schema = json.loads(SCHEMA.read_text())
    files = [str(CORPUS / n) for n in PER_CODE_FILES.values()]
    code, out, _ = run(capsys, "check", "--format", "json", *files)
    data = json.loads(out)
    jsonschema.validate(data, schema)
    assert code == 1
    _, text, _ = run(capsys, "check", *files)
    text_codes = [ln.split()[2].rstrip(":") for ln in text.splitlines() if not ln.startswith("  ")]
    assert [d["code"] for d in data] == text_codes
    assert sorted({d["code"] for d in data}) == sorted(PER_CODE_FILES)
    cycle = next(d for d in data if d["code"] == "E050")
    assert cycle["related"] and set(cycle["related"][0]) == {"file", "start", "end", "note"}


def test_json_empty(capsys):
    code, out, _ = run(capsys, "check", "--format", "json", str(CORPUS / "shor.quml"))
    assert code == 0 and json.loads(out) == []


def test_infer_text(capsys):
    code, out, _ = run(capsys, "infer", str(CORPUS / "shor.quml"))
    assert code == 0
    assert "class ShorFactor: quantum  (via composition of ShorOrder <- own element order())" in out
    assert "composition ShorFactor -> ShorOrder: quantum" in out


def test_infer_json(capsys):
    code, out, _ = run(capsys, "infer", "--format", "json", str(CORPUS / "bad_unmarked.quml"))
    report = json.loads(out)
    assert code == 1
    (cls,) = report["classes"]
    assert cls["classification"] == "quantum" and cls["declared"] is None
    assert cls["provenance"] == ["own element bits: qubit[8]"]


def test_infer_suggests_markers(capsys):
    _, out, _ = run(capsys, "infer", str(CORPUS / "bad_unmarked.quml"))
    assert "[declare as 'quantum class']" in out


def test_render(tmp_path, capsys):
    dot, svg = tmp_path / "c.dot", tmp_path / "s.svg"
    f = str(CORPUS / "shor.quml")
    assert run(capsys, "render", "--diagram", "class", "--out", str(dot), f)[0] == 0
    assert run(capsys, "render", "--diagram", "seq:factor", "--out", str(svg), f)[0] == 0
    assert dot.read_text().startswith('digraph "shor"')
    assert svg.read_text().startswith("<?xml")
    code, _, err = run(capsys, "render", "--diagram", "seq:nope", "--out", str(svg), f)
    assert code == 2 and "nope" in err
    code, _, _ = run(capsys, "render", "--diagram", "class", "--out",
                     str(tmp_path / "missing" / "x.dot"), f)
    assert code == 2


def test_fmt(tmp_path, capsys):
    p = tmp_path / "m.quml"
    p.write_text("model m class A{attr x:int}")
    assert run(capsys, "fmt", "--check", str(p))[0] == 1
    assert run(capsys, "fmt", str(p))[0] == 0
    assert p.read_text() == "model m\n\nclass A {\n  attr x: int\n}\n"
    assert run(capsys, "fmt", "--check", str(p))[0] == 0


@pytest.mark.parametrize("path", VALID_FILES, ids=lambda p: p.name)
def test_fmt_check_corpus(path, capsys):
    assert run(capsys, "fmt", "--check", str(path))[0] == 0


def test_explain(capsys):
    code, out, _ = run(capsys, "explain", "E040")
    assert code == 0 and "Principle 5" in out
    code, _, err = run(capsys, "explain", "Z999")
    assert code == 2 and "Z999" in err


@pytest.mark.parametrize("argv", [[], ["bogus"], ["check"], ["render", "x.quml"],
                                  ["render", "--diagram", "seq:", "--out", "o", "x.quml"],
                                  ["check", "--format", "xml", "x.quml"]])
def test_usage_errors(argv, capsys):
    assert main(argv) == 2


def test_console_script(tmp_path):
    exe = shutil.which("quml")
    cmd = [exe] if exe else [sys.executable, "-m", "quml"]
    res = subprocess.run(cmd + ["check", str(CORPUS / "shor.quml")], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout == ""
    res = subprocess.run([sys.executable, "-m", "quml", "explain", "E020"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "Principle 3" in res.stdout
