import json
import subprocess
import sys

import pytest

from finlang import corpus, from_json, validate
from finlang.cli import main

CORPUS = corpus.entries()


def path_of(name, tmp_path):
    p = tmp_path / f"{name}.hors"
    p.write_text(corpus.entry(name).text)
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_exit_codes(capsys, tmp_path):
    code, out, _ = run(capsys, "check", path_of("p1", tmp_path))
    assert code == 1 and out.splitlines()[0] == "INFINITE" and "time:" in out
    code, out, _ = run(capsys, "check", path_of("p3", tmp_path))
    assert code == 0 and out.splitlines()[0] == "FINITE"


def test_malformed_input(capsys, tmp_path):
    bad = tmp_path / "bad.hors"
    bad.write_text("symbol e 0\nS = (e\n")
    code, _, err = run(capsys, "check", str(bad))
    assert code == 2 and "line 2" in err
    code, _, err = run(capsys, "check", str(tmp_path / "missing.hors"))
    assert code == 2


def test_json_is_deterministic(capsys, tmp_path):
    p = path_of("p2", tmp_path)
    _, a, _ = run(capsys, "check", p, "--format", "json")
    _, b, _ = run(capsys, "check", p, "--format", "json", "--threads", "3")
    assert a == b and "time" not in json.loads(a)
    assert json.loads(a)["verdict"] == "INFINITE"


def test_derive(capsys, tmp_path):
    code, out, _ = run(capsys, "derive", path_of("p1", tmp_path), "--target", "(2,{},{0,1},o)",
                       "--min-counter", "2", "--format", "json")
    d = from_json(out)
    assert code == 0 and d.counter >= 2 and validate(d).ok
    ident = tmp_path / "id.hors"
    ident.write_text("symbol e 0\nI x = x\nS = I e\n")
    code, out, _ = run(capsys, "derive", str(ident), "--nonterminal", "I",
                       "--target", "(2,{1},{},{(1,{},{0},o)}->o)")
    assert code == 1 and out.strip() == "NOT FOUND"


def test_bad_target_is_usage_error(capsys, tmp_path):
    with pytest.raises(SystemExit) as info:
        main(["derive", path_of("p1", tmp_path), "--target", "(2,{1"])
    assert info.value.code == 2


def test_enumerate_and_bohm(capsys, tmp_path):
    code, out, _ = run(capsys, "enumerate", path_of("p1", tmp_path), "--max-size", "10")
    assert [len(line.split("(")) - 1 for line in out.splitlines()] == [2, 3, 5, 9]
    _, out, _ = run(capsys, "enumerate", path_of("p2", tmp_path), "--format", "json")
    assert json.loads(out)["sizes"] == [3, 7]
    _, out, _ = run(capsys, "bohm", path_of("leaf", tmp_path), "--depth-fuel", "1")
    assert out.strip() == "(e)"


def test_growth(capsys, tmp_path):
    _, out, _ = run(capsys, "growth", path_of("p1", tmp_path), "--format", "json")
    rows = [json.loads(line) for line in out.splitlines()]
    assert [r["largest"] for r in rows] == [3, 9, 17]
    _, out, _ = run(capsys, "growth", path_of("p3", tmp_path), "--schedule", "3,6")
    assert "not strictly increasing" in out


def test_dot(capsys, tmp_path):
    _, out, _ = run(capsys, "check", path_of("p1", tmp_path), "--format", "dot")
    assert out.startswith('digraph "witness"')
    _, out, _ = run(capsys, "check", path_of("loop", tmp_path), "--format", "dot")
    assert out.startswith("digraph")


def test_console_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "finlang", "check", path_of("p4", tmp_path)],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("FINITE")
