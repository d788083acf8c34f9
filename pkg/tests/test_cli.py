import json
import subprocess
import sys

import pytest

from chiralat.cli import EXIT_ERROR, EXIT_EXHAUSTED, EXIT_OK, EXIT_UNKNOWN, main


def test_vinberg_writes_run(tmp_path):
    out = tmp_path / "run.json"
    assert main(["vinberg", "--lattice", "U+A2", "--out", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert len(doc["roots"]) == 4
    assert doc["termination"]["status"] == "Terminated"


def test_vinberg_exhausted_exit_code(tmp_path):
    out = tmp_path / "run.json"
    code = main(["vinberg", "--lattice", "U+A2+A1+E8", "--max-level", "48", "--out", str(out)])
    assert code == EXIT_EXHAUSTED
    assert json.loads(out.read_text())["termination"]["status"] == "Exhausted"


def test_vinberg_explicit_base_point_and_json_spec(tmp_path, capsys):
    spec = json.dumps([{"kind": "U"}, {"kind": "A", "n": 2}])
    assert main(["vinberg", "--lattice", spec, "--base-point", "[1,-1,0,0]"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["base_point"] == [1, -1, 0, 0]


def test_coxeter_emits_dot(tmp_path):
    run = tmp_path / "run.json"
    dot = tmp_path / "g.dot"
    main(["vinberg", "--lattice", "U+A2", "--out", str(run)])
    assert main(["coxeter", "--run", str(run), "--dot", str(dot)]) == EXIT_OK
    text = dot.read_text()
    assert text.startswith("graph") and '"v4"' in text


def test_classify_verdicts(tmp_path):
    out = tmp_path / "v.json"
    assert main(["classify", "--lattice", "U+A2", "--out", str(out)]) == EXIT_OK
    assert json.loads(out.read_text())["verdict"] == "Chiral"
    assert main(["classify", "--lattice", "U(2)+E6(2)", "--out", str(out)]) == EXIT_UNKNOWN
    assert json.loads(out.read_text())["verdict"] == "Unknown"


@pytest.mark.parametrize("argv", [
    ["vinberg", "--lattice", "F4+U"],
    ["vinberg", "--lattice", "[{\"kind\": \"A\"}]"],
    ["vinberg", "--lattice", "U+A2", "--base-point", "[0,0,1,0]"],
    ["vinberg", "--lattice", "U+A2", "--base-point", "nope"],
    ["vinberg", "--lattice", "U+A2", "--max-level", "lots"],
    ["coxeter", "--run", "/nonexistent/run.json"],
    ["classify", "--lattice", "/nonexistent/spec.json"],
])
def test_errors_exit_1(argv, capsys):
    assert main(argv) == EXIT_ERROR
    assert "chiralat: error:" in capsys.readouterr().err


def test_corrupt_run_document(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{\"roots\": [")
    assert main(["coxeter", "--run", str(bad)]) == EXIT_ERROR
    bad.write_text(json.dumps({"lattice": [{"kind": "U"}, {"kind": "A", "n": 2}], "base_point": [1, -1, 0, 0],
                               "roots": [], "termination": {"status": "Running"}}))
    assert main(["coxeter", "--run", str(bad)]) == EXIT_ERROR


@pytest.mark.parametrize("value", ["0", "-2", "many"])
def test_bad_thread_count(monkeypatch, value):
    monkeypatch.setenv("CHIRALAT_THREADS", value)
    assert main(["vinberg", "--lattice", "U+A2"]) == EXIT_ERROR


def test_tables_subcommand(capsys):
    assert main(["tables", "--which", "T1"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "T1 U+A2: match, 4 roots" in out


def test_unknown_table_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["tables", "--which", "T9"])
    assert exc.value.code == 2


def test_module_entry_point(tmp_path):
    out = tmp_path / "run.json"
    proc = subprocess.run([sys.executable, "-m", "chiralat", "vinberg", "--lattice", "-A1+A2", "--out", str(out)],
                          capture_output=True, text=True)
    assert proc.returncode == EXIT_OK, proc.stderr
    assert len(json.loads(out.read_text())["roots"]) == 3


def test_negative_lattice_name_and_exhausted_example(tmp_path):
    out = tmp_path / "run.json"
    assert main(["vinberg", "--lattice", "-A1+A2", "--max-level", "11", "--out", str(out)]) == EXIT_EXHAUSTED
    assert main(["vinberg", "--lattice", "-A1+A2", "--max-level", "12", "--out", str(out)]) == EXIT_OK


def test_classify_timeout(tmp_path):
    out = tmp_path / "v.json"
    code = main(["classify", "--lattice", "U+A2+A1+E8", "--timeout", "0.1", "--out", str(out)])
    assert code == EXIT_UNKNOWN
    assert json.loads(out.read_text())["reason"].startswith("timed out")
    assert main(["classify", "--lattice", "U+A2", "--timeout", "120", "--out", str(out)]) == EXIT_OK
    assert main(["classify", "--lattice", "U+A2", "--timeout", "0"]) == EXIT_ERROR
