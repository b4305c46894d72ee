"""Command-line behavior: output, exit codes, tracing."""

import subprocess
import sys
from pathlib import Path

from monoref.cli import (
    EXIT_CAST_ERROR,
    EXIT_OK,
    EXIT_PARSE_ERROR,
    EXIT_STUCK,
    EXIT_TIMEOUT,
    EXIT_TYPE_ERROR,
    main,
    observable_exit_code,
    render_observable,
)
from monoref.lang import (
    BoolC,
    IntC,
    OCon,
    O_ADDR,
    O_CASTERROR,
    O_FUN,
    O_INJ,
    O_STUCK,
    O_TIMEOUT,
    OPair,
)

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"

LOOPING_PROGRAM = """
(let (r (ref (-> int int) (lambda (x : int) x)))
  (begin
    (:= r (lambda (x : int) ((! r) x)))
    ((! r) 0)))
"""


def corpus(name):
    return str(CORPUS / f"{name}.gtlc")


def test_render_observable():
    assert render_observable(OCon(IntC(42))) == "42"
    assert render_observable(OCon(IntC(-3))) == "-3"
    assert render_observable(OCon(BoolC(True))) == "#t"
    assert render_observable(OCon(BoolC(False))) == "#f"
    assert render_observable(OPair(OCon(IntC(1)), O_FUN)) == "(pair 1 #fun)"
    assert render_observable(O_ADDR) == "#addr"
    assert render_observable(O_INJ) == "#inj"
    assert render_observable(O_STUCK) == "error: stuck"
    assert render_observable(O_TIMEOUT) == "timeout"
    assert render_observable(O_CASTERROR) == "error: cast"


def test_exit_code_mapping():
    assert observable_exit_code(OCon(IntC(1))) == EXIT_OK
    assert observable_exit_code(O_CASTERROR) == EXIT_CAST_ERROR
    assert observable_exit_code(O_STUCK) == EXIT_STUCK
    assert observable_exit_code(O_TIMEOUT) == EXIT_TIMEOUT


def test_check_prints_type(capsys):
    assert main(["check", corpus("ex2")]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "int"


def test_check_parse_error(capsys):
    assert main(["check", corpus("bad-paren")]) == EXIT_PARSE_ERROR
    assert "paren" in capsys.readouterr().err


def test_check_type_error(capsys):
    assert main(["check", corpus("ill-typed")]) == EXIT_TYPE_ERROR
    assert "type error" in capsys.readouterr().err


def test_check_missing_file(capsys):
    assert main(["check", str(CORPUS / "no-such-file.gtlc")]) == \
        EXIT_PARSE_ERROR


def test_run_monotonic_cast_error(capsys):
    assert main(["run", corpus("ex1"), "--semantics", "monotonic"]) == \
        EXIT_CAST_ERROR
    assert capsys.readouterr().out.strip() == "error: cast"


def test_run_guarded_value(capsys):
    assert main(["run", corpus("ex1"), "--semantics", "guarded"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "#t"


def test_run_cycle(capsys):
    assert main(["run", corpus("cycle")]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "42"


def test_run_timeout(tmp_path, capsys):
    path = tmp_path / "loop.gtlc"
    path.write_text(LOOPING_PROGRAM)
    assert main(["run", str(path), "--fuel", "500"]) == EXIT_TIMEOUT
    assert capsys.readouterr().out.strip() == "timeout"


def test_fuel_env_fallback(tmp_path, capsys, monkeypatch):
    path = tmp_path / "loop.gtlc"
    path.write_text(LOOPING_PROGRAM)
    monkeypatch.setenv("MONOREF_FUEL", "300")
    assert main(["run", str(path)]) == EXIT_TIMEOUT
    monkeypatch.delenv("MONOREF_FUEL")


def test_fuel_env_rejects_garbage(capsys, monkeypatch):
    monkeypatch.setenv("MONOREF_FUEL", "plenty")
    assert main(["run", corpus("ex2")]) == EXIT_PARSE_ERROR
    assert "MONOREF_FUEL" in capsys.readouterr().err
    monkeypatch.delenv("MONOREF_FUEL")


def test_fuel_must_be_positive(capsys):
    import pytest

    with pytest.raises(SystemExit):
        main(["run", corpus("ex2"), "--fuel", "0"])


def test_trace_streams_records(capsys):
    assert main(["run", corpus("cycle"), "--trace"]) == EXIT_OK
    out, err = capsys.readouterr()
    assert out.strip() == "42"
    lines = [line for line in err.splitlines() if line]
    assert lines, "trace must produce records"
    for line in lines:
        index, rule, active_len, heap_size = line.split("\t")
        int(index), int(active_len), int(heap_size)
        assert rule
    assert [int(line.split("\t")[0]) for line in lines] == \
        list(range(len(lines)))


def test_trace_works_under_guarded_semantics(capsys):
    assert main(["run", corpus("cycle"), "--semantics", "guarded",
                 "--trace"]) == EXIT_OK
    out, err = capsys.readouterr()
    assert out.strip() == "42"
    lines = [line for line in err.splitlines() if line]
    assert lines
    assert all(len(line.split("\t")) == 4 for line in lines)


def test_diff_differ(capsys):
    assert main(["diff", corpus("ex1")]) == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "monotonic: error: cast"
    assert out[1] == "guarded: #t"
    assert out[2] == "DIFFER"


def test_diff_agree(capsys):
    assert main(["diff", corpus("ex2")]) == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "monotonic: 4"
    assert out[1] == "guarded: 4"
    assert out[2] == "AGREE"


def test_diff_ex3(capsys):
    assert main(["diff", corpus("ex3")]) == EXIT_OK
    assert capsys.readouterr().out.splitlines()[2] == "DIFFER"


def test_compile_roundtrip(capsys):
    assert main(["compile", corpus("ex2")]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.count("(") == out.count(")")
    assert "(alloc" in out and "(tailcall" in out


def test_compile_propagates_type_error(capsys):
    assert main(["compile", corpus("ill-typed")]) == EXIT_TYPE_ERROR


def test_diff_propagates_parse_error(capsys):
    assert main(["diff", corpus("bad-paren")]) == EXIT_PARSE_ERROR
    assert main(["diff", corpus("ill-typed")]) == EXIT_TYPE_ERROR


def test_console_script_entry():
    result = subprocess.run(
        [sys.executable, "-m", "monoref.cli", "run", corpus("ex2")],
        capture_output=True, text=True)
    assert result.returncode == EXIT_OK
    assert result.stdout.strip() == "4"
