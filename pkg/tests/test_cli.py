import json
import os

import jsonschema
import pytest

from slope1 import cli


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def load_schema():
    path = os.path.join(os.path.dirname(cli.__file__), "result.schema.json")
    with open(path) as fh:
        return json.load(fh)


def test_reduce_delta_example(capsys):
    code, out, _ = run_cli(capsys, "reduce", "--p", "5", "--k", "12",
                           "--ap", "4830", "--ramification", "--llc")
    assert code == 0
    obj = json.loads(out)
    assert obj["ramification"] == "tres_ramifiee"
    jsonschema.validate(obj, load_schema())


def test_reduce_output_validates_against_schema(capsys):
    schema = load_schema()
    for argv in (
        ("reduce", "--p", "7", "--k", "12", "--ap", "-16744", "--llc"),
        ("reduce", "--p", "5", "--k", "11", "--ap", "5"),
        ("reduce", "--p", "5", "--k", "27", "--ap", "15", "--ramification"),
    ):
        code, out, _ = run_cli(capsys, *argv)
        assert code == 0
        jsonschema.validate(json.loads(out), schema)


def test_exit_code_insufficient_precision(capsys):
    code, _, err = run_cli(capsys, "reduce", "--p", "5", "--k", "12",
                           "--ap", "1:1")
    assert code == 2
    assert "needed_precision=3" in err


def test_exit_code_hypothesis_violation(capsys):
    code, _, err = run_cli(capsys, "reduce", "--p", "5", "--k", "12",
                           "--ap", "26")
    assert code == 3
    assert "hypothesis_violation" in err


def test_verify_witness_single_case(capsys):
    code, out, _ = run_cli(capsys, "verify", "witnesses", "--case", "W4",
                           "--p", "5", "--r", "13")
    assert code == 0
    summary = json.loads(out.strip().splitlines()[-1])
    assert summary == {"failures": 0, "ran": 1, "status": "pass",
                       "suite": "witnesses"}


def test_verify_lemmas_small(capsys):
    code, out, _ = run_cli(capsys, "verify", "lemmas", "--p", "5",
                           "--rmax", "40")
    assert code == 0
    assert json.loads(out.strip().splitlines()[-1])["status"] == "pass"


def test_verify_structure_range(capsys):
    code, out, _ = run_cli(capsys, "verify", "structure", "--p", "5",
                           "--r", "20..26")
    assert code == 0
    summary = json.loads(out.strip().splitlines()[-1])
    assert summary["status"] == "pass" and summary["ran"] > 0


def test_cache_replay_is_byte_identical(tmp_path, capsys):
    cache = str(tmp_path / "cache.jsonl")
    args = ("--cache", cache, "reduce", "--p", "5", "--k", "12",
            "--ap", "4830")
    _, first, _ = run_cli(capsys, *args)
    with open(cache) as fh:
        records = [json.loads(line) for line in fh]
    assert len(records) == 1
    assert records[0]["command"] == "reduce"
    _, second, _ = run_cli(capsys, *args)
    assert first == second
    with open(cache) as fh:
        assert len(fh.readlines()) == 1  # replay did not recompute


def test_cache_env_variable(tmp_path, capsys, monkeypatch):
    cache = str(tmp_path / "env_cache.jsonl")
    monkeypatch.setenv("SLOPE1_CACHE", cache)
    run_cli(capsys, "reduce", "--p", "5", "--k", "12", "--ap", "4830")
    assert os.path.exists(cache)


def test_sweep_and_empty_grid(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "sweep", "--p", "5", "--r", "10",
                           "--apmod", "1")
    assert code == 0
    lines = [l for l in out.splitlines() if l]
    assert len(lines) == 4  # units mod 5
    code, out, _ = run_cli(capsys, "sweep", "--p", "5", "--r", "10",
                           "--apmod", "0")
    assert code == 0 and not out.strip()


def test_text_format(capsys):
    code, out, _ = run_cli(capsys, "reduce", "--p", "7", "--k", "12",
                           "--ap", "-16744", "--format", "text")
    assert code == 0
    assert out.startswith("p=7 k=12")
