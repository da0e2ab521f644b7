import json
import subprocess
import sys

import pytest

from commitorder.cli import fixture_path, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, "--format", "json", *argv)
    return code, json.loads(out)


def test_validate(capsys):
    assert run(capsys, "validate", "example_3_1.json")[0] == 0
    code, out, _ = run(capsys, "validate", "bad_partition.json")
    assert code == 1 and "A3" in out and "A4" in out


def test_evaluate_fixture_pair_flags_reference(capsys):
    code, doc = run_json(
        capsys, "evaluate", "example_3_1.json",
        "--g1", "example_3_1_s1_first_g1.json", "--g2", "example_3_1_s1_first_g2.json", "--reference", "s1_first",
    )
    assert code == 0
    text = json.dumps(doc)
    assert "27/20" in text and "39/20" in text


def test_solve_then_evaluate_report(capsys, tmp_path):
    code, doc = run_json(capsys, "solve", "example_3_1.json", "--order", "s2_first")
    assert code == 0 and doc["utilities"]["s1"]["exact"] == "13/10"
    report = tmp_path / "r.json"
    report.write_text(json.dumps(doc))
    code, again = run_json(capsys, "evaluate", "example_3_1.json", "--pair", str(report))
    assert code == 0 and "11/5" in json.dumps(again)
    code, ver = run_json(capsys, "verify", "example_3_1.json", "--order", "s2_first", "--pair", str(report))
    assert code == 0 and ver["passed"]


def test_compare_orders_text(capsys):
    code, out, _ = run(capsys, "compare-orders", "example_3_1.json")
    assert code == 0
    assert "order matters" in out and "(1/20, 1/4)" in out and "note:" in out


def test_check_necessary(capsys):
    code, out, _ = run(capsys, "check", "example_3_1.json", "--which", "necessary")
    assert code == 0 and "TR" in out


def test_check_proposition_json(capsys):
    code, doc = run_json(capsys, "check", "example_3_1.json", "--which", "proposition")
    assert code == 0 and "satisfied" in json.dumps(doc)


def test_simulate(capsys):
    code, doc = run_json(
        capsys, "simulate", "example_3_1.json", "--g1", "example_3_1_s1_first_g1.json",
        "--g2", "example_3_1_s1_first_g2.json", "--samples", "20000", "--seed", "3",
    )
    assert code == 0
    assert doc["estimate"]["samples"] == 20000 and doc["estimate"]["seed"] == 3
    assert doc["exact"]["s1"]["exact"] == "27/20"


def test_verify_failure_exit_code(capsys):
    code, _, _ = run(
        capsys, "verify", "example_4_1.json", "--order", "s1_first",
        "--g1", "example_4_1_s1_first_g1.json", "--g2", "example_4_1_s1_first_g2.json",
    )
    assert code == 1


@pytest.mark.parametrize(
    "argv",
    [
        ["solve", "no_such_file.json", "--order", "s1_first"],
        ["solve", "example_3_1.json", "--order", "s1_first", "--step", "2/7"],
        ["evaluate", "example_3_1.json", "--g1", "example_3_1_s1_first_g1.json"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("error")


def test_unknown_verb_and_help(capsys):
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "--help")[0] == 0


def test_fixture_lookup():
    assert fixture_path("silence.json").exists()


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "commitorder", "validate", "silence.json"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout
