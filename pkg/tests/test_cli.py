"""Golden tests for the command-line interface."""
import json
import subprocess
import sys
from pathlib import Path

import pytest

from dmsec.cli import main

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture(scope="module")
def cases(tmp_path_factory):
    root = tmp_path_factory.mktemp("cases")
    for name in ["starlight", "starlight-mutant", "smartgrid"]:
        assert main(["casestudy", name, "-o", str(root / name)]) == 0
    return root


def test_casestudy_writes_golden_files(cases):
    for f in ["machine.json", "policy.json"]:
        got = (cases / "starlight" / f).read_text(encoding="utf-8")
        assert got == (GOLDEN / f"starlight_{f}").read_text(encoding="utf-8")
    assert (cases / "smartgrid" / "invariants.txt").exists()


@pytest.mark.parametrize("golden, argv, code", [
    ("starlight_filter.json", ["check-filter", "{s}/machine", "{s}/policy", "--edge", "S:L", "--fixpoint"], 0),
    ("starlight_compliance.json", ["check-compliance", "{s}/machine.json", "{s}/policy.json", "--depth", "8"], 0),
    ("starlight_unwinding.json", ["check-unwinding", "{s}/machine", "{s}/policy", "--depth", "7"], 0),
    ("mutant_filter.json", ["check-filter", "{m}/machine", "{m}/policy", "--edge", "S:L"], 1),
    ("mutant_compliance.json", ["check-compliance", "{m}/machine", "{m}/policy", "--depth", "6"], 1),
    ("starlight_compose.json", ["compose", "{s}/machine"], 0),
])
def test_golden_reports(capsys, cases, golden, argv, code):
    argv = [a.format(s=cases / "starlight", m=cases / "starlight-mutant") for a in argv]
    got_code, out, _ = run(capsys, *argv, "--json")
    assert got_code == code
    assert out == (GOLDEN / golden).read_text(encoding="utf-8")


def test_explore_depth_zero(capsys, cases):
    assert run(capsys, "explore", str(cases / "starlight" / "machine"), "--depth", "0", "--count-only") == (0, "1\n", "")


def test_explore_lists_traces(capsys, cases):
    code, out, _ = run(capsys, "explore", str(cases / "starlight" / "machine"), "--depth", "1")
    assert code == 0
    assert out.splitlines() == ["ε", "!cmd", "!toggle", "3 executions, 3 distinct states"]


def test_human_counterexample_uses_action_notation(capsys, cases):
    m = cases / "starlight-mutant"
    code, out, _ = run(capsys, "check-compliance", str(m / "machine"), str(m / "policy"), "--depth", "6")
    assert code == 1
    assert "compliance: FAIL" in out
    assert "  2. ?S cmd" in out and "  3. !cmdL" in out
    assert "wall time" in out


def test_counterexamples_replay(capsys, cases, tmp_path):
    m = cases / "starlight-mutant"
    for argv in (["check-compliance", str(m / "machine"), str(m / "policy"), "--depth", "6"],
                 ["check-filter", str(m / "machine"), str(m / "policy"), "--edge", "S:L"]):
        _, out, _ = run(capsys, *argv, "--json")
        f = tmp_path / "cex.json"
        f.write_text(out)
        code, text, _ = run(capsys, "replay", str(m / "machine"), str(m / "policy"), "--counterexample", str(f))
        assert code == 1 and text.startswith("CONFIRMED")


def test_replay_rejects_foreign_counterexample(capsys, cases, tmp_path):
    f = tmp_path / "cex.json"
    f.write_text(json.dumps({"kind": "filter", "edge": ["S", "L"], "delta": ["?S toggle"], "a": "!cmdL"}))
    s = cases / "starlight"
    code, text, _ = run(capsys, "replay", str(s / "machine"), str(s / "policy"), "--counterexample", str(f))
    assert code == 0 and text.startswith("NOT CONFIRMED")
    f.write_text(json.dumps({"kind": "compliance", "domain": "L", "alpha": ["?S cmd"], "beta": []}))
    code, _, err = run(capsys, "replay", str(s / "machine"), str(s / "policy"), "--counterexample", str(f))
    assert code == 2 and "does not replay" in err


def test_implicit_policy_command(capsys, cases, tmp_path):
    out = tmp_path / "implicit.json"
    assert run(capsys, "implicit-policy", str(cases / "starlight" / "machine"), "-o", str(out))[0] == 0
    doc = json.loads(out.read_text())
    assert doc["monitors"] == []
    assert {"from": "S", "to": "L"} in doc["edges"]
    # without the filter the mutant switch is compliant with its implicit policy
    m = cases / "starlight-mutant"
    assert run(capsys, "check-compliance", str(m / "machine"), str(out), "--depth", "5")[0] == 0


def test_smartgrid_commands(capsys, cases):
    g = cases / "smartgrid"
    lines = (g / "invariants.txt").read_text().splitlines()[1:]
    for pred in lines:
        code, out, _ = run(capsys, "check-invariant", str(g / "machine"), "--process", "SMG", "--predicate", pred,
                           "--define", "LB=-3", "--define", "UB=3")
        assert code == 0, out
    code, out, _ = run(capsys, "check-filter", str(g / "machine"), str(g / "policy"), "--all", "--json")
    assert code == 0
    assert [r["parameters"]["edge"] for r in json.loads(out)["edges"]] == ["SMG:Pr_1", "SMG:Pr_2", "SMG:Pr_3"]


def test_resource_limit_exit_code(capsys, cases):
    s = cases / "starlight"
    code, out, _ = run(capsys, "check-compliance", str(s / "machine"), str(s / "policy"), "--max-states", "100", "--json")
    assert code == 3
    assert json.loads(out)["verdict"] == "resource-limit"


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["explore", "nonexistent.json", "--depth", "1"],
    ["check-filter", "a", "b", "--edge", "nocolon"],
    ["check-invariant", "m", "--process", "P", "--predicate", "x", "--define", "LB"],
    ["casestudy", "smartgrid", "-o", "/tmp/x", "--plan-min", "3", "--plan-max", "1"],
])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_input_errors(capsys, cases, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"processes": [], "surprise": true}')
    code, _, err = run(capsys, "compose", str(bad))
    assert code == 2 and "surprise" in err
    s = cases / "starlight"
    code, _, err = run(capsys, "check-filter", str(s / "machine"), str(s / "policy"), "--edge", "U:S")
    assert code == 2 and "no filter" in err
    code, _, err = run(capsys, "check-invariant", str(s / "machine"), "--process", "S", "--predicate", "(")
    assert code == 2


def test_selfcheck_small(capsys):
    code, out, _ = run(capsys, "selfcheck", "--seeds", "5", "--depth", "4", "--json")
    assert code == 0
    doc = json.loads(out)
    assert [s["checked"] for s in doc["suites"]] == [5, 5]


def test_module_entry_point(cases):
    proc = subprocess.run([sys.executable, "-m", "dmsec", "explore", str(cases / "starlight" / "machine"),
                           "--depth", "2", "--count-only"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "9\n"
