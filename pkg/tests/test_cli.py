import json
import subprocess
import sys

import pytest

from gact.cli import main
from gact.structure import GStructure, make_structure


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_decide_example(capsys):
    code, out, _ = run(["decide", "--theory", "empty", "--group", "z2", "--formula", "E y. s·y != y"],
                       capsys)
    assert code == 0 and out.strip() == "true"


def test_qe_example(capsys):
    code, out, _ = run(["qe", "--theory", "graph", "--group", "z2", "--formula", "E y. R(y,x)"], capsys)
    assert code == 0 and out.strip() == "true"
    code, out, _ = run(["qe", "--group", "z2", "--formula", "E y. R(y,x) & !R(y,s·x)", "--json",
                        "--certificate"], capsys)
    payload = json.loads(out)
    assert code == 0 and payload["output"] == "x != s·x" and payload["certificate"]


def test_malformed_formula_is_a_usage_error(capsys):
    code, _, err = run(["qe", "--group", "z2", "--formula", "E y. R(y,"], capsys)
    assert code == 2
    assert json.loads(err)["error"] == "SyntaxError" and "position" in json.loads(err)


def test_exit_codes(capsys):
    assert run(["nosuch"], capsys)[0] == 2
    assert run(["decide", "--group", "z2"], capsys)[0] == 2
    assert run(["group", "info", "no-such-group"], capsys)[0] == 2
    code, _, err = run(["qe", "--theory", "empty", "--group", "z2", "--formula", "E y. R(y,x)"], capsys)
    assert code == 1 and json.loads(err)["error"] == "UnsupportedSignature"


def test_group_commands(capsys):
    code, out, _ = run(["group", "frattini", "z4", "--target", "z2"], capsys)
    assert code == 0 and out.strip().endswith("true")
    code, out, _ = run(["group", "info", "s3", "--json"], capsys)
    assert json.loads(out)["order"] == 6 and len(json.loads(out)["subgroups"]) == 6


def test_structure_file_round_trip(tmp_path, capsys):
    path = tmp_path / "m.json"
    code, out, err = run(["saturate", "--group", "z2", "--rounds", "1", "--out", str(path)], capsys)
    assert code == 0 and json.loads(err)["size"] > 0
    text = path.read_text()
    m = GStructure.loads(text)
    assert m.dumps() + "\n" == text
    x = m.universe[0]
    code, out, _ = run(["eval", "--model", str(path), "--formula", "x = x", "--assign", f"x={x}"], capsys)
    assert code == 0 and out.strip() == "true"
    code, out, _ = run(["indep", "--model", str(path), "--a", x, "--b", x, "--e", x], capsys)
    assert code == 0 and out.strip() == "true"
    small = tmp_path / "three.json"
    small.write_text(make_structure("empty", 3).dumps())
    code, out, _ = run(["galois", "check", "--model", str(small)], capsys)
    assert code == 0 and out.split() == ["laws", "true", "full", "correspondence", "false"]
    code, out, _ = run(["galois", "beta", "--model", str(small), "--inter", "v2"], capsys)
    assert code == 0 and out.strip() == "v2"
    code, _, err = run(["galois", "aut", "--model", str(small), "--cap-size", "2"], capsys)
    assert code == 1 and json.loads(err)["error"] == "BoundExceeded"


def test_seed_from_environment(monkeypatch, tmp_path, capsys):
    argv = ["indep-axioms", "--trials", "5", "--group", "z2,z3"]
    monkeypatch.setenv("GACT_SEED", "11")
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    assert run(argv + ["--report", str(a)], capsys)[0] == 0
    assert run(argv + ["--report", str(b)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.read_text())["seed"] == 11
    monkeypatch.setenv("GACT_SEED", "not-a-number")
    assert run(argv, capsys)[0] == 2


def test_boolring_commands(tmp_path, capsys):
    gi, gj = tmp_path / "i.txt", tmp_path / "j.txt"
    gi.write_text("0\n")
    gj.write_text("t[1,1]\n")
    code, out, _ = run(["boolring", "diamond", "--atoms", "1", "--group", "z1", "--gens-i", str(gi),
                        "--gens-j", str(gj)], capsys)
    assert code == 0 and out.strip() == "1"
    code, out, _ = run(["boolring", "nonatom", "--atoms", "2", "--group", "z2", "--atom-action",
                        "s=2,1", "--element", "{1}", "--json"], capsys)
    payload = json.loads(out)
    assert code == 0 and set(payload["y"]) < set(payload["r"])
    gj.write_text("0\n")
    code, _, err = run(["boolring", "diamond", "--atoms", "1", "--group", "z1", "--gens-i", str(gi),
                        "--gens-j", str(gj)], capsys)
    assert code == 1 and json.loads(err)["error"] == "NotProperlyContained"


def test_config_commands(capsys):
    code, out, _ = run(["config", "enumerate", "--group", "z1", "--n", "0", "--n-prime", "2"], capsys)
    assert code == 0 and out.strip() == "3"
    code, out, _ = run(["config", "check", "--group", "z2", "--n", "0", "--n-prime", "1",
                        "--entries", "R"], capsys)
    assert code == 0 and out.strip() == "consistent"


@pytest.mark.parametrize("argv", [["--help"], ["qe", "--help"]])
def test_help_exits_cleanly(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 0


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "gact.cli", "decide", "--theory", "graph",
                           "--group", "z3", "--formula", "A x. x = x"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.strip() == "true"
