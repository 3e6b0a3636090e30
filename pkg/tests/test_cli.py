import json
import subprocess
import sys

import pytest

from graphfk.cli import main


def write(tmp_path, fname, adj, **extra):
    path = tmp_path / fname
    path.write_text(json.dumps({"vertices": len(adj), "adjacency": adj, **extra}))
    return str(path)


def intro(tmp_path, n):
    return write(tmp_path, f"e{n}.json", [[0, 0, 0], [n, 3, 0], [1, 1, 3]], name=f"E{n}")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_fk_report(tmp_path, capsys):
    code, out, _ = run(capsys, "fk", intro(tmp_path, 1))
    assert code == 0
    assert "{3}        K0 = Z " in out and "[2,3]      K0 = Z " in out
    assert out.count("K1 = 0") == 7          # six pieces and the whole algebra
    assert "cone: generated by (1,)" in out


def test_fk_json_round_trip(tmp_path, capsys):
    code, first, _ = run(capsys, "fk", intro(tmp_path, 2), "--json")
    assert code == 0
    data = json.loads(first)
    assert {P["piece"]: P["K0"]["describe"] for P in data["pieces"]}["[1,3]"] == "Z/4 + Z"
    again = tmp_path / "dump.json"
    again.write_text(first)
    _, second, _ = run(capsys, "fk", str(again), "--json")
    assert first == second


def test_fk_dot(tmp_path, capsys):
    out = tmp_path / "lat.dot"
    assert run(capsys, "fk", intro(tmp_path, 1), "--dot", str(out))[0] == 0
    dot = out.read_text()
    assert dot.startswith("digraph")
    assert dot.count("style=solid") == 1 and dot.count("style=dashed") == 2


def test_fk_sinks_and_nonlinear(tmp_path, capsys):
    code, out, _ = run(capsys, "fk", write(tmp_path, "s.json", [[0, 0], [0, 0]]))
    assert code == 0
    assert "whole algebra: K0 = Z^2" in out and "(1, 0), (0, 1)" in out
    code, out, _ = run(capsys, "fk", write(tmp_path, "c2.json",
                                           [[0, 0, 0, 0], [1, 3, 0, 0], [1, 0, 3, 0], [2, 0, 0, 3]]))
    assert code == 0 and "notice:" in out
    code, out, _ = run(capsys, "fk", write(tmp_path, "v.json", [[0, 1, 1], [0, 0, 0], [0, 0, 0]]))
    assert code == 0 and "K-data of each ideal only" in out


@pytest.mark.parametrize("content", ['{"vertices": 0, "adjacency": []}', "not json",
                                     '{"vertices": 2, "adjacency": [[0, 1]]}',
                                     '{"vertices": 1, "adjacency": [[-1]]}', "[1, 2]"])
def test_fk_bad_input(tmp_path, capsys, content):
    path = tmp_path / "bad.json"
    path.write_text(content)
    code, _, err = run(capsys, "fk", str(path))
    assert code == 64 and "graphfk:" in err


def test_missing_file(tmp_path, capsys):
    assert run(capsys, "fk", str(tmp_path / "nope.json"))[0] == 66
    assert run(capsys, "classify", str(tmp_path / "a.json"), intro(tmp_path, 1))[0] == 66


def test_classify_exit_codes(tmp_path, capsys):
    e1, e2, e3 = (intro(tmp_path, n) for n in (1, 2, 3))
    code, out, _ = run(capsys, "classify", e1, e3)
    assert code == 0 and "witness" in out
    code, out, _ = run(capsys, "classify", e1, e2)
    assert code == 1 and "obstruction" in out
    loop = write(tmp_path, "loop.json", [[1]])
    code, out, _ = run(capsys, "classify", loop, e1)
    assert code == 3 and "Condition (K)" in out and "ideal lattice" in out
    code, out, _ = run(capsys, "classify", e1, e3, "--json", "--bound", "5")
    assert code == 0 and json.loads(out)["status"] == "isomorphic"


def test_classify_unknown_maps_to_two(tmp_path, capsys, monkeypatch):
    from graphfk import cli
    from graphfk.classify import PairReport, Status, Verdict
    monkeypatch.setattr(cli, "classify_pair", lambda a, b, bound: PairReport(
        True, "forced", verdict=Verdict(Status.UNKNOWN, search_complete=False)))
    e1 = intro(tmp_path, 1)
    assert run(capsys, "classify", e1, e1)[0] == 2


def test_sweep(capsys):
    code, out, _ = run(capsys, "sweep", "--template", "intro", "--range", "1..12")
    assert code == 0 and "3 classes" in out and "0 disagreements, 0 unknown" in out
    code, out, _ = run(capsys, "sweep", "--template", "caseII", "--p", "2", "--range", "1..2",
                       "--json")
    assert code == 0 and json.loads(out)["count"] == 4
    code, out, _ = run(capsys, "sweep", "--template", "caseI", "--p", "3", "--range", "2..2")
    assert code == 0 and "1 classes" in out


@pytest.mark.parametrize("argv", [["sweep", "--template", "bogus", "--range", "1..2"],
                                  ["sweep", "--template", "intro", "--range", "x"],
                                  ["sweep", "--template", "caseI", "--p", "4", "--range", "1..2"],
                                  ["sweep", "--template", "intro", "--range", "3..1"],
                                  ["frobnicate"], []])
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        code = main(argv)
        raise SystemExit(code)
    assert exc.value.code == 64


def test_module_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "graphfk", "--seed", "3", "fk", intro(tmp_path, 4)],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "Z/2 + Z" in r.stdout
