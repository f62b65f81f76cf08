import csv
import json
import subprocess
import sys

import pytest

from commex.cli import main

TWO_K5 = "".join(f"{i} {j}\n" for i in range(5) for j in range(i + 1, 5))
TWO_K5 += "".join(f"{i + 5} {j + 5}\n" for i in range(5) for j in range(i + 1, 5))
TWO_K5 += "4 5\n"


@pytest.fixture
def edges(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text(TWO_K5)
    return p


def test_extract_json_and_score(edges, tmp_path, capsys):
    out = tmp_path / "res.json"
    assert main(["extract", str(edges), "--min-size", "3", "--json", str(out)]) == 0
    text = capsys.readouterr().out
    assert "community 1: size 5" in text
    doc = json.loads(out.read_text())
    assert doc["criterion"] == "adjusted"
    assert sorted(doc["communities"][0]["members"]) in ([0, 1, 2, 3, 4], [5, 6, 7, 8, 9])

    labels = tmp_path / "labels.txt"
    labels.write_text("".join(f"{i} {int(i >= 5)}\n" for i in range(10)))
    assert main(["score", str(edges), str(labels), str(out)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "rank size ppv npv matched_class"
    assert lines[1].split()[2:4] == ["1.0000", "1.0000"]


def test_partition_and_eigvec(edges, tmp_path, capsys):
    ev = tmp_path / "ev.txt"
    assert main(["partition", str(edges), "--eigvec", str(ev)]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0].startswith("# K=2")
    groups = dict(line.split() for line in out[1:])
    assert len({groups[str(i)] for i in range(5)}) == 1
    assert groups["0"] != groups["9"]
    comps = [float(line.split()[1]) for line in ev.read_text().splitlines()[1:]]
    assert len(comps) == 10 and (comps[0] > 0) != (comps[9] > 0)


def test_simulate(tmp_path, capsys):
    sc = tmp_path / "sc.json"
    sc.write_text(json.dumps({"design": "toy", "methods": ["adjusted"], "tabu": {"restarts": 2}}))
    out, svg = tmp_path / "r.csv", tmp_path / "r.svg"
    assert main(["simulate", str(sc), "--reps", "2", "--out", str(out), "--plot", str(svg)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 2 and rows[0]["method"] == "adjusted"
    assert svg.read_text().startswith("<svg")
    assert "adjusted: PPV" in capsys.readouterr().err


def test_simulate_deterministic_bytes(tmp_path):
    sc = tmp_path / "sc.json"
    sc.write_text(json.dumps({"design": "toy", "seed": 17}))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["simulate", str(sc), "--reps", "1", "--out", str(a)]) == 0
    assert main(["simulate", str(sc), "--reps", "1", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_verify_theory(capsys):
    assert main(["verify-theory"]) == 0
    out = capsys.readouterr().out
    assert "consistency conditions: hold" in out
    assert "t1*=0.437500 t2*=0.562500" in out
    assert out.count("truth recovered") == 2


def test_input_errors_exit_1(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("0 1\n1\n")
    assert main(["extract", str(bad)]) == 1
    assert "line 2" in capsys.readouterr().err
    assert main(["extract", str(tmp_path / "missing.txt")]) == 1
    loops = tmp_path / "loops.txt"
    loops.write_text("0 0\n1 1\n")
    assert main(["partition", str(loops)]) == 1
    sc = tmp_path / "sc.json"
    sc.write_text('{"design": "toy", "p_in": 2}')
    assert main(["simulate", str(sc)]) == 1


def test_infeasible_exit_2(edges, tmp_path):
    res = tmp_path / "res.json"
    res.write_text(json.dumps({"communities": [{"rank": 1, "score": 0, "members": list(range(10))}]}))
    labels = tmp_path / "labels.txt"
    labels.write_text("".join(f"{i} 0\n" for i in range(10)))
    assert main(["score", str(edges), str(labels), str(res)]) == 2


def test_console_entry_point(edges):
    proc = subprocess.run([sys.executable, "-m", "commex.cli", "extract", str(edges),
                           "--restarts", "2"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "background:" in proc.stdout
