import json
import subprocess
import sys
from pathlib import Path

import pytest

from specfold.acceptance import names_only, _trim
from specfold.cli import main

DATA = Path(__file__).parent / "data"
GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_classify_a4(capsys):
    code, out, _ = run(capsys, "classify", "A4")
    assert code == 0
    assert out == "A4, representation finite, h=5\n"


def test_classify_file(capsys):
    code, out, _ = run(capsys, "--format", "json", "classify", DATA / "c3.json")
    assert code == 0
    assert json.loads(out) == {"type": "C3", "representation_finite": True, "h": 6}


def test_cyclic_file_exits_1(capsys):
    code, _, err = run(capsys, "classify", DATA / "cyc.json")
    assert code == 1
    assert err.startswith("NotDynkin")


def test_missing_file_exits_2(capsys):
    code, _, err = run(capsys, "classify", DATA / "missing.json")
    assert code == 2
    assert "input error" in err


def test_bad_json_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "classify", bad)[0] == 2
    bad.write_text(json.dumps({"vertices": [{"id": 1, "ext_degree": 4}], "arrows": []}))
    code, _, err = run(capsys, "classify", bad)
    assert code == 2
    assert "/vertices/0/ext_degree" in err


def test_bad_prime_exits_2(capsys):
    assert run(capsys, "--prime", "9", "classify", "A4")[0] == 2
    assert run(capsys, "--prime", "2", "classify", "A4")[0] == 2


@pytest.mark.parametrize("name,count", [("A2", 3), ("E6", 36), (DATA / "c3.json", 9)])
def test_ar_vertex_count(capsys, name, count):
    code, out, _ = run(capsys, "--format", "json", "ar", name)
    assert code == 0
    assert json.loads(out)["vertices"] == count
    assert len(json.loads(out)["modules"]) == count


def test_ar_dot(capsys):
    code, out, _ = run(capsys, "ar", DATA / "c3.json", "--dot")
    assert code == 0
    assert out.count("label=\"") == 9 + out.count("->")
    assert "τ^-" in out


def test_algebra_dump(capsys):
    code, out, _ = run(capsys, "algebra", "A2", "--dump")
    data = json.loads(out)
    assert code == 0
    assert len(data["basis"]) == 4
    assert data["hilbert"] == {"0,0": 2, "1,0": 1, "1,1": 1}
    assert all(len(row) == 3 for row in data["products"])


def test_algebra_certify(capsys):
    code, out, _ = run(capsys, "--format", "json", "algebra", "G2", "--certify")
    assert code == 0
    ak = json.loads(out)["almost_koszul"]
    assert (ak["p"], ak["q"]) == (4, 2)


def test_koszul_matches_golden(capsys):
    code, out, _ = run(capsys, "koszul", DATA / "d4.json", "--simple", "2")
    assert code == 0
    rep = json.loads(out)
    gold = json.loads((GOLDEN / "d4_koszul.json").read_text())
    assert names_only(rep["terms"]) == [sorted(t) for t in gold["terms"]]
    assert names_only(rep["split"]["Q"]) == [sorted(t) for t in gold["Q"]]
    assert _trim(names_only(rep["split"]["R"])) == [sorted(t) for t in gold["R"]]


def test_koszul_unknown_vertex(capsys):
    assert run(capsys, "koszul", "A3", "--simple", "9")[0] == 2


def test_segre_matches_golden(capsys):
    code, out, _ = run(capsys, "segre", "--left", DATA / "c3.json", "--right", DATA / "d4.json",
                       "--simple", "1,2")
    assert code == 0
    rep = json.loads(out)
    gold = json.loads((GOLDEN / "c3xd4_product.json").read_text())
    assert names_only(rep["terms"]) == [sorted(t) for t in gold["terms"]]
    assert rep["top_star_degrees"] == [gold["top_star_degree"]]


def test_segre_dot(capsys):
    code, out, _ = run(capsys, "segre", "--left", DATA / "c3.json", "--right", DATA / "d4.json",
                       "--simple", "1,2", "--emit", "dot")
    assert code == 0
    assert out.startswith("digraph")


def test_nakayama_verify(capsys):
    code, out, _ = run(capsys, "nakayama", "B2", "--verify")
    assert code == 0
    assert "PASS" in out


def test_output_file(tmp_path, capsys):
    target = tmp_path / "out.txt"
    assert run(capsys, "-o", target, "classify", "D5")[0] == 0
    assert target.read_text() == "D5, representation finite, h=8\n"


@pytest.mark.parametrize("argv", [["koszul", "C3", "--simple", "1"], ["ar", "F4"],
                                  ["nakayama", "A3", "--verify"]])
def test_other_prime_gives_same_output(capsys, argv):
    # coefficients are residues and may differ; the structure may not
    a = run(capsys, "--format", "json", *argv)
    b = run(capsys, "--prime", "11", "--format", "json", *argv)
    assert a[0] == b[0] == 0
    ja, jb = json.loads(a[1]), json.loads(b[1])
    ja.pop("complex", None)
    jb.pop("complex", None)
    assert ja == jb


def test_env_prime(monkeypatch, capsys):
    monkeypatch.setenv("SPECFOLD_PRIME", "9")
    assert run(capsys, "classify", "A2")[0] == 2
    monkeypatch.setenv("SPECFOLD_PRIME", "13")
    assert run(capsys, "classify", "A2")[0] == 0


def test_console_script_is_deterministic():
    cmd = [sys.executable, "-m", "specfold.cli", "--format", "json", "koszul", "C3", "--simple", "1"]
    first = subprocess.run(cmd, capture_output=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert first == second
    assert json.loads(first)["simple"] == 1
