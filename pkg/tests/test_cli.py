import json

import pytest

from polylat import __version__
from polylat.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_irreducible(capsys):
    code, out, _ = run(capsys, "irreducible", "--m", "4")
    assert code == 0 and out.strip() == "0x13"


def test_construct_then_meansquare_round_trip(capsys, tmp_path):
    rule = tmp_path / "rule.json"
    code, _, _ = run(capsys, "construct", "--m", "4", "--s", "5", "--weights", "geo09", "--out", str(rule))
    assert code == 0
    doc = json.loads(rule.read_text())
    assert doc["p"] == "0x13" and doc["s"] == 5 and doc["m"] == 4
    assert doc["weights"] == "geo09" and doc["version"] == __version__ and len(doc["B"]) == 5
    code, out, _ = run(capsys, "meansquare", "--rule", str(rule))
    assert json.loads(out)["B"] == doc["B"][-1]


def test_construct_with_weights_file(capsys, tmp_path):
    wfile = tmp_path / "w.json"
    wfile.write_text(json.dumps({"type": "general", "s": 2, "entries": [{"subset": [1], "gamma": 1.0}, {"subset": [1, 2], "gamma": 0.5}]}))
    rule = tmp_path / "rule.json"
    code, _, _ = run(capsys, "construct", "--m", "5", "--s", "2", "--weights", str(wfile), "--out", str(rule))
    assert code == 0
    doc = json.loads(rule.read_text())
    code, out, _ = run(capsys, "meansquare", "--rule", str(rule))
    assert json.loads(out)["B"] == doc["B"][-1]


def test_points_and_discrepancy(capsys, tmp_path):
    rule = tmp_path / "rule.json"
    run(capsys, "construct", "--m", "4", "--s", "2", "--weights", "unweighted", "--out", str(rule))
    pts = tmp_path / "pts.json"
    assert run(capsys, "points", "--rule", str(rule), "--out", str(pts))[0] == 0
    code, out, _ = run(capsys, "discrepancy", "--points", str(pts), "--weights", "unweighted")
    assert code == 0 and json.loads(out)["l2sq"] > 0
    code, out, _ = run(capsys, "discrepancy", "--points", str(pts), "--weights", "unweighted", "--mean-square")
    b = json.loads(out)["B"]
    code, out, _ = run(capsys, "discrepancy", "--points", str(pts), "--weights", "unweighted", "--mc", "300", "--seed", "4")
    doc = json.loads(out)
    assert abs(doc["mean"] - b) <= 4 * doc["stderr"]
    code, out, _ = run(capsys, "points", "--rule", str(rule), "--format", "csv")
    assert out.splitlines()[0] == "x1,x2" and len(out.splitlines()) == 17


def test_mc_verify(capsys, tmp_path):
    rule = tmp_path / "rule.json"
    run(capsys, "construct", "--m", "5", "--s", "3", "--weights", "geo09", "--out", str(rule))
    code, out, _ = run(capsys, "mc-verify", "--rule", str(rule), "--replicates", "2000")
    doc = json.loads(out)
    assert code == 0 and doc["pass"] and doc["z"] < 4


def test_errors_are_json_on_stderr(capsys, tmp_path):
    code, out, err = run(capsys, "construct", "--m", "4", "--s", "2", "--weights", str(tmp_path / "missing.json"))
    assert code == 1 and out == ""
    assert "error" in json.loads(err)
    code, _, err = run(capsys, "construct", "--m", "4", "--s", "2", "--weights", "geo09", "--p", "0x11")
    assert code == 1 and json.loads(err)["type"] == "ValueError"
    code, _, err = run(capsys, "tables", "--weights", "geo09", "--generators", "sobol", "--m", "4-5", "--s", "1")
    assert code == 1 and "dirs" in json.loads(err)["error"]
    with pytest.raises(SystemExit):
        main(["construct"])


def test_tables_one_dimension(capsys, joe_kuo_file):
    code, out, _ = run(
        capsys, "tables", "--weights", "geo09", "--m", "4-6", "--s", "1,5", "--generators", "both",
        "--dirs", str(joe_kuo_file), "--format", "json",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["p"] == {"4": "0x13", "5": "0x25", "6": "0x43"}
    assert len(doc["dirs_sha256"]) == 64
    row5 = doc["rows"][1]
    assert row5["cells"]["s=1 Sobol'"] == row5["cells"]["s=1 PLR"] == "1.46E-04"
    assert list(row5["cells"]) == ["s=1 Sobol'", "s=1 PLR", "s=5 Sobol'", "s=5 PLR"]


def test_tables_formats(capsys):
    code, out, _ = run(capsys, "tables", "--weights", "invsq", "--m", "15", "--s", "1", "--format", "csv")
    assert out.splitlines() == ["m,s=1 PLR", "15,1.55E-10"]
    code, out, _ = run(capsys, "tables", "--weights", "unweighted", "--m", "4,5", "--s", "1", "--format", "markdown")
    assert "| 4 | 6.51E-04 |" in out and "| 5 | 1.63E-04 |" in out
