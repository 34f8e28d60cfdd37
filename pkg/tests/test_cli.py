import json
import subprocess
import sys

import pytest

from liftcuts.cli import main
from liftcuts.polyoracle import optimum_bruteforce
from liftcuts.problems import problem_from_json


def _write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


EX1 = {"a": [1, 2, 2, 3], "mu": [1, 1, 1, 1], "f": {"kind": "neg_exp", "c": 3.0}}


def test_gen_and_solve(tmp_path, capsys):
    inst = tmp_path / "wta.json"
    assert main(["gen", "--problem", "wta", "--n", "3", "--m", "3", "--param", "0.5", "--seed", "2", "--out", str(inst)]) == 0
    data = json.loads(inst.read_text())
    assert data["header"]["seed"] == 2
    out = tmp_path / "sol.json"
    assert main(["solve", str(inst), "--cuts", "two", "--out", str(out)]) == 0
    sol = json.loads(out.read_text())
    zb, _ = optimum_bruteforce(problem_from_json(data))
    assert sol["stats"]["status"] == "optimal"
    assert abs(sol["objective"] - zb) <= 1e-7
    assert len(sol["x"]) == 3 and len(sol["x"][0]) == 3


def test_solve_generated_eum(capsys):
    assert main(["solve", "--problem", "eum", "--n", "6", "--m", "2", "--param", "0.6", "--seed", "1", "--cuts", "both", "--exact-lifting"]) == 0
    sol = json.loads(capsys.readouterr().out)
    assert sol["stats"]["status"] == "optimal" and len(sol["x"]) == 6


def test_solve_needs_input():
    with pytest.raises(SystemExit):
        main(["solve"])


def test_bench_writes_csv_and_summary(tmp_path):
    csv1, csv2, summ = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "s.csv"
    args = ["bench", "--sizes", "3", "--params", "0.5", "--seeds", "1", "--settings", "oa,two"]
    assert main(args + ["--out", str(csv1), "--summary", str(summ)]) == 0
    assert main(args + ["--out", str(csv2)]) == 0
    assert csv1.read_bytes() == csv2.read_bytes()
    lines = csv1.read_text().splitlines()
    assert lines[0] == "n,m,param,setting,C,N,T,ST,Rgap,Egap,status"
    assert len(lines) == 3
    assert summ.read_text().startswith("n,m,param,setting")


def test_cut_and_verify(tmp_path, capsys):
    inst = _write(tmp_path / "x.json", EX1)
    ctx = _write(tmp_path / "c.json", {"s": 0, "k": 1, "S0": [1, 2], "S1": [3]})
    cuts = tmp_path / "cuts.json"
    assert main(["cut", inst, ctx, "--out", str(cuts)]) == 0
    data = json.loads(cuts.read_text())
    assert [c["meta"]["family"] for c in data["cuts"]] == ["single", "two_I", "two_II"]
    report = tmp_path / "rep.json"
    assert main(["verify", inst, str(cuts), "--out", str(report)]) == 0
    rep = json.loads(report.read_text())
    assert rep["all_valid"] and rep["cuts"][0]["face_dimension"] == 4 and rep["cuts"][0]["facet"]


def test_verify_flags_invalid_cut(tmp_path, capsys):
    inst = _write(tmp_path / "x.json", EX1)
    bad = _write(tmp_path / "bad.json", {"cuts": [{"alpha0": -5.0, "alpha": [0, 0, 0, 0], "meta": {}}]})
    assert main(["verify", inst, bad]) == 1
    rep = json.loads(capsys.readouterr().out)
    assert not rep["all_valid"] and rep["cuts"][0]["validity"]["x"] is not None


def test_bad_input_reports_error(tmp_path, capsys):
    inst = _write(tmp_path / "x.json", EX1)
    ctx = _write(tmp_path / "c.json", {"s": 0, "k": 5, "S0": [1, 2], "S1": [3]})
    assert main(["cut", inst, ctx]) == 2
    assert "error" in capsys.readouterr().err


def test_module_entry_point():
    out = subprocess.run(
        [sys.executable, "-m", "liftcuts.cli", "gen", "--problem", "eum", "--n", "3", "--m", "2", "--param", "1.0"],
        capture_output=True, text=True, check=True,
    )
    assert json.loads(out.stdout)["kind"] == "eum"
