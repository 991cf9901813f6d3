import json
import subprocess
import sys

import pytest

from strengthlab.cli import SCHEMA, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def report(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    data = json.loads(out)
    assert data["schema"] == SCHEMA and data["command"] == argv[0]
    return data


def test_rank(capsys):
    data = report(capsys, "rank", "--field", "GF(2)", "--nvars", "4", "--form", "x1*x2+x3*x4", "--rmax", "3")
    assert data["rank"] == 2
    assert data["inputs"]["rmax"] == 3 and data["inputs"]["budget"] == 2**24
    assert len(data["pairs"]) == 2


def test_relrank_and_prank(capsys):
    data = report(capsys, "relrank", "--field", "GF(2)", "--nvars", "4", "--form", "x1*x2+x3*x4", "--ideal", "x1")
    assert data["rank"] == 1 and data["ideal"] == ["x1"]
    tensor = json.dumps({"dims": [2, 2], "entries": [{"idx": [0, 0], "c": 1}, {"idx": [1, 1], "c": 1}]})
    assert report(capsys, "prank", "--field", "GF(2)", "--tensor", tensor)["prank"] == 2


def test_gowers(capsys):
    data = report(capsys, "gowers", "--field", "GF(2)", "--nvars", "2", "--form", "x1*x2", "--d", "2")
    assert abs(data["norm"] - 0.70710678) < 1e-8
    assert data["raw_average"] == [0.25, 0.0]


def test_regularize_file(capsys, tmp_path):
    path = tmp_path / "F.json"
    path.write_text(json.dumps(["x1*x2+x3*x4"]))
    data = report(capsys, "regularize", "--field", "GF(2)", "--nvars", "4", "--forms-file", str(path),
                  "--A", "1", "--B", "1", "--t", "2")
    assert data["final"]["layers"] == [["x1", "x3"]]
    assert data["final_size"] <= data["n_bounds"][0] and data["within_bound"]


def test_regcheck_and_towers(capsys, tmp_path):
    path = tmp_path / "T.json"
    path.write_text(json.dumps({"layers": [["x1"], ["x1*x2"]], "nvars": 2}))
    data = report(capsys, "regcheck", "--field", "GF(2)", "--tower-file", str(path), "--t", "1")
    assert data["regular"] is False
    yz = tmp_path / "Y.json"
    yz.write_text(json.dumps({"layers": [["y1*y2"]], "blocks": {"x": 0, "y": 2}}))
    data = report(capsys, "towers", "--field", "GF(3)", "--tower-file", str(yz), "--kind", "tz")
    assert data["tower"]["layers"] == [["y1*y2", "y2*z1+y1*z2+z1*z2"]]
    data = report(capsys, "towers", "--field", "GF(2)", "--tower-file", str(path), "--kind", "dlw", "--w", "[[1,0]]")
    assert data["tower"]["layers"][:2] == [["x1"], ["x2"]]
    data = report(capsys, "towers", "--field", "GF(2)", "--tower-file", str(path), "--kind", "coefficient", "--Ns", "[2,1]")
    assert data["N"] == 2 and len(data["tower"]["layers"]) == 2


def test_singloc_and_rtcheck(capsys):
    data = report(capsys, "singloc", "--field", "GF(2)", "--nvars", "4", "--form", "x1*x2+x3*x4", "--K", "3")
    assert data["codim"] == 4 and data["stable"]
    data = report(capsys, "rtcheck", "--field", "GF(3)", "--nvars", "1", "--form", "x1^2", "--t", "0", "--K", "2")
    assert data["pass"] is False


def test_generate_csv(capsys):
    code, out, _ = run(capsys, "generate", "--family", "product-sum", "--param", "r=2", "--param", "d=2", "--format", "csv")
    assert code == 0
    header, row = out.strip().splitlines()
    assert header.split(",")[:4] == ["field", "nvars", "forms", "family"]
    assert "x1*x2+x3*x4" in row


def test_out_file(capsys, tmp_path):
    out = tmp_path / "r.json"
    code, text, _ = run(capsys, "rank", "--nvars", "2", "--form", "x1*x2", "--out", str(out))
    assert code == 0 and text == ""
    assert json.loads(out.read_text())["rank"] == 1


@pytest.mark.parametrize("argv,code", [
    (["verify", "--suite", "nope"], 3),
    (["rank", "--bogus"], 3),
    (["rank", "--nvars", "2", "--form", "x1**2"], 3),
    (["rank", "--field", "GF(6)", "--nvars", "2", "--form", "x1"], 3),
    (["rank", "--form", "x1"], 3),
    (["rank", "--nvars", "2"], 3),
    (["generate", "--family", "random"], 3),
    (["singloc", "--nvars", "30", "--form", "x1*x2"], 2),
    (["rank", "--nvars", "8", "--form", "x1*x2+x3*x4+x5*x6+x7*x8", "--search-budget", "10"], 2),
])
def test_exit_codes(capsys, argv, code):
    got, _, err = run(capsys, *argv)
    assert got == code
    assert err.startswith("strength-lab:")


def test_env_budget(capsys, monkeypatch):
    monkeypatch.setenv("STRENGTHLAB_BUDGET", "100")
    code, _, _ = run(capsys, "singloc", "--nvars", "8", "--form", "x1*x2")
    assert code == 2
    data = report(capsys, "gowers", "--nvars", "1", "--form", "x1", "--d", "1")
    assert data["inputs"]["budget"] == 100


def test_verify_suite_report(capsys):
    data = report(capsys, "verify", "--suite", "paper-identities", "--seed", "7")
    assert data["pass"] and data["failed"] == 0
    data = report(capsys, "verify", "--suite", "rank", "--seed", "7", "--rmax", "2")
    trunc = next(r for r in data["results"] if r["name"] == "truncation-semantics")
    assert trunc["pass"] and "exceeds" in json.dumps(trunc["details"])


def test_verify_failure_exit_code(monkeypatch, capsys):
    from strengthlab import verify

    def broken(cfg):
        return verify.PropertyResult("broken", False, 1, {}, {"f": "x1"})

    monkeypatch.setattr(verify, "_suite_table", lambda: {"field": [broken]})
    code, out, _ = run(capsys, "verify", "--suite", "field")
    assert code == 4
    assert json.loads(out)["results"][0]["counterexample"] == {"f": "x1"}


def test_reports_deterministic(capsys):
    argv = ["gowers", "--field", "GF(3)", "--nvars", "2", "--form", "x1^2+x1*x2", "--d", "2"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv, "--shards", "3")
    assert a == b


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "strengthlab", "rank", "--nvars", "2", "--form", "x1*x2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["rank"] == 1
