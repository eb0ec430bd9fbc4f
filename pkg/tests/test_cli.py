import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from conftest import FIXTURES
from hdxwalk.cli import main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_gen_complete(capsys, tmp_path):
    out = tmp_path / "k4.json"
    code, _, _ = run(capsys, "gen", "--kind", "complete", "--m", 4, "--n", 2, "-o", out)
    assert code == 0
    assert out.read_text() == (FIXTURES / "k4.json").read_text()


def test_gen_regular_with_set(capsys, tmp_path):
    c, s = tmp_path / "g.json", tmp_path / "g.set.json"
    code, _, _ = run(capsys, "gen", "--kind", "regular-graph-matching", "--v", 40, "--s", 8, "--seed", 1,
                     "-o", c, "--set-output", s)
    assert code == 0
    assert c.read_text() == (FIXTURES / "regular-40-8-s1.json").read_text()
    assert s.read_text() == (FIXTURES / "regular-40-8-s1.matching.json").read_text()


def test_gen_usage(capsys):
    code, _, err = run(capsys, "gen", "--kind", "complete", "--m", 4)
    assert code == 2 and "needs --m and --n" in err
    code, _, _ = run(capsys, "gen", "--kind", "complete", "--m", 2, "--n", 2)
    assert code == 2


def test_validate_and_manifest(capsys):
    code, out, _ = run(capsys, "validate", FIXTURES / "random-pure-12-2-p0.6-s7.json")
    doc = json.loads(out)
    assert code == 0
    man = doc["manifest"]
    assert man["command"] == "validate" and man["all_pass"] is True
    assert man["inputs"][0]["role"] == "complex" and man["inputs"][0]["digest"].startswith("sha256:")
    assert man["tool_version"].startswith("hdxwalk ")
    assert "wall_clock_seconds" in man
    # digests, never paths
    assert "fixtures" not in out


def test_negative_weight_exit_2(capsys, tmp_path):
    p = tmp_path / "neg.json"
    p.write_text(json.dumps({"n": 1, "top_faces": [{"vertices": [0, 1], "weight": -2}]}))
    code, _, err = run(capsys, "validate", p)
    assert code == 2 and "top_faces" in err


def test_syntax_error_exit_2(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"n": 1,\n "top_faces": [}')
    code, _, err = run(capsys, "validate", p)
    assert code == 2 and f"{p}:2:" in err


def test_spectra_k4(capsys):
    code, out, _ = run(capsys, "spectra", FIXTURES / "k4.json")
    doc = json.loads(out)
    assert code == 0
    assert doc["profile"]["classification"]["lambda_one_sided"] == 0.0
    assert doc["manifest"]["checks"] == {"descent": True}


def test_spectra_sweep_csv(capsys):
    code, out, _ = run(capsys, "spectra", "--sweep", "m=5..7", "--n", 2)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [int(r["m"]) for r in rows] == [5, 5, 6, 6, 7, 7]
    k1 = [float(r["upper_second_eigenvalue"]) for r in rows if r["k"] == "1"]
    assert k1 == pytest.approx([4 / 9, 1 / 2, 8 / 15])
    assert all(float(r["upper_second_eigenvalue"]) <= float(r["lazy_bound"]) + 1e-10 for r in rows)


@pytest.mark.parametrize("bad", [["--sweep", "m=7..5", "--n", 2], ["--sweep", "n=1..3", "--n", 2],
                                 ["--sweep", "m=2..5", "--n", 2], ["--sweep", "m=5..6"], []])
def test_spectra_usage(capsys, bad):
    assert run(capsys, "spectra", *bad)[0] == 2


@pytest.mark.parametrize("op", ["upper", "lower", "nonlazy", "d", "dstar"])
def test_walk_ops(capsys, op):
    code, out, _ = run(capsys, "walk", FIXTURES / "complete-6-2.json", "--k", 1, "--op", op)
    doc = json.loads(out)
    assert code == 0 and doc["manifest"]["checks"]["factorizations"]
    if op in ("upper", "lower", "nonlazy"):
        assert doc["operator"]["row_sum_residual"] < 1e-12


def test_walk_dump(capsys, tmp_path):
    prefix = tmp_path / "m1"
    code, out, _ = run(capsys, "walk", FIXTURES / "k4.json", "--k", 1, "--op", "nonlazy", "--dump", prefix)
    assert code == 0
    body = json.loads(out)["dump"]
    files = {p.name for p in tmp_path.iterdir()}
    assert body["matrix"] in files and body["legend"] in files


def test_walk_bad_k(capsys):
    assert run(capsys, "walk", FIXTURES / "k4.json", "--k", 7, "--op", "upper")[0] == 2


def test_decompose_random(capsys):
    code, out, _ = run(capsys, "decompose", FIXTURES / "random-pure-12-2-p0.6-s7.json", "--k", 1,
                       "--random", 3, "--seed", 5)
    doc = json.loads(out)
    assert len(doc["ladders"]) == 3
    assert doc["manifest"]["seeds"] == [5]
    checks = doc["manifest"]["checks"]
    assert checks["identity1"] and checks["identity2"] and checks["ladder_lower"]
    assert code == (0 if checks["ladder_upper"] else 1)


def test_decompose_k4_upper_bound_fails(capsys):
    # mu_1 < 0 on K4: the literal upper bound is false, the clamped one holds
    code, out, err = run(capsys, "decompose", FIXTURES / "k4.json", "--k", 1, "--random", 2, "--seed", 0)
    doc = json.loads(out)
    assert code == 1 and "FAIL ladder_upper" in err
    assert all(lad["ladder_upper_clamped_pass"] for lad in doc["ladders"])


def test_decompose_cochain_file(capsys, tmp_path):
    p = tmp_path / "phi.json"
    p.write_text(json.dumps({"k": 0, "entries": [{"vertices": [0], "value": 1}, {"vertices": [1], "value": -1}]}))
    code, out, _ = run(capsys, "decompose", FIXTURES / "k4.json", "--k", 0, "--cochain", p)
    doc = json.loads(out)
    assert code == 0
    assert [i["role"] for i in doc["manifest"]["inputs"]] == ["complex", "cochain"]
    assert run(capsys, "decompose", FIXTURES / "k4.json", "--k", 1, "--cochain", p)[0] == 2


def test_decompose_not_in_c0(capsys, tmp_path):
    p = tmp_path / "one.json"
    p.write_text(json.dumps({"k": 0, "entries": [{"vertices": [0], "value": 1}]}))
    assert run(capsys, "decompose", FIXTURES / "k4.json", "--k", 0, "--cochain", p)[0] == 2


def test_mixing_binary(capsys):
    code, out, _ = run(capsys, "mixing", FIXTURES / "k4.json", "--theorems", "7.3",
                       "--set", FIXTURES / "k4.matching.json")
    b = json.loads(out)["binary"]
    assert code == 0 and b["pass"]
    assert b["achieved"] == pytest.approx(1 / np.sqrt(3)) and b["bound"] == pytest.approx(2 / np.sqrt(3))


def test_mixing_default(capsys):
    code, out, _ = run(capsys, "mixing", FIXTURES / "complete-7-3.json")
    rep = json.loads(out)["report"]
    assert code == 0 and rep["ok"]
    assert {r["theorem_id"] for r in rep["records"]} >= {"lazy", "nonlazy_two_sided", "nonlazy_one_sided"}


def test_mixing_override_can_fail(capsys):
    code, out, err = run(capsys, "mixing", FIXTURES / "k4.json", "--theorems", "lazy",
                         "--lambda-override=-0.2,0")
    assert code == 1 and "FAIL lazy" in err


def test_mixing_usage(capsys):
    assert run(capsys, "mixing", FIXTURES / "k4.json", "--theorems", "9.9")[0] == 2
    assert run(capsys, "mixing", FIXTURES / "k4.json", "--theorems", "binary")[0] == 2


def test_unknown_command(capsys):
    assert run(capsys, "frobnicate")[0] == 2


def test_suite_subset_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(capsys, "suite", "--criteria", "1,4", "-o", a)[0] == 0
    assert run(capsys, "suite", "--criteria", "1,4", "-o", b)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    doc = json.loads(a.read_text())
    assert [c["id"] for c in doc["criteria"]] == [1, 4]
    assert "wall_clock_seconds" not in doc["manifest"]
    assert "wall_clock_seconds" in json.loads((tmp_path / "a.json.timing.json").read_text())


def test_suite_bad_criteria(capsys):
    assert run(capsys, "suite", "--criteria", "x")[0] == 2


def test_console_script_entry():
    res = subprocess.run([sys.executable, "-m", "hdxwalk.cli", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("hdxwalk ")
