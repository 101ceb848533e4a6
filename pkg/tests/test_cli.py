from __future__ import annotations

import csv
import json
import subprocess
import sys
from fractions import Fraction as F

import pytest

from quasicopula.cli import run
from reference import LOWER_VALUES, UPPER_VALUES, bottom_up


def call(capsys, *argv):
    code = run([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def grid_rows(obj):
    return [[F(v) for v in row] for row in obj["values"]]


class TestVerbs:
    def test_dominate_worked_fixture(self, capsys, fixtures_dir):
        code, out, _ = call(capsys, "dominate", fixtures_dir / "worked_4x4.json")
        assert code == 0
        res = json.loads(out)
        assert res["alpha"] == "32"
        assert grid_rows(res["lower"]) == bottom_up(LOWER_VALUES, F(1, 32))
        assert grid_rows(res["upper"]) == bottom_up(UPPER_VALUES, F(1, 32))

    def test_norm_q1(self, capsys):
        code, out, _ = call(capsys, "norm", "gallery:q1")
        res = json.loads(out)
        assert code == 0 and (res["norm"], res["s"], res["t"]) == ("3", "2", "1")

    def test_norm_copula(self, capsys, fixtures_dir):
        code, out, _ = call(capsys, "norm", fixtures_dir / "pi_half.json")
        res = json.loads(out)
        assert (res["norm"], res["s"], res["t"], res["B"]) == ("1", "1", "0", None)

    def test_validate(self, capsys, fixtures_dir):
        code, out, _ = call(capsys, "validate", "gallery:q2")
        assert code == 0 and json.loads(out)["is_quasi_copula"]
        code, out, _ = call(capsys, "validate", fixtures_dir / "worked_4x4.json")
        assert code == 1 and not json.loads(out)["has_uniform_marginals"]

    def test_decompose(self, capsys):
        code, out, _ = call(capsys, "decompose", "gallery:q1")
        res = json.loads(out)
        assert code == 0 and (res["alpha1"], res["alpha2"]) == ("3", "-2")

    def test_decompose_with_base(self, capsys, fixtures_dir, tmp_path):
        code, out, err = call(capsys, "decompose", "gallery:q1", "--base", fixtures_dir / "pi_half.json")
        assert code == 2 and "mesh" in err
        base = tmp_path / "base.json"
        base.write_text(json.dumps({
            "x": ["0", "1/3", "2/3", "1"], "y": ["0", "1/3", "2/3", "1"],
            "mass": [["1/6", "1/12", "1/12"], ["1/12", "1/6", "1/12"], ["1/12", "1/12", "1/6"]],
        }))
        code, out, _ = call(capsys, "decompose", "gallery:q1", "--base", base)
        assert code == 0 and json.loads(out)["alpha1"] == "4"

    def test_continuous_member_needs_mesh(self, capsys):
        code, out, _ = call(capsys, "validate", "gallery:m", "--mesh", "3")
        res = json.loads(out)
        assert code == 0 and res["is_copula"]

    def test_approximate(self, capsys, tmp_path):
        code, out, _ = call(capsys, "approximate", "gallery:m", "--stages", 8, "--out", tmp_path)
        assert code == 0
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["terms"][0] == {"stage": 1, "role": "A", "gamma": "1", "K_n": None}
        assert set(manifest["terms"][5]) == {"stage", "role", "gamma", "K_n"}
        assert len(manifest["terms"]) == manifest["terms_total"]
        with open(tmp_path / "stage_errors.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert [r["bound"] for r in rows] == [str(F(4, n)) for n in range(1, 9)]
        assert all(float(r["measured_sup_error"]) <= float(F(r["bound"])) for r in rows)

    def test_probe(self, capsys, tmp_path):
        code, out, _ = call(
            capsys, "probe", "gallery:q1", "--family", "aligned", "--depth", 4, "--out", tmp_path
        )
        assert code == 0
        verdict = json.loads((tmp_path / "verdict.json").read_text())
        assert verdict["verdict"] == "InSpan" and verdict["heuristic"] is True
        assert verdict["norm_estimate"] == "3"
        lines = (tmp_path / "probe.csv").read_text().splitlines()
        assert lines[0] == "level,max_gap,alpha_n,family" and lines[1] == "1,1/3,2,aligned"

    def test_probe_with_base_grid(self, capsys, tmp_path, fixtures_dir):
        code, out, _ = call(
            capsys, "probe", "gallery:m", "--family", "aligned", "--base",
            fixtures_dir / "pi_half.json", "--depth", 4, "--out", tmp_path,
        )
        assert code == 0 and json.loads(out)["verdict"] == "InSpan"

    def test_gallery(self, capsys, tmp_path):
        code, out, _ = call(capsys, "gallery", "list")
        assert code == 0 and "counterexample" in out.split()
        code, out, _ = call(capsys, "gallery", "emit", "q1", "--form", "mass", "--csv", tmp_path / "q1.csv")
        assert code == 0 and json.loads(out)["mass"][1] == ["1/3", "-1/3", "1/3"]
        assert len((tmp_path / "q1.csv").read_text().splitlines()) == 10
        code, out, _ = call(capsys, "gallery", "emit", "pi", "--mesh", 2)
        assert json.loads(out)["values"][1] == ["0", "1/4", "1/2"]


class TestExitCodes:
    def test_bad_mesh(self, capsys, fixtures_dir):
        code, out, err = call(capsys, "validate", fixtures_dir / "bad_mesh.json")
        assert code == 2 and out == "" and err.startswith("error:")

    def test_bad_json(self, capsys, fixtures_dir):
        assert call(capsys, "dominate", fixtures_dir / "not_json.json")[0] == 2

    def test_missing_file(self, capsys, tmp_path):
        assert call(capsys, "norm", tmp_path / "nothing.json")[0] == 2

    def test_unknown_gallery_name(self, capsys):
        assert call(capsys, "norm", "gallery:nope")[0] == 2

    def test_math_failure(self, capsys, fixtures_dir):
        code, _, err = call(capsys, "norm", fixtures_dir / "worked_4x4.json")
        assert code == 1 and "quasi-copula" in err

    def test_dominate_zero(self, capsys, tmp_path):
        p = tmp_path / "zero.json"
        p.write_text(json.dumps({"x": ["0", "1"], "y": ["0", "1"], "mass": [["0"]]}))
        assert call(capsys, "dominate", p)[0] == 1

    def test_usage(self, capsys):
        assert call(capsys, "approximate", "gallery:m")[0] == 2
        assert call(capsys, "bogus")[0] == 2
        assert call(capsys, "gallery", "emit")[0] == 2
        assert call(capsys, "probe", "gallery:m", "--depth", 4, "--base", "x.json", "--out", "o")[0] == 2

    def test_help(self, capsys):
        code, out, _ = call(capsys, "--help")
        assert code == 0 and "approximate" in out


class TestDeterminism:
    def test_byte_identical_runs(self, tmp_path, capsys):
        for d in ("a", "b"):
            call(capsys, "approximate", "gallery:q1", "--stages", 3, "--out", tmp_path / d)
            call(capsys, "probe", "gallery:counterexample", "--family", "aligned", "--depth", 4, "--out", tmp_path / d)
        for name in ("manifest.json", "stage_errors.csv", "probe.csv", "verdict.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_module_entry_point(fixtures_dir):
    proc = subprocess.run(
        [sys.executable, "-m", "quasicopula", "dominate", str(fixtures_dir / "worked_4x4.json")],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["alpha"] == "32"


def test_probe_counterexample_growth(capsys, tmp_path):
    code, out, _ = call(
        capsys, "probe", "gallery:counterexample", "--family", "aligned", "--depth", 8, "--out", tmp_path
    )
    assert code == 0 and json.loads(out)["verdict"] == "LikelyNotInSpan"
    alphas = [line.split(",")[2] for line in (tmp_path / "probe.csv").read_text().splitlines()[1:]]
    assert alphas == [str(i + 1) for i in range(1, 9)]
