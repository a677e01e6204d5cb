import csv
import io
import json
import math
import subprocess
import sys

import pytest

from hyptype.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main
from hyptype.density import eval_density
from hyptype.geometry import domain_to_json, lemma5_domain, two_point_domain, unit_ball

TWO = json.dumps(domain_to_json(two_point_domain()))
BALL = json.dumps(domain_to_json(unit_ball(2)))
STRETCHED = json.dumps({"dim": 2, "obstacles": [{"point": {"center": [4, 0]}}, {"point": {"center": [16, 0]}}]})


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_density_json(capsys):
    code, out, _ = run(capsys, "density", "--domain", TWO, "--point", "0,0", "--kind", "lambda2")
    assert code == EXIT_OK
    rec = json.loads(out)
    assert rec["reciprocal"] == 1.0
    assert rec["witness_a"] == [1.0, 0.0] and rec["witness_b"] == [2.0, 0.0]
    assert rec["exceptional"] is False


def test_density_from_file(capsys, tmp_path):
    p = tmp_path / "d.json"
    p.write_text(json.dumps(domain_to_json(lemma5_domain(0.01))))
    code, out, _ = run(capsys, "density", "--domain", str(p), "--point", "0,0")
    rec = json.loads(out)
    assert code == EXIT_OK and rec["exceptional"] is True
    assert rec["reciprocal"] == pytest.approx(1.0, abs=1e-12)


def test_density_csv_and_flag_positions(capsys):
    code, out, _ = run(capsys, "--output", "csv", "density", "--domain", TWO, "--point", "0,0")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == EXIT_OK and float(rows[0]["value"]) == pytest.approx(1.0)
    code, out2, _ = run(capsys, "density", "--domain", TWO, "--point", "0,0", "--output", "csv")
    assert out2 == out


def test_quiet(capsys):
    code, out, err = run(capsys, "--quiet", "density", "--domain", TWO, "--point", "0,0")
    assert code == EXIT_OK and out == "" and err == ""


@pytest.mark.parametrize(
    "argv",
    [
        ["density", "--domain", "{bad", "--point", "0,0"],
        ["density", "--domain", TWO, "--point", "1,0"],
        ["density", "--domain", TWO, "--point", "a,b"],
        ["density", "--domain", TWO, "--point", "0,0,0"],
        ["density", "--domain", "/nonexistent/domain.json", "--point", "0,0"],
        ["density", "--domain", '{"dim": 2, "obstacles": [{"point": {"center": [0, 0]}}]}', "--point", "1,1"],
        ["density", "--domain", TWO, "--point", "0,0", "--kind", "mu"],
        ["frobnicate"],
        [],
        ["verify", "--suite", "lemma99"],
        ["qc", "--map", '{"radial_stretch": {"K": 2}}', "--domain", STRETCHED],
        ["field", "--domain", BALL, "--lower=-1,-1", "--upper", "1,1", "--counts", "0"],
    ],
)
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_USAGE
    assert err


def test_distance(capsys):
    code, out, _ = run(capsys, "distance", "--domain", BALL, "--from", "0,0", "--to", "0.5,0",
                       "--kind", "quasihyperbolic", "--h", "0.05", "--refinements", "3")
    rec = json.loads(out)
    assert code == EXIT_OK
    assert abs(rec["value"] - math.log(2)) <= 2e-3
    assert rec["path"][0] == [0.0, 0.0] and rec["path"][-1] == [0.5, 0.0]
    assert rec["refinement_level"] >= 0


def test_qc_point(capsys):
    code, out, _ = run(capsys, "qc", "--map", '{"radial_stretch": {"K": 2}}', "--domain", STRETCHED, "--point", "8,0")
    rec = json.loads(out)
    assert code == EXIT_OK and rec["within_bound"]
    assert rec["K"] == 2.0 and 1 / rec["C1"] <= rec["ratio"] <= rec["C1"]


def test_qc_pair(capsys):
    code, out, _ = run(capsys, "qc", "--map", '{"similarity": {"s": 2, "v": [1, 0]}}', "--domain", STRETCHED,
                       "--from", "6,0.5", "--to", "10,-0.5", "--h-rel", "0.1", "--quad-order", "4")
    rec = json.loads(out)
    assert code == EXIT_OK
    assert rec["ratio"] == pytest.approx(1.0, rel=1e-6)


def test_roots(capsys):
    code, out, _ = run(capsys, "roots")
    rec = json.loads(out)
    assert code == EXIT_OK
    assert rec["t0"]["value"] == pytest.approx(1.14619, abs=1e-5)
    assert abs(rec["t0"]["residual"]) <= 1e-14
    assert rec["k"]["value"] == pytest.approx(5.7627, abs=1e-4)
    code, out, _ = run(capsys, "roots", "--output", "csv")
    names = [r["name"] for r in csv.DictReader(io.StringIO(out))]
    assert "midpoint_eq" in names and "C0" in names


def test_field(capsys):
    code, out, _ = run(capsys, "field", "--domain", TWO, "--kind", "lambda2",
                       "--lower=-0.5,-0.5", "--upper", "0.5,0.5", "--counts", "3")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == EXIT_OK and len(rows) == 9
    assert all(float(r["value"]) * float(r["d_boundary"]) <= 1 + 1e-9 for r in rows)
    code, out, _ = run(capsys, "field", "--domain", BALL, "--lower", "2,2", "--upper", "3,3", "--counts", "2",
                       "--output", "json")
    assert all(r["status"] == "outside" for r in json.loads(out))


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "roots", "--suite", "lemma5-example")
    reports = json.loads(out)
    assert code == EXIT_OK
    assert [r["suite"] for r in reports] == ["roots", "lemma5-example"]
    assert all(r["passed"] for r in reports)
    code, out, _ = run(capsys, "verify", "--suite", "roots", "--output", "csv")
    assert out.startswith("suite,passed,cases,failures")


def test_verify_failure_exit(capsys, monkeypatch):
    from hyptype import harness

    def broken(seed=0, **kw):
        rep = harness.VerifyReport("broken")
        rep.check(False, 0, 1, 2)
        return rep

    monkeypatch.setitem(harness.SUITES, "broken", broken)
    code, out, _ = run(capsys, "verify", "--suite", "broken")
    assert code == EXIT_FAIL
    assert json.loads(out)[0]["failures"][0]["observed"] == 2


def test_failure_record_reruns_from_cli(capsys):
    from hyptype.harness import _repro

    rec = _repro(lemma5_domain(0.05, 3), 0, z=[0.1, 0.2, 0.0])
    code, out, _ = run(capsys, "--seed", str(rec["seed"]), "density", "--domain", json.dumps(rec["domain"]),
                       "--point", ",".join(map(repr, rec["z"])))
    assert code == EXIT_OK and json.loads(out)["value"] > 0


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "hyptype", "roots"], capture_output=True, text=True)
    assert p.returncode == 0
    assert "t0" in json.loads(p.stdout)
    p = subprocess.run([sys.executable, "-m", "hyptype", "--help"], capture_output=True, text=True)
    assert p.returncode == 0 and "density" in p.stdout


def test_negative_coordinates_without_equals(capsys):
    code, out, _ = run(capsys, "density", "--domain", TWO, "--point", "-0.5,0")
    ref = eval_density(two_point_domain(), [-0.5, 0.0], "lambda").value
    assert code == EXIT_OK and json.loads(out)["value"] == pytest.approx(ref, rel=1e-12)
    code, out, _ = run(capsys, "field", "--domain", TWO, "--lower", "-1,-1", "--upper", "0,0", "--counts", "2")
    assert code == EXIT_OK and len(list(csv.DictReader(io.StringIO(out)))) == 4
