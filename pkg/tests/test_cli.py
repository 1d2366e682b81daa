import csv
import json
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from eqlab.cli import main

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def fields(out):
    return dict(line.split(": ", 1) for line in out.strip().splitlines())


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


# profile

@pytest.mark.parametrize("body,lam", [("ellipse:2,1", 0.8), ("parabola", 1.0)])
def test_profile_equipotential_examples(capsys, body, lam):
    code, out = run(capsys, "profile", "--body", body)
    f = fields(out)
    assert code == 0
    assert f["verdict"] == "constant"
    assert float(f["lambda_hat"]) == pytest.approx(lam, abs=1e-12)


def test_profile_limacon_pole_length(capsys):
    code, out = run(capsys, "profile", "--body", "limacon:1,3", "--point", "pole",
                    "--functional", "length")
    assert code == 0
    assert float(fields(out)["lambda_hat"]) == pytest.approx(6.0, abs=1e-12)


def test_profile_nonconstant_exit_one(capsys):
    code, out = run(capsys, "profile", "--body", "ellipse:2,1", "--auto-circle",
                    "--functional", "length")
    assert code == 1
    assert fields(out)["verdict"] == "nonconstant"


@pytest.mark.parametrize("argv", [
    ["profile", "--body", "disc:1"],
    ["profile", "--body", "bogus:1"],
    ["profile", "--body", "ellipse:2,1", "--circle", "0,0,5"],
    ["space3d", "midpoint", "--axes", "1,1,1", "--point", "2,0,0"],
])
def test_bad_input_exit_two(capsys, argv):
    assert main(argv) == 2
    assert "error" in capsys.readouterr().err.lower()


def test_profile_csv_matches_golden(tmp_path, capsys):
    out = tmp_path / "p.csv"
    assert main(["profile", "--body", "disc:2", "--circle", "0,0,1", "--n-grid", "64",
                 "--csv", str(out)]) == 0
    head, data = read_csv(out)
    ghead, gdata = read_csv(GOLDEN / "profile_disc2_n64.csv")
    assert head == ghead == ["phi", "a", "b", "product", "length", "reciprocal_sum", "alpha"]
    np.testing.assert_allclose(data, gdata, rtol=0, atol=1e-13)
    np.testing.assert_allclose(data[:, 3], 3.0, atol=1e-13)


def test_csv_and_json_are_byte_identical_across_runs(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        main(["profile", "--body", "ellipse:2,1", "--n-grid", "128", "--csv", str(p)])
    assert a.read_bytes() == b.read_bytes()
    ja, jb = tmp_path / "a.json", tmp_path / "b.json"
    for p in (ja, jb):
        main(["space3d", "sphere", "--axes", "2,1.5,1", "--sphere", "0,0,0,0.5", "--json", str(p)])
    assert ja.read_bytes() == jb.read_bytes()


def test_svg_output(tmp_path, capsys):
    out = tmp_path / "p.svg"
    main(["profile", "--body", "ellipse:2,1", "--svg", str(out)])
    text = out.read_text()
    assert text.startswith("<svg")
    assert 'viewBox="0 0 800 800"' in text
    assert text.rstrip().endswith("</svg>")


# orbit

@pytest.mark.parametrize("argv,period", [
    (["--body", "disc:2", "--circle", "0,0,1"], "3"),
    (["--body", "ellipse:2,1"], "4"),
    (["--body", "parabola"], "4"),
])
def test_orbit_periods(capsys, argv, period):
    code, out = run(capsys, "orbit", *argv, "--n-iter", "10")
    assert code == 0
    assert fields(out)["period"] == period


def test_orbit_without_period(capsys):
    code, out = run(capsys, "orbit", "--body", "disc:1", "--circle",
                    f"0,0,{math.cos(1.0)!r}", "--n-iter", "200")
    f = fields(out)
    assert f["period"] == "no period <= 200"
    assert float(f["rotation_number_orbit"]) == pytest.approx(1 / math.pi, abs=1e-3)


def test_orbit_csv_matches_golden(tmp_path, capsys):
    out = tmp_path / "o.csv"
    main(["orbit", "--body", "disc:2", "--circle", "0,0,1", "--n-iter", "6", "--csv", str(out)])
    head, data = read_csv(out)
    ghead, gdata = read_csv(GOLDEN / "orbit_disc2.csv")
    assert head == ghead == ["k", "theta", "x", "y"]
    np.testing.assert_allclose(data, gdata, rtol=0, atol=1e-12)


# search

def test_search_ellipse_json(tmp_path, capsys):
    out = tmp_path / "s.json"
    code, text = run(capsys, "search", "--body", "ellipse:2,1", "--json", str(out))
    assert code == 0
    doc = json.loads(text)
    assert json.loads(out.read_text()) == doc
    keys = json.loads((GOLDEN / "json_keys.json").read_text())
    assert sorted(doc) == keys["search"]
    assert doc["verdict"] == "found"
    assert doc["radius"] == pytest.approx(2 / math.sqrt(5), abs=1e-4)


def test_search_limacon_exit_one(capsys):
    code, text = run(capsys, "search", "--body", "limacon:1,3", "--no-certify")
    assert code == 1
    assert json.loads(text)["verdict"] == "none_below_tolerance"


# space3d

SPACE3D = {
    "midpoint": ["--axes", "1,1,1", "--point", "0.3,0,0"],
    "cone": ["--axes", "3,3,3", "--sphere", "0,0,0,1", "--point", "3,0,0"],
    "sphere": ["--axes", "2,2,2", "--sphere", "0,0,0,1"],
    "two-cycle": ["--delta", "zero", "--line=-1,0,0,1,0,0"],
}


@pytest.mark.parametrize("check", sorted(SPACE3D))
def test_space3d_json_keys(capsys, check):
    code, text = run(capsys, "space3d", check, *SPACE3D[check])
    doc = json.loads(text)
    keys = json.loads((GOLDEN / "json_keys.json").read_text())
    assert code == 0
    assert sorted(doc) == keys[f"space3d {check}"]
    assert doc["check"] == check


def test_space3d_values(capsys):
    _, text = run(capsys, "space3d", "midpoint", *SPACE3D["midpoint"])
    doc = json.loads(text)
    np.testing.assert_allclose(doc["center"], [0.15, 0, 0], atol=1e-12)
    assert doc["ratio"] == pytest.approx(0.15, abs=1e-12)
    _, text = run(capsys, "space3d", "cone", *SPACE3D["cone"])
    assert json.loads(text)["gamma_center"][0] == pytest.approx(1 / 3, abs=1e-15)
    _, text = run(capsys, "space3d", "sphere", *SPACE3D["sphere"])
    assert json.loads(text)["lambda_mean"] == pytest.approx(3.0, abs=1e-12)


def test_space3d_ellipsoid_sphere_fails(capsys):
    code, text = run(capsys, "space3d", "sphere", "--axes", "1,1,0.5", "--sphere", "0,0,0,0.3")
    assert code == 1
    assert json.loads(text)["verdict"] == "nonconstant"


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "eqlab", "profile", "--body", "ellipse:2,1"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert "lambda_hat: 0.8" in res.stdout
