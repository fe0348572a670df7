import json

import numpy as np
import pytest

from koebe_minimal.cli import run_cli


def test_enneper_obj(tmp_path, capsys):
    out = tmp_path / "out.obj"
    assert run_cli(["enneper", "--n", "4", "-o", str(out), "--report"]) == 0
    assert out.read_text().startswith("# koebe-minimal geometry")
    assert "minimality" in capsys.readouterr().out


def test_unknown_flag_is_usage_error(capsys):
    assert run_cli(["enneper", "--bogus"]) == 2
    assert run_cli([]) == 2
    assert run_cli(["assoc-family", "--input", "x.json", "--phi-steps", "0"]) in (1, 2)


def test_validate_round_trip_and_perturbation(tmp_path, capsys):
    good = tmp_path / "s.json"
    assert run_cli(["schwarz-p", "-o", str(good)]) == 0
    assert run_cli(["validate", "--input", str(good), "--report"]) == 0
    data = json.loads(good.read_text())
    data["spheres"][3]["center"][0] += 1e-3
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    assert run_cli(["validate", "--input", str(bad)]) == 1
    assert "FAIL" in capsys.readouterr().err


def test_pattern_pipeline(tmp_path):
    g = tmp_path / "cube.json"
    r = tmp_path / "rho.json"
    k = tmp_path / "koebe.json"
    assert run_cli(["make-pattern", "--kind", "cube", "-o", str(g)]) == 0
    assert run_cli(["solve-pattern", "--graph", str(g), "-o", str(r)]) == 0
    rho = json.loads(r.read_text())
    assert rho["residual_max"] <= 1e-10
    assert run_cli(["koebe", "--graph", str(g), "--radii", str(r), "--role", "swapped", "-o", str(k)]) == 0
    assert run_cli(["validate", "--input", str(k)]) == 0
    # the cube has three-valent corners and no consistent edge labelling
    assert run_cli(["dualize", "--input", str(k)]) == 1


def test_cover_dual_and_family(tmp_path):
    g = tmp_path / "cover.json"
    k = tmp_path / "koebe.json"
    m = tmp_path / "min.json"
    assert run_cli(["make-pattern", "--kind", "cube-cover", "-o", str(g)]) == 0
    assert run_cli(["koebe", "--graph", str(g), "-o", str(k)]) == 0
    assert run_cli(["dualize", "--input", str(k), "-o", str(m)]) == 1
    assert run_cli(["dualize", "--input", str(k), "--allow-periods", "-o", str(m)]) == 0
    assert run_cli(["validate", "--input", str(m)]) == 0
    fam = tmp_path / "fam.json"
    assert run_cli(["assoc-family", "--input", str(k), "--allow-periods", "--phi-steps", "3", "-o", str(fam)]) == 0
    files = sorted(tmp_path.glob("fam_*.json"))
    assert [f.name for f in files] == ["fam_000.json", "fam_001.json", "fam_002.json"]
    phis = [json.loads(f.read_text())["metadata"]["parameters"]["phi"] for f in files]
    assert np.allclose(phis, [0, 2 * np.pi / 3, 4 * np.pi / 3])


@pytest.mark.parametrize("argv", [["catenoid", "--N", "6", "--rows", "2"], ["scherk", "--truncation", "2"]])
def test_surface_commands(argv, tmp_path):
    out = tmp_path / "x.json"
    assert run_cli(argv + ["-o", str(out)]) == 0
    assert run_cli(["validate", "--input", str(out)]) == 0


def test_converge_prints_slope(capsys):
    assert run_cli(["converge", "--levels", "4", "8", "16", "--samples", "21"]) == 0
    assert "slope" in capsys.readouterr().out


def test_missing_file_exits_one():
    assert run_cli(["validate", "--input", "/nonexistent/x.json"]) == 1
