import json

import pytest

from recipmod.cli import main
from recipmod.runner import ConfigError, ExperimentConfig, parse_config, rng_for


def test_parse_config_all_suites():
    cfg = parse_config("surface = square, conformal_wave\nresolutions = 8, 16\nsuites = all\nseed = 5\n")
    assert cfg.surfaces == ("square", "conformal_wave") and cfg.resolutions == (8, 16)
    assert cfg.suites == ("modulus", "potential", "coarea", "reciprocality") and cfg.seed == 5


def test_parse_config_builder_params():
    cfg = parse_config("surface = rectangle\nwidth = 3\nheight = 1\n")
    assert cfg.builder == "rectangle" and cfg.params == {"width": 3, "height": 1}
    mesh, frame = cfg.build("rectangle", 4)
    assert mesh.total_area == pytest.approx(3.0)


@pytest.mark.parametrize("text, message", [
    ("resolutions = 32, 16", "strictly increasing"),
    ("surface = nosuch", "builders: collapsed_disk, conformal, rectangle"),
    ("surface = square\nwidth = 2", "line 2: unknown key 'width'"),
    ("seed = abc", "line 1"),
    ("just words", "line 1: expected"),
    ("suites = modulus, bogus", "unknown bogus"),
])
def test_config_errors(text, message):
    with pytest.raises(ConfigError, match=message):
        parse_config(text)


def test_unknown_builder_lists_available():
    with pytest.raises(ConfigError, match="available: collapsed_disk, conformal, rectangle"):
        ExperimentConfig(builder="torus")


def test_rng_is_keyed_by_labels():
    a = rng_for(1, "square", 16).random(3)
    b = rng_for(1, "square", 16).random(3)
    c = rng_for(1, "square", 32).random(3)
    assert (a == b).all() and not (a == c).all()


def test_suite_writes_five_reports(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("surface = square\nsuites = all\nresolutions = 16, 32\n")
    assert main(["suite", "--config", str(cfg), "--out", str(tmp_path / "out")]) == 0
    names = sorted(p.name for p in (tmp_path / "out").iterdir())
    assert names == ["coarea.csv", "modulus.csv", "potential.csv", "reciprocality.csv",
                     "summary.json"]
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert set(summary["kappas"]) == {"proved", "refined", "conjectured"}
    assert "product" in summary["surfaces"]["square"]["32"]
    header = (tmp_path / "out" / "modulus.csv").read_text().splitlines()[0]
    assert header == "surface,n,quantity,lhs,rhs,constant,pass"


def test_decreasing_resolutions_exit_two(tmp_path, capsys):
    assert main(["suite", "--resolutions", "32,16", "--out", str(tmp_path)]) == 2
    assert "strictly increasing" in capsys.readouterr().err
    assert not any(tmp_path.iterdir())


def test_unknown_surface_exit_two(tmp_path, capsys):
    assert main(["build", "--surface", "nosuch", "--out", str(tmp_path)]) == 2
    assert "rectangle" in capsys.readouterr().err


def test_bad_mesh_file_exit_two(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert main(["modulus", "--mesh", str(bad), "--out", str(tmp_path)]) == 2


def test_build_then_modulus_from_file(tmp_path, capsys):
    assert main(["build", "--surface", "rectangle", "--param", "width=2", "--resolutions", "8",
                 "--out", str(tmp_path)]) == 0
    mesh_file = tmp_path / "rectangle_n8.json"
    assert mesh_file.exists()
    assert main(["modulus", "--mesh", str(mesh_file), "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "gamma1: 2" in out and "certified=yes" in out
    (res_file,) = tmp_path.glob("*_gamma1.json")
    res = json.loads(res_file.read_text())
    assert res["certified"] and res["value"] == pytest.approx(2.0)


@pytest.mark.parametrize("cmd", ["potential", "levelsets", "coarea", "reciprocality"])
def test_other_commands(tmp_path, capsys, cmd):
    assert main([cmd, "--surface", "square", "--resolutions", "8", "--out", str(tmp_path)]) == 0
    assert any(tmp_path.iterdir())


def test_ring_command(tmp_path, capsys):
    code = main(["ring", "--surface", "square", "--resolutions", "16", "--radii", "0.1,0.2",
                 "--outer", "0.4", "--out", str(tmp_path)])
    assert code == 0
    rows = (tmp_path / "ring.csv").read_text().splitlines()
    assert len(rows) == 3


def test_module_entry_point():
    import subprocess
    import sys
    r = subprocess.run([sys.executable, "-m", "recipmod", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "suite" in r.stdout
