import csv
import json
import subprocess
import sys

import pytest

from optomech import __version__
from optomech.cli import main, parse_overrides
from optomech.errors import ConfigError

BASE = ["--set", "omega_m=4", "--set", "g0=1e-3", "--set", "kappa=1"]


def manifest(out):
    return json.loads((out / "manifest.json").read_text())


def rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def test_parse_overrides():
    assert parse_overrides(["a=1", " b = x "]) == {"a": "1", "b": "x"}
    with pytest.raises(ConfigError):
        parse_overrides(["novalue"])


def test_config_echo(tmp_path, capsys):
    cfg = tmp_path / "p.cfg"
    cfg.write_text("omega_m = 4\nkappa = 1\ng0 = 1e-3\nn_max = 100\n")
    assert main(["config", "--config", str(cfg), "--set", "detuning=-4", "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "params.json").read_text())
    assert doc["si"]["detuning"] == -4.0
    assert doc["n_max"] == pytest.approx(100.0)
    assert json.loads(capsys.readouterr().out)["g0"] == pytest.approx(1e-3)
    m = manifest(tmp_path)
    assert m["status"] == "ok" and m["version"] == __version__
    assert m["params"]["kappa_normalised"]["g0"] == pytest.approx(1e-3)
    assert str(tmp_path / "params.json") in m["outputs"]


def test_missing_config_is_usage_error(tmp_path):
    assert main(["config", "--config", str(tmp_path / "none.cfg"), "--out", str(tmp_path)]) == 2
    m = manifest(tmp_path)
    assert m["status"] == "config_error" and "not found" in m["error"]


def test_missing_required_parameter(tmp_path):
    assert main(["config", "--out", str(tmp_path)]) == 2


def test_usage_errors():
    assert main(["figure", "fig9"]) == 2
    assert main([]) == 2


def test_figure_csv_and_reproducible(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["figure", "fig4", "--out", str(out1)]) == 0
    assert main(["figure", "fig4", "--out", str(out2)]) == 0
    data = rows(out1 / "fig4.csv")
    assert len(data) == 101 * 4
    assert list(data[0]) == ["gamma_l", "detuning", "n_photon", "validity"]
    assert float(data[0]["n_photon"]) == pytest.approx(1.0)
    assert (out1 / "fig4.csv").read_bytes() == (out2 / "fig4.csv").read_bytes()
    assert manifest(out1)["outputs"] == [str(out1 / "fig4.csv")]


def test_figure_json_with_axes_and_overrides(tmp_path):
    args = ["figure", "fig2", "--format", "json", "--set", "omega_m=5", "--axis", "gamma_l=0,0.5",
            "--axis", "detuning=-5:-1:3", "--out", str(tmp_path)]
    assert main(args) == 0
    doc = json.loads((tmp_path / "fig2.json").read_text())
    assert len(doc["rows"]) == 6
    assert doc["rows"][0]["gamma_opt_ratio"] == 1.0
    assert main(["figure", "fig2", "--axis", "gamma_l=0,1", "--out", str(tmp_path)]) == 2


def test_sweep(tmp_path):
    args = ["sweep", *BASE, "--set", "n_max=100", "--axis", "detuning=-2:2:5", "--quantity", "gamma_opt",
            "--out", str(tmp_path)]
    assert main(args) == 0
    col = [float(r["gamma_opt"]) for r in rows(tmp_path / "sweep_gamma_opt.csv")]
    assert col[0] == pytest.approx(-col[-1]) and col[2] == 0.0
    assert main(["sweep", *BASE, "--set", "n_max=1", "--axis", "bogus=1:2:3", "--quantity", "gamma_opt",
                 "--out", str(tmp_path)]) == 2


def test_simulate_trajectory_reproducible(tmp_path):
    args = ["simulate", "--mode", "trajectory", *BASE, "--set", "n_max=100", "--set", "gamma_l=0.3",
            "--set", "detuning=-1", "--set", "n_traj=2", "--set", "duration=2", "--seed", "5"]
    assert main([*args, "--out", str(tmp_path / "a")]) == 0
    assert main([*args, "--out", str(tmp_path / "b")]) == 0
    a = (tmp_path / "a" / "trajectory.csv").read_bytes()
    assert a == (tmp_path / "b" / "trajectory.csv").read_bytes()
    m = manifest(tmp_path / "a")
    assert m["seeds"] == [5] and m["sim_config"]["n_traj"] == 2


def test_simulate_free_ring_down(tmp_path):
    args = ["simulate", "--mode", "ringdown", *BASE, "--set", "n_max=0", "--set", "gamma_m=0.05",
            "--set", "duration=60", "--out", str(tmp_path)]
    assert main(args) == 0
    est = json.loads((tmp_path / "estimates.json").read_text())
    assert est["gamma_eff"]["value"] == pytest.approx(0.05, rel=1e-3)
    assert est["analytic"]["gamma_eff"] == 0.05
    assert est["unstable"] is False


def test_simulate_blue_detuned_flags_instability(tmp_path, capsys):
    args = ["simulate", "--mode", "ringdown", *BASE, "--set", "n_max=8e5", "--set", "gamma_m=1e-4",
            "--set", "detuning=4", "--set", "x0=0", "--out", str(tmp_path)]
    # x0 = 0 leaves nothing to fit
    assert main(args) == 3
    assert manifest(tmp_path)["status"] == "numerical_error"
    args = args[:-4] + ["--out", str(tmp_path)]
    assert main(args) == 0
    est = json.loads((tmp_path / "estimates.json").read_text())
    assert est["unstable"] is True and est["analytic"]["gamma_eff"] < 0
    assert "instability" in capsys.readouterr().err


def test_simulate_insufficient_decay_is_numerical(tmp_path):
    args = ["simulate", *BASE, "--set", "n_max=0", "--set", "gamma_m=1e-3", "--set", "duration=50",
            "--out", str(tmp_path)]
    assert main(args) == 3
    assert "InsufficientDecay" in manifest(tmp_path)["error"]


def test_simulate_intensity(tmp_path):
    args = ["simulate", "--mode", "intensity", *BASE, "--set", "n_max=100", "--set", "detuning=2",
            "--set", "gamma_l=0.5", "--set", "n_traj=40", "--set", "duration=30", "--out", str(tmp_path)]
    assert main(args) == 0
    est = json.loads((tmp_path / "estimates.json").read_text())
    assert abs(est["z_score"]) < 4


def test_simulate_bad_step(tmp_path):
    assert main(["simulate", *BASE, "--set", "n_max=1", "--set", "dt=1", "--out", str(tmp_path)]) == 2


def test_validate_pass_and_fail(tmp_path, capsys):
    assert main(["validate", "--only", "1,2,3", "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "validation.json").read_text())
    assert report["passed"] and len(report["criteria"]) == 3
    assert capsys.readouterr().out.count("[PASS]") == 3
    assert main(["validate", "--only", "9", "--out", str(tmp_path)]) == 1
    assert manifest(tmp_path)["status"] == "validation_failed"
    assert main(["validate", "--only", "42", "--out", str(tmp_path)]) == 2
    assert main(["validate", "--only", "x", "--out", str(tmp_path)]) == 2


def test_plot_script(tmp_path):
    assert main(["plot-script", "fig7", "--csv", "fig7.csv", "--out", str(tmp_path)]) == 0
    assert "'fig7.csv'" in (tmp_path / "fig7.gp").read_text()


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "optomech", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and __version__ in res.stdout
