import json

import numpy as np
import pytest

from rotorbath.cli import ConfigError, main, read_config_file, resolve_config, run, run_sweep


def test_resolve_config_defaults_and_overrides(tmp_path):
    cfg = resolve_config("fig2", tmp_path, overrides={"xi": "7.5"})
    assert cfg.params["xi"] == 7.5
    assert cfg.params["gamma"] == 1.0
    with pytest.raises(ConfigError):
        resolve_config("fig2", tmp_path, overrides={"mystery": 1})
    with pytest.raises(ConfigError):
        resolve_config("nope", tmp_path)
    with pytest.raises(ConfigError):
        resolve_config("fig2", tmp_path, overrides={"xi": "abc"})
    with pytest.raises(ConfigError):
        resolve_config("stationary-planar", tmp_path, overrides={"variant": "diag"})


def test_config_file_and_flag_precedence(tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("# comment\nxi = 3.0\nl_max = 14\n")
    values = read_config_file(conf)
    cfg = resolve_config("stationary-linear", tmp_path, values, {"xi": "4.0"})
    assert cfg.params["xi"] == 4.0      # flag wins
    assert cfg.params["l_max"] == 14    # file value kept
    bad = tmp_path / "bad.conf"
    bad.write_text("xi 3.0\n")
    with pytest.raises(ConfigError):
        read_config_file(bad)


def test_stationary_planar_cli_values(tmp_path):
    out = tmp_path / "sp"
    code = main(["stationary-planar", "--xi", "1", "--variant", "high_T",
                 "--mmax", "10", "--out", str(out)])
    assert code == 0
    rows = {}
    for line in (out / "stationary_pm.csv").read_text().strip().splitlines()[1:]:
        m, p, _ = line.split(",")
        rows[int(m)] = float(p)
    assert rows[0] == pytest.approx(0.5, abs=1e-12)
    assert rows[1] == pytest.approx(0.25, abs=1e-12)
    assert rows[-1] == pytest.approx(0.25, abs=1e-12)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["experiment"] == "stationary-planar"
    assert "stationary_pm.csv" in manifest["outputs"]
    assert manifest["results"]["headline"]["value"] <= 1e-8


def test_invalid_config_exits_2(tmp_path):
    assert main(["fig2", "--lmax", "11", "--out", str(tmp_path / "x")]) == 2
    assert main(["stationary-planar", "--variant", "nope", "--out", str(tmp_path / "y")]) == 2
    assert main(["gibbs-scaling", "--xi-list", "", "--out", str(tmp_path / "z")]) == 2


def test_numerical_failure_exits_3_with_record(tmp_path):
    out = tmp_path / "fail"
    # xi = 40 stationary state does not fit in l_max = 12: cutoff error
    code = main(["stationary-linear", "--xi", "40", "--lmax", "12", "--out", str(out)])
    assert code == 3
    record = json.loads((out / "error.json").read_text())
    assert record["error"] == "BasisCutoffError"
    assert record["experiment"] == "stationary-linear"


def test_manifest_determinism(tmp_path):
    args = ["stationary-planar", "--xi", "2", "--mmax", "12"]
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    m1 = json.loads((out1 / "manifest.json").read_text())
    m2 = json.loads((out2 / "manifest.json").read_text())
    assert m1["outputs"] == m2["outputs"]
    assert (out1 / "stationary_pm.csv").read_bytes() == (out2 / "stationary_pm.csv").read_bytes()


def test_classical_linear_run(tmp_path):
    out = tmp_path / "cl"
    code = main(["classical-linear", "--trajectories", "400", "--t-final", "0.5",
                 "--n-times", "3", "--seed", "7", "--out", str(out)])
    assert code == 0
    lines = (out / "moments.csv").read_text().strip().splitlines()
    assert len(lines) == 4
    # reruns with the same seed are bit-identical
    out2 = tmp_path / "cl2"
    main(["classical-linear", "--trajectories", "400", "--t-final", "0.5",
          "--n-times", "3", "--seed", "7", "--out", str(out2)])
    assert (out / "moments.csv").read_bytes() == (out2 / "moments.csv").read_bytes()


def test_gibbs_scaling_run(tmp_path):
    out = tmp_path / "gs"
    code = main(["gibbs-scaling", "--xi-list", "5,10", "--lmax", "16", "--out", str(out)])
    assert code == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["results"]["headline"]["name"] == "loglog_slope"
    assert manifest["results"]["headline"]["value"] == pytest.approx(-1.0, abs=0.15)


def test_custom_run(tmp_path):
    out = tmp_path / "cu"
    code = main(["custom", "--rotor", "planar", "--xi", "3", "--mmax", "10",
                 "--initial", "superposition", "--m0", "4", "--sigma", "0.4",
                 "--t-final", "1.0", "--n-times", "5", "--out", str(out)])
    assert code == 0
    assert (out / "observables.csv").exists()
    assert (out / "final_state.rbsnap").exists()


def test_sweep(tmp_path):
    out = tmp_path / "sweep"
    path = run_sweep("stationary-planar", "xi", ["1", "2"], out,
                     base_overrides={"m_max": "12"}, jobs=2)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "xi,headline,value"
    assert len(lines) == 3
    assert (out / "xi_1" / "manifest.json").exists()
    with pytest.raises(ConfigError):
        run_sweep("stationary-planar", "xi", [], out)


def test_sweep_cli_empty_values_exit_2(tmp_path):
    assert main(["sweep", "stationary-planar", "--param", "xi", "--values", " ",
                 "--out", str(tmp_path / "s")]) == 2


def test_no_writes_outside_outdir(tmp_path, monkeypatch):
    workdir = tmp_path / "cwd"
    workdir.mkdir()
    monkeypatch.chdir(workdir)
    out = tmp_path / "only-here"
    assert main(["stationary-planar", "--xi", "2", "--mmax", "8", "--out", str(out)]) == 0
    assert list(workdir.iterdir()) == []
