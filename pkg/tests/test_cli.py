import json
from pathlib import Path

import pytest

from morsekit import build_parser, run


def _run(command, config, out, *extra):
    return run([command, "--config", str(config), "--out", str(out), *extra])


def test_parser_rejects_unknown_command():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["plot", "--config", "x.cfg"])


def test_simulate_writes_outputs(tmp_path, configs_dir):
    assert _run("simulate", configs_dir / "fig1.cfg", tmp_path) == 0
    for name in ("fig1_spectrum.csv", "fig1_simulate.json", "simulate_manifest.json"):
        assert (tmp_path / name).is_file()
    report = json.loads((tmp_path / "fig1_simulate.json").read_text(encoding="utf-8"))
    assert report["derived"]["orientation"] == pytest.approx(0.346, abs=1e-9)
    assert len(report["lines"]) == 8
    assert report["provenance"]["version"] == "1.0.0"


def test_simulate_is_byte_reproducible(tmp_path, configs_dir):
    first, second = tmp_path / "a", tmp_path / "b"
    assert _run("simulate", configs_dir / "fig1.cfg", first, "--seed", "11") == 0
    assert _run("simulate", configs_dir / "fig1.cfg", second, "--seed", "11") == 0
    for path in sorted(first.iterdir()):
        assert path.read_bytes() == (second / path.name).read_bytes(), path.name


def test_seeded_noise(tmp_path, configs_dir):
    config = tmp_path / "noisy.cfg"
    text = (configs_dir / "fig1.cfg").read_text(encoding="utf-8")
    config.write_text(text.replace('kind = "none"', 'kind = "gaussian"\nlevel = 0.02\nseed = 5'), encoding="utf-8")
    assert _run("simulate", config, tmp_path / "a") == 0
    assert _run("simulate", config, tmp_path / "b", "--seed", "6") == 0
    first = (tmp_path / "a" / "fig1_spectrum.csv").read_bytes()
    second = (tmp_path / "b" / "fig1_spectrum.csv").read_bytes()
    assert first != second


def test_simulate_then_fit(tmp_path, configs_dir):
    assert _run("simulate", configs_dir / "fig1.cfg", tmp_path) == 0
    trace = tmp_path / "fig1_spectrum.csv"
    assert _run("fit", configs_dir / "fig1.cfg", tmp_path, "--trace", str(trace)) == 0
    report = json.loads((tmp_path / "fig1_fit.json").read_text(encoding="utf-8"))
    assert report["converged"]
    assert abs(report["derived"]["orientation"]) == pytest.approx(0.346, abs=1e-2)
    assert (tmp_path / "fig1_residual.csv").is_file()
    assert (tmp_path / "fit_manifest.json").is_file()


def test_fit_requires_trace(tmp_path, configs_dir):
    assert _run("fit", configs_dir / "fig1.cfg", tmp_path) == 2


def test_fit_on_malformed_trace(tmp_path, configs_dir):
    trace = tmp_path / "bad.csv"
    trace.write_text("frequency_hz,value\n1.0,x\n", encoding="utf-8")
    assert _run("fit", configs_dir / "fig1.cfg", tmp_path, "--trace", str(trace)) == 3


def test_invalid_config_exit_code(tmp_path, capsys):
    config = tmp_path / "bad.cfg"
    config.write_text("schema_version = 1\n[grid]\npoints = 1\n", encoding="utf-8")
    assert _run("simulate", config, tmp_path) == 2
    assert "bad.cfg:3:" in capsys.readouterr().err


def test_fit_with_unknown_parameter_is_a_config_error(tmp_path, configs_dir, fig1_csv, capsys):
    config = tmp_path / "typo.cfg"
    text = (configs_dir / "fig1.cfg").read_text(encoding="utf-8")
    config.write_text(text.replace('"gamma_com", "omega_center"', '"gama_com", "omega_center"', 1), encoding="utf-8")
    assert _run("fit", config, tmp_path, "--trace", str(fig1_csv)) == 2
    assert "typo.cfg:24:" in capsys.readouterr().err


def test_missing_section_exit_code(tmp_path, configs_dir):
    assert _run("pulsed", configs_dir / "fig1.cfg", tmp_path) == 2


def test_negative_seed(tmp_path, configs_dir):
    assert _run("simulate", configs_dir / "fig1.cfg", tmp_path, "--seed", "-1") == 2


def test_estimate_command(tmp_path, configs_dir):
    assert _run("estimate", configs_dir / "estimate.cfg", tmp_path) == 0
    report = json.loads((tmp_path / "estimate_estimate.json").read_text(encoding="utf-8"))
    estimates = report["estimates"]
    assert set(estimates) == {
        "photon_scattering_rate",
        "gradient_broadening",
        "resolution_criterion",
        "gradient_series_fit",
        "critical_density",
    }
    assert report["g_factor"] == pytest.approx(0.2499384, rel=1e-5)
    assert report["g_factors"]["4"] == pytest.approx(0.2499384, rel=1e-5)
    assert report["g_factors"]["3"] == pytest.approx(-0.2507419, rel=1e-5)
    assert report["zeeman"]["qz_splitting_hz"] == pytest.approx(23.0, abs=0.1)
    assert len(report["zeeman"]["levels"]) == 16
    assert estimates["critical_density"]["value"] == pytest.approx(2.15e10, rel=1e-2)
    assert estimates["resolution_criterion"]["value"] == pytest.approx(1.23e-3, rel=1e-2)


def test_pulsed_command(tmp_path, configs_dir):
    assert _run("pulsed", configs_dir / "fig5.cfg", tmp_path) == 0
    report = json.loads((tmp_path / "fig5_pulsed.json").read_text(encoding="utf-8"))
    assert report["diagnostics"]["converged_points"] == report["diagnostics"]["points"] == 2001
    assert report["ripple_nominal_hz"] == pytest.approx(66.667, rel=1e-4)
    assert Path(tmp_path / "fig5_pulsed_diagnostics.csv").is_file()
