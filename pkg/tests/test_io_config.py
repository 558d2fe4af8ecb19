import hashlib
import json

import numpy as np
import pytest
from pydantic import ValidationError

from models.config import SCHEMA_VERSION, PulsesSection, load_config, parse_config
from models.errors import ConfigError, TraceParseError
from models.species import CESIUM
from models.trace import TraceKind
from utils.io_utils import (
    atomic_write_text,
    provenance_line,
    read_trace_csv,
    to_json,
    write_manifest,
    write_trace_csv,
)
from utils.zeeman_utils import larmor_frequency, qz_splitting


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


# === TRAZAS CSV ===

def test_trace_csv_round_trip(tmp_path, fig1_trace):
    path = write_trace_csv(str(tmp_path / "trace.csv"), fig1_trace, config_digest="abc")
    text = path.read_text(encoding="utf-8")
    assert text.startswith(provenance_line("abc") + "\nfrequency_hz,value\n")
    loaded = read_trace_csv(str(path))
    assert loaded.frequencies == pytest.approx(fig1_trace.frequencies, rel=1e-14)
    assert loaded.values == pytest.approx(fig1_trace.values, rel=1e-14)


def test_trace_ignores_comments_and_extra_columns(tmp_path):
    path = _write(tmp_path, "t.csv", "# medido\nfrequency_hz,value,flag\n1.0,2.0,a\n2.0,3.0,b\n")
    trace = read_trace_csv(str(path))
    assert len(trace) == 2
    assert trace.values.tolist() == [2.0, 3.0]


@pytest.mark.parametrize(
    "body, row",
    [
        ("frequency_hz,value\n1.0,2.0\n2.0,abc\n3.0,1.0\n", 2),
        ("frequency_hz,value\n1.0,2.0\n3.0,1.0\n2.0,1.0\n", 3),
        ("frequency_hz,value\n1.0,2.0\n2.0,-1.0\n", 2),
        ("freq,value\n1.0,2.0\n", 0),
    ],
)
def test_malformed_trace_reports_row(tmp_path, body, row):
    path = _write(tmp_path, "bad.csv", body)
    with pytest.raises(TraceParseError) as excinfo:
        read_trace_csv(str(path))
    assert excinfo.value.row == row
    assert excinfo.value.exit_code == 3


def test_negative_values_allowed_for_angles(tmp_path):
    path = _write(tmp_path, "angle.csv", "frequency_hz,value\n1.0,-2.0\n2.0,1.0\n")
    assert read_trace_csv(str(path), kind=TraceKind.DC_ANGLE).values[0] == -2.0


def test_missing_and_empty_trace(tmp_path):
    with pytest.raises(TraceParseError):
        read_trace_csv(str(tmp_path / "missing.csv"))
    with pytest.raises(TraceParseError):
        read_trace_csv(str(_write(tmp_path, "empty.csv", "")))
    with pytest.raises(TraceParseError):
        read_trace_csv(str(_write(tmp_path, "header.csv", "frequency_hz,value\n")))


# === ESCRITURA ===

def test_atomic_write_leaves_no_temporaries(tmp_path):
    target = tmp_path / "out" / "report.json"
    atomic_write_text(str(target), "uno")
    atomic_write_text(str(target), "dos")
    assert target.read_text(encoding="utf-8") == "dos"
    assert [p.name for p in target.parent.iterdir()] == ["report.json"]


def test_json_is_canonical():
    payload = {"b": np.float64(1.5), "a": np.arange(3), "c": np.bool_(True)}
    text = to_json(payload)
    assert text == to_json(dict(reversed(list(payload.items()))))
    assert json.loads(text) == {"a": [0, 1, 2], "b": 1.5, "c": True}


def test_manifest_hashes_outputs(tmp_path):
    output = atomic_write_text(str(tmp_path / "x.csv"), "contenido\n")
    manifest = write_manifest(str(tmp_path), "simulate", "cfg/run.cfg", "d1g", [output], seed=3)
    data = json.loads(manifest.read_text(encoding="utf-8"))
    assert data["outputs"]["x.csv"] == hashlib.sha256(b"contenido\n").hexdigest()
    assert data["config"] == "run.cfg"
    assert data["seed"] == 3
    assert data["provenance"]["config_sha256"] == "d1g"


# === CONFIGURACIÓN ===

def test_shipped_configs_load(configs_dir):
    paths = sorted(configs_dir.glob("*.cfg"))
    assert len(paths) >= 5
    for path in paths:
        config = load_config(str(path))
        assert config.schema_version == SCHEMA_VERSION
        assert config.digest == hashlib.sha256(path.read_bytes()).hexdigest()


def test_syntax_error_reports_line():
    text = "schema_version = 1\n[model]\norientation = = 0.3\n"
    with pytest.raises(ConfigError) as excinfo:
        parse_config(text, path="bad.cfg")
    assert excinfo.value.line == 3
    assert str(excinfo.value).startswith("bad.cfg:3:")


def test_invalid_value_reports_line():
    text = "schema_version = 1\n\n[model]\norientation = 0.3\ngamma_com = -1.0\nomega_center = 1000.0\n"
    with pytest.raises(ConfigError) as excinfo:
        parse_config(text)
    assert excinfo.value.line == 5
    assert excinfo.value.exit_code == 2


def test_unknown_key_reports_line():
    text = "schema_version = 1\n[grid]\npoints = 11\nspacing = 2.0\n"
    with pytest.raises(ConfigError) as excinfo:
        parse_config(text)
    assert excinfo.value.line == 4


def test_section_level_error_points_to_header():
    text = "schema_version = 1\n\n[noise]\nkind = \"gaussian\"\nlevel = 0.01\n"
    with pytest.raises(ConfigError) as excinfo:
        parse_config(text)
    assert excinfo.value.line == 3


@pytest.mark.parametrize(
    "fit_lines, line",
    [
        ('free = ["scale", "gama_com"]\n', 4),
        ('free = ["scale", "gamma_pump"]\nfixed = { gamma_pump = 0.0 }\n', 5),
        ('free = ["scale"]\nfixed = { amplitude = 1.0 }\n', 5),
        ('bounds = { gamma_com = [5.0, 1.0] }\n', 4),
        ('free = []\n', 4),
    ],
)
def test_fit_parameters_are_checked_on_load(fit_lines, line):
    text = "schema_version = 1\n\n[fit]\n" + fit_lines
    with pytest.raises(ConfigError) as excinfo:
        parse_config(text, path="fit.cfg")
    assert excinfo.value.line == line
    assert excinfo.value.exit_code == 2


def test_schema_version_is_checked():
    with pytest.raises(ConfigError):
        parse_config("schema_version = 2\n")
    with pytest.raises(ConfigError):
        parse_config("[grid]\npoints = 11\n")


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "none.cfg"))


def test_model_choices_are_exclusive():
    with pytest.raises(ConfigError):
        parse_config("schema_version = 1\n[model]\norientation = 0.3\nepsilon = 0.5\nomega_center = 1.0\n")
    with pytest.raises(ConfigError):
        parse_config("schema_version = 1\n[model]\norientation = 0.3\n")


def test_bias_field_sets_center_and_splitting():
    config = parse_config("schema_version = 1\n[model]\nepsilon = 0.5\nbias_field = 0.93\n")
    model = config.model.to_spin_model(config.species.to_species())
    assert model.omega_center == pytest.approx(larmor_frequency(CESIUM, 0.93))
    assert model.omega_split == pytest.approx(qz_splitting(model.omega_center, CESIUM.hyperfine_splitting))


def test_species_overrides():
    config = parse_config("schema_version = 1\n[species]\npreset = \"cs\"\nhyperfine_splitting = 9.0e9\n")
    species = config.species.to_species()
    assert species.hyperfine_splitting == 9.0e9
    assert species.nuclear_spin == CESIUM.nuclear_spin


def test_seed_override_keeps_provenance(configs_dir):
    config = load_config(str(configs_dir / "fig1.cfg"))
    seeded = config.with_seed(42)
    assert seeded.noise.seed == 42
    assert seeded.digest == config.digest
    assert seeded.source_path == config.source_path
    assert config.with_seed(None) is config


def test_required_section(configs_dir):
    config = load_config(str(configs_dir / "estimate.cfg"))
    with pytest.raises(ConfigError):
        config.require("pulses")
    assert config.require("estimate").F == 4.0


def test_pulses_need_one_form():
    with pytest.raises(ValidationError):
        PulsesSection(pump_duration=1e-3)
