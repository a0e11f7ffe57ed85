import csv
import json

import numpy as np
import pytest

from bohmrep.cli import list_scenarios, main
from bohmrep.config import CATALOGUE, ConfigError, apply_overrides, default_config, load_config, parse_config
from bohmrep.report import run
from pathlib import Path

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


@pytest.mark.parametrize("name", sorted(CATALOGUE))
def test_defaults_parse_and_shipped_configs_match(name):
    cfg = default_config(name)
    shipped = load_config(CONFIGS / f"{name}.toml")
    assert shipped.physics == cfg.physics
    assert shipped.grid == cfg.grid and shipped.time == cfg.time and shipped.seeds == cfg.seeds


def test_catalogue_has_nine_entries():
    assert len(CATALOGUE) == 9


def test_unknown_key_names_field_path():
    with pytest.raises(ConfigError) as err:
        parse_config({"scenario": "free_gaussian", "grid": {"n_point": 100}})
    assert err.value.path == "grid.n_point"
    with pytest.raises(ConfigError) as err:
        parse_config({"scenario": "free_gaussian", "potential": {}})
    assert err.value.path == "potential"


@pytest.mark.parametrize(
    "data, path",
    [
        ({}, "scenario"),
        ({"scenario": "nope"}, "scenario"),
        ({"scenario": "free_gaussian", "grid": {"n_points": 1000}}, "grid.n_points"),
        ({"scenario": "free_gaussian", "time": {"dt": -0.1}}, "time.dt"),
        ({"scenario": "free_gaussian", "physics": {"m": "heavy"}}, "physics.m"),
        ({"scenario": "free_gaussian", "grid": {"n_points": 2.5}}, "grid.n_points"),
        ({"scenario": "gauge_ac", "physics": {"mu": [1.0, 2.0]}}, "physics.mu"),
        ({"scenario": "gauge_berry", "representation": "position"}, "representation"),
        ({"scenario": "harmonic", "output": {"formats": ["xml"]}}, "output.formats"),
        ({"scenario": "harmonic", "physics": 3}, "physics"),
    ],
)
def test_invalid_configs_rejected(data, path):
    with pytest.raises(ConfigError) as err:
        parse_config(data)
    assert err.value.path == path


def test_overrides_parse_toml_literals():
    data = apply_overrides({"scenario": "linear"}, ["grid.n_points=512", "physics.a=2", "representation=momentum"])
    cfg = parse_config(data)
    assert cfg.grid["n_points"] == 512 and cfg.physics["a"] == 2.0 and isinstance(cfg.physics["a"], float)
    assert cfg.representation == "momentum" and not cfg.wants_position
    with pytest.raises(ConfigError):
        apply_overrides({}, ["novalue"])


def test_list_is_stable_and_complete(capsys):
    text = list_scenarios()
    assert text == list_scenarios()
    headers = [line for line in text.splitlines() if not line.startswith(" ")]
    assert len(headers) == 9
    for name, info in CATALOGUE.items():
        assert f"{name}  [{info.topic}]" in text
    assert main(["list"]) == 0
    assert capsys.readouterr().out == text


def test_cli_exit_codes(tmp_path, capsys):
    cfg = CONFIGS / "gauge_berry.toml"
    assert main(["run", str(cfg), "--out", str(tmp_path / "ok")]) == 0
    assert main(["run", str(cfg), "--out", str(tmp_path / "bad"), "--override", "physics.dense_samples=16"]) == 1
    err = capsys.readouterr().err
    assert "berry_dense_oracle" in err
    assert main(["run", str(cfg), "--override", "grid.n_points=1000"]) == 2
    assert main(["run", str(tmp_path / "missing.toml")]) == 2
    assert "configuration error" in capsys.readouterr().err
    report = json.loads((tmp_path / "bad" / "report.json").read_text())
    assert report["checks"]["berry_dense_oracle"]["passed"] is False


def test_check_command(tmp_path):
    assert main(["check", "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["scenario"] == "algebra_checks" and report["passed"]


def test_report_deterministic_and_csv_units(tmp_path):
    cfg = apply_overrides({"scenario": "linear"}, ["representation=momentum"])
    cfg = parse_config(cfg)
    r1 = run(cfg, tmp_path / "a")
    r2 = run(cfg, tmp_path / "b")
    assert r1.passed
    assert (tmp_path / "a" / "report.json").read_bytes() == (tmp_path / "b" / "report.json").read_bytes()
    assert (tmp_path / "a" / "timing.json").exists()
    with open(tmp_path / "a" / "trajectories_p.csv") as fh:
        rows = list(csv.reader(fh))
    header = rows[0]
    assert all("[" in h and h.endswith("]") for h in header)
    data = np.array(rows[1:], dtype=float)
    t, paths = data[:, 0], data[:, 1:]
    slopes = np.diff(paths, axis=0) / np.diff(t)[:, None]
    assert np.allclose(slopes, -cfg.physics["a"], atol=1e-9)
    assert r1.representation == "momentum"
    assert not any(k.startswith("airy") for k in r1.checks)
