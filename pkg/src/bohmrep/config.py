"""Scenario catalogue and configuration parsing.

A configuration is a TOML file with top-level ``scenario`` and
``representation`` keys and the sections ``physics``, ``grid``, ``time``,
``seeds`` and ``output``.  Only the keys listed in a scenario's defaults are
accepted; anything else is an error that names the offending field path.
"""

from __future__ import annotations

import copy
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib


class ConfigError(ValueError):
    """Invalid configuration; ``path`` is the dotted name of the bad field."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


@dataclass(frozen=True)
class ScenarioInfo:
    name: str
    topic: str
    description: str
    defaults: dict
    representations: tuple[str, ...] = ("position", "momentum", "both")


_OUTPUT = {"directory": "results", "formats": ["csv", "json"]}

CATALOGUE: dict[str, ScenarioInfo] = {
    info.name: info
    for info in [
        ScenarioInfo(
            "free_gaussian",
            "worked example: free Gaussian packet",
            "spreading packet; currents, quantum potentials and trajectories in x and p",
            {
                "physics": {"m": 1.0, "delta_x": 1.0},
                "grid": {"n_points": 1024, "extent": 80.0},
                "time": {"dt": 0.01, "t_final": 4.0},
                "seeds": {"count": 10000, "span": 3.0},
            },
        ),
        ScenarioInfo(
            "harmonic",
            "worked example: harmonic oscillator",
            "zero-point energy from the phase, x/p current symmetry, classical limit",
            {
                "physics": {"m": 1.0, "K": 1.0, "x0": 2.0, "p0": 0.0, "squeeze": 0.5, "classical_x0": 25.0},
                "grid": {"n_points": 2048, "extent": 112.0},
                "time": {"dt": 0.005, "t_final": 6.0},
                "seeds": {"count": 10000, "span": 1.0},
            },
        ),
        ScenarioInfo(
            "linear",
            "worked example: linear potential",
            "classical p-trajectories, real Airy state in x and its travelling components",
            {
                "physics": {"m": 1.0, "a": 1.0, "delta_x": 1.0, "p0": 0.0},
                "grid": {
                    "n_points": 1024,
                    "extent": 60.0,
                    "airy_n_points": 1024,
                    "airy_start": -40.0,
                    "airy_stop": 8.0,
                    "airy_taper": 0.1,
                },
                "time": {"dt": 0.01, "t_final": 2.0},
                "seeds": {"count": 64, "span": 1.0},
            },
        ),
        ScenarioInfo(
            "cubic",
            "worked example: cubic potential",
            "phase-equation residuals in x and p and the printed-versus-operator j_p comparison",
            {
                "physics": {"m": 1.0, "A": 0.1, "delta_x": 1.0},
                "grid": {"n_points": 2048, "extent": 30.0},
                "time": {"dt": 0.001, "t_final": 0.5},
            },
        ),
        ScenarioInfo(
            "gauge_ab_scalar",
            "gauge invariance: scalar Aharonov-Bohm phase",
            "constant potential shift: unchanged densities and trajectories, accumulated phase",
            {
                "physics": {"V0": 0.7, "t0": 0.0, "t1": 2.0, "split": 0.8, "m": 1.0, "K": 1.0, "x0": 1.0},
                "grid": {"n_points": 512, "extent": 30.0},
                "time": {"dt": 0.01, "t_final": 2.0},
                "seeds": {"count": 64, "span": 1.0},
            },
        ),
        ScenarioInfo(
            "gauge_ab_vector",
            "gauge invariance: vector Aharonov-Bohm phase",
            "closed-loop phase around a flux line for several loop shapes, Stokes cross-check",
            {"physics": {"flux": 0.8, "charge": 1.0, "core_radius": 0.5, "radius": 1.5, "samples": 128}},
            ("both",),
        ),
        ScenarioInfo(
            "gauge_ac",
            "gauge invariance: Aharonov-Casher phase",
            "magnetic moment circling a line charge, Stokes cross-check",
            {"physics": {"line_density": 2.0, "mu": [0.0, 0.0, 0.7], "core_radius": 0.4, "radius": 1.2, "samples": 128}},
            ("both",),
        ),
        ScenarioInfo(
            "gauge_berry",
            "geometric phase: Berry phase of a precessing spin",
            "spin-1/2 aligned with a field swept around a cone; gauge invariance of the overlap product",
            {
                "physics": {
                    "theta": math.pi / 2,
                    "samples": 256,
                    "dense_theta": 1.0,
                    "dense_samples": 4096,
                    "rng_seed": 12345,
                }
            },
            ("both",),
        ),
        ScenarioInfo(
            "algebra_checks",
            "operator algebra: Liouville equation and operator currents",
            "matrix identities and the operator-current form of the Liouville equation",
            {
                "physics": {
                    "dim": 32,
                    "mass": 1.0,
                    "omega": 1.0,
                    "K": 2.0,
                    "a": 0.7,
                    "alpha_free": 2.5,
                    "t_free": 0.5,
                    "alpha_harmonic": 1.8,
                    "t_harmonic": 1.0,
                    "reference_dim": 256,
                    "step": 1e-4,
                    "rng_seed": 2024,
                }
            },
            ("both",),
        ),
    ]
}

POSITIVE = {
    "m", "mass", "K", "a", "A", "delta_x", "omega", "n_points", "extent", "dt", "t_final", "count",
    "span", "squeeze", "radius", "samples", "dense_samples", "dim", "reference_dim", "step",
    "airy_n_points", "airy_taper",
}
POWER_OF_TWO = {"n_points", "airy_n_points"}
FORMATS = {"csv", "json"}


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    representation: str
    physics: dict
    grid: dict = field(default_factory=dict)
    time: dict = field(default_factory=dict)
    seeds: dict = field(default_factory=dict)
    output: dict = field(default_factory=lambda: copy.deepcopy(_OUTPUT))

    def to_dict(self) -> dict:
        out = {"scenario": self.scenario, "representation": self.representation}
        for name in ("physics", "grid", "time", "seeds", "output"):
            section = getattr(self, name)
            if section:
                out[name] = copy.deepcopy(section)
        return out

    @property
    def wants_position(self) -> bool:
        return self.representation in ("position", "both")

    @property
    def wants_momentum(self) -> bool:
        return self.representation in ("momentum", "both")


def _check_value(path: str, key: str, value: Any, default: Any) -> Any:
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(path, f"expected a boolean, got {value!r}")
        return value
    if isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(path, f"expected an integer, got {value!r}")
    elif isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(path, f"expected a number, got {value!r}")
        value = float(value)
        if not math.isfinite(value):
            raise ConfigError(path, "must be finite")
    elif isinstance(default, list):
        if not isinstance(value, list):
            raise ConfigError(path, f"expected a list, got {value!r}")
        if default and all(isinstance(d, float) for d in default):
            if len(value) != len(default) or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
                raise ConfigError(path, f"expected {len(default)} numbers")
            value = [float(v) for v in value]
    elif isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigError(path, f"expected a string, got {value!r}")
    if key in POSITIVE and not value > 0:
        raise ConfigError(path, f"must be positive, got {value!r}")
    if key in POWER_OF_TWO and (value < 64 or value & (value - 1)):
        raise ConfigError(path, f"must be a power of two >= 64, got {value!r}")
    return value


def parse_config(data: dict) -> ScenarioConfig:
    """Validate a raw mapping against the catalogue and fill in defaults."""
    if not isinstance(data, dict):
        raise ConfigError("", "configuration must be a table")
    name = data.get("scenario")
    if name is None:
        raise ConfigError("scenario", "missing")
    if name not in CATALOGUE:
        raise ConfigError("scenario", f"unknown scenario {name!r}; choose from {sorted(CATALOGUE)}")
    info = CATALOGUE[name]
    allowed_top = {"scenario", "representation", "output", *info.defaults}
    for key in data:
        if key not in allowed_top:
            raise ConfigError(key, f"unknown key for scenario {name!r}")
    rep = data.get("representation", info.representations[-1])
    if rep not in info.representations:
        raise ConfigError("representation", f"must be one of {list(info.representations)}, got {rep!r}")
    sections = {}
    for section, defaults in list(info.defaults.items()) + [("output", _OUTPUT)]:
        raw = data.get(section, {})
        if not isinstance(raw, dict):
            raise ConfigError(section, "must be a table")
        merged = copy.deepcopy(defaults)
        for key, value in raw.items():
            path = f"{section}.{key}"
            if key not in defaults:
                raise ConfigError(path, "unknown key")
            merged[key] = _check_value(path, key, value, defaults[key])
        sections[section] = merged
    bad = set(sections["output"]["formats"]) - FORMATS
    if bad:
        raise ConfigError("output.formats", f"unsupported format(s) {sorted(bad)}")
    return ScenarioConfig(name, rep, **sections)


def _parse_scalar(text: str) -> Any:
    try:
        return tomllib.loads(f"v = {text}")["v"]
    except tomllib.TOMLDecodeError:
        return text


def apply_overrides(data: dict, overrides: list[str]) -> dict:
    """Apply ``section.key=value`` overrides; values are parsed as TOML literals."""
    data = copy.deepcopy(data)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(item, "override must look like key=value")
        key, text = item.split("=", 1)
        parts = key.strip().split(".")
        target = data
        for part in parts[:-1]:
            target = target.setdefault(part, {})
            if not isinstance(target, dict):
                raise ConfigError(key, "cannot override inside a non-table value")
        target[parts[-1]] = _parse_scalar(text.strip())
    return data


def load_config(path: str | Path, overrides: list[str] | None = None) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError("", f"cannot read {path}: {exc.strerror}") from None
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("", f"{path} is not valid TOML: {exc}") from None
    return parse_config(apply_overrides(data, overrides or []))


def default_config(name: str) -> ScenarioConfig:
    return parse_config({"scenario": name})
