"""Run a configured scenario and write its CSV tables and JSON report."""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import ScenarioConfig
from .scenarios import ScenarioResult, run_scenario

RESIDUAL_KEYS = ("continuity", "phase_residual")
ENERGY_KEYS = ("energy",)


def to_jsonable(obj):
    """Plain-JSON view of nested numpy/python values; non-finite floats become ``None``."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, complex):
        return [to_jsonable(obj.real), to_jsonable(obj.imag)]
    return obj


@dataclass
class RunReport:
    scenario: str
    representation: str
    config: dict
    checks: dict
    residuals: dict
    energies: dict
    summary: dict
    files: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks.values())

    @property
    def failed(self) -> list[str]:
        return sorted(k for k, c in self.checks.items() if not c["passed"])

    def to_dict(self, include_timing: bool = False) -> dict:
        out = {
            "scenario": self.scenario,
            "representation": self.representation,
            "passed": self.passed,
            "failed_checks": self.failed,
            "checks": self.checks,
            "residuals": self.residuals,
            "energies": self.energies,
            "summary": self.summary,
            "files": self.files,
            "config": self.config,
        }
        if include_timing:
            out["timing"] = self.timing
        return to_jsonable(out)


def build_report(cfg: ScenarioConfig, result: ScenarioResult, seconds: float) -> RunReport:
    checks = {k: c.as_dict() for k, c in sorted(result.checks.items())}
    pick = lambda keys: {k: c["value"] for k, c in checks.items() if any(s in k for s in keys)}
    energies = pick(ENERGY_KEYS)
    if "energies" in result.summary:
        energies.update({f"value_{k}": v for k, v in result.summary["energies"].items()})
    return RunReport(
        cfg.scenario,
        cfg.representation,
        cfg.to_dict(),
        checks,
        pick(RESIDUAL_KEYS),
        energies,
        to_jsonable(result.summary),
        timing={"wall_seconds": seconds},
    )


def _format(v: float) -> str:
    return "" if not np.isfinite(v) else repr(float(v))


def write_csv(path: Path, header: list[str], rows: np.ndarray) -> None:
    rows = np.atleast_2d(rows)
    lines = [",".join(header)]
    lines += [",".join(_format(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def write_outputs(report: RunReport, result: ScenarioResult, out_dir: Path, formats) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    if "csv" in formats:
        for name, (header, rows) in sorted(result.tables.items()):
            path = out_dir / f"{name}.csv"
            write_csv(path, header, rows)
            report.files[name] = path.name
    if "json" in formats:
        (out_dir / "report.json").write_text(
            json.dumps(report.to_dict(), indent=2, sort_keys=True, allow_nan=False) + "\n"
        )
        (out_dir / "timing.json").write_text(json.dumps(to_jsonable(report.timing), indent=2, sort_keys=True) + "\n")


def run(cfg: ScenarioConfig, out_dir: str | Path | None = None) -> RunReport:
    """Execute ``cfg`` end to end and write its outputs.

    Tables go to ``<name>.csv`` and the report to ``report.json``; wall-clock
    timing is kept out of the report in ``timing.json`` so the report is
    byte-identical across runs of the same configuration.
    """
    start = time.perf_counter()
    result = run_scenario(cfg)
    report = build_report(cfg, result, time.perf_counter() - start)
    target = Path(out_dir if out_dir is not None else cfg.output["directory"])
    write_outputs(report, result, target, cfg.output["formats"])
    return report
