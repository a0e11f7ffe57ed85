"""Command-line entry point: ``bohmrep run|list|check``."""

from __future__ import annotations

import argparse
import json
import sys

from .config import CATALOGUE, ConfigError, default_config, load_config
from .report import run

EXIT_OK, EXIT_CHECK, EXIT_CONFIG = 0, 1, 2


def list_scenarios() -> str:
    """Catalogue text: name, topic, description and default parameters per scenario."""
    lines = []
    for name in sorted(CATALOGUE):
        info = CATALOGUE[name]
        lines.append(f"{name}  [{info.topic}]")
        lines.append(f"    {info.description}")
        lines.append(f"    representations: {', '.join(info.representations)}")
        for section in sorted(info.defaults):
            params = ", ".join(f"{k}={json.dumps(v)}" for k, v in sorted(info.defaults[section].items()))
            lines.append(f"    {section}: {params}")
    return "\n".join(lines) + "\n"


def _finish(report, stream) -> int:
    for name, check in sorted(report.checks.items()):
        mark = "PASS" if check["passed"] else "FAIL"
        print(f"{mark} {name}: {check['value']!r} {check['relation']} {check['tolerance']!r}", file=stream)
    if report.passed:
        print(f"{report.scenario}: all {len(report.checks)} checks passed", file=stream)
        return EXIT_OK
    print(f"{report.scenario}: failed checks: {', '.join(report.failed)}", file=sys.stderr)
    return EXIT_CHECK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bohmrep", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run a scenario from a TOML configuration")
    p_run.add_argument("config", help="path to the configuration file")
    p_run.add_argument("--out", help="output directory (overrides output.directory)")
    p_run.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                       help="override a configuration value, e.g. grid.n_points=2048")
    sub.add_parser("list", help="list the built-in scenarios")
    p_check = sub.add_parser("check", help="run the operator-algebra check suite")
    p_check.add_argument("--out", help="output directory")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list":
        sys.stdout.write(list_scenarios())
        return EXIT_OK
    try:
        cfg = load_config(args.config, args.override) if args.command == "run" else default_config("algebra_checks")
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    report = run(cfg, args.out)
    return _finish(report, sys.stdout)


if __name__ == "__main__":
    sys.exit(main())
