"""Command-line entry point: run, list-scenarios, print-defaults."""

from __future__ import annotations

import argparse
import logging
import sys

import yaml

from blowup_reduction.cli_harness.config import (
    DEFAULTS,
    OUTPUT_ENV,
    SCENARIO_KINDS,
    ConfigError,
    defaults_for,
    load_config,
)
from blowup_reduction.cli_harness.runner import run_scenario, write_report

log = logging.getLogger("blowup_reduction")

DESCRIPTIONS = {
    "identities": "half-space and R^(n-1) integral identities, c7/c6 ratio",
    "critical_search": "constrained critical points of a weight on a boundary, with stability evidence",
    "expansion_sweep": "reduced energy and d-gradient over a (d, eps) grid, written as a table",
    "scaling_fits": "error-term norms I1..I3 against eps, power and log fits",
    "torus_example": "threshold a* and weighted-curvature signs at the axis points of a sphere",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blowup-reduction",
        description="Run reduction checks from scenario files.",
        epilog=f"The output directory can be overridden with ${OUTPUT_ENV}.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario file")
    run.add_argument("config", help="YAML or JSON scenario file")
    run.add_argument("-o", "--output-dir", help="write outputs here (beats the config and environment)")
    run.add_argument("-q", "--quiet", action="store_true", help="print only the summary line")

    sub.add_parser("list-scenarios", help="list scenario kinds")

    pd = sub.add_parser("print-defaults", help="print default settings as YAML")
    pd.add_argument("kind", nargs="?", choices=SCENARIO_KINDS, help="only this scenario kind")
    return parser


def _cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    log.info("running %s from %s", cfg.kind, args.config)
    report = run_scenario(cfg)
    out = write_report(report, cfg, args.output_dir)
    if not args.quiet:
        for c in report.checks:
            print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}")
    failed = sum(not c.passed for c in report.checks)
    print(f"{cfg.kind}: {len(report.checks) - failed}/{len(report.checks)} checks passed; output in {out}")
    return 0 if report.passed else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "list-scenarios":
        for kind in SCENARIO_KINDS:
            print(f"{kind:16s} {DESCRIPTIONS[kind]}")
        return 0
    kinds = [args.kind] if args.kind else list(DEFAULTS)
    docs = [defaults_for(k) for k in kinds]
    print(yaml.safe_dump_all(docs, sort_keys=False), end="")
    return 0


if __name__ == "__main__":
    sys.exit(main())
