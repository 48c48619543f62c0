"""Command line interface: ``thermovar run | check | compare``.

Exit codes: 0 when every verdict passes, 1 when a verdict fails, 2 on
errors (bad configuration, schema mismatch, solver abort).
"""

import argparse
import sys

from ..errors import ThermoError
from .checks import SUITE_NAMES, run_suite
from .compare import compare_runs
from .config import load_config
from .scenarios import run_scenario

EXIT_PASS, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


def _cmd_run(args):
    cfg = load_config(args.config)
    report = run_scenario(cfg, out=args.out)
    for v in report.verdicts:
        print(v.line())
    print(f"{report.scenario}: {'PASS' if report.passed else 'FAIL'} ({len(report.verdicts)} verdicts)")
    return EXIT_PASS if report.passed else EXIT_FAIL


def _cmd_check(args):
    verdicts = run_suite(args.suite, seed=args.seed, jobs=args.jobs)
    for v in verdicts:
        print(v.line())
    failed = sum(not v.passed for v in verdicts)
    print(f"suite {args.suite}: {len(verdicts) - failed}/{len(verdicts)} passed")
    return EXIT_FAIL if failed else EXIT_PASS


def _cmd_compare(args):
    res = compare_runs(args.a, args.b, args.tol, include_diagnostics=args.include_diagnostics)
    worst = res.worst()
    print(f"max relative difference {res.max_rel:.6g} (tol {args.tol:g})" + (f" at {worst}" if worst else ""))
    print("PASS" if res.passed else "FAIL")
    return EXIT_PASS if res.passed else EXIT_FAIL


def build_parser():
    parser = argparse.ArgumentParser(prog="thermovar", description="Thermodynamic variational solvers and checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a configured scenario")
    p.add_argument("--config", required=True, help="path to a key = value configuration file")
    p.add_argument("--out", default=None, help="output directory (overrides the config)")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("check", help="run a suite of quantitative checks")
    p.add_argument("--suite", required=True, choices=SUITE_NAMES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1, help="checks run in parallel threads")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("compare", help="compare two runs column by column")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--tol", type=float, required=True)
    p.add_argument("--include-diagnostics", action="store_true",
                   help="also compare diagnostics.csv and cross.csv")
    p.set_defaults(func=_cmd_compare)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ThermoError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
