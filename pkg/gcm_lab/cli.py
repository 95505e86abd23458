from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Sequence

from pydantic import ValidationError

from gcm_lab import models
from gcm_lab.config import DEFAULT_ORDER, LOG_LEVEL, REPORTS_DIR
from gcm_lab.errors import ConfigError, GcmLabError, UnknownLabelError
from gcm_lab.models import YANGIAN_SUITES
from gcm_lab.services.catalog import LabelCatalog
from gcm_lab.services.experiments import ExperimentRunner, run_yangian_suites
from gcm_lab.services.patterns import pattern_report
from gcm_lab.services.presets import RunPresets
from gcm_lab.services.reports import ReportStore, dumps

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gcm_lab", description="Integrable systems on quaternionic coadjoint orbits")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run verification suites and write JSON reports")
    run.add_argument("--preset", help="named configuration from data/presets.json")
    run.add_argument("--n", type=int)
    run.add_argument("--lambda", dest="lam", type=_floats, help='spectrum, e.g. "-1,-3"')
    run.add_argument("--trials", type=int)
    run.add_argument("--tol", type=float)
    run.add_argument("--fd-step", dest="fd_step", type=float)
    run.add_argument("--order", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--suite", dest="suites", action="append", choices=["commute", "independence", "reduced", "patterns", "yangian", "all"])
    run.add_argument("--out", help=f"report directory (default {REPORTS_DIR})")

    explain = sub.add_parser("explain", help="formula and description behind a function or suite label")
    explain.add_argument("label")

    patterns = sub.add_parser("patterns", help="count (and list) integer patterns")
    patterns.add_argument("--kind", choices=["gl", "sp"], required=True)
    patterns.add_argument("--top", type=_ints, required=True, help='top row, e.g. "2,1,0"')
    patterns.add_argument("--list", dest="include_list", action="store_true")

    yangian = sub.add_parser("yangian", help="truncated gauge-series checks")
    yangian.add_argument("--n", type=int, default=2)
    yangian.add_argument("--order", type=int, default=DEFAULT_ORDER)
    yangian.add_argument("--seed", type=int, default=0)
    yangian.add_argument("--trials", type=int, default=10)
    yangian.add_argument("--suite", dest="suites", action="append", choices=list(YANGIAN_SUITES))
    yangian.add_argument("--out", help="write yangian.json into this directory")
    return parser


def _run(args: argparse.Namespace) -> int:
    overrides = {
        "n": args.n,
        "lam": args.lam,
        "trials": args.trials,
        "tol": args.tol,
        "fd_step": args.fd_step,
        "order": args.order,
        "seed": args.seed,
        "suites": args.suites,
    }
    try:
        if args.preset:
            config = RunPresets().build_config(args.preset, **overrides)
        else:
            config = models.RunConfig.model_validate(
                {("lambda" if k == "lam" else k): v for k, v in overrides.items() if v is not None}
            )
    except (ValidationError, ValueError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE

    config.out = args.out or config.out or str(REPORTS_DIR)
    try:
        summary, _ = ExperimentRunner(ReportStore(config.out)).run(config)
    except ConfigError as exc:
        for issue in exc.issues:
            print(f"{issue.code}: {issue.message}", file=sys.stderr)
        return EXIT_USAGE
    except GcmLabError as exc:
        print(f"run aborted: {exc}", file=sys.stderr)
        return EXIT_FAILED

    sys.stdout.write(dumps(summary.model_dump(by_alias=True)))
    return EXIT_OK if summary.passed else EXIT_FAILED


def _explain(args: argparse.Namespace) -> int:
    try:
        sys.stdout.write(LabelCatalog().render(args.label))
    except UnknownLabelError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def _patterns(args: argparse.Namespace) -> int:
    try:
        report = pattern_report(args.kind, args.top, include_list=args.include_list)
    except GcmLabError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(dumps(report))
    return EXIT_OK


def _yangian(args: argparse.Namespace) -> int:
    if args.n < 1 or args.order < 1 or args.trials < 1:
        print("n, order and trials must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        report = run_yangian_suites(args.n, args.order, args.seed, args.suites or YANGIAN_SUITES, trials=args.trials)
    except GcmLabError as exc:
        print(f"run aborted: {exc}", file=sys.stderr)
        return EXIT_FAILED
    if args.out:
        ReportStore(args.out).save("yangian", report)
    sys.stdout.write(dumps(report))
    return EXIT_OK if report["pass"] else EXIT_FAILED


COMMANDS = {"run": _run, "explain": _explain, "patterns": _patterns, "yangian": _yangian}


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=LOG_LEVEL, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    return COMMANDS[args.command](args)
