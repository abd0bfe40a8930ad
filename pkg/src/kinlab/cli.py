"""Command line interface.

Subcommands:

    kinlab run <config>...     run scenario config files
    kinlab suite <name>        run a shipped suite (theorem11_d1, heat_d1,
                               nash, quick, all)
    kinlab nash                inequality verification batch
    kinlab heat                heat-equation baseline experiments
    kinlab report <dir>        print the summary table of a finished suite

Common flags: --out DIR, --parallel N, --seed S.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import ConfigParseError, parse_config
from .errors import KinlabError
from .harness import Job, run_suite, verify_manifest
from .suites import SUITE_NAMES, suite_jobs


def _common(parser):
    parser.add_argument("--out", default="kinlab_out", help="output directory")
    parser.add_argument("--parallel", type=int, default=1, metavar="N")
    parser.add_argument("--seed", type=int, default=0, metavar="S")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kinlab", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run scenario config files")
    p_run.add_argument("configs", nargs="+", metavar="CONFIG")
    _common(p_run)

    p_suite = sub.add_parser("suite", help="run a shipped suite")
    p_suite.add_argument("name", choices=SUITE_NAMES)
    _common(p_suite)

    p_nash = sub.add_parser("nash", help="run the inequality verification batch")
    p_nash.add_argument("--count", type=int, default=500)
    _common(p_nash)

    p_heat = sub.add_parser("heat", help="run heat baselines")
    p_heat.add_argument("--mode", choices=("whole", "half", "localization"),
                        default="half")
    p_heat.add_argument("--t-max", type=float, default=1.0e4)
    p_heat.add_argument("--dx", type=float, default=0.1)
    _common(p_heat)

    p_rep = sub.add_parser("report", help="summarise a finished suite directory")
    p_rep.add_argument("dir")
    return parser


def _finish(result) -> int:
    for line in result.summary_lines():
        print(line)
    print(f"manifest: {result.manifest_path}")
    return result.exit_code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            jobs = []
            failed = False
            for path in args.configs:
                text = Path(path).read_text()
                try:
                    cfg = parse_config(text)
                except ConfigParseError as exc:
                    failed = True
                    for err in exc.errors:
                        print(f"{path}: {err}", file=sys.stderr)
                    continue
                jobs.append(Job(cfg.name, "kinetic", scenario=cfg))
            if failed:
                return 1
            result = run_suite(jobs, Path(args.out), args.parallel, args.seed)
            return _finish(result)

        if args.command == "suite":
            jobs = suite_jobs(args.name)
            result = run_suite(jobs, Path(args.out), args.parallel, args.seed)
            return _finish(result)

        if args.command == "nash":
            jobs = [Job("nash_d1", "nash", nash_count=args.count, seed=args.seed)]
            result = run_suite(jobs, Path(args.out), args.parallel, args.seed)
            return _finish(result)

        if args.command == "heat":
            if args.mode == "localization":
                jobs = [Job("heat_localization_d1", "heat_localization",
                            t_max=args.t_max, dx=args.dx)]
            else:
                jobs = [Job(f"heat_{args.mode}_d1", "heat_decay",
                            heat_mode=args.mode, t_max=args.t_max, dx=args.dx)]
            result = run_suite(jobs, Path(args.out), args.parallel, args.seed)
            return _finish(result)

        if args.command == "report":
            out_dir = Path(args.dir)
            problems = verify_manifest(out_dir)
            manifest = json.loads((out_dir / "manifest.json").read_text())
            for run in manifest["runs"]:
                status = run["status"]
                print(f"{run['name']} [{run['kind']}]: {status}"
                      + (f" ({run['error']})" if run["error"] else ""))
                for fit in run["fits"]:
                    verdict = "pass" if fit["passed"] else "FAIL"
                    print(f"  {fit['quantity']}: measured {fit['measured']:+.4f}"
                          f" predicted {fit['predicted']} [{verdict}]")
            for p in problems:
                print(f"checksum problem: {p}", file=sys.stderr)
            return 1 if problems else 0
    except KinlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
