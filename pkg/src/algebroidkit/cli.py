"""Command line interface: ``check``, ``fixtures`` and ``explain``.

Exit codes: 0 all selected checks pass, 1 a check failed, 2 schema or parse
error (or an unknown check name for ``explain``), 3 the suite needs inputs
the problem file does not provide.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import json
import sys
from pathlib import Path

from . import __version__
from .fixtures import fixture, fixture_names
from .manifold import SamplePlan
from .problem import SchemaError, canonical_digest, load_problem
from .suites import CHECKS, SUITES, MissingInputs, run_suite

__all__ = ["main", "build_report", "REPORT_SCHEMA"]

REPORT_SCHEMA = "report-v1"
EXIT_OK, EXIT_FAIL, EXIT_SCHEMA, EXIT_MISSING = 0, 1, 2, 3


def build_report(doc: dict, suite: str, plan: SamplePlan, tol: float, result) -> dict:
    """The JSON report; everything except ``timestamp`` is a function of the inputs."""
    return {
        "schema": REPORT_SCHEMA,
        "version": __version__,
        "input_digest": canonical_digest(doc),
        "plan": {"seed": plan.seed, "points": plan.count, "margin": plan.margin, "tol": tol, "suite": suite},
        "reports": [r.to_dict() for r in result.reports],
        "skipped": {k: v for k, v in sorted(result.skipped.items())},
        "verdicts": {suite: bool(result.passed)},
        "failures": result.failures(),
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
    }


def _print_text(report: dict, out) -> None:
    for r in report["reports"]:
        status = "PASS" if r["passed"] else "FAIL"
        if "max_residual" in r:
            print(f"{status}  {r['name']:<36} max {r['max_residual']:.3e}  tol {r['tol']:.1e}  {r['tag']}", file=out)
        else:
            print(f"{status}  {r['name']:<36} {r['note'] or r['tag']}", file=out)
    for name, missing in report["skipped"].items():
        print(f"SKIP  {name:<36} needs {', '.join(missing)}", file=out)
    suite, ok = next(iter(report["verdicts"].items()))
    tail = "" if ok else f" (failed: {', '.join(report['failures'])})"
    print(f"suite {suite}: {'PASS' if ok else 'FAIL'}{tail}", file=out)


def _cmd_check(args) -> int:
    try:
        prob = load_problem(Path(args.file))
    except SchemaError as err:
        print(f"schema error at {err.where}: {err.message}", file=sys.stderr)
        return EXIT_SCHEMA
    plan = SamplePlan(
        seed=int(prob.options.get("seed", 0)) if args.seed is None else args.seed,
        count=int(prob.options.get("points", 64)) if args.points is None else args.points,
    )
    tol = prob.tol if args.tol is None else args.tol
    try:
        result = run_suite(prob, args.suite, plan, tol)
    except MissingInputs as err:
        print(f"missing inputs: {err}", file=sys.stderr)
        return EXIT_MISSING
    report = build_report(prob.raw, args.suite, plan, tol, result)
    if args.json:
        Path(args.json).write_text(json.dumps(report, indent=2, ensure_ascii=False) + "\n")
    _print_text(report, sys.stdout)
    return EXIT_OK if result.passed else EXIT_FAIL


def _cmd_fixtures(args) -> int:
    names = fixture_names()
    if args.name is not None:
        if args.name not in names:
            print(f"unknown fixture {args.name!r}; known: {', '.join(names)}", file=sys.stderr)
            return EXIT_SCHEMA
        names = [args.name]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name in names:
        path = out / f"{name}.json"
        path.write_text(json.dumps(fixture(name), indent=2) + "\n")
        print(path)
    return EXIT_OK


def _cmd_explain(args) -> int:
    if args.check not in CHECKS:
        print(f"unknown check {args.check!r}; known: {', '.join(sorted(CHECKS))}", file=sys.stderr)
        return EXIT_SCHEMA
    formula, tag = CHECKS[args.check]
    print(f"{args.check}: {formula}")
    print(f"tag: {tag}")
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="algebroidkit", description="Residual checks for Lie algebroids and momentum sections.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="run a suite of checks on a problem file")
    c.add_argument("file")
    c.add_argument("--suite", required=True, choices=SUITES)
    c.add_argument("--points", type=int, default=None, help="sample points (default 64)")
    c.add_argument("--tol", type=float, default=None, help="residual tolerance (default 1e-9)")
    c.add_argument("--seed", type=int, default=None, help="sampling seed (default 0)")
    c.add_argument("--json", default=None, metavar="PATH", help="also write the JSON report here")
    c.set_defaults(func=_cmd_check)

    f = sub.add_parser("fixtures", help="write built-in fixture files")
    f.add_argument("name", nargs="?", default=None)
    f.add_argument("--out", default=".", metavar="DIR")
    f.set_defaults(func=_cmd_fixtures)

    e = sub.add_parser("explain", help="print the residual formula of a check")
    e.add_argument("check")
    e.set_defaults(func=_cmd_explain)
    return p


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        # argparse exits 2 on usage errors, which matches the schema/parse code
        return int(err.code or 0)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
