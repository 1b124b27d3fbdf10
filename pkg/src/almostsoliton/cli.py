"""Command line front end.

    almostsoliton run CONFIG [--out FILE] [--seed N] [--samples N] [--tolerance-scale S]
    almostsoliton list-corpus
    almostsoliton corpus run NAME [same flags]
    almostsoliton corpus show NAME

``CONFIG`` is a JSON file holding one job or ``{"jobs": [...]}``.  The JSON
report goes to ``--out`` (or stdout); a one-line-per-check summary goes to
stderr.  Exit status: 0 when every check passes, 1 when some check fails,
2 on configuration or evaluation errors.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import corpus
from .config import ConfigError, JobError, parse_job, run_job

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


def _jobs(raw) -> list:
    if isinstance(raw, dict) and "jobs" in raw:
        if set(raw) != {"jobs"} or not isinstance(raw["jobs"], list) or not raw["jobs"]:
            raise ConfigError("jobs", "expected {\"jobs\": [job, ...]} with at least one job")
        return raw["jobs"]
    return [raw]


def run_config(raw, samples=None, seed=None, tolerance_scale=None) -> tuple:
    """Validate every job, then run them in order; returns ``(report_dict, lines)``."""
    raws = _jobs(raw)
    jobs = []
    for n, r in enumerate(raws):
        try:
            jobs.append(parse_job(r, samples=samples, seed=seed, tolerance_scale=tolerance_scale))
        except ConfigError as err:
            if len(raws) > 1:
                raise ConfigError(f"jobs[{n}].{err.field}", str(err).split(": ", 1)[1]) from None
            raise
    records, lines = [], []
    for job in jobs:
        record, report = run_job(job)
        records.append(record)
        lines.append(f"== {job.name}")
        lines.extend(report.lines())
    out = {"jobs": records, "pass": all(r["pass"] for r in records)}
    return out, lines


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def _execute(raw, args) -> int:
    try:
        report, lines = run_config(raw, args.samples, args.seed, args.tolerance_scale)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_ERROR
    except JobError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_ERROR
    text = dumps(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for line in lines:
        print(line, file=sys.stderr)
    print("PASS" if report["pass"] else "FAIL", file=sys.stderr)
    return EXIT_OK if report["pass"] else EXIT_FAIL


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.add_argument("--seed", type=int, help="override the sampling seed")
    p.add_argument("--samples", type=int, help="override the number of random sample points")
    p.add_argument("--tolerance-scale", type=float, help="multiply every tolerance by this factor")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="almostsoliton", description="Verify gradient Ricci almost solitons numerically.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="run a JSON job file")
    p.add_argument("config")
    _add_run_flags(p)
    sub.add_parser("list-corpus", help="list built-in examples")
    c = sub.add_parser("corpus", help="built-in examples")
    csub = c.add_subparsers(dest="corpus_command", required=True)
    cr = csub.add_parser("run", help="run a built-in example")
    cr.add_argument("name")
    _add_run_flags(cr)
    cs = csub.add_parser("show", help="print a built-in example's config")
    cs.add_argument("name")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list-corpus":
        for name in corpus.names():
            print(f"{name:<28} {corpus.CORPUS[name]['provenance']}")
        return EXIT_OK
    if args.command == "run":
        try:
            with open(args.config, encoding="utf-8") as fh:
                raw = json.load(fh)
        except OSError as err:
            print(f"config error: cannot read {args.config}: {err.strerror}", file=sys.stderr)
            return EXIT_ERROR
        except json.JSONDecodeError as err:
            print(f"config error: {args.config}: invalid JSON at line {err.lineno} column {err.colno}: {err.msg}", file=sys.stderr)
            return EXIT_ERROR
        return _execute(raw, args)
    try:
        raw = corpus.get(args.name)
    except KeyError as err:
        print(f"error: {err.args[0]}", file=sys.stderr)
        return EXIT_ERROR
    if args.corpus_command == "show":
        sys.stdout.write(dumps(raw))
        return EXIT_OK
    return _execute(raw, args)


if __name__ == "__main__":
    sys.exit(main())
