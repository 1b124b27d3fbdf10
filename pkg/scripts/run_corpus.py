"""Run every built-in example and print a one-line verdict per entry.

    python3 scripts/run_corpus.py [--out-dir DIR] [--seed N]

With ``--out-dir`` the JSON report of each entry is written to
``DIR/<name>.json``.
"""
import argparse
import pathlib
import sys
import time

from almostsoliton import cli, corpus


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out-dir", type=pathlib.Path)
    parser.add_argument("--seed", type=int)
    args = parser.parse_args(argv)
    if args.out_dir:
        args.out_dir.mkdir(parents=True, exist_ok=True)

    failed = 0
    for name in corpus.names():
        start = time.perf_counter()
        report, _ = cli.run_config(corpus.get(name), seed=args.seed)
        elapsed = time.perf_counter() - start
        job = report["jobs"][0]
        worst = max(job["checks"], key=lambda c: c["max"] / c["tolerance"])
        verdict = "PASS" if report["pass"] else "FAIL"
        print(f"{verdict}  {name:<28} {len(job['checks']):>2} checks  worst {worst['name']} {worst['max']:.2e}/{worst['tolerance']:.0e}  {elapsed:.2f}s")
        failed += not report["pass"]
        if args.out_dir:
            (args.out_dir / f"{name}.json").write_text(cli.dumps(report))
    print(f"{len(corpus.names()) - failed}/{len(corpus.names())} entries pass")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
