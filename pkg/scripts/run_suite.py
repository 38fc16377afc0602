"""Run a verification suite, time it and write the reports and coverage map as JSON."""

import argparse
import json
import sys
import time

from qproc.verify import report, suite


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--suite", choices=sorted(suite.SUITES), default="default")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--output", default="reports.json")
    args = p.parse_args()
    t0 = time.perf_counter()
    reports = suite.run_suite(args.suite, args.seed, args.threads)
    elapsed = time.perf_counter() - t0
    cov = suite.coverage_map(reports)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(report.reports_to_json(reports, coverage=cov) + "\n")
    # the last summary line carries the expected number of chance Monte Carlo failures
    print(report.summary_table(reports).splitlines()[-1], file=sys.stderr)
    fails = [r.check_id for r in reports if not r.passed]
    families = {}
    for r in reports:
        fam = r.check_id.split("/", 1)[0]
        n, k = families.get(fam, (0, 0))
        families[fam] = (n + 1, k + r.passed)
    for fam, (n, k) in sorted(families.items()):
        print(f"{fam:<40} {k:>5}/{n:<5}")
    print(f"{len(reports) - len(fails)}/{len(reports)} passed in {elapsed:.1f} s; wrote {args.output}")
    if fails:
        print(json.dumps(fails, indent=1))
    return 0 if not fails else 2


if __name__ == "__main__":
    sys.exit(main())
