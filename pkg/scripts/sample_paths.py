"""Simulate OU or q-Wiener paths, export them as CSV and compare empirical covariances with theory."""

import argparse
import csv

import numpy as np

from qproc.process import formulas, simulate


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--q", type=float, default=0.5)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--kind", choices=("ou", "qwiener"), default="ou")
    p.add_argument("--paths", type=int, default=20_000)
    p.add_argument("--t1", type=float, default=3.0)
    p.add_argument("--dt", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--export", type=int, default=5, help="number of paths written to --output")
    p.add_argument("--output", default="paths.csv")
    args = p.parse_args()

    t0 = args.dt if args.kind == "qwiener" else 0.0
    times = t0 + args.dt * np.arange(int(round((args.t1 - t0) / args.dt)) + 1)
    if args.kind == "ou":
        x = simulate.simulate_ou_paths(simulate.OUParams(args.q, args.alpha), times, args.paths, args.seed)
        cov = lambda s, t: formulas.ou_covariance(s, t, args.alpha)  # noqa: E731
    else:
        x = simulate.simulate_qwiener_paths(args.q, times, args.paths, args.seed)
        cov = formulas.wiener_covariance

    with open(args.output, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["path", "time", "value"])
        for i in range(min(args.export, args.paths)):
            for t, v in zip(times, x[i]):
                w.writerow([i, f"{t:.12g}", f"{v:.12g}"])

    print("s,t,empirical,theory,se")
    for j in range(len(times)):
        prod = x[:, 0] * x[:, j]
        se = prod.std(ddof=1) / np.sqrt(args.paths)
        print(f"{times[0]:g},{times[j]:g},{prod.mean():.5f},{cov(times[0], times[j]):.5f},{se:.5f}")
    print(f"E X^4 at t={times[-1]:g}: {np.mean(x[:, -1] ** 4):.4f}"
          + (f" (theory {2 + args.q:.4f})" if args.kind == "ou" else ""))


if __name__ == "__main__":
    main()
