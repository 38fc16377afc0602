"""Error of the truncated Mehler series against the product transition density.

Prints one row per (q, rho, terms): the maximum absolute error over a grid filling
the region (1-q) max(x^2, y^2) <= 2.
"""

import argparse
import math

import numpy as np

from qproc import density


def max_error(q, rho, terms, grid=21):
    b = math.sqrt(density.MEHLER_BOUND / (1 - q))
    gx, gy = np.meshgrid(np.linspace(-b, b, grid), np.linspace(-b, b, grid))
    diff = density.pdf_transition_mehler(gx, gy, rho, q, terms) - density.pdf_transition(gx, gy, rho, q)
    return float(np.max(np.abs(diff)))


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--q", type=float, nargs="+", default=[-0.9, -0.5, 0.0, 0.5, 0.9])
    p.add_argument("--rho", type=float, nargs="+", default=[0.5, 0.8])
    p.add_argument("--terms", type=int, nargs="+", default=[40, 80, 120, 160])
    p.add_argument("--grid", type=int, default=21)
    args = p.parse_args()
    print("q,rho,terms,max_abs_error")
    for q in args.q:
        for rho in args.rho:
            for n in args.terms:
                print(f"{q:g},{rho:g},{n},{max_error(q, rho, n, args.grid):.3e}")


if __name__ == "__main__":
    main()
