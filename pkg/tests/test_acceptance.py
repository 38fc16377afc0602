"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line in the terminal summary."""

import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from qproc import density, orthopoly, qseries
from qproc.errors import DomainError
from qproc.process import formulas, simulate
from qproc.verify import checks
from qproc.verify.report import derive_seed, mc_mean

pytestmark = pytest.mark.slow

Q_GRID = (-0.9, -0.5, 0.0, 0.5, 0.9)
Q_ALL = Q_GRID + (1.0,)
ALPHA = 1.0
MC = checks.MCConfig(n_paths=100_000, seed=11)


def _family(reports, *prefixes):
    return [r for r in reports if r.check_id.split("/", 1)[0] in prefixes]


def _summary(reports):
    bad = [r for r in reports if not r.passed]
    worst = max(reports, key=lambda r: r.error / r.tolerance if r.tolerance else r.error)
    text = f"{len(reports) - len(bad)}/{len(reports)} checks; worst {worst.check_id} err={worst.error:.3g}"
    return not bad, text, bad


@pytest.fixture(scope="module")
def moment_reports():
    return {q: checks.check_moments_and_covariances(q, ALPHA, MC) for q in Q_ALL}


@pytest.fixture(scope="module")
def bridge_reports():
    return {q: checks.check_bridges(q, ALPHA, MC) for q in Q_ALL}


def test_c01_hermite_orthogonality(criterion):
    t0 = time.perf_counter()
    reps = []
    for q in Q_GRID:
        reps += _family(checks.check_orthogonality(q, n_max=8), "orthogonality.hermite")
    elapsed = time.perf_counter() - t0
    ok, text, bad = _summary(reps)
    # relative 1e-8, and 1e-7 at q = 0.9
    assert all(r.tolerance == (1e-7 if r.check_id.startswith("orthogonality.hermite/q=0.9") else 1e-8)
               for r in reps)
    ok = ok and len(reps) == 5 * 45 and elapsed < 30
    criterion(1, ok, f"{text}; {elapsed:.1f} s")
    assert ok, bad


def test_c02_asc_orthogonality(criterion):
    reps = []
    for q in Q_GRID:
        reps += _family(checks.check_orthogonality(q, n_max=6, rhos=(0.3, 0.7)), "orthogonality.asc")
    ok, text, bad = _summary(reps)
    ok = ok and len(reps) == 5 * 2 * 28 and all(r.tolerance == 1e-7 for r in reps)
    criterion(2, ok, text)
    assert ok, bad


def test_c03_chapman_kolmogorov(criterion):
    reps = []
    for q in Q_ALL:
        for r1, r2 in ((0.7, 0.5), (0.4, 0.8), (0.0, 0.6), (0.6, 0.0)):
            got = checks.check_chapman_kolmogorov(q, r1, r2)
            assert len(got) == 9
            reps += got
    ok, text, bad = _summary(reps)
    ok = ok and all(r.tolerance == 1e-7 and r.tolerance_kind == "absolute" for r in reps)
    criterion(3, ok, text)
    assert ok, bad


def test_c04_mehler_80_terms(criterion):
    # the full convergence region (1-q) max(x^2, y^2) <= 2 on a 21 x 21 grid
    worst = {}
    for q in Q_GRID:
        b = math.sqrt(density.MEHLER_BOUND / (1 - q))
        gx, gy = np.meshgrid(np.linspace(-b, b, 21), np.linspace(-b, b, 21))
        for rho in (-0.8, -0.5, 0.3, 0.8):
            err = np.max(np.abs(density.pdf_transition_mehler(gx, gy, rho, q, 80)
                                - density.pdf_transition(gx, gy, rho, q)))
            worst[(q, rho)] = float(err)
    failing = {k: v for k, v in worst.items() if v > 1e-8}
    detail = f"max err {max(worst.values()):.3g} (tol 1e-8); failing (q, rho): " + \
        ", ".join(f"({q:g},{r:g})={e:.2g}" for (q, r), e in sorted(failing.items()))
    criterion(4, not failing, detail if failing else f"max err {max(worst.values()):.3g}")
    assert not failing, detail


def test_c05_martingales(criterion):
    t0 = time.perf_counter()
    reps = []
    transitions = 0
    for q in Q_ALL:
        got = checks.check_martingales(q, ALPHA, MC)
        reps += got
        # three OU states, one stationary pair, three forward and three reverse q-Wiener states
        transitions += 10 * MC.n_paths
    elapsed = time.perf_counter() - t0
    mart = _family(reps, "martingale.ou_hermite", "martingale.ou_hermite_stationary",
                   "martingale.qwiener_forward", "martingale.qwiener_reverse")
    ok, text, bad = _summary(reps)
    degrees = {int(r.check_id.rsplit("n=", 1)[1]) for r in mart}
    ok = ok and degrees == {1, 2, 3, 4} and elapsed < 120
    assert all(r.tolerance_kind == "standard-error-multiple" for r in reps)
    criterion(5, ok, f"{text}; {transitions // len(Q_ALL):,} transitions per q; {elapsed:.1f} s")
    assert transitions // len(Q_ALL) >= 1_000_000
    assert ok, bad


def test_c06_moment_identities(criterion):
    n = 1_000_000
    reps = []
    for q in Q_ALL:
        name = f"acceptance.moments/q={q:g}"
        seed = derive_seed(MC.seed, name)
        x = simulate.simulate_ou_paths(simulate.OUParams(q, ALPHA), [0.0, 1.0, 2.0, 3.0], n, seed)
        rho = math.exp(-ALPHA)
        reps.append(mc_mean(f"{name},fourth", x[:, 0] ** 4, 2 + q, seed))
        for lag in (1, 2, 3):
            reps.append(mc_mean(f"{name},square_square,lag={lag}", x[:, 0] ** 2 * x[:, lag] ** 2,
                                1 + rho ** (2 * lag) * (1 + q), seed))
        for j, k in ((1, 1), (1, 2)):
            reps.append(mc_mean(f"{name},square_cross,j={j},k={k}", x[:, j] ** 2 * x[:, 0] * x[:, j + k],
                                rho ** (j + k) * (2 + q), seed))
        ex4, ex2x2, ex2xx = formulas.moment_identities(rho, q, 0, 2, 1, 2)
        assert (ex4, ex2x2, ex2xx) == pytest.approx((2 + q, 1 + rho**4 * (1 + q), rho**3 * (2 + q)))
    ok, text, bad = _summary(reps)
    criterion(6, ok, f"{text}; {n:,} samples")
    assert ok, bad


def test_c07_increments(criterion, moment_reports):
    exact = []
    for q in Q_ALL:
        for sig, tau, x in ((1.0, 2.0, 0.5), (0.3, 2.5, -1.0), (2.0, 2.1, 0.0)):
            exact.append(formulas.increment_moments(sig, tau, x, q)[0] == tau - sig)
    reps = []
    for q in Q_ALL:
        reps += _family(moment_reports[q], "increments.moments", "increments.covariance")
    ok, text, bad = _summary(reps)
    ok = ok and all(exact) and any("power=3" in r.check_id for r in reps)
    criterion(7, ok, f"m2 exact in {sum(exact)}/{len(exact)}; {text}")
    assert ok, bad


def test_c08_bridge_formulas(criterion, bridge_reports):
    reps = []
    for q in Q_ALL:
        reps += [r for r in bridge_reports[q] if r.tolerance_kind == "absolute"]
    oracle = [r for r in reps if r.tolerance == 1e-6]
    families = {r.check_id.split("/", 1)[0] for r in oracle}
    ok, text, bad = _summary(reps)
    ok = ok and {"bridge.ou_hermite", "bridge.ou_mean", "bridge.ou_var", "bridge.qwiener_mean",
                 "bridge.qwiener_second", "bridge.qwiener_var", "bridge.hermite_table"} <= families
    ok = ok and MC.bridge_points >= 20
    criterion(8, ok, f"{text}; {MC.bridge_points} random points per formula")
    assert ok, bad


def test_c09_covariance_structure(criterion, moment_reports):
    reps = []
    for q in Q_ALL:
        reps += _family(moment_reports[q], "covariance.ou_lag", "covariance.qwiener", "selfsimilarity")
    ok, text, bad = _summary(reps)
    ok = ok and MC.n_paths == 100_000
    criterion(9, ok, text)
    assert ok, bad


def test_c10_classical_limits(criterion, moment_reports, bridge_reports):
    errs = []
    y, rho = 0.7, 0.6
    xs = np.linspace(-4, 4, 81)
    gauss = np.exp(-((xs - rho * y) ** 2) / (2 * (1 - rho * rho))) / math.sqrt(2 * math.pi * (1 - rho * rho))
    errs.append(np.max(np.abs(density.pdf_transition(xs, y, rho, 1.0) - gauss)))
    errs.append(np.max(np.abs(density.pdf_stationary(xs, 1.0) - np.exp(-xs * xs / 2) / math.sqrt(2 * math.pi))))
    a, b, d, g = 0.4, -0.7, 0.6, 0.9
    r1, r2 = math.exp(-d), math.exp(-g)
    gvar = (1 - r1 * r1) * (1 - r2 * r2) / (1 - (r1 * r2) ** 2)
    errs.append(abs(formulas.ou_bridge_var(a, b, d, g, 1.0, 1.0) - gvar))
    errs.append(abs(formulas.harness_var(0.3, -0.2, 2.0, 0.5, 1.5, 1.0) - 0.5 * 1.5 / 2.0))
    errs.append(abs(formulas.increment_moments(1.0, 2.5, 0.3, 1.0)[2] - 3 * 1.5**2))
    errs.append(abs(formulas.ou_covariance(1.0, 2.5, 0.7) - math.exp(-0.7 * 1.5)))
    h = orthopoly.hermite_seq(4, xs, 1.0).values
    errs.append(np.max(np.abs(h[4] - (xs**4 - 6 * xs**2 + 3))))
    gs = np.linspace(-2, 2, 401)
    errs.append(np.max(np.abs(density.pdf_stationary(gs, 0.0) - np.sqrt(4 - gs * gs) / (2 * math.pi))))
    formula_ok = max(errs) <= 1e-12
    mc = _family(moment_reports[1.0], "moments.transition_mean", "moments.transition_var", "covariance.ou_lag",
                 "covariance.qwiener")
    mc += [r for r in bridge_reports[1.0] if r.tolerance_kind == "standard-error-multiple"]
    ok, text, bad = _summary(mc)
    ok = ok and formula_ok
    criterion(10, ok, f"formula max err {max(errs):.2g}; {text}")
    assert formula_ok, errs
    assert ok, bad


def test_c11_guards(criterion):
    with pytest.raises(DomainError, match="does not exist for q > 1"):
        qseries.QParam(1.5)
    with pytest.raises(DomainError):
        orthopoly.phi(0.0, 2.0, 0.75)
    with pytest.raises(DomainError):
        orthopoly.phi(0.0, 3.0, 0.5)
    reps = checks.check_guards()
    ok = all(r.passed for r in reps)
    criterion(11, ok, "q = 1.5 rejected with the non-existence message; phi outside (1-q)t^2 < 1 rejected")
    assert ok


def _cli(args, threads):
    env = dict(os.environ, QPROC_THREADS=str(threads))
    res = subprocess.run([sys.executable, "-m", "qproc", *args], capture_output=True, env=env, check=False)
    return res.returncode, res.stdout


def test_c12_determinism(criterion, tmp_path):
    sim = ["simulate", "--q", "0.5", "--alpha", "1", "--t0", "0", "--t1", "10", "--dt", "0.01",
           "--paths", "3", "--seed", "42"]
    outs = {}
    for label, args in (("simulate", sim), ("simulate-json", sim + ["--format", "json"]),
                        ("verify", ["verify", "--suite", "quick", "--seed", "7"])):
        runs = [_cli(args, t) for t in (1, 1, 3, 0)]
        outs[label] = runs
    same = {k: len({out for _, out in v}) == 1 and v[0][1] != b"" for k, v in outs.items()}
    codes = {k: {c for c, _ in v} for k, v in outs.items()}
    ok = all(same.values()) and all(c == {0} for c in codes.values())
    criterion(12, ok, "byte-identical across runs and QPROC_THREADS in {1, 3, 0}: "
              + ", ".join(f"{k}={'yes' if v else 'no'}" for k, v in same.items()))
    assert ok, (same, codes)
