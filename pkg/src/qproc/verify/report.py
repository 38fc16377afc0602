"""Verification outcomes and the Monte Carlo gate helpers."""

from __future__ import annotations

import json
import math
import zlib
from dataclasses import asdict, dataclass

import numpy as np

__all__ = [
    "Report",
    "TOLERANCE_KINDS",
    "SE_MULTIPLE",
    "derive_seed",
    "deterministic",
    "mc_mean",
    "mc_variance",
    "mc_difference",
    "reports_to_json",
    "summary_table",
]

TOLERANCE_KINDS = ("absolute", "relative", "standard-error-multiple")
SE_MULTIPLE = 4.0


def _passes(statistic, target, tolerance, kind):
    if not (math.isfinite(statistic) and math.isfinite(target)):
        return False
    err = abs(statistic - target)
    if kind == "relative":
        return err <= tolerance * abs(target)
    # for standard-error-multiple the stored tolerance is the band k * SE
    return err <= tolerance


@dataclass(frozen=True)
class Report:
    """Outcome of one check.

    ``tolerance_kind`` semantics: ``absolute`` passes when ``|statistic - target| <= tolerance``;
    ``relative`` when ``|statistic - target| <= tolerance * |target|``; for
    ``standard-error-multiple`` the tolerance stored is the band ``SE_MULTIPLE * SE``
    and the absolute rule applies.
    """

    check_id: str
    statistic: float
    target: float
    tolerance: float
    tolerance_kind: str
    samples_or_nodes: int
    passed: bool
    seed: int | None = None

    def __post_init__(self):
        if self.tolerance_kind not in TOLERANCE_KINDS:
            raise ValueError(f"unknown tolerance kind {self.tolerance_kind!r}")
        stochastic = self.tolerance_kind == "standard-error-multiple"
        if stochastic != (self.seed is not None):
            raise ValueError("a seed is recorded exactly for stochastic checks")
        expected = _passes(self.statistic, self.target, self.tolerance, self.tolerance_kind)
        if bool(self.passed) != expected:
            raise ValueError("passed flag disagrees with the tolerance rule")

    @property
    def error(self) -> float:
        return abs(self.statistic - self.target)


def derive_seed(seed: int, name: str) -> int:
    """64-bit seed for a named check, independent of run order and worker count."""
    ss = np.random.SeedSequence([int(seed), zlib.crc32(name.encode())])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def deterministic(check_id, statistic, target, tolerance, kind, nodes) -> Report:
    statistic, target = float(statistic), float(target)
    return Report(check_id, statistic, target, float(tolerance), kind, int(nodes),
                  _passes(statistic, target, tolerance, kind))


def _mc(check_id, estimate, se, target, n, seed, k):
    band = k * float(se)
    estimate, target = float(estimate), float(target)
    return Report(check_id, estimate, target, band, "standard-error-multiple", int(n),
                  _passes(estimate, target, band, "standard-error-multiple"), int(seed))


def mc_mean(check_id, samples, target, seed, k=SE_MULTIPLE) -> Report:
    """Sample mean against a target with a k-standard-error gate."""
    s = np.asarray(samples, dtype=float).ravel()
    se = s.std(ddof=1) / math.sqrt(s.size)
    return _mc(check_id, s.mean(), se, target, s.size, seed, k)


def mc_variance(check_id, samples, target, seed, k=SE_MULTIPLE) -> Report:
    """Sample variance against a target; the SE uses the sample fourth central moment."""
    s = np.asarray(samples, dtype=float).ravel()
    d2 = (s - s.mean()) ** 2
    se = d2.std(ddof=1) / math.sqrt(s.size)
    return _mc(check_id, d2.sum() / (s.size - 1), se, target, s.size, seed, k)


def mc_difference(check_id, a, b, seed, k=SE_MULTIPLE) -> Report:
    """Difference of two independent sample means against zero."""
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    se = math.hypot(a.std(ddof=1) / math.sqrt(a.size), b.std(ddof=1) / math.sqrt(b.size))
    return _mc(check_id, a.mean() - b.mean(), se, 0.0, a.size + b.size, seed, k)


def _json_float(v):
    if v is None:
        return None
    v = float(v)
    if not math.isfinite(v):
        return str(v)
    return float(format(v, ".17g"))


def reports_to_json(reports, coverage=None) -> str:
    """JSON array of Report objects; floats are printed with 17 significant digits."""
    rows = []
    for r in reports:
        d = asdict(r)
        for key in ("statistic", "target", "tolerance"):
            d[key] = _json_float(d[key])
        rows.append(d)
    if coverage is None:
        return json.dumps(rows, indent=1)
    return json.dumps({"reports": rows, "coverage": coverage}, indent=1)


def summary_table(reports) -> str:
    """Plain-text table, one row per report, followed by a pass count."""
    width = max([len(r.check_id) for r in reports] + [8])
    head = f"{'check_id':<{width}}  {'statistic':>24}  {'target':>24}  {'tolerance':>10}  kind      result"
    lines = [head, "-" * len(head)]
    short = {"absolute": "abs", "relative": "rel", "standard-error-multiple": "se"}
    for r in reports:
        lines.append(
            f"{r.check_id:<{width}}  {r.statistic:>24.17g}  {r.target:>24.17g}  {r.tolerance:>10.3g}  "
            f"{short[r.tolerance_kind]:<8}  {'PASS' if r.passed else 'FAIL'}"
        )
    n_pass = sum(r.passed for r in reports)
    n_mc = sum(r.tolerance_kind == "standard-error-multiple" for r in reports)
    lines.append(f"{n_pass}/{len(reports)} checks passed")
    if n_mc:
        # each 4-SE gate fails by chance with probability about 6.3e-5
        lines.append(
            f"{n_mc} Monte Carlo gates at {SE_MULTIPLE:g} SE; expected chance failures "
            f"{n_mc * 6.334e-5:.2g} (Bonferroni bound on the family-wise rate)"
        )
    return "\n".join(lines)
