"""Command-line entry point: ``qproc {simulate,density,poly,bridge,spectrum,verify}``.

Data goes to stdout (or ``--output``); diagnostics go to stderr. Exit codes:
0 success, 1 usage or parameter error, 2 failing verification.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import re
import sys
from dataclasses import dataclass, field

import numpy as np

from qproc import density, orthopoly
from qproc.errors import DomainError
from qproc.process import bridge, formulas, simulate
from qproc.qseries import QParam
from qproc.verify import report, suite

__all__ = ["CliConfig", "run", "main"]

SUBCOMMANDS = ("simulate", "density", "poly", "bridge", "spectrum", "verify")
FORMATS = ("csv", "json")


class UsageError(Exception):
    pass


@dataclass
class CliConfig:
    subcommand: str
    q: float | None = None
    alpha: float | None = None
    seed: int | None = None
    output: str | None = None
    format: str = "csv"
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise UsageError(f"unknown subcommand {self.subcommand!r}")
        if self.format not in FORMATS:
            raise UsageError(f"format must be one of {FORMATS}")
        if self.q is not None:
            self.q = QParam(self.q).q
        if self.alpha is not None and not (math.isfinite(self.alpha) and self.alpha > 0):
            raise UsageError(f"alpha must be positive (got {self.alpha!r})")
        if self.needs_alpha and self.alpha is None:
            raise UsageError(f"{self.subcommand} needs --alpha")

    @property
    def needs_alpha(self) -> bool:
        kind = self.options.get("kind")
        if self.subcommand in ("simulate", "bridge"):
            return kind == "ou"
        return self.subcommand == "spectrum"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _floats(text: str):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc
    if not vals:
        raise argparse.ArgumentTypeError("expected at least one number")
    return vals


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qproc", description="q-Gaussian processes: simulation, densities and verification")
    sub = p.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def common(sp, q_required=True, fmt="csv"):
        sp.add_argument("--q", type=float, required=q_required)
        sp.add_argument("--output", help="write to this path instead of stdout")
        sp.add_argument("--format", choices=FORMATS, default=fmt)

    sp = sub.add_parser("simulate", help="simulate OU or q-Wiener paths")
    common(sp)
    sp.add_argument("--kind", choices=("ou", "qwiener"), default="ou")
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--t0", type=float, default=0.0)
    sp.add_argument("--t1", type=float, required=True)
    sp.add_argument("--dt", type=float, required=True)
    sp.add_argument("--paths", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("density", help="stationary or transition density")
    common(sp)
    sp.add_argument("--x", type=_floats, required=True)
    sp.add_argument("--y", type=float, help="conditioning state (transition density)")
    sp.add_argument("--rho", type=float, help="correlation of the transition")
    sp.add_argument("--cdf", action="store_true", help="print the distribution function instead")

    sp = sub.add_parser("poly", help="q-Hermite or Al-Salam-Chihara values up to degree n")
    common(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--x", type=float, required=True)
    sp.add_argument("--family", choices=("hermite", "asc"), default="hermite")
    sp.add_argument("--y", type=float)
    sp.add_argument("--rho", type=float)

    sp = sub.add_parser("bridge", help="conditional moments given both neighbours")
    common(sp)
    sp.add_argument("--kind", choices=("ou", "qwiener"), default="ou")
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--n", type=int, default=1, help="q-Hermite degree for the OU bridge")
    sp.add_argument("--left", type=float, required=True)
    sp.add_argument("--right", type=float, required=True)
    sp.add_argument("--delta", type=float, required=True)
    sp.add_argument("--gamma", type=float, required=True)
    sp.add_argument("--sigma", type=float, help="middle time of the q-Wiener bridge")

    sp = sub.add_parser("spectrum", help="spectral density of H_n(Y_t)")
    common(sp)
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--omega", type=_floats, required=True)

    sp = sub.add_parser("verify", help="run the verification suite")
    sp.add_argument("--suite", choices=sorted(suite.SUITES), default="default")
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("--output")
    sp.add_argument("--format", choices=("json",), default="json")
    sp.add_argument("--coverage", help="also write the coverage map (JSON) to this path")
    return p


def _config(ns) -> CliConfig:
    skip = {"subcommand", "q", "alpha", "seed", "output", "format"}
    opts = {k: v for k, v in vars(ns).items() if k not in skip}
    return CliConfig(ns.subcommand, getattr(ns, "q", None), getattr(ns, "alpha", None),
                     getattr(ns, "seed", None), ns.output, ns.format, opts)


def _g12(v) -> str:
    return format(float(v), ".12g")


def _g17(v):
    return report._json_float(v)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(c if isinstance(c, str) else (str(c) if isinstance(c, (int, np.integer)) else _g12(c))
                           for c in row) + "\n")
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=1) + "\n"


def _time_grid(t0, t1, dt):
    if not (math.isfinite(t0) and math.isfinite(t1) and math.isfinite(dt)):
        raise UsageError("time flags must be finite")
    if dt <= 0 or t1 <= t0:
        raise UsageError("need dt > 0 and t1 > t0")
    steps = (t1 - t0) / dt
    n = int(round(steps))
    if abs(steps - n) > 1e-9 * max(1.0, steps):
        raise UsageError("(t1 - t0) / dt must be an integer")
    return t0 + dt * np.arange(n + 1)


def _simulate(cfg: CliConfig) -> str:
    o = cfg.options
    if o["paths"] < 1:
        raise UsageError("--paths must be at least 1")
    times = _time_grid(o["t0"], o["t1"], o["dt"])
    if o["kind"] == "ou":
        paths = simulate.simulate_ou_paths(simulate.OUParams(cfg.q, cfg.alpha), times, o["paths"], cfg.seed)
    else:
        if times[0] < 0:
            raise UsageError("q-Wiener times must be nonnegative")
        paths = simulate.simulate_qwiener_paths(cfg.q, times, o["paths"], cfg.seed)
    if cfg.format == "json":
        return _json([{"times": [_g17(t) for t in times], "values": [_g17(v) for v in row],
                       "seed": cfg.seed, "kind": o["kind"], "q": cfg.q}
                      for row in paths])
    rows = ((i, t, v) for i, row in enumerate(paths) for t, v in zip(times, row))
    return _csv(("path", "time", "value"), rows)


def _density(cfg: CliConfig) -> str:
    o = cfg.options
    x = np.asarray(o["x"], dtype=float)
    transition = o["y"] is not None or o["rho"] is not None
    if transition and (o["y"] is None or o["rho"] is None):
        raise UsageError("the transition density needs both --y and --rho")
    if o["cdf"]:
        if transition:
            raise UsageError("--cdf is available for the stationary law only")
        vals, name = density.cdf_stationary(x, cfg.q), "cdf"
    elif transition:
        vals, name = density.pdf_transition(x, o["y"], o["rho"], cfg.q), "density"
    else:
        vals, name = density.pdf_stationary(x, cfg.q), "density"
    vals = np.atleast_1d(vals)
    if cfg.format == "json":
        return _json({"x": [_g17(v) for v in x], name: [_g17(v) for v in vals]})
    return _csv(("x", name), zip(x, vals))


def _poly(cfg: CliConfig) -> str:
    o = cfg.options
    if o["family"] == "hermite":
        seq = orthopoly.hermite_seq(o["n"], o["x"], cfg.q)
    else:
        if o["y"] is None or o["rho"] is None:
            raise UsageError("the asc family needs --y and --rho")
        seq = orthopoly.asc_seq(o["n"], o["x"], o["y"], o["rho"], cfg.q)
    values = np.asarray(seq.values, dtype=float).ravel()
    if cfg.format == "json":
        return _json({"degree": seq.degree, "values": [_g17(v) for v in values]})
    return _csv(("degree", "value"), enumerate(values))


def _bridge(cfg: CliConfig) -> str:
    o = cfg.options
    a, b, d, g = o["left"], o["right"], o["delta"], o["gamma"]
    if o["kind"] == "ou":
        r1, r2 = math.exp(-cfg.alpha * d), math.exp(-cfg.alpha * g)
        rows = [
            (f"hermite_{o['n']}", bridge.hermite_bridge_mean(o["n"], a, b, r1, r2, cfg.q)),
            ("mean", formulas.ou_bridge_mean(a, b, d, g, cfg.alpha)),
            ("variance", formulas.ou_bridge_var(a, b, d, g, cfg.alpha, cfg.q)),
        ]
    else:
        if o["sigma"] is None:
            raise UsageError("the q-Wiener bridge needs --sigma")
        s = o["sigma"]
        rows = [
            ("mean", formulas.harness_mean(a, b, s, d, g)),
            ("second_moment", formulas.harness_second(a, b, s, d, g, cfg.q)),
            ("variance", formulas.harness_var(a, b, s, d, g, cfg.q)),
        ]
    if cfg.format == "json":
        return _json({k: _g17(v) for k, v in rows})
    return _csv(("quantity", "value"), rows)


def _spectrum(cfg: CliConfig) -> str:
    o = cfg.options
    vals = [formulas.spectral_density(o["n"], w, cfg.alpha, cfg.q) for w in o["omega"]]
    if cfg.format == "json":
        return _json({"omega": [_g17(w) for w in o["omega"]], "spectral_density": [_g17(v) for v in vals]})
    return _csv(("omega", "spectral_density"), zip(o["omega"], vals))


def _verify(cfg: CliConfig):
    o = cfg.options
    reports = suite.run_suite(o["suite"], cfg.seed)
    print(report.summary_table(reports), file=sys.stderr)
    cov = suite.coverage_map(reports)
    gaps = sorted(k for k, v in cov.items() if not v)
    if gaps:
        print("operations without a check in this suite: " + ", ".join(gaps), file=sys.stderr)
    if o.get("coverage"):
        with open(o["coverage"], "w", encoding="utf-8") as fh:
            fh.write(_json(cov))
    code = 0 if all(r.passed for r in reports) else 2
    return report.reports_to_json(reports) + "\n", code


_NEGATIVE_VALUE = re.compile(r"^-[\d.]")


def _attach_negative_values(argv):
    # argparse reads "--x -1,0,1" as two flags; no option name starts with a digit, so rejoin them
    out = []
    for tok in argv:
        if out and out[-1].startswith("--") and "=" not in out[-1] and _NEGATIVE_VALUE.match(tok):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def run(argv=None) -> int:
    """Run the CLI on ``argv``; returns the exit code."""
    argv = _attach_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        try:
            cfg = _config(_parser().parse_args(argv))
        except SystemExit as exc:
            # --help and --version exit through argparse
            return int(exc.code or 0)
        handler = {"simulate": _simulate, "density": _density, "poly": _poly,
                   "bridge": _bridge, "spectrum": _spectrum, "verify": _verify}[cfg.subcommand]
        result = handler(cfg)
        text, code = result if isinstance(result, tuple) else (result, 0)
    except (UsageError, DomainError) as exc:
        print(f"qproc: error: {exc}", file=sys.stderr)
        return 1
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def main() -> None:
    try:
        code = run()
        sys.stdout.flush()
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the flush at exit
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        code = 0
    sys.exit(code)
