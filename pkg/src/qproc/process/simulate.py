"""Exact simulation of the (q, alpha)-OU process and the q-Wiener process.

Paths are Markov chains on the time grid: a stationary draw followed by draws
from the transition law with ``rho = exp(-alpha dt)``. The q-Wiener process is
the time-changed, rescaled OU process ``X_tau = sqrt(tau) Y_{log(tau)/(2 alpha)}``.
Draws use numpy's counter-based Philox generator; multi-path runs are split
into fixed blocks whose streams depend only on (seed, block index), so output
does not depend on how many worker threads run the blocks.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from qproc import kernels
from qproc.errors import DomainError
from qproc.qseries import check_q

__all__ = [
    "OUParams",
    "Trajectory",
    "make_rng",
    "sample_stationary",
    "sample_transition",
    "sample_qwiener_transition",
    "sample_qwiener_backward",
    "simulate_ou",
    "simulate_ou_paths",
    "simulate_qwiener",
    "simulate_qwiener_paths",
    "worker_count",
    "BLOCK_PATHS",
]

BLOCK_PATHS = 4096
QWIENER_ALPHA = 0.5
_RHO_ONE = 1e-12
_RHO_KEY = ".13g"


@dataclass(frozen=True)
class OUParams:
    q: float
    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "q", check_q(self.q))
        alpha = float(self.alpha)
        if not (math.isfinite(alpha) and alpha > 0):
            raise DomainError(f"alpha must be positive (got {self.alpha!r})")
        object.__setattr__(self, "alpha", alpha)


@dataclass
class Trajectory:
    times: np.ndarray
    values: np.ndarray
    seed: int | None
    kind: str = "ou"
    q: float = field(default=0.0)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.times.shape != self.values.shape:
            raise ValueError("times and values must have equal length")
        if self.kind not in ("ou", "qwiener"):
            raise ValueError(f"unknown trajectory kind {self.kind!r}")

    def __len__(self):
        return self.times.size


def make_rng(seed) -> np.random.Generator:
    """Philox generator from an integer seed or a SeedSequence; Generators pass through."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(seed))


def worker_count(threads: int | None = None) -> int:
    """Worker threads to use; ``QPROC_THREADS`` caps the count and 0 means one per CPU."""
    if threads is None:
        env = os.environ.get("QPROC_THREADS", "0").strip() or "0"
        try:
            threads = int(env)
        except ValueError as exc:
            raise DomainError(f"QPROC_THREADS must be an integer (got {env!r})") from exc
    if threads < 0:
        raise DomainError("thread count must be nonnegative")
    return threads or (os.cpu_count() or 1)


def _half_width(q: float) -> float:
    return 2.0 / math.sqrt(1.0 - q)


def sample_stationary(q: float, rng, size=None):
    """Draws from the q-Gaussian law by inversion of the tabulated CDF (standard normal at q = 1)."""
    q = check_q(q)
    rng = make_rng(rng)
    n = 1 if size is None else size
    if q == 1.0:
        out = rng.standard_normal(n)
    else:
        u = rng.random(n)
        out = _half_width(q) * np.cos(kernels.stationary_table(q).invert(u))
    return float(out[0]) if size is None else np.reshape(out, size)


def _transition(y: np.ndarray, rho: float, q: float, rng: np.random.Generator) -> np.ndarray:
    if rho < 0:
        # the law at -rho from y is the law at rho from -y
        return _transition(-y, -rho, q, rng)
    if 1.0 - rho < _RHO_ONE:
        return y.copy()
    if q == 1.0:
        return rho * y + math.sqrt(1.0 - rho * rho) * rng.standard_normal(y.size)
    c = _half_width(q)
    if rho == 0.0:
        return c * np.cos(kernels.stationary_table(q).invert(rng.random(y.size)))
    # kernels are shared across calls with the same (q, rho) up to rounding noise in rho
    key = float(format(rho, _RHO_KEY))
    kern = kernels.transition_kernel(q, key)
    phi = np.arccos(np.clip(y / c, -1.0, 1.0))
    return c * np.cos(kern.sample(phi, rng))


def _check_states(y, q):
    if q < 1.0 and np.any((1.0 - q) * y * y > 4.0 * (1.0 + 1e-12)):
        raise DomainError("conditioning state lies outside the support")
    if not np.all(np.isfinite(y)):
        raise DomainError("conditioning state must be finite")


def sample_transition(y, rho: float, q: float, rng, size=None):
    """Draws of the next state given state(s) y, from the transition law with correlation rho.

    ``y`` may be an array, giving one draw per entry; with scalar y, ``size`` sets the
    number of draws. ``|rho| < 1``; rho within 1e-12 of 1 returns y itself.
    """
    q = check_q(q)
    rho = float(rho)
    if not (-1.0 < rho <= 1.0):
        raise DomainError(f"rho must lie in (-1, 1) (got {rho!r})")
    rng = make_rng(rng)
    y_arr = np.asarray(y, dtype=float)
    _check_states(y_arr, q)
    if y_arr.ndim == 0:
        n = 1 if size is None else int(np.prod(size))
        out = _transition(np.full(n, float(y_arr)), rho, q, rng)
        return float(out[0]) if size is None else np.reshape(out, size)
    return _transition(y_arr.ravel(), rho, q, rng).reshape(y_arr.shape)


def sample_qwiener_transition(x_sigma, sigma: float, tau: float, q: float, rng, size=None):
    """Draws of ``X_tau`` given ``X_sigma``, 0 < sigma < tau."""
    if not 0 < sigma < tau:
        raise DomainError("need 0 < sigma < tau")
    ys = np.asarray(x_sigma, dtype=float) / math.sqrt(sigma)
    return math.sqrt(tau) * np.asarray(sample_transition(ys, math.sqrt(sigma / tau), q, rng, size))


def sample_qwiener_backward(x_tau, sigma: float, tau: float, q: float, rng, size=None):
    """Draws of ``X_sigma`` given ``X_tau`` for sigma < tau; the OU process is time symmetric."""
    if not 0 < sigma < tau:
        raise DomainError("need 0 < sigma < tau")
    ys = np.asarray(x_tau, dtype=float) / math.sqrt(tau)
    return math.sqrt(sigma) * np.asarray(sample_transition(ys, math.sqrt(sigma / tau), q, rng, size))


def _check_times(times) -> np.ndarray:
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise DomainError("times must be a nonempty one-dimensional sequence")
    if not np.all(np.isfinite(times)):
        raise DomainError("times must be finite")
    if np.any(np.diff(times) <= 0):
        raise DomainError("times must be strictly increasing")
    return times


def _ou_block(q: float, rhos: np.ndarray, n_paths: int, rng: np.random.Generator, start=None):
    out = np.empty((n_paths, rhos.size + 1))
    if start is None:
        out[:, 0] = sample_stationary(q, rng, n_paths)
    else:
        out[:, 0] = start
    for i, rho in enumerate(rhos):
        out[:, i + 1] = _transition(out[:, i], float(rho), q, rng)
    return out


def _seed_of(rng):
    return int(rng) if isinstance(rng, (int, np.integer)) else None


def simulate_ou(params: OUParams, times, rng) -> Trajectory:
    """One stationary OU path on the given time grid."""
    times = _check_times(times)
    seed = _seed_of(rng)
    rhos = np.exp(-params.alpha * np.diff(times))
    vals = _ou_block(params.q, rhos, 1, make_rng(rng))[0]
    return Trajectory(times, vals, seed, "ou", params.q)


def _run_blocks(job, n_paths: int, seed: int, threads: int | None):
    if n_paths < 1:
        raise DomainError("n_paths must be at least 1")
    n_blocks = -(-n_paths // BLOCK_PATHS)
    sizes = [min(BLOCK_PATHS, n_paths - b * BLOCK_PATHS) for b in range(n_blocks)]

    def run(b):
        rng = make_rng(np.random.SeedSequence([int(seed), b]))
        return job(sizes[b], rng)

    workers = min(worker_count(threads), n_blocks)
    if workers <= 1:
        parts = [run(b) for b in range(n_blocks)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(n_blocks)))
    return np.concatenate(parts, axis=0)


def simulate_ou_paths(params: OUParams, times, n_paths: int, seed: int, threads: int | None = None,
                      start=None) -> np.ndarray:
    """Array of shape (n_paths, len(times)) of independent OU paths.

    With ``start`` given, every path begins at that state instead of a stationary draw.
    """
    times = _check_times(times)
    rhos = np.exp(-params.alpha * np.diff(times))
    return _run_blocks(lambda n, rng: _ou_block(params.q, rhos, n, rng, start), n_paths, seed, threads)


def _qwiener_block(q, times, n_paths, rng, alpha, start):
    out = np.zeros((n_paths, times.size))
    pos = np.flatnonzero(times > 0)
    if pos.size == 0:
        return out
    tp = times[pos]
    # internal OU clock; the law of X does not depend on alpha
    s = np.log(tp) / (2.0 * alpha)
    rhos = np.exp(-alpha * np.diff(s))
    y0 = None if start is None else start[1] / math.sqrt(start[0])
    if start is not None:
        rhos = np.r_[math.exp(-alpha * (s[0] - math.log(start[0]) / (2.0 * alpha))), rhos]
        ys = _ou_block(q, rhos, n_paths, rng, y0)[:, 1:]
    else:
        ys = _ou_block(q, rhos, n_paths, rng)
    out[:, pos] = ys * np.sqrt(tp)
    return out


def _check_qwiener_times(times, start):
    times = _check_times(times)
    if times[0] < 0:
        raise DomainError("q-Wiener times must be nonnegative")
    if start is not None:
        s0, _ = start
        if not (s0 > 0 and times[0] > s0):
            raise DomainError("start time must be positive and precede the grid")
    return times


def simulate_qwiener(q: float, times, rng, alpha: float = QWIENER_ALPHA) -> Trajectory:
    """One q-Wiener path; the value at time 0 is 0."""
    q = check_q(q)
    times = _check_qwiener_times(times, None)
    seed = _seed_of(rng)
    vals = _qwiener_block(q, times, 1, make_rng(rng), alpha, None)[0]
    return Trajectory(times, vals, seed, "qwiener", q)


def simulate_qwiener_paths(q: float, times, n_paths: int, seed: int, threads: int | None = None,
                           alpha: float = QWIENER_ALPHA, start=None) -> np.ndarray:
    """Array (n_paths, len(times)) of q-Wiener paths.

    ``start = (sigma, x)`` conditions every path on ``X_sigma = x`` for a time sigma
    before the grid.
    """
    q = check_q(q)
    times = _check_qwiener_times(times, start)
    return _run_blocks(lambda n, rng: _qwiener_block(q, times, n, rng, alpha, start), n_paths, seed, threads)
