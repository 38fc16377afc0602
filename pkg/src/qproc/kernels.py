"""Angle-space representation of the q-Gaussian and transition laws, and inverse-CDF tables.

With ``x = c cos t``, ``c = 2/sqrt(1-q)``, the stationary law has density (in t on [0, pi])

    g(t) = (q|q)_inf / (2 pi) * |(e^{2it}|q)_inf|^2

and the transition law from ``y = c cos phi`` with correlation rho has density

    g(t|phi) = (q, rho^2|q)_inf / (2 pi) * |(e^{2it}|q)_inf|^2
               / (|(rho e^{i(t+phi)}|q)_inf|^2 |(rho e^{i(t-phi)}|q)_inf|^2).

Both are even, 2 pi periodic and analytic in t, so their cosine series converge
geometrically and the CDF can be tabulated exactly (up to rounding) with an FFT.
Sampling inverts a monotone cubic Hermite interpolant of the tabulated CDF;
transitions from an arbitrary state are proposed from the nearest tabulated
node and corrected by rejection, so no interpolation in the conditioning state
enters the law of the draw.
"""

from __future__ import annotations

import math
import threading
from collections import OrderedDict
from functools import lru_cache

import numpy as np

from qproc.errors import DomainError
from qproc.qseries import DEFAULT_POLICY, log_pochhammer_inf, require_terms

__all__ = [
    "log_circle_factor",
    "log_circle_poch",
    "CircleGrid",
    "CdfTable",
    "invert_rows",
    "stationary_table",
    "transition_kernel",
    "TransitionKernel",
]

STATIONARY_NODES = 4096
_SERIES_TOL = 1e-18


def log_circle_factor(psi, a: float):
    """``log |1 - a e^{i psi}|^2`` in the cancellation-free form ``(1-a)^2 + 4a sin^2(psi/2)``."""
    s = np.sin(0.5 * np.asarray(psi, dtype=float))
    with np.errstate(divide="ignore"):
        return np.log((1.0 - a) ** 2 + 4.0 * a * s * s)


def log_circle_poch(psi, a: float, q: float, tol: float = 1e-17, max_terms: int = 10_000):
    """``log |(a e^{i psi}|q)_inf|^2`` by direct summation over factors."""
    psi = np.asarray(psi, dtype=float)
    out = log_circle_factor(psi, a)
    ak = a * q
    k = 1
    while abs(ak) > tol:
        if k >= max_terms:
            raise DomainError(f"log_circle_poch needs more than {max_terms} factors at q={q!r}")
        out = out + log_circle_factor(psi, ak)
        ak *= q
        k += 1
    return out


_EXACT_FACTOR = 0.25


def _remainder_coeffs(b: float, q: float, n_max: int) -> np.ndarray | None:
    """Cosine coefficients of ``sum_{k>=0} log|1 - b q^k e^{i psi}|^2``; None if not converged by n_max."""
    if b == 0.0:
        return np.zeros(1)
    n_needed = int(math.ceil(math.log(_SERIES_TOL) / math.log(abs(b)))) + 1 if abs(b) < 1 else n_max + 1
    if n_needed > n_max:
        return None
    n = np.arange(1, n_needed + 1)
    coeffs = np.zeros(n_needed + 1)
    coeffs[1:] = -2.0 * b**n / (n * (1.0 - q**n))
    return coeffs


class CircleGrid:
    """``log|(a e^{i psi}|q)_inf|^2`` on the uniform grid ``psi_j = j pi / n``, j = 0..2n-1.

    Factors with ``|a q^k| > 1/4`` are kept exact; the remainder is analytic in a
    strip of half-width log 4, is summed as a cosine series via FFT and is
    interpolated at off-grid points.
    """

    def __init__(self, n: int, a: float, q: float):
        self.n = n
        self.a = a
        self.q = q
        self.h = math.pi / n
        psi = self.h * np.arange(2 * n)
        self.exact = [a]
        b = a * q
        while abs(b) > _EXACT_FACTOR:
            self.exact.append(b)
            b *= q
            require_terms(len(self.exact), q, DEFAULT_POLICY)
        self.lead = self._lead(psi)
        coeffs = _remainder_coeffs(b, q, n - 1)
        if coeffs is None:
            self.rest = log_circle_poch(psi, b, q)
        else:
            spec = np.zeros(2 * n, dtype=complex)
            spec[: coeffs.size] = coeffs
            self.rest = (2 * n * np.fft.ifft(spec)).real
        self.total = self.lead + self.rest

    def _lead(self, psi):
        out = log_circle_factor(psi, self.exact[0])
        for b in self.exact[1:]:
            out = out + log_circle_factor(psi, b)
        return out

    def rest_at(self, psi):
        """Cubic Lagrange interpolation of the smooth remainder at arbitrary angles."""
        psi = np.asarray(psi, dtype=float)
        u = np.mod(psi, 2 * math.pi) / self.h
        j = np.floor(u).astype(np.int64)
        s = u - j
        m = 2 * self.n
        r = self.rest
        rm1 = r[(j - 1) % m]
        r0 = r[j % m]
        r1 = r[(j + 1) % m]
        r2 = r[(j + 2) % m]
        return (
            -s * (s - 1) * (s - 2) / 6 * rm1
            + (s + 1) * (s - 1) * (s - 2) / 2 * r0
            - (s + 1) * s * (s - 2) / 2 * r1
            + (s + 1) * s * (s - 1) / 6 * r2
        )

    def at(self, psi):
        return self._lead(psi) + self.rest_at(psi)


class CdfTable:
    """CDF of an even density on t in [0, pi], tabulated on ``t_k = k pi / n``.

    ``cdf`` and ``pdf`` hold n + 1 node values; between nodes the CDF is a
    monotone cubic Hermite interpolant with the node densities as slopes.
    """

    __slots__ = ("n", "h", "cdf", "pdf")

    def __init__(self, cdf: np.ndarray, pdf: np.ndarray):
        self.n = cdf.size - 1
        self.h = math.pi / self.n
        self.cdf = cdf
        self.pdf = pdf

    @classmethod
    def from_log_density(cls, log_g: np.ndarray) -> "CdfTable":
        """Build from log-density samples on the full-circle grid (length 2n)."""
        two_n = log_g.size
        n = two_n // 2
        g = np.exp(log_g)
        f = np.fft.rfft(g).real
        spec = np.zeros(two_n, dtype=complex)
        j = np.arange(1, n)
        spec[1:n] = f[1:n] / j
        sines = (two_n * np.fft.ifft(spec)).imag[: n + 1]
        t = (math.pi / n) * np.arange(n + 1)
        cdf = (f[0] * t + 2.0 * sines) / two_n
        total = cdf[-1]
        cdf = np.maximum.accumulate(np.clip(cdf / total, 0.0, None))
        cdf[0] = 0.0
        cdf = np.minimum(cdf, 1.0)
        cdf[-1] = 1.0
        return cls(cdf, g[: n + 1] / total)

    def evaluate(self, t):
        """CDF at angles t in [0, pi]."""
        t = np.clip(np.asarray(t, dtype=float), 0.0, math.pi)
        u = t / self.h
        j = np.clip(np.floor(u).astype(np.int64), 0, self.n - 1)
        g0, d, m0, m1 = _cells(self.cdf, self.pdf, self.h, j)
        return np.clip(_hermite(u - j, g0, d, m0, m1), 0.0, 1.0)

    def invert(self, p, iterations: int = 16):
        """Angle t with CDF(t) = p, by safeguarded Newton iteration within the bracketing cell."""
        p = np.asarray(p, dtype=float)
        j = np.clip(np.searchsorted(self.cdf, p, side="right") - 1, 0, self.n - 1)
        return (j + _solve_cells(self.cdf, self.pdf, self.h, j, p, iterations)) * self.h


def invert_rows(tables, row, p, iterations: int = 16):
    """Invert several tables of equal size at once: draw i uses ``tables[row[i]]``."""
    n = tables[0].n
    h = tables[0].h
    stride = n + 1
    cdf = np.concatenate([tb.cdf for tb in tables])
    pdf = np.concatenate([tb.pdf for tb in tables])
    # offsets keep the stacked key monotone; the +-1 fix-up undoes its rounding
    key = cdf + 2.0 * np.repeat(np.arange(len(tables)), stride)
    base = row * stride
    j = np.searchsorted(key, p + 2.0 * row, side="right") - 1 - base
    j = np.clip(j, 0, n - 1)
    j = np.where((p < cdf[base + j]) & (j > 0), j - 1, j)
    j = np.where((p >= cdf[base + j + 1]) & (j < n - 1), j + 1, j)
    s = _solve_cells(cdf, pdf, h, base + j, p, iterations)
    return (j + s) * h


def _cells(cdf, pdf, h, j):
    g0 = cdf[j]
    g1 = cdf[j + 1]
    d = g1 - g0
    slope = d / h
    m0 = pdf[j]
    m1 = pdf[j + 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        alpha = np.where(slope > 0, m0 / slope, 0.0)
        beta = np.where(slope > 0, m1 / slope, 0.0)
    r2 = alpha * alpha + beta * beta
    # Fritsch-Carlson limiter keeps each cell monotone
    scale = np.where(r2 > 9.0, 3.0 / np.sqrt(np.where(r2 > 9.0, r2, 1.0)), 1.0)
    m0 = np.where(slope > 0, scale * alpha * slope, 0.0) * h
    m1 = np.where(slope > 0, scale * beta * slope, 0.0) * h
    return g0, d, m0, m1


def _hermite(s, g0, d, m0, m1):
    s2 = s * s
    s3 = s2 * s
    return g0 + d * (3 * s2 - 2 * s3) + m0 * (s3 - 2 * s2 + s) + m1 * (s3 - s2)


def _hermite_ds(s, d, m0, m1):
    return d * (6 * s - 6 * s * s) + m0 * (3 * s * s - 4 * s + 1) + m1 * (3 * s * s - 2 * s)


def _solve_cells(cdf, pdf, h, j, p, iterations):
    """Local coordinate s in [0, 1] of the root in cell j."""
    g0, d, m0, m1 = _cells(cdf, pdf, h, j)
    lo = np.zeros_like(p)
    hi = np.ones_like(p)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(d > 0, np.clip((p - g0) / d, 0.0, 1.0), 0.0)
    for _ in range(iterations):
        f = _hermite(s, g0, d, m0, m1) - p
        lo = np.where(f <= 0, s, lo)
        hi = np.where(f > 0, s, hi)
        df = _hermite_ds(s, d, m0, m1)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = s - f / df
        bad = ~np.isfinite(step) | (step < lo) | (step > hi)
        new = np.where(bad, 0.5 * (lo + hi), step)
        done = np.all(np.abs(new - s) <= 4e-16)
        s = new
        if done:
            break
    return s


_LN_CACHE: dict = {}
_LN_LOCK = threading.Lock()


def _log_numerator(n: int, q: float) -> np.ndarray:
    """``log |(e^{2it}|q)_inf|^2`` on ``t_j = j pi / n``, j = 0..2n-1."""
    key = (n, q)
    with _LN_LOCK:
        hit = _LN_CACHE.get(key)
    if hit is not None:
        return hit
    grid = CircleGrid(n, 1.0, q)
    idx = (2 * np.arange(2 * n)) % (2 * n)
    out = grid.total[idx]
    out.setflags(write=False)
    with _LN_LOCK:
        _LN_CACHE[key] = out
    return out


@lru_cache(maxsize=64)
def stationary_table(q: float, n: int = STATIONARY_NODES) -> CdfTable:
    """Cached CDF table of the q-Gaussian law in angle space (built once per q)."""
    log_const = log_pochhammer_inf(q, q) - math.log(2 * math.pi)
    return CdfTable.from_log_density(log_const + _log_numerator(n, q))


def _lipschitz_bound(rho: float, q: float) -> float:
    """Bound on ``|d/dphi log g(t|phi)|``: each factor of the denominator contributes 4a/(1-a^2)."""
    total = 0.0
    a = abs(rho)
    while a > 1e-17:
        total += 4.0 * a / (1.0 - a * a)
        a *= abs(q)
    return total


def _next_pow2(x: float) -> int:
    return 1 << max(0, int(math.ceil(math.log2(max(x, 1.0)))))


class TransitionKernel:
    """Exact sampler for the transition law at fixed (q, rho), 0 < rho < 1, |q| < 1.

    Conditioning angles are snapped to a node grid of spacing ``stride * pi / n``;
    a draw from the node's tabulated law is accepted with probability
    ``g(t|phi) / g(t|phi_node) * exp(-L |phi - phi_node|) <= 1``.
    """

    row_budget_bytes = 192 * 2**20

    def __init__(self, q: float, rho: float, min_nodes: int = 2048):
        self.q = q
        self.rho = rho
        width = -math.log(rho)
        n = max(min_nodes, _next_pow2(80.0 / width))
        self.n = n
        self.h = math.pi / n
        self.lipschitz = _lipschitz_bound(rho, q)
        m = min(n, max(64, _next_pow2(2 * math.pi * self.lipschitz)))
        self.stride = n // m
        self.n_nodes = m + 1
        self.node_step = self.stride * self.h
        self.log_const = (
            log_pochhammer_inf(q, q) + log_pochhammer_inf(rho * rho, q) - math.log(2 * math.pi)
        )
        self.numerator = _log_numerator(n, q)
        self.denominator = CircleGrid(n, rho, q)
        self._rows: OrderedDict[int, CdfTable] = OrderedDict()
        self._max_rows = max(4, self.row_budget_bytes // (16 * (n + 1)))
        self._lock = threading.Lock()

    def row(self, node: int) -> CdfTable:
        with self._lock:
            hit = self._rows.get(node)
            if hit is not None:
                self._rows.move_to_end(node)
                return hit
        shift = node * self.stride
        idx = np.arange(2 * self.n)
        den = self.denominator.total
        log_g = (
            self.log_const
            + self.numerator
            - den[(idx + shift) % (2 * self.n)]
            - den[(idx - shift) % (2 * self.n)]
        )
        table = CdfTable.from_log_density(log_g)
        with self._lock:
            self._rows[node] = table
            while len(self._rows) > self._max_rows:
                self._rows.popitem(last=False)
        return table

    def _log_den(self, t, phi):
        return self.denominator.at(t + phi) + self.denominator.at(t - phi)

    def sample(self, phi, rng: np.random.Generator) -> np.ndarray:
        """Draw angles t from the transition law for each conditioning angle in ``phi``."""
        phi = np.atleast_1d(np.asarray(phi, dtype=float))
        nodes = np.clip(np.rint(phi / self.node_step).astype(np.int64), 0, self.n_nodes - 1)
        out = np.empty_like(phi)
        pending = np.arange(phi.size)
        while pending.size:
            nd = nodes[pending]
            t = self._propose(nd, rng)
            ph = phi[pending]
            ph_node = nd * self.node_step
            log_accept = (
                self._log_den(t, ph_node) - self._log_den(t, ph) - self.lipschitz * np.abs(ph - ph_node)
            )
            ok = np.log(rng.random(pending.size)) < log_accept
            out[pending[ok]] = t[ok]
            pending = pending[~ok]
        return out

    def _propose(self, nodes: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        u = rng.random(nodes.size)
        if nodes.size == 0:
            return np.empty(0)
        uniq, row = np.unique(nodes, return_inverse=True)
        tables = [self.row(int(k)) for k in uniq]
        return invert_rows(tables, row, u)


@lru_cache(maxsize=16)
def transition_kernel(q: float, rho: float) -> TransitionKernel:
    return TransitionKernel(q, rho)
