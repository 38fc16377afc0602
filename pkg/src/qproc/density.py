"""q-Gaussian law, transition densities, quadrature on the support and the stationary CDF.

Densities are evaluated in the x variable as products accumulated in log space.
Quadrature and the CDF work in the angle variable ``x = c cos t``, ``c = 2/sqrt(1-q)``,
where the integrands are smooth and periodic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from qproc import kernels
from qproc.errors import DomainError
from qproc.qseries import DEFAULT_POLICY, QParam, check_q, log_pochhammer_inf, require_terms

__all__ = [
    "Support",
    "QuadratureSpec",
    "support",
    "pdf_stationary",
    "pdf_transition",
    "pdf_transition_mehler",
    "integrate_support",
    "cdf_stationary",
    "quantile_stationary",
    "MEHLER_BOUND",
]

# (1 - q) max(x^2, y^2) must not exceed this for the Mehler series to be used
MEHLER_BOUND = 2.0


@dataclass(frozen=True)
class Support:
    lo: float
    hi: float

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.hi)

    @property
    def half_width(self) -> float:
        return self.hi


@dataclass(frozen=True)
class QuadratureSpec:
    """Quadrature rule on the support.

    scheme: ``"cosine"`` (Gauss-Legendre in the angle, fixed ``nodes``),
    ``"adaptive"`` (adaptive quadrature in the angle to ``abs_tol``) or
    ``"hermite"`` (Gauss-Hermite, for q = 1 only).
    """

    nodes: int = 2048
    scheme: str = "cosine"
    abs_tol: float = 1e-12
    hermite_nodes: int = 61

    def __post_init__(self):
        if self.scheme not in ("cosine", "adaptive", "hermite"):
            raise DomainError(f"unknown quadrature scheme {self.scheme!r}")
        if self.nodes < 8 or self.hermite_nodes < 2:
            raise DomainError("quadrature needs at least 8 nodes")
        if not (math.isfinite(self.abs_tol) and self.abs_tol > 0):
            raise DomainError("abs_tol must be positive")


def support(q: float) -> Support:
    """Support of the q-Gaussian law: ``[-2/sqrt(1-q), 2/sqrt(1-q)]``, the whole line at q = 1."""
    q = check_q(q)
    if q == 1.0:
        return Support(-math.inf, math.inf)
    c = 2.0 / math.sqrt(1.0 - q)
    return Support(-c, c)


def _factor_count(q: float, scale: float, policy: QParam) -> int:
    if q == 0.0:
        return 1
    k = math.ceil(math.log(policy.product_tol / max(scale, policy.product_tol)) / math.log(abs(q))) + 1
    return require_terms(k, q, policy)


def _scalar(out):
    return out if np.ndim(out) else float(out)


def pdf_stationary(x, q: float, policy: QParam | None = None):
    """Density of the q-Gaussian law (standard normal at q = 1); zero outside the support."""
    q = check_q(q)
    policy = policy or DEFAULT_POLICY
    x = np.asarray(x, dtype=float)
    if q == 1.0:
        return _scalar(np.exp(-0.5 * x * x) / math.sqrt(2 * math.pi))
    c = 1.0 - q
    inside = c * x * x < 4.0
    xx = np.where(inside, x, 0.0)
    s = c * xx * xx
    logs = 0.5 * math.log(c) + log_pochhammer_inf(q, q, policy) - math.log(2 * math.pi)
    logs = logs + 0.5 * np.log(4.0 - s)
    # factor (1 + q^k)^2 - (1-q) x^2 q^k differs from 1 by at most 6 |q|^k
    qk = q
    for _ in range(_factor_count(q, 6.0 * abs(q), policy)):
        logs = logs + np.log((1.0 + qk) ** 2 - s * qk)
        qk *= q
    return _scalar(np.where(inside, np.exp(logs), 0.0))


def _check_state(y, q):
    if q < 1.0 and np.any((1.0 - q) * np.asarray(y) ** 2 > 4.0 * (1.0 + 1e-12)):
        raise DomainError("conditioning state lies outside the support")


def _check_rho(rho):
    rho = float(rho)
    if not abs(rho) < 1.0:
        raise DomainError(f"transition density needs |rho| < 1 (got {rho!r})")
    return rho


def pdf_transition(x, y, rho: float, q: float, policy: QParam | None = None):
    """Density at x of the one-step law from state y with correlation rho."""
    q = check_q(q)
    rho = _check_rho(rho)
    policy = policy or DEFAULT_POLICY
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    _check_state(y, q)
    if q == 1.0:
        v = 1.0 - rho * rho
        return _scalar(np.exp(-0.5 * (x - rho * y) ** 2 / v) / math.sqrt(2 * math.pi * v))
    if rho == 0.0:
        return pdf_stationary(x + 0.0 * y, q, policy)
    c = 1.0 - q
    x, y = np.broadcast_arrays(x, y)
    inside = c * x * x < 4.0
    xx = np.where(inside, x, 0.0)
    s = c * xx * xx
    logs = 0.5 * math.log(c) + log_pochhammer_inf(q, q, policy) - math.log(2 * math.pi)
    logs = logs + log_pochhammer_inf(rho * rho, q, policy) + 0.5 * np.log(4.0 - s)
    qk = q
    for _ in range(_factor_count(q, 6.0 * abs(q), policy)):
        logs = logs + np.log((1.0 + qk) ** 2 - s * qk)
        qk *= q
    r2 = rho * rho
    sy = c * (xx * xx + y * y)
    xy = c * xx * y
    qk = 1.0
    # denominator factor k deviates from 1 by at most 12 |rho| |q|^k
    for _ in range(_factor_count(q, 12.0 * abs(rho), policy)):
        r2q2 = r2 * qk * qk
        logs = logs - np.log((1.0 - r2q2) ** 2 - rho * qk * (1.0 + r2q2) * xy + r2q2 * sy)
        qk *= q
    return _scalar(np.where(inside, np.exp(logs), 0.0))


def pdf_transition_mehler(x, y, rho: float, q: float, n_terms: int = 80):
    """Transition density by the truncated Mehler series ``f(x) sum_n rho^n H_n(x) H_n(y) / [n]_q!``.

    The series needs ``(1-q) max(x^2, y^2) <= MEHLER_BOUND``; points outside raise DomainError.
    """
    q = check_q(q)
    rho = _check_rho(rho)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if (1.0 - q) * max(np.max(x * x, initial=0.0), np.max(y * y, initial=0.0)) > MEHLER_BOUND * (1 + 1e-12):
        raise DomainError("Mehler series is only used where (1-q) max(x^2, y^2) <= 2")
    n_terms = int(n_terms)
    x, y = np.broadcast_arrays(x, y)
    # normalised polynomials h_k = H_k / sqrt([k]_q!) keep the terms from overflowing near q = 1
    hx_prev, hy_prev = np.zeros(x.shape), np.zeros(y.shape)
    hx, hy = np.ones(x.shape), np.ones(y.shape)
    total = np.ones(x.shape)
    w = 1.0
    qk_prev, qk = 0.0, 1.0
    for _ in range(n_terms):
        hx, hx_prev = (x * hx - math.sqrt(qk_prev) * hx_prev) / math.sqrt(qk), hx
        hy, hy_prev = (y * hy - math.sqrt(qk_prev) * hy_prev) / math.sqrt(qk), hy
        w *= rho
        total = total + w * hx * hy
        qk_prev, qk = qk, 1.0 + q * qk
    return _scalar(pdf_stationary(x, q) * total)


def _theta_nodes(n: int):
    t, w = special.roots_legendre(n)
    return 0.5 * math.pi * (t + 1.0), 0.5 * math.pi * w


_NODE_CACHE: dict = {}


def _cached_theta_nodes(n: int):
    hit = _NODE_CACHE.get(n)
    if hit is None:
        hit = _NODE_CACHE[n] = _theta_nodes(n)
    return hit


def integrate_support(f, q: float, spec: QuadratureSpec | None = None) -> float:
    """Integral of a vectorised function over the support of the q-Gaussian law.

    On a bounded support the substitution ``x = c cos t`` removes the square-root
    endpoint behaviour of the densities. At q = 1 only the Gauss-Hermite scheme is
    available, and f must decay like a Gaussian times a polynomial.
    """
    q = check_q(q)
    spec = spec or QuadratureSpec()
    if q == 1.0:
        if spec.scheme != "hermite":
            raise DomainError("the support is unbounded at q = 1; use QuadratureSpec(scheme='hermite')")
        x, w = np.polynomial.hermite_e.hermegauss(spec.hermite_nodes)
        # weight exp(-x^2/2) is divided back out of the integrand
        return float(np.sum(w * np.exp(0.5 * x * x) * np.asarray(f(x), dtype=float)))
    if spec.scheme == "hermite":
        raise DomainError("Gauss-Hermite quadrature is only used at q = 1")
    c = 2.0 / math.sqrt(1.0 - q)
    if spec.scheme == "cosine":
        t, w = _cached_theta_nodes(spec.nodes)
        vals = np.asarray(f(c * np.cos(t)), dtype=float)
        return float(np.sum(w * c * np.sin(t) * vals))
    val, _ = integrate.quad(
        lambda t: float(f(c * math.cos(t))) * c * math.sin(t),
        0.0,
        math.pi,
        epsabs=spec.abs_tol,
        epsrel=0.0,
        limit=500,
    )
    return float(val)


def cdf_stationary(x, q: float):
    """Distribution function of the q-Gaussian law."""
    q = check_q(q)
    x = np.asarray(x, dtype=float)
    if q == 1.0:
        return _scalar(special.ndtr(x))
    c = 2.0 / math.sqrt(1.0 - q)
    t = np.arccos(np.clip(x / c, -1.0, 1.0))
    return _scalar(1.0 - kernels.stationary_table(q).evaluate(t))


def quantile_stationary(p, q: float):
    """Inverse of ``cdf_stationary``; p must lie in [0, 1]."""
    q = check_q(q)
    p = np.asarray(p, dtype=float)
    if np.any((p < 0) | (p > 1)) or np.any(np.isnan(p)):
        raise DomainError("quantile needs probabilities in [0, 1]")
    if q == 1.0:
        return _scalar(special.ndtri(p))
    c = 2.0 / math.sqrt(1.0 - q)
    t = kernels.stationary_table(q).invert(1.0 - p)
    return _scalar(c * np.cos(t))
