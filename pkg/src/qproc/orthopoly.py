"""q-Hermite and Al-Salam-Chihara polynomials and their generating functions.

Normalisation is the probabilists' one: ``H_n(x|q)`` is monic, orthogonal with
respect to the q-Gaussian law and reduces to the Hermite polynomials ``He_n`` at
``q = 1``. ``P_n(x|y, rho, q)`` is monic and orthogonal with respect to the
transition law. The more common continuous variants are recovered by rescaling,
``p_n(x|y, rho, q) = P_n(2x/sqrt(1-q) | 2y/sqrt(1-q), rho, q)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qproc.errors import DomainError
from qproc.qseries import DEFAULT_POLICY, QParam, check_q, require_terms, w_sum

__all__ = [
    "PolySeq",
    "MAX_DEGREE",
    "hermite_seq",
    "hermite",
    "asc_seq",
    "phi",
    "tau",
    "hermite_bound",
]

MAX_DEGREE = 64


@dataclass(frozen=True)
class PolySeq:
    """Values of the degree 0..n_max polynomials at one evaluation point (or array of points)."""

    degree: int
    values: np.ndarray

    def __post_init__(self):
        if len(self.values) != self.degree + 1:
            raise ValueError("PolySeq needs degree + 1 values")

    def __getitem__(self, k):
        return self.values[k]

    def __len__(self):
        return self.degree + 1


def _check_degree(n_max, max_degree=MAX_DEGREE) -> int:
    if int(n_max) != n_max or n_max < 0:
        raise DomainError(f"degree must be a nonnegative integer (got {n_max!r})")
    if n_max > max_degree:
        raise DomainError(f"degree {n_max} exceeds the supported maximum {max_degree}")
    return int(n_max)


def _q_numbers(n: int, q: float) -> np.ndarray:
    # [k]_q for k = 0..n
    if q == 1.0:
        return np.arange(n + 1, dtype=float)
    return np.array([sum(q**i for i in range(k)) for k in range(n + 1)])


def hermite_seq(n_max: int, x, q: float, max_degree: int = MAX_DEGREE) -> PolySeq:
    """H_0..H_{n_max} by the forward recurrence ``H_{k+1} = x H_k - [k]_q H_{k-1}``.

    Degrees above ``max_degree`` are refused; raise it deliberately for long series.
    """
    n_max = _check_degree(n_max, max_degree)
    q = check_q(q)
    x = np.asarray(x, dtype=float)
    qn = _q_numbers(n_max, q)
    vals = np.empty((n_max + 1,) + x.shape)
    vals[0] = 1.0
    if n_max >= 1:
        vals[1] = x
    for k in range(1, n_max):
        vals[k + 1] = x * vals[k] - qn[k] * vals[k - 1]
    return PolySeq(n_max, vals)


def hermite(n: int, x, q: float):
    """Single q-Hermite polynomial ``H_n(x|q)``."""
    out = hermite_seq(n, x, q).values[n]
    return out if np.ndim(out) else float(out)


def asc_seq(n_max: int, x, y, rho: float, q: float) -> PolySeq:
    """Al-Salam-Chihara polynomials ``P_0..P_{n_max}`` at x, given state y and correlation rho.

    ``P_{k+1} = (x - rho y q^k) P_k - (1 - rho^2 q^(k-1)) [k]_q P_{k-1}``.
    """
    n_max = _check_degree(n_max)
    q = check_q(q)
    if not abs(rho) < 1:
        raise DomainError(f"rho must satisfy |rho| < 1 (got {rho!r})")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    qn = _q_numbers(n_max, q)
    shape = np.broadcast(x, y).shape
    vals = np.empty((n_max + 1,) + shape)
    vals[0] = 1.0
    if n_max >= 1:
        vals[1] = x - rho * y
    for k in range(1, n_max):
        vals[k + 1] = (x - rho * y * q**k) * vals[k] - (1.0 - rho**2 * q ** (k - 1)) * qn[k] * vals[k - 1]
    return PolySeq(n_max, vals)


def _product_length(scale, q: float, policy: QParam) -> int:
    # factor k deviates from 1 by at most |q|^k * scale
    scale = float(np.max(scale)) if np.size(scale) else 0.0
    if scale < policy.product_tol or q == 0.0:
        return 1
    k = int(np.ceil(np.log(policy.product_tol / scale) / np.log(abs(q)))) + 1
    return require_terms(k, q, policy)


def phi(x, t, q: float, policy: QParam | None = None):
    """Generating function ``sum_i t^i H_i(x|q) / [i]_q!`` in product form.

    Defined for ``(1-q) x^2 <= 4`` and ``(1-q) t^2 < 1``; equals ``exp(x t - t^2/2)`` at q = 1.
    """
    q = check_q(q)
    policy = policy or DEFAULT_POLICY
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if q == 1.0:
        out = np.exp(x * t - 0.5 * t * t)
        return out if out.ndim else float(out)
    c = 1.0 - q
    if np.any(c * t * t >= 1.0):
        raise DomainError("phi needs (1-q) t^2 < 1")
    if np.any(c * x * x > 4.0 * (1.0 + 1e-12)):
        raise DomainError("phi needs (1-q) x^2 <= 4")
    x, t = np.broadcast_arrays(x, t)
    k = _product_length(c * (np.abs(x * t) + t * t), q, policy)
    logs = np.zeros(x.shape)
    qk = 1.0
    for _ in range(k):
        logs -= np.log(1.0 - c * x * t * qk + c * t * t * qk * qk)
        qk *= q
    out = np.exp(logs)
    return out if out.ndim else float(out)


def tau(x, t, y, rho: float, q: float, policy: QParam | None = None):
    """Generating function ``sum_i t^i P_i(x|y, rho, q) / [i]_q!`` in product form."""
    q = check_q(q)
    policy = policy or DEFAULT_POLICY
    if not abs(rho) < 1:
        raise DomainError(f"rho must satisfy |rho| < 1 (got {rho!r})")
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if q == 1.0:
        out = np.exp(t * (x - rho * y) - 0.5 * t * t * (1.0 - rho * rho))
        return out if out.ndim else float(out)
    c = 1.0 - q
    if np.any(c * t * t >= 1.0):
        raise DomainError("tau needs (1-q) t^2 < 1")
    if np.any(c * np.maximum(x * x, y * y) > 4.0 * (1.0 + 1e-12)):
        raise DomainError("tau needs (1-q) max(x^2, y^2) <= 4")
    x, t, y = np.broadcast_arrays(x, t, y)
    k = _product_length(c * (np.abs(x * t) + np.abs(y * t) + t * t), q, policy)
    logs = np.zeros(x.shape)
    qk = 1.0
    for _ in range(k):
        num = 1.0 - c * rho * y * t * qk + c * rho * rho * t * t * qk * qk
        den = 1.0 - c * x * t * qk + c * t * t * qk * qk
        logs += np.log(num) - np.log(den)
        qk *= q
    out = np.exp(logs)
    return out if out.ndim else float(out)


def hermite_bound(n: int, q: float) -> float:
    """Uniform bound ``W_n(q) / (1-q)^(n/2)`` for ``|H_n|`` on the support of the q-Gaussian."""
    q = check_q(q)
    if q == 1.0:
        raise DomainError("the support is unbounded at q = 1, so |H_n| has no uniform bound")
    return w_sum(n, q) / (1.0 - q) ** (n / 2)
