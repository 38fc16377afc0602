"""q-arithmetic: q-numbers, q-factorials, Gaussian binomials and q-Pochhammer products.

Conventions follow q-series usage: ``[0]_q = 0``, ``[n]_q = 1 + q + ... + q^(n-1)``,
``(a|q)_n = prod_{i<n} (1 - a q^i)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from qproc.errors import DomainError

__all__ = [
    "QParam",
    "check_q",
    "q_number",
    "q_factorial",
    "q_binomial",
    "pochhammer",
    "pochhammer_inf",
    "log_pochhammer_inf",
    "w_sum",
    "truncation_index",
    "require_terms",
]

Q_RANGE_MESSAGE = "q must lie in (-1, 1]; the process does not exist for q > 1"
_TINY = 1e-300


def check_q(q: float) -> float:
    """Validate the deformation parameter and return it as a float."""
    q = float(q)
    if not math.isfinite(q) or q <= -1.0 or q > 1.0:
        raise DomainError(f"{Q_RANGE_MESSAGE} (got q={q!r})")
    return q


@dataclass(frozen=True)
class QParam:
    """Deformation parameter plus truncation policy for infinite products."""

    q: float
    product_tol: float = 1e-14
    max_terms: int = 10_000

    def __post_init__(self):
        object.__setattr__(self, "q", check_q(self.q))
        if not self.product_tol > 0:
            raise DomainError(f"product_tol must be positive (got {self.product_tol!r})")
        if int(self.max_terms) < 1:
            raise DomainError(f"max_terms must be >= 1 (got {self.max_terms!r})")
        object.__setattr__(self, "max_terms", int(self.max_terms))

    @property
    def gaussian(self) -> bool:
        return self.q == 1.0


DEFAULT_POLICY = QParam(0.0)


def _check_n(n) -> int:
    if int(n) != n or n < 0:
        raise DomainError(f"n must be a nonnegative integer (got {n!r})")
    return int(n)


def q_number(n: int, q: float) -> float:
    n = _check_n(n)
    q = check_q(q)
    if q == 1.0:
        return float(n)
    return float(sum(q**i for i in range(n)))


def q_factorial(n: int, q: float) -> float:
    n = _check_n(n)
    q = check_q(q)
    out = 1.0
    for i in range(1, n + 1):
        out *= q_number(i, q)
    return out


def q_binomial(n: int, k: int, q: float) -> float:
    """Gaussian binomial coefficient; zero outside ``0 <= k <= n``."""
    n = _check_n(n)
    q = check_q(q)
    if k < 0 or k > n:
        return 0.0
    k = min(k, n - k)
    # product form avoids dividing large factorials
    out = 1.0
    for i in range(k):
        out *= q_number(n - i, q) / q_number(i + 1, q)
    return out


def pochhammer(a, q: float, n: int):
    """Finite product ``(a|q)_n``. ``a`` may be an array."""
    n = _check_n(n)
    q = check_q(q)
    a = np.asarray(a, dtype=float)
    out = np.ones_like(a)
    qi = 1.0
    for _ in range(n):
        out = out * (1.0 - a * qi)
        qi *= q
    return out if out.ndim else float(out)


def require_terms(k: int, q: float, policy: QParam = DEFAULT_POLICY) -> int:
    """Return k, or raise when a product needs more factors than ``policy.max_terms`` allows."""
    if k > policy.max_terms:
        raise DomainError(
            f"the infinite product at q={q!r} needs {k} factors, more than max_terms={policy.max_terms}; "
            "raise QParam.max_terms"
        )
    return max(int(k), 1)


def truncation_index(a_abs: float, q: float, policy: QParam = DEFAULT_POLICY) -> int:
    """Number of factors K such that ``|a| |q|^K < product_tol``; DomainError beyond ``max_terms``.

    The neglected tail satisfies ``|log prod_{i>=K}(1 - a q^i)| <= 2 |a||q|^K / (1 - |q|)``
    once ``|a||q|^K <= 1/2``.
    """
    a_abs = max(float(a_abs), _TINY)
    if a_abs < policy.product_tol:
        return 1
    if q == 0.0:
        return 1
    k = math.ceil(math.log(policy.product_tol / a_abs) / math.log(abs(q)))
    return require_terms(k, q, policy)


def _require_open_q(q: float) -> float:
    q = check_q(q)
    if q == 1.0:
        raise DomainError("infinite q-products diverge at q = 1; use the Gaussian formulas")
    return q


def pochhammer_inf(a, q: float, policy: QParam | None = None):
    """Truncated infinite product ``(a|q)_inf`` for ``|q| < 1``.

    Evaluated as a sum of logs when every factor is positive, by direct
    multiplication otherwise.
    """
    q = _require_open_q(q)
    policy = policy or DEFAULT_POLICY
    a = np.asarray(a, dtype=float)
    k = truncation_index(np.max(np.abs(a)) if a.size else 0.0, q, policy)
    powers = q ** np.arange(k)
    factors = 1.0 - a[..., None] * powers
    if np.all(factors > 0):
        out = np.exp(np.sum(np.log(factors), axis=-1))
    else:
        out = np.prod(factors, axis=-1)
    return out if out.ndim else float(out)


def log_pochhammer_inf(a, q: float, policy: QParam | None = None):
    """``log (a|q)_inf`` for arguments whose factors are all positive (``a < 1``)."""
    q = _require_open_q(q)
    policy = policy or DEFAULT_POLICY
    a = np.asarray(a, dtype=float)
    k = truncation_index(np.max(np.abs(a)) if a.size else 0.0, q, policy)
    factors = 1.0 - a[..., None] * q ** np.arange(k)
    if np.any(factors <= 0):
        raise DomainError("log_pochhammer_inf needs every factor 1 - a q^i to be positive")
    out = np.sum(np.log(factors), axis=-1)
    return out if out.ndim else float(out)


def w_sum(n: int, q: float) -> float:
    """Row sum of Gaussian binomials, ``W_n(q) = sum_i [n choose i]_q``."""
    n = _check_n(n)
    return float(sum(q_binomial(n, i, q) for i in range(n + 1)))
