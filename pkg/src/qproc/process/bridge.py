"""Two-sided conditional expectations of q-Hermite polynomials of the OU process.

``E(H_n(Y_s) | Y_{s-delta} = a, Y_{s+gamma} = b)`` is a bilinear form in q-Hermite
values at a and b. Entry ``(r, m)`` of the table multiplies
``H_{n-2r-l}(a) H_l(b)`` with ``l = m + floor(n/2) - r``, so that row r = 0
with l = 0 is the purely left-sided term. Here ``rho1 = exp(-alpha delta)``
and ``rho2 = exp(-alpha gamma)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qproc.errors import DomainError, UnsupportedDegreeError
from qproc.orthopoly import hermite_seq
from qproc.qseries import check_q, pochhammer, q_binomial, q_number

__all__ = ["BridgeCoeffs", "bridge_coeffs", "hermite_bridge_mean", "MAX_BRIDGE_DEGREE"]

MAX_BRIDGE_DEGREE = 4


@dataclass(frozen=True)
class BridgeCoeffs:
    n: int
    entries: dict

    def __post_init__(self):
        if len(self.entries) != expected_count(self.n):
            raise ValueError("bridge table has the wrong number of entries")

    def __getitem__(self, key):
        return self.entries[key]

    def terms(self):
        """Yield ``(coefficient, left_degree, right_degree)`` triples."""
        half = self.n // 2
        for (r, m), a in sorted(self.entries.items()):
            l = m + half - r
            yield a, self.n - 2 * r - l, l


def expected_count(n: int) -> int:
    return ((n + 2) // 2) * ((n + 3) // 2)


def _check(n, rho1, rho2):
    if int(n) != n or n < 1:
        raise DomainError("bridge degree must be a positive integer")
    if n > MAX_BRIDGE_DEGREE:
        raise UnsupportedDegreeError(f"bridge coefficients are available only for n <= {MAX_BRIDGE_DEGREE}")
    if not (0 < rho1 < 1 and 0 < rho2 < 1):
        raise DomainError("bridge coefficients need 0 < rho1, rho2 < 1")
    return int(n)


def bridge_coeffs(n: int, rho1: float, rho2: float, q: float) -> BridgeCoeffs:
    q = check_q(q)
    n = _check(n, rho1, rho2)
    half = n // 2
    p = rho1 * rho2
    den = pochhammer(p * p, q, n)
    lead = {}
    for l in range(n + 1):
        lead[-half + l] = (
            q_binomial(n, l, q)
            * rho1 ** (n - l)
            * pochhammer(rho2 * rho2, q, n - l)
            * rho2**l
            * pochhammer(rho1 * rho1, q, l)
            / den
        )
    entries = {(0, m): a for m, a in lead.items()}
    if n in (2, 3):
        for l in range(n - 1):
            m = -half + 1 + l
            entries[(1, m)] = -q_number(n - 1, q) * p * lead[m]
    elif n == 4:
        entries[(1, -1)] = -q_number(3, q) * p * lead[-1]
        entries[(1, 1)] = -q_number(3, q) * p * lead[1]
        entries[(1, 0)] = -q_number(2, q) ** 2 * p * lead[0]
        entries[(2, 0)] = q * (1.0 + q) * p * p * lead[0]
    return BridgeCoeffs(n, entries)


def hermite_bridge_mean(n: int, y_left, y_right, rho1: float, rho2: float, q: float):
    """``E(H_n(Y_s|q) | Y_left = y_left, Y_right = y_right)`` from the coefficient table."""
    coeffs = bridge_coeffs(n, rho1, rho2, q)
    ya = np.asarray(y_left, dtype=float)
    yb = np.asarray(y_right, dtype=float)
    if q < 1 and (1 - q) * max(np.max(ya * ya), np.max(yb * yb)) > 4 * (1 + 1e-12):
        raise DomainError("conditioning states lie outside the support")
    ha = hermite_seq(n, ya, q).values
    hb = hermite_seq(n, yb, q).values
    out = np.zeros(np.broadcast(ya, yb).shape)
    for a, i, j in coeffs.terms():
        out = out + a * ha[i] * hb[j]
    return out if out.ndim else float(out)
