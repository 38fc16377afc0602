"""Closed-form moments, covariances and regressions of the OU and q-Wiener processes."""

from __future__ import annotations

import math

from qproc.errors import DomainError
from qproc.qseries import check_q, q_factorial

__all__ = [
    "ou_covariance",
    "wiener_covariance",
    "increment_moments",
    "increment_cubic_covariance",
    "harness_mean",
    "harness_second",
    "harness_var",
    "ou_bridge_var",
    "ou_bridge_mean",
    "spectral_density",
    "tsp_params",
    "tsp_params_jk",
    "moment_identities",
]


def _positive(name, v):
    v = float(v)
    if not (math.isfinite(v) and v > 0):
        raise DomainError(f"{name} must be positive (got {v!r})")
    return v


def ou_covariance(s: float, t: float, alpha: float) -> float:
    alpha = _positive("alpha", alpha)
    return math.exp(-alpha * abs(s - t))


def wiener_covariance(s: float, t: float) -> float:
    if s < 0 or t < 0:
        raise DomainError("q-Wiener times must be nonnegative")
    return float(min(s, t))


def increment_moments(sigma: float, tau: float, x_sigma: float, q: float):
    """Conditional moments of order 2, 3, 4 of ``X_tau - X_sigma`` given ``X_sigma = x_sigma``."""
    q = check_q(q)
    sigma = _positive("sigma", sigma)
    if not tau > sigma:
        raise DomainError("increment moments need sigma < tau")
    d = tau - sigma
    x = float(x_sigma)
    m2 = d
    m3 = -(1.0 - q) * d * x
    m4 = d * (x * x * (1.0 - q) ** 2 + (2.0 + q) * d + sigma * (1.0 - q * q))
    return m2, m3, m4


def increment_cubic_covariance(sigma: float, tau: float, upsilon: float, omega: float, q: float) -> float:
    """``cov((X_tau - X_sigma)^3, (X_omega - X_upsilon)^3)`` for sigma < tau <= upsilon < omega."""
    q = check_q(q)
    if not (0 < sigma < tau <= upsilon < omega):
        raise DomainError("need 0 < sigma < tau <= upsilon < omega")
    return -(1.0 - q) * (tau - sigma) * (omega - upsilon) * (tau * (2.0 + q) - sigma * (1.0 + 2.0 * q))


def _bridge_times(sigma, delta, gamma):
    delta = _positive("delta", delta)
    gamma = _positive("gamma", gamma)
    sigma = float(sigma)
    if not sigma > delta:
        raise DomainError("need sigma > delta so that the left time is positive")
    return sigma, delta, gamma


def harness_mean(x_left: float, x_right: float, sigma: float, delta: float, gamma: float) -> float:
    """``E(X_sigma | X_{sigma-delta}, X_{sigma+gamma})`` for the q-Wiener process (free of q)."""
    sigma, delta, gamma = _bridge_times(sigma, delta, gamma)
    return (gamma * x_left + delta * x_right) / (delta + gamma)


def harness_second(x_left, x_right, sigma, delta, gamma, q) -> float:
    """``E(X_sigma^2 | X_{sigma-delta}, X_{sigma+gamma})`` for the q-Wiener process."""
    q = check_q(q)
    sigma, delta, gamma = _bridge_times(sigma, delta, gamma)
    den = sigma * (1.0 - q) + gamma + q * delta
    a = ((1.0 - q) * sigma + gamma) * x_left * x_left / delta
    b = ((1.0 - q) * sigma + q * delta) * x_right * x_right / gamma
    return delta * gamma / ((delta + gamma) * den) * (a + b + (1.0 + q) * x_left * x_right + delta + gamma)


def harness_var(x_left, x_right, sigma, delta, gamma, q) -> float:
    """Conditional variance of ``X_sigma`` given both neighbours."""
    q = check_q(q)
    sigma, delta, gamma = _bridge_times(sigma, delta, gamma)
    den = sigma * (1.0 - q) + gamma + q * delta
    corr = (1.0 - q) * (x_right - x_left) * ((sigma + gamma) * x_left - (sigma - delta) * x_right)
    return delta * gamma / den * (1.0 - corr / (delta + gamma) ** 2)


def ou_bridge_mean(y_left, y_right, delta, gamma, alpha) -> float:
    """``E(Y_s | Y_{s-delta}, Y_{s+gamma})`` for the OU process."""
    delta = _positive("delta", delta)
    gamma = _positive("gamma", gamma)
    alpha = _positive("alpha", alpha)
    r1 = math.exp(-alpha * delta)
    r2 = math.exp(-alpha * gamma)
    return (r1 * (1 - r2 * r2) * y_left + r2 * (1 - r1 * r1) * y_right) / (1 - (r1 * r2) ** 2)


def ou_bridge_var(y_left, y_right, delta, gamma, alpha, q) -> float:
    """``var(Y_s | Y_{s-delta}, Y_{s+gamma})`` for the (q, alpha)-OU process."""
    q = check_q(q)
    delta = _positive("delta", delta)
    gamma = _positive("gamma", gamma)
    alpha = _positive("alpha", alpha)
    r1 = math.exp(-alpha * delta)
    r2 = math.exp(-alpha * gamma)
    p = r1 * r2
    lead = (1.0 - r1 * r1) * (1.0 - r2 * r2) / (1.0 - q * p * p)
    corr = (1.0 - q) * p * (y_left - p * y_right) * (y_right - p * y_left) / (1.0 - p * p) ** 2
    return lead * (1.0 - corr)


def spectral_density(n: int, omega: float, alpha: float, q: float) -> float:
    """Spectral density of ``H_n(Y_t|q)``: ``[n]_q! 2 n alpha / (omega^2 + n^2 alpha^2)``."""
    q = check_q(q)
    alpha = _positive("alpha", alpha)
    if int(n) != n or n < 1:
        raise DomainError("spectral density needs a positive integer degree")
    n = int(n)
    return q_factorial(n, q) * 2.0 * n * alpha / (omega * omega + n * n * alpha * alpha)


def _check_lag_rho(rho):
    rho = float(rho)
    if not 0 < abs(rho) < 1:
        raise DomainError(f"need 0 < |rho| < 1 (got {rho!r})")
    return rho


def tsp_params(rho: float, q: float):
    """Coefficients (A, B, C) of ``E(X_n^2 | X_{n-1}, X_{n+1})
    = A(X_{n-1}^2 + X_{n+1}^2) + B X_{n-1} X_{n+1} + C``."""
    q = check_q(q)
    rho = _check_lag_rho(rho)
    r2 = rho * rho
    den = 1.0 - q * r2 * r2
    a = r2 * (1.0 - q * r2) / ((r2 + 1.0) * den)
    b = r2 * (1.0 - r2) * (1.0 + q) / ((r2 + 1.0) * den)
    c = (1.0 - r2) ** 2 / den
    return a, b, c


def tsp_params_jk(j: int, k: int, rho: float, q: float):
    """Coefficients (A1, A2, B, C) of ``E(X_n^2 | X_{n-j}, X_{n+k})
    = A1 X_{n-j}^2 + A2 X_{n+k}^2 + B X_{n-j} X_{n+k} + C``.

    Taking expectations gives ``1 = A1 + A2 + rho^(j+k) B + C``.
    """
    q = check_q(q)
    rho = _check_lag_rho(rho)
    if int(j) != j or int(k) != k or j < 1 or k < 1:
        raise DomainError("lags j, k must be positive integers")
    a = rho ** (2 * j)
    b = rho ** (2 * k)
    den = 1.0 - q * a * b
    one_ab = 1.0 - a * b
    a1 = a * (1.0 - b) * (1.0 - q * b) / (one_ab * den)
    a2 = b * (1.0 - a) * (1.0 - q * a) / (one_ab * den)
    bb = (1.0 + q) * rho ** (j + k) * (1.0 - a) * (1.0 - b) / (one_ab * den)
    c = (1.0 - a) * (1.0 - b) / den
    return a1, a2, bb, c


def moment_identities(rho: float, q: float, n: int, m: int, j: int, k: int):
    """``(E X^4, E X_n^2 X_m^2, E X_n^2 X_{n-j} X_{n+k})`` for the stationary sequence with lag correlation rho."""
    q = check_q(q)
    rho = float(rho)
    if not abs(rho) <= 1:
        raise DomainError("need |rho| <= 1")
    ex4 = 2.0 + q
    ex2x2 = 1.0 + rho ** (2 * abs(n - m)) * (1.0 + q)
    ex2xx = rho ** (j + k) * (2.0 + q)
    return ex4, ex2x2, ex2xx
