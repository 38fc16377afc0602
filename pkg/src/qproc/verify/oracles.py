"""Quadrature oracles built only from the densities, independent of the closed forms they test."""

from __future__ import annotations

import functools
import math

import numpy as np

from qproc.density import QuadratureSpec, integrate_support, pdf_stationary, pdf_transition

__all__ = ["expect_stationary", "expect_transition", "chapman_kolmogorov_lhs", "bridge_expectation"]

_GH_NODES = 80
# q = 1 bridge integrands can be narrow (width ~ sqrt(1 - rho2^2)); Gauss-Legendre on a wide interval resolves them
_LINE_HALF_WIDTH = 16.0
_LINE_NODES = 4096


def _gauss_nodes(n=_GH_NODES):
    x, w = np.polynomial.hermite_e.hermegauss(n)
    return x, w / math.sqrt(2 * math.pi)


@functools.lru_cache(maxsize=1)
def _line_nodes():
    t, w = np.polynomial.legendre.leggauss(_LINE_NODES)
    return t * _LINE_HALF_WIDTH, w * _LINE_HALF_WIDTH


def expect_stationary(g, q, spec: QuadratureSpec | None = None) -> float:
    """``int g(x) f_N(x) dx``."""
    if q == 1.0:
        x, w = _gauss_nodes()
        return float(np.sum(w * g(x)))
    return integrate_support(lambda x: g(x) * pdf_stationary(x, q), q, spec)


def expect_transition(g, y, rho, q, spec: QuadratureSpec | None = None) -> float:
    """``int g(x) f_CN(x|y, rho) dx``; at q = 1 Gauss-Hermite nodes centred on the transition mean."""
    if q == 1.0:
        x, w = _gauss_nodes()
        return float(np.sum(w * g(rho * y + math.sqrt(1 - rho * rho) * x)))
    return integrate_support(lambda x: g(x) * pdf_transition(x, y, rho, q), q, spec)


def chapman_kolmogorov_lhs(x, z, rho1, rho2, q, spec: QuadratureSpec | None = None) -> float:
    """``int f_CN(x|y, rho1) f_CN(y|z, rho2) dy``."""
    return expect_transition(lambda y: pdf_transition(x, y, rho1, q), z, rho2, q, spec)


def bridge_expectation(h, a, b, rho1, rho2, q, spec: QuadratureSpec | None = None) -> float:
    """``E(h(Y) | left = a, right = b)`` from the Markov factorisation of the bridge density

    ``f_CN(x|a, rho1) f_CN(b|x, rho2) / f_CN(b|a, rho1 rho2)``.
    """
    if q == 1.0:
        t, w = _line_nodes()
        num = float(np.sum(w * h(t) * pdf_transition(t, a, rho1, q) * pdf_transition(b, t, rho2, q)))
    else:
        num = expect_transition(lambda x: h(x) * pdf_transition(b, x, rho2, q), a, rho1, q, spec)
    return num / float(pdf_transition(b, a, rho1 * rho2, q))
