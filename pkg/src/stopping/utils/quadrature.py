"""
Composite Gauss-Legendre quadrature with panel doubling
"""

import logging
from functools import lru_cache

import numpy as np

from stopping.errors import QuadratureNonConvergence

logger = logging.getLogger(__name__)

NODES_PER_PANEL = 16


@lru_cache(maxsize=8)
def _legendre_rule(order):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    return nodes, weights


def composite_gauss_legendre(func, a, b, panels, order=NODES_PER_PANEL):
    """Integrate a vectorised func over [a, b] with equal panels"""
    if b <= a:
        return 0.0
    nodes, weights = _legendre_rule(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    points = mid[:, None] + half[:, None] * nodes[None, :]
    values = np.asarray(func(points.ravel()), dtype=float).reshape(points.shape)
    return float(np.sum(half[:, None] * weights[None, :] * values))


def integrate_adaptive(func, a, b, tol=1e-10, fail_tol=1e-9, start_panels=4, max_panels=4096):
    """Double the panel count until two successive estimates agree to tol

    Raises QuadratureNonConvergence when the last change still exceeds fail_tol.
    """
    panels = start_panels
    previous = composite_gauss_legendre(func, a, b, panels)
    change = np.inf
    while panels < max_panels:
        panels *= 2
        current = composite_gauss_legendre(func, a, b, panels)
        change = abs(current - previous)
        if change <= tol * max(1.0, abs(current)):
            return current
        previous = current

    if change <= fail_tol * max(1.0, abs(previous)):
        logger.debug(f"Quadrature on [{a}, {b}] settled at change {change:.3e} with {panels} panels")
        return previous
    raise QuadratureNonConvergence(
        f"quadrature on [{a}, {b}] did not settle after {panels} panels",
        last_estimate=previous, last_change=change)
