"""Quadrature grids for radial and vibrational integrals.

Radial integrals use composite Gauss-Legendre panels on [0, r_max]; the
integrands are exponentially damped but oscillatory (continuum functions
carry e^{-ikR}), so many moderate-order panels beat one high-order rule.
Vibrational integrals use Gauss-Hermite, which handles the e^{-r^2}
weight of the oscillator functions natively.
"""

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=32)
def radial_grid(r_max: float, panels: int = 64, order: int = 16):
    """Composite Gauss-Legendre nodes and weights on [0, r_max].

    Returns (nodes, weights) as flat arrays of length panels*order.
    """
    if r_max <= 0.0:
        raise ValueError("r_max must be positive")
    if panels < 1 or order < 2:
        raise ValueError("need at least one panel of order >= 2")
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, r_max, panels + 1)
    half = np.diff(edges) / 2.0
    mid = (edges[:-1] + edges[1:]) / 2.0
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


@lru_cache(maxsize=32)
def hermite_grid(order: int):
    """Gauss-Hermite nodes and weights for weight e^{-x^2} on R."""
    if order < 1:
        raise ValueError("order must be positive")
    return np.polynomial.hermite.hermgauss(order)


def hermite_order_for(max_v: int) -> int:
    """Rule order used for oscillator matrix elements up to level max_v."""
    return 2 * max_v + 16
