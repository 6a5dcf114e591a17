"""Closed-form moments of piecewise exponential integrands.

For a curve of total intensity ``lam(s)`` (piecewise flat) define
``I(u) = int_0^u lam``. This module returns, over ``[0, T]``,

    E_k = int u**k exp(-I(u)) du,   H_k = int u**k w(u) exp(-I(u)) du

for ``k = 0, 1, 2`` where ``w`` is a second piecewise-flat weight (the
hazard rate). Every segment is integrated analytically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curves import DiscountCurve, HazardCurve, segment_grid

# below this |lam * L| the moment functions use their Taylor series
_SERIES_CUTOFF = 0.5
_SERIES_TERMS = 24


def unit_moments(x: float) -> tuple[float, float, float]:
    """``g_k(x) = int_0^1 t**k exp(-x t) dt`` for k = 0, 1, 2."""
    if abs(x) < _SERIES_CUTOFF:
        g = [0.0, 0.0, 0.0]
        term = 1.0  # (-x)**n / n!
        for n in range(_SERIES_TERMS):
            for k in range(3):
                g[k] += term / (n + k + 1)
            term *= -x / (n + 1)
        return g[0], g[1], g[2]
    e = math.exp(-x)
    g0 = -math.expm1(-x) / x
    g1 = (g0 - e) / x
    g2 = (2.0 * g1 - e) / x
    return g0, g1, g2


@dataclass(frozen=True)
class Moments:
    """Integrated moments over ``[0, T]`` plus the terminal exponent ``I(T)``."""

    e0: float
    e1: float
    e2: float
    h0: float
    h1: float
    h2: float
    total: float

    @property
    def terminal(self) -> float:
        return math.exp(-self.total)


def moments(
    discount: DiscountCurve,
    hazard: HazardCurve,
    T: float,
    spread: float = 0.0,
) -> Moments:
    """Moments of ``exp(-int (r + h + spread))`` with hazard weights."""
    grid = segment_grid(T, discount, hazard)
    e = np.zeros(3)
    hw = np.zeros(3)
    acc = 0.0
    for a, b in zip(grid[:-1], grid[1:]):
        length = b - a
        h = hazard.forward_rate(a)
        lam = discount.forward_rate(a) + h + spread
        g0, g1, g2 = unit_moments(lam * length)
        m0 = length * g0
        m1 = length * length * g1
        m2 = length**3 * g2
        scale = math.exp(-acc)
        seg = scale * np.array([m0, a * m0 + m1, a * a * m0 + 2.0 * a * m1 + m2])
        e += seg
        hw += h * seg
        acc += lam * length
    return Moments(e[0], e[1], e[2], hw[0], hw[1], hw[2], acc)
