"""Piecewise-flat term structures of forward rates and hazard rates.

Both curve types store a list of ``(time, rate)`` nodes. The rate of node
``k`` applies on ``[t_{k-1}, t_k)`` (with ``t_{-1} = 0``) and the last rate
is extrapolated flat. Segments are right-continuous, so at a node time the
rate of the segment to the right is returned.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from .exceptions import DomainError

__all__ = [
    "PiecewiseFlatCurve",
    "DiscountCurve",
    "HazardCurve",
    "ShiftTwistDiscount",
    "segment_grid",
]


class PiecewiseFlatCurve:
    """Immutable piecewise-flat instantaneous rate curve."""

    kind = "curve"

    def __init__(self, nodes: Iterable[Sequence[float]], *, _check: bool = True):
        pairs = [(float(t), float(r)) for t, r in nodes]
        if not pairs:
            raise DomainError(f"{self.kind} curve needs at least one node")
        times = np.array([t for t, _ in pairs])
        rates = np.array([r for _, r in pairs])
        if not (np.all(np.isfinite(times)) and np.all(np.isfinite(rates))):
            raise DomainError(f"{self.kind} curve nodes must be finite")
        if times[0] < 0.0:
            raise DomainError(f"{self.kind} curve node times must be >= 0")
        if np.any(np.diff(times) <= 0.0):
            raise DomainError(f"{self.kind} curve node times must be strictly increasing")
        if _check:
            self._validate_rates(rates)
        self._times = times
        self._rates = rates
        self._times.setflags(write=False)
        self._rates.setflags(write=False)
        # cumulative integral of the rate up to each node time
        lengths = np.diff(np.concatenate(([0.0], times)))
        self._cum = np.cumsum(rates * lengths)

    def _validate_rates(self, rates: np.ndarray) -> None:
        pass

    @classmethod
    def flat(cls, rate: float):
        return cls([(0.0, rate)])

    @property
    def times(self) -> np.ndarray:
        return self._times

    @property
    def rates(self) -> np.ndarray:
        return self._rates

    @property
    def nodes(self) -> list[tuple[float, float]]:
        return [(float(t), float(r)) for t, r in zip(self._times, self._rates)]

    def _index(self, t: float) -> int:
        return int(np.searchsorted(self._times, t, side="right"))

    def forward_rate(self, t: float) -> float:
        """Instantaneous rate at ``t`` (right-continuous, flat extrapolated)."""
        if t < 0.0:
            raise DomainError(f"time must be >= 0, got {t}")
        idx = min(self._index(t), len(self._rates) - 1)
        return float(self._rates[idx])

    def integral(self, t: float) -> float:
        """Exact integral of the rate over ``[0, t]``."""
        if t < 0.0:
            raise DomainError(f"time must be >= 0, got {t}")
        idx = self._index(t)
        if idx == 0:
            return float(self._rates[0] * t)
        n = len(self._rates)
        rate = self._rates[min(idx, n - 1)]
        return float(self._cum[idx - 1] + rate * (t - self._times[idx - 1]))

    def shifted(self, shift: float):
        """Same node grid with every rate moved by ``shift``.

        No sign validation is applied, so hazard curves may be bumped below
        zero for finite-difference work.
        """
        return type(self)(
            [(t, r + shift) for t, r in zip(self._times, self._rates)], _check=False
        )

    def to_dict(self) -> dict:
        return {"kind": self.kind, "nodes": [{"t": t, "rate": r} for t, r in self.nodes]}

    def __eq__(self, other: object) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return np.array_equal(self._times, other._times) and np.array_equal(
            self._rates, other._rates
        )

    def __hash__(self) -> int:
        return hash((type(self).__name__, self._times.tobytes(), self._rates.tobytes()))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.nodes!r})"


class DiscountCurve(PiecewiseFlatCurve):
    """Credit-risk-free instantaneous forward rates, continuously compounded."""

    kind = "discount"

    def discount_factor(self, t: float) -> float:
        return math.exp(-self.integral(t))


class HazardCurve(PiecewiseFlatCurve):
    """Default intensity term structure (non-negative rates)."""

    kind = "hazard"

    def _validate_rates(self, rates: np.ndarray) -> None:
        if np.any(rates < 0.0):
            raise DomainError("hazard rates must be >= 0")

    def survival_prob(self, t: float) -> float:
        return math.exp(-self.integral(t))

    def default_prob_interval(self, t1: float, t2: float) -> float:
        """Probability of default in ``[t1, t2]`` seen from today."""
        if t1 > t2:
            raise DomainError(f"interval start {t1} exceeds end {t2}")
        return self.survival_prob(t1) - self.survival_prob(t2)


class ShiftTwistDiscount:
    """Discount curve view with forwards moved by ``shift + twist * t``.

    Only ``discount_factor`` is provided, which is all the discrete pricer
    needs for scenario repricing. The moved forwards are no longer piecewise
    flat when ``twist != 0``.
    """

    def __init__(self, base: DiscountCurve, shift: float = 0.0, twist: float = 0.0):
        self.base = base
        self.shift = shift
        self.twist = twist

    def discount_factor(self, t: float) -> float:
        return self.base.discount_factor(t) * math.exp(
            -self.shift * t - 0.5 * self.twist * t * t
        )


def discount_factor(curve: DiscountCurve, t: float) -> float:
    return curve.discount_factor(t)


def survival_prob(curve: HazardCurve, t: float) -> float:
    return curve.survival_prob(t)


def default_prob_interval(curve: HazardCurve, t1: float, t2: float) -> float:
    return curve.default_prob_interval(t1, t2)


def forward_rate(curve: PiecewiseFlatCurve, t: float) -> float:
    return curve.forward_rate(t)


def segment_grid(T: float, *curves: PiecewiseFlatCurve) -> np.ndarray:
    """Union of ``0``, ``T`` and all curve node times strictly inside ``(0, T)``."""
    pts = [np.array([0.0, T])]
    for c in curves:
        pts.append(c.times[(c.times > 0.0) & (c.times < T)])
    return np.unique(np.concatenate(pts))
