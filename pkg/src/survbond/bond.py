"""Fixed-coupon bullet bonds and their payment schedules."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError

__all__ = ["Bond", "Position", "schedule"]

# T*f values within this distance of an integer count as a regular grid
_GRID_TOL = 1e-9


@dataclass(frozen=True)
class Bond:
    """Bullet bond with face 1.

    Attributes:
        coupon: annual coupon rate as a decimal.
        frequency: coupon payments per year.
        maturity: years from the valuation date.
        recovery_principal: fraction of face recovered on default.
        recovery_coupon: fraction of the accrued coupon recovered on default.
        id: free-form identifier carried through reports.
        issuer: optional issuer tag, used for the same-issuer VOD check.
    """

    coupon: float
    frequency: int
    maturity: float
    recovery_principal: float = 0.4
    recovery_coupon: float = 0.0
    id: str = ""
    issuer: str | None = None

    def __post_init__(self) -> None:
        if not (self.maturity > 0.0 and math.isfinite(self.maturity)):
            raise DomainError(f"maturity must be positive, got {self.maturity}")
        if int(self.frequency) != self.frequency or self.frequency < 1:
            raise DomainError(f"frequency must be an integer >= 1, got {self.frequency}")
        if not self.coupon >= 0.0:
            raise DomainError(f"coupon must be >= 0, got {self.coupon}")
        for name in ("recovery_principal", "recovery_coupon"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {value}")

    @property
    def n_payments(self) -> int:
        x = self.maturity * self.frequency
        n = round(x)
        if abs(x - n) <= _GRID_TOL:
            return max(int(n), 1)
        return math.ceil(x)

    @property
    def coupon_amount(self) -> float:
        return self.coupon / self.frequency


@dataclass(frozen=True)
class Position:
    """A holding of ``quantity`` face units of ``bond`` at a clean price per unit face."""

    bond: Bond
    quantity: float
    market_price: float

    def __post_init__(self) -> None:
        if not self.market_price > 0.0:
            raise DomainError(f"market price must be positive, got {self.market_price}")

    @property
    def market_value(self) -> float:
        return self.quantity * self.market_price


def schedule(bond: Bond) -> tuple[np.ndarray, np.ndarray]:
    """Payment times and coupon amounts, generated backward from maturity.

    A short first period still pays the full ``C/f`` coupon. Principal of 1
    is paid at the last date, which always equals the maturity.

    Returns:
        ``(times, coupons)`` arrays of length ``ceil(T*f)``.
    """
    n = bond.n_payments
    f = bond.frequency
    times = bond.maturity - (n - np.arange(1, n + 1)) / f
    times[-1] = bond.maturity
    coupons = np.full(n, bond.coupon_amount)
    return times, coupons
