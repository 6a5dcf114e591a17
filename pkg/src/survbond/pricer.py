"""Bond valuation under the survival framework.

Two pricing routes are provided. ``price_exact`` sums the discrete coupon,
principal and end-of-period recovery flows weighted by survival. The
continuous-time approximation ``price_continuous`` is smooth in the curve
levels and is the basis for the analytic hazard and recovery sensitivities
in :mod:`survbond.risk`. Conventional comparators (yield, modified duration,
Z-spread, the flat-curve conventional spread) live here as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from ._integrals import moments
from .bond import Bond, schedule
from .curves import DiscountCurve, HazardCurve
from .exceptions import CalibrationError, DomainError

__all__ = [
    "PricingInputs",
    "price_exact",
    "price_continuous",
    "price_naive_continuous",
    "riskless_price",
    "rpv01",
    "bcds",
    "calibrate_oasf",
    "calibrate_flat_hazard",
    "conventional_spread_exact",
    "conventional_spread_approx",
    "yield_and_modified_duration",
    "z_spread",
]

XTOL = 1e-12
MAXITER = 200

OASF_BRACKET = (-0.5, 5.0)
HAZARD_BRACKET = (0.0, 20.0)
SPREAD_BRACKET = (-1.0, 10.0)
YIELD_BRACKET = (-0.9, 10.0)
ZSPREAD_BRACKET = (-0.5, 10.0)


@dataclass(frozen=True)
class PricingInputs:
    bond: Bond
    discount: DiscountCurve
    hazard: HazardCurve
    oasf: float = 0.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.oasf):
            raise DomainError(f"oasf must be finite, got {self.oasf}")

    def with_(self, **changes) -> "PricingInputs":
        return replace(self, **changes)


def _solve(fn: Callable[[float], float], lo: float, hi: float, what: str) -> float:
    f_lo, f_hi = fn(lo), fn(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if np.sign(f_lo) == np.sign(f_hi):
        raise CalibrationError(
            f"{what}: target not attainable within bracket [{lo}, {hi}]", (lo, hi)
        )
    return brentq(fn, lo, hi, xtol=XTOL, rtol=4 * np.finfo(float).eps, maxiter=MAXITER)


def _discounted_flows(inputs: PricingInputs):
    bond = inputs.bond
    times, coupons = schedule(bond)
    z = np.array([inputs.discount.discount_factor(t) for t in times])
    q = np.array([inputs.hazard.survival_prob(t) for t in times])
    q_prev = np.concatenate(([1.0], q[:-1]))
    spread = np.exp(-inputs.oasf * times)
    survive = coupons * z * q * spread
    survive[-1] += z[-1] * q[-1] * spread[-1]
    recover = bond.recovery_principal * z * (q_prev - q) * spread
    return times, survive + recover


def price_exact(inputs: PricingInputs) -> float:
    """Clean price per unit face from the discrete survival pricing sum.

    Coupons and principal are weighted by the survival probability to their
    payment date; on default within a coupon period the bond recovers
    ``R_p`` of face at the end of that period. Accrued coupon is not
    recovered. All flows carry the extra discount ``exp(-oasf * t)``.
    """
    _, pv = _discounted_flows(inputs)
    return float(pv.sum())


def riskless_price(bond: Bond, discount, spread: float = 0.0) -> float:
    """Strippable cash-flow price with an additive flat discount spread."""
    times, coupons = schedule(bond)
    flows = coupons.copy()
    flows[-1] += 1.0
    z = np.array([discount.discount_factor(t) for t in times])
    return float(np.sum(flows * z * np.exp(-spread * times)))


def _effective_recovery(bond: Bond) -> float:
    half = bond.coupon / (2.0 * bond.frequency)
    return bond.recovery_principal - (1.0 - bond.recovery_coupon) * half


def price_continuous(inputs: PricingInputs) -> float:
    """Continuous-time approximation of the clean price.

    Starts from continuously paid coupons and continuous recovery, then
    subtracts the early-discounting bias ``C/(2f) * (1 - exp(-I(T)))`` and
    lowers the recovery by the expected lost accrued coupon, where
    ``I(T) = int_0^T (r + h + oasf)``.
    """
    bond = inputs.bond
    m = moments(inputs.discount, inputs.hazard, bond.maturity, inputs.oasf)
    c = bond.coupon
    half = c / (2.0 * bond.frequency)
    return (
        c * m.e0
        + m.terminal
        - half * (1.0 - m.terminal)
        + _effective_recovery(bond) * m.h0
    )


def price_naive_continuous(inputs: PricingInputs) -> float:
    """Continuous-coupon price with no correction terms."""
    bond = inputs.bond
    m = moments(inputs.discount, inputs.hazard, bond.maturity, inputs.oasf)
    return bond.coupon * m.e0 + m.terminal + bond.recovery_principal * m.h0


def rpv01(discount: DiscountCurve, hazard: HazardCurve, T: float, oasf: float = 0.0) -> float:
    """Risky annuity ``int_0^T exp(-int_0^u (r + h + oasf))`` in years."""
    if T < 0.0:
        raise DomainError(f"T must be >= 0, got {T}")
    if T == 0.0:
        return 0.0
    return moments(discount, hazard, T, oasf).e0


def bcds(
    discount: DiscountCurve,
    hazard: HazardCurve,
    T: float,
    recovery: float,
    oasf: float = 0.0,
) -> float:
    """Bond-implied CDS spread: loss-weighted average hazard plus ``oasf``."""
    if not T > 0.0:
        raise DomainError(f"BCDS needs T > 0, got {T}")
    m = moments(discount, hazard, T)
    return (1.0 - recovery) * m.h0 / m.e0 + oasf


def calibrate_oasf(
    bond: Bond,
    discount: DiscountCurve,
    hazard: HazardCurve,
    market_price: float,
    bracket: tuple[float, float] = OASF_BRACKET,
) -> float:
    """OASF that reprices ``market_price`` (per unit face) exactly."""
    base = PricingInputs(bond, discount, hazard)

    def gap(x: float) -> float:
        return price_exact(base.with_(oasf=x)) - market_price

    return _solve(gap, *bracket, what=f"OASF calibration of {bond.id or 'bond'}")


def calibrate_flat_hazard(
    bond: Bond,
    discount: DiscountCurve,
    market_price: float,
    recovery: float | None = None,
    bracket: tuple[float, float] = HAZARD_BRACKET,
) -> float:
    """Flat hazard rate with zero OASF that reprices ``market_price``."""
    if recovery is not None:
        bond = replace(bond, recovery_principal=recovery)

    def gap(h: float) -> float:
        return price_exact(PricingInputs(bond, discount, HazardCurve.flat(h))) - market_price

    return _solve(gap, *bracket, what=f"flat hazard calibration of {bond.id or 'bond'}")


def _annuity(rate: float, T: float) -> float:
    x = rate * T
    if abs(x) < 1e-8:
        return T * (1.0 - 0.5 * x)
    return -math.expm1(-x) / rate


def _strippable_continuous(C: float, rate: float, T: float) -> float:
    return C * _annuity(rate, T) + math.exp(-rate * T)


def _survival_continuous(C: float, r: float, h: float, R_p: float, T: float) -> float:
    return (C + h * R_p) * _annuity(r + h, T) + math.exp(-(r + h) * T)


def conventional_spread_exact(C: float, r: float, h: float, R_p: float, T: float) -> float:
    """Flat spread ``S`` over ``r`` whose strippable price equals the survival price.

    Both prices use continuous coupons and flat curves.
    """
    if not T > 0.0:
        raise DomainError(f"T must be positive, got {T}")
    target = _survival_continuous(C, r, h, R_p, T)

    def gap(s: float) -> float:
        return _strippable_continuous(C, r + s, T) - target

    return _solve(gap, *SPREAD_BRACKET, what="conventional spread")


def conventional_spread_approx(C: float, r: float, h: float, R_p: float, T: float) -> float:
    """Credit triangle plus the first-order coupon-premium correction."""
    loss = h * (1.0 - R_p)
    return loss + 0.5 * R_p * h * T * (C - r - loss)


def _yield_price(bond: Bond, y: float) -> tuple[float, float]:
    times, coupons = schedule(bond)
    flows = coupons.copy()
    flows[-1] += 1.0
    f = bond.frequency
    pv = flows * (1.0 + y / f) ** (-f * times)
    price = float(pv.sum())
    return price, float(np.sum(times * pv))


def yield_and_modified_duration(bond: Bond, market_price: float) -> tuple[float, float]:
    """Yield compounded at the coupon frequency and modified duration.

    Returns:
        ``(yield, modified_duration)``; duration is Macaulay / (1 + y/f).
    """
    y = _solve(
        lambda x: _yield_price(bond, x)[0] - market_price,
        *YIELD_BRACKET,
        what=f"yield of {bond.id or 'bond'}",
    )
    price, weighted = _yield_price(bond, y)
    macaulay = weighted / price
    return y, macaulay / (1.0 + y / bond.frequency)


def z_spread(bond: Bond, discount: DiscountCurve, market_price: float) -> float:
    """Flat spread over the forward curve repricing the default-free cash flows."""
    return _solve(
        lambda s: riskless_price(bond, discount, s) - market_price,
        *ZSPREAD_BRACKET,
        what=f"Z-spread of {bond.id or 'bond'}",
    )
