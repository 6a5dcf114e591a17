"""Survival-consistent sensitivity measures for a single bond.

Rate duration and convexity are taken on the discrete price (they are the
cash-flow-time weighted sums, with each flow weighted by its probability of
being realised). Hazard, recovery and hazard-convexity measures are exact
derivatives of the continuous-time price, where they take a closed form.
The continuous-basis rate duration and convexity are reported alongside so
that each measure can be compared with derivatives of its own pricing
function.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields
from typing import Callable

import numpy as np

from ._integrals import moments
from .exceptions import DomainError
from .pricer import (
    PricingInputs,
    _discounted_flows,
    _effective_recovery,
    bcds,
    price_continuous,
    price_exact,
    yield_and_modified_duration,
    z_spread,
)

__all__ = [
    "RiskReport",
    "ContinuousGreeks",
    "continuous_greeks",
    "duration_survival",
    "convexity_survival",
    "duration_rate_continuous",
    "convexity_rate_continuous",
    "duration_hazard",
    "duration_hazard_ballpark",
    "duration_bcds",
    "duration_bcds_exact",
    "duration_recovery",
    "duration_recovery_bcds",
    "duration_recovery_ballpark",
    "vod",
    "convexity_hazard",
    "hazard_convexity_identity_gap",
    "price_impact_oasf",
    "price_impact_shift_twist",
    "fd_sensitivity",
    "risk_report",
]

FIRST_BUMP = 1e-6
SECOND_BUMP = 1e-4


def _positive(price: float) -> float:
    if not price > 0.0:
        raise DomainError(f"price must be positive, got {price}")
    return price


# --- discrete-basis measures -------------------------------------------------


def duration_survival(inputs: PricingInputs) -> float:
    """Survival-weighted time to cash flows, ``-(1/P) dP/dOASF``."""
    times, pv = _discounted_flows(inputs)
    price = _positive(float(pv.sum()))
    return float(np.sum(times * pv)) / price


def convexity_survival(inputs: PricingInputs) -> float:
    """Second moment of survival-weighted cash-flow times, ``(1/P) d2P/dOASF2``."""
    times, pv = _discounted_flows(inputs)
    price = _positive(float(pv.sum()))
    return float(np.sum(times * times * pv)) / price


# --- continuous-basis measures -----------------------------------------------


@dataclass(frozen=True)
class ContinuousGreeks:
    """Raw derivatives of the continuous-time price."""

    price: float
    dp_dr: float
    d2p_dr2: float
    dp_dh: float
    d2p_dh2: float
    dp_drecovery: float
    rpv01: float
    drpv01_dh: float
    effective_recovery: float


def continuous_greeks(inputs: PricingInputs) -> ContinuousGreeks:
    bond = inputs.bond
    T = bond.maturity
    m = moments(inputs.discount, inputs.hazard, T, inputs.oasf)
    c = bond.coupon
    half = c / (2.0 * bond.frequency)
    k = _effective_recovery(bond)
    price = c * m.e0 + m.terminal - half * (1.0 - m.terminal) + k * m.h0
    terminal = (1.0 + half) * m.terminal
    dp_dr = -c * m.e1 - T * terminal - k * m.h1
    d2p_dr2 = c * m.e2 + T * T * terminal + k * m.h2
    return ContinuousGreeks(
        price=price,
        dp_dr=dp_dr,
        d2p_dr2=d2p_dr2,
        dp_dh=dp_dr + k * m.e0,
        d2p_dh2=d2p_dr2 - 2.0 * k * m.e1,
        dp_drecovery=m.h0,
        rpv01=m.e0,
        drpv01_dh=-m.e1,
        effective_recovery=k,
    )


def duration_rate_continuous(inputs: PricingInputs) -> float:
    g = continuous_greeks(inputs)
    return -g.dp_dr / _positive(g.price)


def convexity_rate_continuous(inputs: PricingInputs) -> float:
    g = continuous_greeks(inputs)
    return g.d2p_dr2 / _positive(g.price)


def duration_hazard(inputs: PricingInputs) -> float:
    """Hazard-rate duration for a parallel shift ``h(s) -> h(s) + eps``.

    Obtained as the continuous rate duration less the effective recovery
    times the risky annuity per unit price.
    """
    g = continuous_greeks(inputs)
    price = _positive(g.price)
    return -g.dp_dr / price - g.effective_recovery * g.rpv01 / price


def duration_hazard_ballpark(d_r: float, recovery: float, price: float) -> float:
    return d_r * (1.0 - recovery * price)


def duration_bcds(inputs: PricingInputs) -> float:
    """Price sensitivity per unit BCDS change, approximate form.

    Uses ``(1 - R_p P)/(1 - R_p) * D_r``, which drops the rate dependence of
    BCDS. Prefer :func:`duration_hazard` for hedging; see also
    :func:`duration_bcds_exact`.
    """
    R = inputs.bond.recovery_principal
    if R >= 1.0:
        raise DomainError("BCDS duration undefined for full principal recovery")
    price = _positive(price_exact(inputs))
    return (1.0 - R * price) / (1.0 - R) * duration_survival(inputs)


def duration_bcds_exact(inputs: PricingInputs, bump: float = FIRST_BUMP) -> float:
    """BCDS duration from a common parallel hazard bump of price and BCDS."""
    bond = inputs.bond

    def spread(eps: float) -> float:
        return bcds(
            inputs.discount,
            inputs.hazard.shifted(eps),
            bond.maturity,
            bond.recovery_principal,
            inputs.oasf,
        )

    g = continuous_greeks(inputs)
    dspread = fd_sensitivity(spread, 0.0, bump)
    return -(g.dp_dh / _positive(g.price)) / dspread


def duration_recovery(inputs: PricingInputs) -> float:
    """``(1/P) dP/dR_p`` at fixed hazard rates (exact, continuous basis)."""
    g = continuous_greeks(inputs)
    return g.dp_drecovery / _positive(g.price)


def duration_recovery_bcds(inputs: PricingInputs) -> float:
    """Recovery duration written through the risky annuity and BCDS."""
    bond = inputs.bond
    R = bond.recovery_principal
    if R >= 1.0:
        raise DomainError("recovery duration BCDS form undefined for R_p = 1")
    g = continuous_greeks(inputs)
    spread = bcds(inputs.discount, inputs.hazard, bond.maturity, R, inputs.oasf)
    return g.rpv01 * (spread - inputs.oasf) / ((1.0 - R) * _positive(g.price))


def duration_recovery_ballpark(price: float, recovery: float) -> float:
    return (1.0 - price) / ((1.0 - recovery) * _positive(price))


def vod(price: float, recovery: float) -> float:
    """Fractional loss on instantaneous default."""
    return 1.0 - recovery / _positive(price)


def convexity_hazard(inputs: PricingInputs) -> float:
    g = continuous_greeks(inputs)
    return g.d2p_dh2 / _positive(g.price)


def hazard_convexity_identity_gap(inputs: PricingInputs) -> float:
    """Residual of ``G_h = G_r + 2 K (1/P) dRPV01/dh`` with analytic terms."""
    g = continuous_greeks(inputs)
    price = _positive(g.price)
    gamma_h = convexity_hazard(inputs)
    gamma_r = convexity_rate_continuous(inputs)
    drpv = -moments(inputs.discount, inputs.hazard, inputs.bond.maturity, inputs.oasf).e1
    return gamma_h - gamma_r - 2.0 * g.effective_recovery * drpv / price


# --- price impact approximations ----------------------------------------------


def price_impact_oasf(report: "RiskReport", delta_oasf: float) -> float:
    """Second-order price ratio ``P(OASF + d)/P`` from duration and convexity."""
    return 1.0 - report.d_r * delta_oasf + 0.5 * report.gamma_r * delta_oasf**2


def price_impact_shift_twist(
    report: "RiskReport", delta_shift: float, delta_twist: float
) -> float:
    """Price ratio for forwards moving by ``shift + t * twist``.

    Second order in the shift and first order in the twist; the twist
    duration is half the shift convexity.
    """
    return (
        1.0
        - report.d_r * delta_shift
        + 0.5 * report.gamma_r * delta_shift**2
        - 0.5 * report.gamma_r * delta_twist
    )


def fd_sensitivity(
    fn: Callable[[float], float],
    x0: float = 0.0,
    bump: float | None = None,
    order: int = 1,
) -> float:
    """Central finite-difference derivative of ``fn`` at ``x0``."""
    if order == 1:
        h = FIRST_BUMP if bump is None else bump
        if not h > 0.0:
            raise DomainError("bump must be positive")
        return (fn(x0 + h) - fn(x0 - h)) / (2.0 * h)
    if order == 2:
        h = SECOND_BUMP if bump is None else bump
        if not h > 0.0:
            raise DomainError("bump must be positive")
        return (fn(x0 + h) - 2.0 * fn(x0) + fn(x0 - h)) / (h * h)
    raise DomainError(f"order must be 1 or 2, got {order}")


# --- full report ---------------------------------------------------------------


@dataclass(frozen=True)
class RiskReport:
    """Full sensitivity vector of one bond.

    The leading fields form the serialised record. ``basis`` says which
    pricing function each measure differentiates: ``discrete`` (coupon-date
    sum) or ``continuous`` (continuous-time approximation).
    """

    price: float
    d_r: float
    gamma_r: float
    d_h: float
    gamma_h: float
    d_bcds: float
    d_recovery: float
    vod: float
    rpv01: float
    bcds: float
    mod_duration: float
    z_spread: float
    id: str = ""
    oasf: float = 0.0
    yield_: float = float("nan")
    price_continuous: float = float("nan")
    d_r_continuous: float = float("nan")
    gamma_r_continuous: float = float("nan")
    d_h_ballpark: float = float("nan")
    d_bcds_exact: float = float("nan")
    d_recovery_bcds: float = float("nan")
    d_recovery_ballpark: float = float("nan")
    basis: dict = field(
        default_factory=lambda: {
            "price": "discrete",
            "d_r": "discrete",
            "gamma_r": "discrete",
            "d_h": "continuous",
            "gamma_h": "continuous",
            "d_bcds": "discrete",
            "d_recovery": "continuous",
            "vod": "discrete",
            "rpv01": "continuous",
            "bcds": "continuous",
        },
        compare=False,
    )

    @classmethod
    def record_fields(cls) -> list[str]:
        return [f.name for f in fields(cls) if f.name != "basis"]

    def as_record(self) -> dict:
        d = asdict(self)
        d.pop("basis")
        return d


def risk_report(inputs: PricingInputs) -> RiskReport:
    """Compute every measure for one bond at the given OASF."""
    bond = inputs.bond
    R = bond.recovery_principal
    price = _positive(price_exact(inputs))
    d_r = duration_survival(inputs)
    g = continuous_greeks(inputs)
    pc = _positive(g.price)
    y, mod_d = yield_and_modified_duration(bond, price)
    spread = bcds(inputs.discount, inputs.hazard, bond.maturity, R, inputs.oasf)
    full_recovery = R >= 1.0
    return RiskReport(
        price=price,
        d_r=d_r,
        gamma_r=convexity_survival(inputs),
        d_h=duration_hazard(inputs),
        gamma_h=g.d2p_dh2 / pc,
        d_bcds=math.nan if full_recovery else duration_bcds(inputs),
        d_recovery=g.dp_drecovery / pc,
        vod=vod(price, R),
        rpv01=g.rpv01,
        bcds=spread,
        mod_duration=mod_d,
        z_spread=z_spread(bond, inputs.discount, price),
        id=bond.id,
        oasf=inputs.oasf,
        yield_=y,
        price_continuous=pc,
        d_r_continuous=-g.dp_dr / pc,
        gamma_r_continuous=g.d2p_dr2 / pc,
        d_h_ballpark=duration_hazard_ballpark(d_r, R, price),
        d_bcds_exact=math.nan if full_recovery else duration_bcds_exact(inputs),
        d_recovery_bcds=math.nan if full_recovery else duration_recovery_bcds(inputs),
        d_recovery_ballpark=(
            math.nan if full_recovery else duration_recovery_ballpark(price, R)
        ),
    )
