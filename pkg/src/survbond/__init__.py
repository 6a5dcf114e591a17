"""Survival-based credit bond analytics.

Pricing, risk measures and hedge construction for fixed-coupon bonds under
piecewise-flat interest and hazard rate term structures.
"""

from .bond import Bond, Position, schedule
from .curves import DiscountCurve, HazardCurve, ShiftTwistDiscount
from .exceptions import CalibrationError, DegenerateTradeError, DomainError, SurvbondError
from .portfolio import HedgeProblem, HedgeSolution, Portfolio, solve_hedge
from .pricer import PricingInputs, price_continuous, price_exact
from .risk import RiskReport, risk_report

__all__ = [
    "Bond",
    "Position",
    "schedule",
    "DiscountCurve",
    "HazardCurve",
    "ShiftTwistDiscount",
    "SurvbondError",
    "DomainError",
    "CalibrationError",
    "DegenerateTradeError",
    "PricingInputs",
    "price_exact",
    "price_continuous",
    "RiskReport",
    "risk_report",
    "Portfolio",
    "HedgeProblem",
    "HedgeSolution",
    "solve_hedge",
]

__version__ = "0.1.0"
