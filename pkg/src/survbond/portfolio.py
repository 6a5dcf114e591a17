"""Portfolio aggregation and market-neutral long-short trade construction."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bond import Position
from .exceptions import DegenerateTradeError, DomainError
from .risk import vod as bond_vod

__all__ = [
    "Portfolio",
    "HedgeProblem",
    "HedgeSolution",
    "KAPPA",
    "DEFAULT_ACCURACY",
    "aggregate",
    "aggregate_duration",
    "dollar_sensitivity",
    "aggregate_vod",
    "solve_hedge",
    "solve_spread_based_barbell",
    "treasury_factors",
]

# sign of (1/P) dP/dF in each measure's definition
KAPPA = {"d_r": -1, "d_h": -1, "d_bcds": -1, "gamma_r": 1, "gamma_h": 1, "d_recovery": 1}

DEFAULT_ACCURACY = {
    "d_r": 0.1,
    "d_h": 0.1,
    "d_bcds": 0.1,
    "d_r_continuous": 0.1,
    "mod_duration": 0.1,
    "vod": 0.01,
}

# singular values below this fraction of the largest count as rank loss
_RANK_RTOL = 1e-10


@dataclass(frozen=True)
class Portfolio:
    """Bond positions plus an optional cash balance (market value units)."""

    positions: tuple[Position, ...]
    cash: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "positions", tuple(self.positions))

    @property
    def market_value(self) -> float:
        return sum(p.market_value for p in self.positions) + self.cash

    def weights(self) -> np.ndarray:
        """Market-value weights of the bond positions (cash excluded)."""
        mv = self.market_value
        if mv == 0.0:
            raise DomainError("portfolio market value is zero; weights undefined")
        return np.array([p.market_value for p in self.positions]) / mv

    @property
    def cash_weight(self) -> float:
        return self.cash / self.market_value if self.market_value else float("nan")


class SameIssuerWarning(UserWarning):
    pass


def aggregate(weights: Sequence[float], values: Sequence[float]) -> float:
    """Weighted sum of per-bond measures (cash legs contribute zero)."""
    w = np.asarray(weights, dtype=float)
    v = np.asarray(values, dtype=float)
    if w.shape != v.shape:
        raise DomainError(f"{w.size} weights for {v.size} values")
    return float(w @ v)


def aggregate_duration(portfolio: Portfolio, values: Sequence[float]) -> float:
    """Market-value weighted duration or convexity of the portfolio.

    The same rule holds for every measure defined as ``(kappa/P) dP/dF``,
    whatever the sign ``kappa``.
    """
    return aggregate(portfolio.weights(), values)


def dollar_sensitivity(portfolio: Portfolio, values: Sequence[float], kappa: int) -> float:
    """``dMV/dF`` implied by per-bond measures defined with sign ``kappa``."""
    if kappa not in (-1, 1):
        raise DomainError("kappa must be +1 or -1")
    return kappa * sum(p.market_value * v for p, v in zip(portfolio.positions, values))


def aggregate_vod(portfolio: Portfolio) -> float:
    """Fractional loss if every bond defaults at once.

    Only meaningful when all bonds share one issuer; a warning is issued
    otherwise.
    """
    issuers = {p.bond.issuer for p in portfolio.positions if p.bond.issuer is not None}
    if len(issuers) > 1:
        warnings.warn(
            f"portfolio VOD mixes issuers {sorted(issuers)}", SameIssuerWarning, stacklevel=2
        )
    if not portfolio.positions:
        return 0.0
    vods = [bond_vod(p.market_price, p.bond.recovery_principal) for p in portfolio.positions]
    return aggregate_duration(portfolio, vods)


@dataclass(frozen=True)
class HedgeProblem:
    """Risk rows to neutralise.

    Attributes:
        sensitivities: ``K x N`` raw sensitivities (risk k of bond i).
        target_accuracy: ``K`` normalisers in the units of each row.
        bond_prices: optional prices per unit face, used to turn weights
            into face quantities.
        risk_names, bond_ids: labels carried into the solution.
    """

    sensitivities: np.ndarray
    target_accuracy: np.ndarray
    bond_prices: np.ndarray | None = None
    risk_names: tuple[str, ...] = ()
    bond_ids: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        s = np.atleast_2d(np.asarray(self.sensitivities, dtype=float))
        acc = np.atleast_1d(np.asarray(self.target_accuracy, dtype=float))
        if np.asarray(self.sensitivities).size == 0:
            n = len(self.bond_ids) or (
                len(self.bond_prices) if self.bond_prices is not None else s.shape[-1]
            )
            s = np.zeros((0, n))
            acc = np.zeros(0)
        if s.shape[0] != acc.size:
            raise DomainError(f"{s.shape[0]} risk rows but {acc.size} accuracies")
        if s.shape[1] < 1:
            raise DomainError("hedge problem needs at least one bond")
        if np.any(acc <= 0.0):
            raise DomainError("target accuracies must be positive")
        if not np.all(np.isfinite(s)):
            raise DomainError("sensitivities must be finite")
        object.__setattr__(self, "sensitivities", s)
        object.__setattr__(self, "target_accuracy", acc)
        if self.bond_prices is not None:
            object.__setattr__(self, "bond_prices", np.asarray(self.bond_prices, dtype=float))

    @property
    def n_bonds(self) -> int:
        return self.sensitivities.shape[1]

    def design_matrix(self) -> np.ndarray:
        """Normalised sensitivities stacked over a row of ones."""
        scaled = self.sensitivities / self.target_accuracy[:, None]
        return np.vstack([scaled, np.ones(self.n_bonds)])


@dataclass(frozen=True)
class HedgeSolution:
    weights: np.ndarray
    cash: float
    raw: np.ndarray
    normalizer: float
    residuals: np.ndarray
    degenerate: bool = False
    risk_names: tuple[str, ...] = ()
    bond_ids: tuple[str, ...] = ()
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def gross_long(self) -> float:
        return float(self.weights[self.weights > 0].sum())

    @property
    def gross_short(self) -> float:
        return float(-self.weights[self.weights < 0].sum())

    def quantities(self, prices: Sequence[float], notional: float = 1.0) -> np.ndarray:
        """Face amounts realising the weights for a given trade notional."""
        return self.weights * notional / np.asarray(prices, dtype=float)

    def to_dict(self) -> dict:
        return {
            "bond_ids": list(self.bond_ids),
            "weights": [float(x) for x in self.weights],
            "cash": float(self.cash),
            "raw": [float(x) for x in self.raw],
            "normalizer": float(self.normalizer),
            "risk_names": list(self.risk_names),
            "residuals": [float(x) for x in self.residuals],
            "degenerate": bool(self.degenerate),
            "notes": list(self.notes),
        }


def solve_hedge(problem: HedgeProblem, long_index: int | None = None) -> HedgeSolution:
    """Least-squares zero-cost long-short trade neutral to the chosen risks.

    Solves ``min ||L v - b||`` where ``L`` stacks the normalised
    sensitivities over a row of ones and ``b = (0, ..., 0, 1)``. The
    minimum-norm solution is taken when ``L`` is rank deficient, and the
    solution is flagged as degenerate. With more bonds than constraints
    the minimum-norm exact fit is returned and noted, but not flagged. Raw weights are scaled so the larger
    of gross long and gross short equals 1; cash takes up the difference.

    Args:
        problem: sensitivities and target accuracies.
        long_index: when given, the trade direction is chosen so this bond
            is held long. The least-squares fit fixes the direction only
            through the budget row, which always leaves the bonds net long.
    """
    lam = problem.design_matrix()
    b = np.zeros(lam.shape[0])
    b[-1] = 1.0
    v, _, rank, sv = np.linalg.lstsq(lam, b, rcond=None)
    full_rank = min(lam.shape)
    degenerate = bool(rank < full_rank or (sv.size and sv[-1] <= _RANK_RTOL * sv[0]))
    notes = []
    if degenerate:
        notes.append(
            f"sensitivity matrix rank {rank} < {full_rank}; minimum-norm solution used"
        )
        warnings.warn(notes[-1], RuntimeWarning, stacklevel=2)
    elif rank < problem.n_bonds:
        # more bonds than constraints: exact fits form a family, take the smallest
        notes.append(f"{problem.n_bonds} bonds for {rank} constraints; minimum-norm solution used")
    scale = max(v[v > 0].sum(), -v[v < 0].sum()) if v.size else 0.0
    if not scale > 1e-14:
        raise DegenerateTradeError("hedge solve returned all-zero raw weights")
    if long_index is not None and v[long_index] < 0.0:
        v = -v
    w = v / scale
    cash = -float(np.sum(w))
    return HedgeSolution(
        weights=w,
        cash=cash,
        raw=v,
        normalizer=float(scale),
        residuals=problem.sensitivities @ w,
        degenerate=degenerate,
        risk_names=tuple(problem.risk_names),
        bond_ids=tuple(problem.bond_ids),
        notes=tuple(notes),
    )


def solve_spread_based_barbell(mod_durations: Sequence[float], body_index: int = 1) -> np.ndarray:
    """Duration-neutral, price-balanced barbell with the body held +100%.

    The two wing weights solve ``sum w_i D_i = 0`` and ``sum w_i = 0``.

    Returns:
        Weights for the three bonds; the cash weight is zero.
    """
    d = np.asarray(mod_durations, dtype=float)
    if d.shape != (3,):
        raise DomainError("barbell needs exactly three bonds")
    wings = [i for i in range(3) if i != body_index]
    a = np.array([[d[wings[0]], d[wings[1]]], [1.0, 1.0]])
    if abs(np.linalg.det(a)) < 1e-14:
        raise DomainError("wing durations are equal; barbell is singular")
    sol = np.linalg.solve(a, [-d[body_index], -1.0])
    w = np.zeros(3)
    w[body_index] = 1.0
    w[wings] = sol
    return w


def treasury_factors(yield_changes: Sequence[float]) -> tuple[float, float]:
    """Shift and twist factors from 2/5/10/20/30-year yield changes."""
    dy = np.asarray(yield_changes, dtype=float)
    if dy.shape != (5,):
        raise DomainError(f"need five yield changes (2/5/10/20/30y), got {dy.size}")
    shift = float(dy.mean())
    twist = float(2.0 * dy[0] + dy[1] - dy[3] - 2.0 * dy[4]) / 10.0
    return shift, twist
