"""Rebuild the KFT (6/30/2004) bond fixture shipped in ``survbond/data``.

The LIBOR curve is a flat-forward bootstrap of approximate USD swap rates
for that date; the hazard curve is piecewise flat with one node per bond,
solved sequentially so each bond's par LIBOR spread matches the quoted
P-spread (4, 66, 79 bp).  Only the curve files are written; bond terms and
prices live in ``kft_bonds.json``.
"""

from __future__ import annotations

import json
from dataclasses import replace
from pathlib import Path

from scipy.optimize import brentq

from survbond.bond import Bond
from survbond.curves import DiscountCurve, HazardCurve
from survbond.pricer import PricingInputs, price_exact, riskless_price

DATA = Path(__file__).resolve().parents[1] / "src" / "survbond" / "data"

# approximate USD swap par rates (semiannual), 30 June 2004
SWAPS = [
    (0.25, 0.0161), (1, 0.0243), (2, 0.0313), (3, 0.0360), (4, 0.0395), (5, 0.0423),
    (7, 0.0466), (10, 0.0508), (15, 0.0545), (20, 0.0562), (30, 0.0570),
]
BONDS = [
    Bond(0.04625, 2, 2.34, 0.4, 0.0, id="KFT 4.625 11/01/2006", issuer="KFT"),
    Bond(0.0625, 2, 7.92, 0.4, 0.0, id="KFT 6.25 6/01/2012", issuer="KFT"),
    Bond(0.065, 2, 27.35, 0.4, 0.0, id="KFT 6.50 11/01/2031", issuer="KFT"),
]
PRICES_PER100 = [102.90, 104.90, 100.44]
P_SPREADS_BP = [4.0, 66.0, 79.0]


def bootstrap_libor() -> DiscountCurve:
    nodes: list[tuple[float, float]] = []
    for T, rate in SWAPS:
        f = 4 if T < 1 else 2
        swap = Bond(rate, f, T)

        def gap(x: float) -> float:
            return riskless_price(swap, DiscountCurve(nodes + [(T, x)])) - 1.0

        nodes.append((T, brentq(gap, -0.1, 0.5, xtol=1e-14)))
    return DiscountCurve(nodes)


def par_coupon(bond: Bond, discount, hazard) -> float:
    def gap(c: float) -> float:
        return price_exact(PricingInputs(replace(bond, coupon=c), discount, hazard)) - 1.0

    return brentq(gap, 0.0, 1.0, xtol=1e-14)


def bootstrap_hazard(discount: DiscountCurve) -> HazardCurve:
    riskless = HazardCurve.flat(0.0)
    nodes: list[tuple[float, float]] = []
    for bond, target in zip(BONDS, P_SPREADS_BP):
        base = par_coupon(bond, discount, riskless)

        def gap(h: float) -> float:
            curve = HazardCurve(nodes + [(bond.maturity, h)])
            return (par_coupon(bond, discount, curve) - base) * 1e4 - target

        nodes.append((bond.maturity, brentq(gap, 0.0, 1.0, xtol=1e-14)))
    return HazardCurve(nodes)


def main() -> None:
    libor = bootstrap_libor()
    hazard = bootstrap_hazard(libor)
    DATA.mkdir(parents=True, exist_ok=True)
    (DATA / "kft_discount.json").write_text(json.dumps(libor.to_dict(), indent=2) + "\n")
    (DATA / "kft_hazard.json").write_text(json.dumps(hazard.to_dict(), indent=2) + "\n")
    print(libor)
    print(hazard)


if __name__ == "__main__":
    main()
