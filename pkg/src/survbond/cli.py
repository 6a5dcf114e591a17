"""Batch command-line front end.

Exit codes: 0 success, 2 input or parse error, 3 numerical failure
(calibration bracket, degenerate hedge solve).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from pathlib import Path
from typing import Sequence

import numpy as np

from .bond import Bond
from .curves import DiscountCurve, HazardCurve
from .exceptions import CalibrationError, DegenerateTradeError, DomainError
from .io import BP, PER100, BondRecord, InputError, format_rows, load_bonds, load_curve, load_hedge_problem
from .portfolio import (
    DEFAULT_ACCURACY,
    HedgeProblem,
    solve_hedge,
    solve_spread_based_barbell,
    treasury_factors,
)
from .pricer import (
    PricingInputs,
    bcds,
    calibrate_flat_hazard,
    calibrate_oasf,
    conventional_spread_approx,
    conventional_spread_exact,
    price_continuous,
    price_exact,
    price_naive_continuous,
    yield_and_modified_duration,
    z_spread,
)
from .risk import RiskReport, risk_report

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3

RATE_FIELDS = {"bcds", "z_spread", "oasf", "yield_"}
PRICE_FIELDS = {"price", "price_continuous"}


class NumericalFailure(Exception):
    """Output was produced but a numerical problem must be signalled."""

    def __init__(self, message: str, text: str):
        super().__init__(message)
        self.text = text


def _price_scale(args) -> float:
    return 1.0 if getattr(args, "per_unit", False) else PER100


def _curves(args) -> tuple[DiscountCurve, HazardCurve | None]:
    if not args.discount:
        raise InputError("<command line>", "--discount is required")
    discount = load_curve(args.discount, "discount")
    hazard = load_curve(args.hazard, "hazard") if getattr(args, "hazard", None) else None
    return discount, hazard


def _need_hazard(hazard, args) -> HazardCurve:
    if hazard is None:
        raise InputError("<command line>", "--hazard is required")
    return hazard


def _resolve_oasf(rec: BondRecord, discount, hazard, override_bp) -> tuple[float, str]:
    if override_bp is not None:
        return override_bp / BP, "override"
    if rec.oasf is not None:
        return rec.oasf, "given"
    if rec.price is not None:
        return calibrate_oasf(rec.bond, discount, hazard, rec.price), "calibrated"
    return 0.0, "default"


def cmd_price(args) -> list[dict]:
    discount, hazard = _curves(args)
    hazard = _need_hazard(hazard, args)
    scale = _price_scale(args)
    rows = []
    for rec in load_bonds(args.bonds):
        oasf, source = _resolve_oasf(rec, discount, hazard, args.oasf_bp)
        inputs = PricingInputs(rec.bond, discount, hazard, oasf)
        exact = price_exact(inputs)
        cont = price_continuous(inputs)
        naive = price_naive_continuous(inputs)
        rows.append(
            {
                "id": rec.bond.id,
                "oasf_bp": oasf * BP,
                "oasf_source": source,
                "market_price": math.nan if rec.price is None else rec.price * scale,
                "price_exact": exact * scale,
                "price_continuous": cont * scale,
                "price_naive": naive * scale,
                "continuous_minus_exact": (cont - exact) * scale,
                "naive_minus_exact": (naive - exact) * scale,
            }
        )
    return rows


def report_row(report: RiskReport, scale: float) -> dict:
    """Boundary conversion of a report: prices per ``scale``, rates in bp."""
    record = report.as_record()
    row = {"id": record.pop("id")}
    for name, value in record.items():
        if name in PRICE_FIELDS:
            value = value * scale
        elif name in RATE_FIELDS:
            value = value * BP
        row[name] = value
    return row


def _reports(args) -> list[tuple[BondRecord, RiskReport]]:
    discount, hazard = _curves(args)
    hazard = _need_hazard(hazard, args)
    out = []
    for rec in load_bonds(args.bonds):
        oasf, _ = _resolve_oasf(rec, discount, hazard, getattr(args, "oasf_bp", None))
        out.append((rec, risk_report(PricingInputs(rec.bond, discount, hazard, oasf))))
    return out


def cmd_risk(args) -> list[dict]:
    scale = _price_scale(args)
    return [report_row(rep, scale) for _, rep in _reports(args)]


def cmd_implied(args) -> list[dict]:
    discount, hazard = _curves(args)
    scale = _price_scale(args)
    rows = []
    for rec in load_bonds(args.bonds):
        if rec.price is None:
            raise InputError(args.bonds, f"bond {rec.bond.id!r}: field 'clean_price_per100' required")
        bond, price = rec.bond, rec.price
        h = calibrate_flat_hazard(bond, discount, price)
        y, mod_d = yield_and_modified_duration(bond, price)
        row = {
            "id": bond.id,
            "market_price": price * scale,
            "flat_hazard": h,
            "bcds_flat_bp": bcds(discount, HazardCurve.flat(h), bond.maturity, bond.recovery_principal) * BP,
            "z_spread_bp": z_spread(bond, discount, price) * BP,
            "yield_bp": y * BP,
            "mod_duration": mod_d,
        }
        if hazard is not None:
            row["oasf_bp"] = calibrate_oasf(bond, discount, hazard, price) * BP
        rows.append(row)
    return rows


def parse_grid(text: str, name: str) -> list[float]:
    """``a,b,c`` list or ``start:stop:step`` inclusive range."""
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            return _inclusive_range(start, stop, step, name)
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError("<command line>", f"{name}: cannot parse grid {text!r}") from None
    if not values:
        raise InputError("<command line>", f"{name}: empty grid")
    return values


def _inclusive_range(start: float, stop: float, step: float, name: str) -> list[float]:
    if not step > 0.0 or stop < start:
        raise InputError("<command line>", f"{name}: empty grid ({start}:{stop}:{step})")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(n)]


def cmd_bias(args) -> list[dict]:
    r_grid = parse_grid(args.r_grid, "--r-grid")
    h_grid = parse_grid(args.h_grid, "--h-grid")
    C, T, R = args.coupon, args.maturity, args.recovery
    rows = []
    for h in h_grid:
        block = []
        for r in r_grid:
            try:
                exact = conventional_spread_exact(C, r, h, R, T)
                status = "ok"
            except CalibrationError:
                exact, status = math.nan, "no-root"
            approx = conventional_spread_approx(C, r, h, R, T)
            block.append(
                {
                    "r": r,
                    "h": h,
                    "s_exact_bp": exact * BP,
                    "s_approx_bp": approx * BP,
                    "gap_bp": (approx - exact) * BP,
                    "credit_triangle_bp": h * (1.0 - R) * BP,
                    "status": status,
                }
            )
        for i, row in enumerate(block):
            j, k = (i, i + 1) if i + 1 < len(block) else (i - 1, i)
            if j < 0:
                row["ds_dr_sign"] = 0
                continue
            ds = block[k]["s_exact_bp"] - block[j]["s_exact_bp"]
            # sub-1e-9 bp moves are root-solver noise
            row["ds_dr_sign"] = 0 if math.isnan(ds) or abs(ds) < 1e-9 else int(np.sign(ds))
        rows.extend(block)
    if args.figure:
        from .report import plot_bias

        plot_bias(rows, args.figure)
    return rows


def _hedge_inputs(args):
    """Sensitivity rows, ids, prices and mod durations for the hedge command."""
    if args.problem:
        hspec = load_hedge_problem(args.problem)
        risks = list(hspec.risks)
        accuracy = list(hspec.accuracy)
        if args.risks:
            risks = [r.strip() for r in args.risks.split(",") if r.strip()]
        if args.accuracy:
            accuracy = [float(x) for x in args.accuracy.split(",")]
        if hspec.sensitivities is not None:
            missing = [r for r in risks if r not in hspec.sensitivities]
            if missing:
                raise InputError(args.problem, f"no sensitivities for {missing}")
            sens = np.array([hspec.sensitivities[r] for r in risks]).reshape(len(risks), len(hspec.bond_ids))
            return risks, accuracy, sens, list(hspec.bond_ids), hspec.prices, hspec.mod_durations, hspec.long
        reports = {rep.id: (rec, rep) for rec, rep in _reports(args)}
        try:
            picked = [reports[i] for i in hspec.bond_ids]
        except KeyError as exc:
            raise InputError(args.problem, f"bond id {exc} not found in {args.bonds}") from None
        long = hspec.long
    else:
        if not args.bonds:
            raise InputError("<command line>", "hedge needs --problem or --bonds with curves")
        picked = _reports(args)
        risks = [r.strip() for r in (args.risks or "d_r,d_h,vod").split(",") if r.strip()]
        if args.accuracy:
            accuracy = [float(x) for x in args.accuracy.split(",")]
        else:
            accuracy = [DEFAULT_ACCURACY.get(r, 1.0) for r in risks]
        long = None
    fields = set(RiskReport.record_fields())
    bad = [r for r in risks if r not in fields]
    if bad:
        raise InputError("<command line>", f"unknown risk keys {bad}; choose from RiskReport fields")
    sens = np.array([[getattr(rep, r) for _, rep in picked] for r in risks]).reshape(len(risks), len(picked))
    ids = [rep.id for _, rep in picked]
    prices = tuple(rep.price for _, rep in picked)
    mods = tuple(rep.mod_duration for _, rep in picked)
    return risks, accuracy, sens, ids, prices, mods, long


def hedge_table(
    ids, risks, sens, solution, prices=None, mods=None, barbell=None, scale=PER100
) -> list[dict]:
    """Rows laid out like a barbell trade sheet: bonds, cash, then totals."""
    rows = []
    for i, bond_id in enumerate(ids):
        row = {"description": bond_id, "price": math.nan if prices is None else prices[i] * scale}
        for k, r in enumerate(risks):
            row[r] = float(sens[k, i])
        row["portfolio_mv_pct"] = 100.0 * solution.weights[i]
        if barbell is not None:
            row["mod_duration"] = mods[i]
            row["spread_based_mv_pct"] = 100.0 * barbell[i]
        rows.append(row)
    cash = {"description": "Cash", "price": scale}
    cash.update({r: 0.0 for r in risks})
    cash["portfolio_mv_pct"] = 100.0 * solution.cash
    total = {"description": "Total: Portfolio", "price": math.nan}
    total.update({r: float(v) for r, v in zip(risks, solution.residuals)})
    total["portfolio_mv_pct"] = 100.0 * (float(np.sum(solution.weights)) + solution.cash)
    if barbell is not None:
        cash.update(mod_duration=0.0, spread_based_mv_pct=0.0)
        total.update(
            mod_duration=float(np.dot(barbell, mods)),
            spread_based_mv_pct=100.0 * float(np.sum(barbell)),
        )
    return rows + [cash, total]


def cmd_hedge(args) -> tuple[list[dict], dict]:
    risks, accuracy, sens, ids, prices, mods, long = _hedge_inputs(args)
    if len(accuracy) != len(risks):
        raise InputError("<command line>", f"{len(risks)} risks but {len(accuracy)} accuracies")
    long = args.long or long
    long_index = None
    if long is not None:
        if long not in ids:
            raise InputError("<command line>", f"--long {long!r} is not one of the bond ids")
        long_index = ids.index(long)
    problem = HedgeProblem(sens, accuracy, prices, tuple(risks), tuple(ids))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        solution = solve_hedge(problem, long_index=long_index)
    barbell = None
    if args.spread_based:
        if mods is None or len(ids) != 3:
            raise InputError("<command line>", "--spread-based needs three bonds with modified durations")
        body = long_index if long_index is not None else 1
        barbell = solve_spread_based_barbell(mods, body)
    rows = hedge_table(ids, risks, sens, solution, prices, mods, barbell, _price_scale(args))
    payload = {"survival_based": solution.to_dict(), "accuracy": list(accuracy)}
    if barbell is not None:
        payload["spread_based"] = {
            "bond_ids": list(ids),
            "weights": [float(x) for x in barbell],
            "cash": 0.0,
            "mod_duration": [float(x) for x in mods],
        }
    if args.figure:
        from .report import plot_hedge

        plot_hedge(ids, solution.weights, solution.cash, args.figure, comparison=barbell)
    return rows, payload


def scan_rows(bond: Bond, discount: DiscountCurve, hazards: Sequence[float], scale: float = PER100) -> list[dict]:
    rows = []
    for h in hazards:
        rep = risk_report(PricingInputs(bond, discount, HazardCurve.flat(h)))
        rows.append(
            {
                "hazard": h,
                "bcds_bp": rep.bcds * BP,
                "price": rep.price * scale,
                "d_r": rep.d_r,
                "d_h": rep.d_h,
                "d_recovery": rep.d_recovery,
                "rpv01": rep.rpv01,
                "vod": rep.vod,
            }
        )
    return rows


def cmd_scan(args) -> list[dict]:
    if args.bonds:
        bond = load_bonds(args.bonds)[0].bond
    else:
        bond = Bond(args.coupon, args.frequency, args.maturity, args.recovery, args.recovery_coupon, id="scan")
    discount = load_curve(args.discount, "discount") if args.discount else DiscountCurve.flat(args.rate)
    hazards = _inclusive_range(args.h_min, args.h_max, args.h_step, "hazard grid")
    rows = scan_rows(bond, discount, hazards, _price_scale(args))
    if args.figure:
        from .report import plot_scan

        plot_scan(rows if _price_scale(args) == PER100 else [dict(r, price=r["price"] * PER100) for r in rows], args.figure)
    return rows


def cmd_factors(args) -> list[dict]:
    if args.dy is None or len(args.dy) != 5:
        n = 0 if args.dy is None else len(args.dy)
        raise InputError("<command line>", f"--dy needs five values (2/5/10/20/30y), got {n}")
    shift, twist = treasury_factors(args.dy)
    return [{"shift_bp": shift, "twist_bp": twist}]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="survbond", description="Survival-based credit bond analytics")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, curves=True):
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--format", choices=("json", "csv", "table"), default="table")
        p.add_argument("--per-unit", action="store_true", help="prices per unit face instead of per 100")
        if curves:
            p.add_argument("--bonds", help="bond file (JSON or CSV)")
            p.add_argument("--discount", help="discount curve JSON")
            p.add_argument("--hazard", help="hazard curve JSON")
            p.add_argument("--oasf-bp", type=float, help="apply this OASF to every bond")

    for name, help_ in (
        ("price", "exact, continuous and naive prices"),
        ("risk", "full risk report per bond"),
        ("implied", "implied OASF, flat hazard, Z-spread and yield from prices"),
    ):
        common(sub.add_parser(name, help=help_))

    p = sub.add_parser("hedge", help="market-neutral long-short trade")
    common(p)
    p.add_argument("--problem", help="hedge problem JSON")
    p.add_argument("--risks", help="comma-separated RiskReport fields, e.g. d_r,d_h,vod")
    p.add_argument("--accuracy", help="comma-separated target accuracies, one per risk")
    p.add_argument("--spread-based", action="store_true", help="also build the modified-duration barbell")
    p.add_argument("--long", help="bond id to hold long (sets the trade direction)")
    p.add_argument("--figure", help="write a weights bar chart to this image file")

    p = sub.add_parser("scan", help="risk measures against a flat hazard grid")
    common(p)
    p.add_argument("--h-min", type=float, default=0.0)
    p.add_argument("--h-max", type=float, default=1.0)
    p.add_argument("--h-step", type=float, default=0.005)
    p.add_argument("--coupon", type=float, default=0.05)
    p.add_argument("--maturity", type=float, default=5.0)
    p.add_argument("--frequency", type=int, default=2)
    p.add_argument("--rate", type=float, default=0.04, help="flat forward rate when --discount is absent")
    p.add_argument("--recovery", type=float, default=0.4)
    p.add_argument("--recovery-coupon", type=float, default=0.0)
    p.add_argument("--figure", help="write the scan chart to this image file")

    p = sub.add_parser("bias", help="conventional spread versus hazard rate")
    common(p, curves=False)
    p.add_argument("--r-grid", default="0:0.08:0.01")
    p.add_argument("--h-grid", default="0,0.01,0.02,0.05")
    p.add_argument("--coupon", type=float, default=0.08)
    p.add_argument("--maturity", type=float, default=5.0)
    p.add_argument("--recovery", type=float, default=0.4)
    p.add_argument("--figure", help="write the bias chart to this image file")

    p = sub.add_parser("factors", help="Treasury shift and twist factors")
    common(p, curves=False)
    p.add_argument("--dy", type=float, nargs="+", action="extend", help="2/5/10/20/30y yield changes in bp")
    return parser


COMMANDS = {
    "price": cmd_price,
    "risk": cmd_risk,
    "implied": cmd_implied,
    "bias": cmd_bias,
    "hedge": cmd_hedge,
    "scan": cmd_scan,
    "factors": cmd_factors,
}


def run(args) -> str:
    result = COMMANDS[args.command](args)
    degenerate = False
    if args.command == "hedge":
        rows, payload = result
        degenerate = payload["survival_based"]["degenerate"]
        if args.format == "json":
            text = json.dumps(payload, indent=2) + "\n"
        else:
            text = format_rows(rows, args.format, precision=4)
            if degenerate:
                text += "# WARNING: " + "; ".join(payload["survival_based"]["notes"]) + "\n"
    else:
        text = format_rows(result, args.format)
    if degenerate:
        raise NumericalFailure("degenerate hedge: " + "; ".join(payload["survival_based"]["notes"]), text)
    return text


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text = run(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalFailure as exc:
        _emit(exc.text, args.out)
        print(f"warning: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (CalibrationError, DegenerateTradeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _emit(text, args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
