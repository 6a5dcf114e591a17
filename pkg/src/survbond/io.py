"""File schemas: curves, bonds, hedge problems, and tabular output."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Sequence

from .bond import Bond
from .curves import DiscountCurve, HazardCurve, PiecewiseFlatCurve
from .exceptions import DomainError, SurvbondError

__all__ = [
    "InputError",
    "BondRecord",
    "load_curve",
    "parse_curve",
    "load_bonds",
    "parse_bond",
    "bond_to_dict",
    "load_hedge_problem",
    "HedgeSpec",
    "data_path",
    "format_rows",
]

PER100 = 100.0
BP = 1e4


class InputError(SurvbondError, ValueError):
    """A file could not be read or failed schema validation."""

    def __init__(self, source: str | Path, message: str):
        super().__init__(f"{source}: {message}")
        self.source = str(source)


def data_path(name: str) -> Path:
    """Path of a fixture shipped with the package."""
    return Path(str(resources.files("survbond") / "data" / name))


def _read_json(path: str | Path) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(path, f"cannot read file ({exc.strerror})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(path, f"malformed JSON at line {exc.lineno} col {exc.colno}: {exc.msg}") from None


def _number(source, obj: dict, key: str, where: str, required: bool = True) -> float | None:
    if key not in obj or obj[key] is None or obj[key] == "":
        if required:
            raise InputError(source, f"{where}: missing field '{key}'")
        return None
    try:
        value = float(obj[key])
    except (TypeError, ValueError):
        raise InputError(source, f"{where}: field '{key}' is not a number ({obj[key]!r})") from None
    if not math.isfinite(value):
        raise InputError(source, f"{where}: field '{key}' is not finite")
    return value


def parse_curve(data: Any, source: str = "<curve>", kind: str | None = None) -> PiecewiseFlatCurve:
    if not isinstance(data, dict):
        raise InputError(source, "curve must be a JSON object")
    found = data.get("kind")
    if found not in ("discount", "hazard"):
        raise InputError(source, f"field 'kind' must be 'discount' or 'hazard', got {found!r}")
    if kind is not None and found != kind:
        raise InputError(source, f"field 'kind' is {found!r}, expected {kind!r}")
    nodes = data.get("nodes")
    if not isinstance(nodes, list) or not nodes:
        raise InputError(source, "field 'nodes' must be a non-empty list")
    pairs = []
    for i, node in enumerate(nodes):
        if not isinstance(node, dict):
            raise InputError(source, f"nodes[{i}] must be an object")
        pairs.append(
            (_number(source, node, "t", f"nodes[{i}]"), _number(source, node, "rate", f"nodes[{i}]"))
        )
    cls = DiscountCurve if found == "discount" else HazardCurve
    try:
        return cls(pairs)
    except DomainError as exc:
        raise InputError(source, f"field 'nodes': {exc}") from None


def load_curve(path: str | Path, kind: str | None = None) -> PiecewiseFlatCurve:
    return parse_curve(_read_json(path), str(path), kind)


@dataclass(frozen=True)
class BondRecord:
    """A bond row with its optional market quote (per unit face) and OASF."""

    bond: Bond
    price: float | None = None
    oasf: float | None = None


def parse_bond(obj: dict, source: str = "<bond>", where: str = "bond") -> BondRecord:
    if not isinstance(obj, dict):
        raise InputError(source, f"{where} must be an object")
    freq = _number(source, obj, "frequency", where)
    if freq != int(freq):
        raise InputError(source, f"{where}: field 'frequency' must be an integer")
    try:
        bond = Bond(
            coupon=_number(source, obj, "coupon", where),
            frequency=int(freq),
            maturity=_number(source, obj, "maturity_years", where),
            recovery_principal=_number(source, obj, "recovery_principal", where),
            recovery_coupon=_number(source, obj, "recovery_coupon", where),
            id=str(obj.get("id", "")),
            issuer=obj.get("issuer") or None,
        )
    except DomainError as exc:
        raise InputError(source, f"{where}: {exc}") from None
    price = _number(source, obj, "clean_price_per100", where, required=False)
    oasf = _number(source, obj, "oasf_bp", where, required=False)
    if price is not None and price <= 0.0:
        raise InputError(source, f"{where}: field 'clean_price_per100' must be positive")
    return BondRecord(
        bond,
        None if price is None else price / PER100,
        None if oasf is None else oasf / BP,
    )


def bond_to_dict(record: BondRecord) -> dict:
    b = record.bond
    out = {
        "id": b.id,
        "coupon": b.coupon,
        "frequency": b.frequency,
        "maturity_years": b.maturity,
        "recovery_principal": b.recovery_principal,
        "recovery_coupon": b.recovery_coupon,
    }
    if b.issuer:
        out["issuer"] = b.issuer
    if record.price is not None:
        out["clean_price_per100"] = record.price * PER100
    if record.oasf is not None:
        out["oasf_bp"] = record.oasf * BP
    return out


def load_bonds(path: str | Path) -> list[BondRecord]:
    """Read bonds from a JSON list (or ``{"bonds": [...]}``) or a CSV file."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        try:
            text = path.read_text()
        except OSError as exc:
            raise InputError(path, f"cannot read file ({exc.strerror})") from None
        rows = list(csv.DictReader(io.StringIO(text)))
        if not rows:
            raise InputError(path, "no bond rows")
        return [parse_bond(row, str(path), f"row {i + 2}") for i, row in enumerate(rows)]
    data = _read_json(path)
    if isinstance(data, dict) and "bonds" in data:
        data = data["bonds"]
    if isinstance(data, dict):
        data = [data]
    if not isinstance(data, list) or not data:
        raise InputError(path, "expected a non-empty list of bonds")
    return [parse_bond(obj, str(path), f"bonds[{i}]") for i, obj in enumerate(data)]


@dataclass(frozen=True)
class HedgeSpec:
    """Hedge problem as read from file."""

    bond_ids: tuple[str, ...]
    risks: tuple[str, ...]
    accuracy: tuple[float, ...]
    sensitivities: dict[str, tuple[float, ...]] | None = None
    prices: tuple[float, ...] | None = None
    mod_durations: tuple[float, ...] | None = None
    long: str | None = None


def load_hedge_problem(path: str | Path) -> HedgeSpec:
    """Read a hedge problem file.

    Schema::

        {"bonds": [ids], "risks": ["d_r", ...], "accuracy": [0.1, ...],
         "sensitivities": {"d_r": [per bond], ...},        # optional
         "clean_price_per100": [per bond],                 # optional
         "mod_duration": [per bond],                       # optional
         "long": "<bond id>"}                              # optional

    Without ``sensitivities`` the risks are computed from bond and curve
    files given on the command line.
    """
    src = str(path)
    data = _read_json(path)
    if not isinstance(data, dict):
        raise InputError(src, "hedge problem must be a JSON object")
    ids = data.get("bonds")
    if not isinstance(ids, list) or not ids:
        raise InputError(src, "field 'bonds' must be a non-empty list of ids")
    ids = tuple(str(x) for x in ids)
    risks = data.get("risks", [])
    if not isinstance(risks, list):
        raise InputError(src, "field 'risks' must be a list")
    acc = data.get("accuracy")
    if acc is None:
        from .portfolio import DEFAULT_ACCURACY

        try:
            acc = [DEFAULT_ACCURACY[r] for r in risks]
        except KeyError as exc:
            raise InputError(src, f"field 'accuracy' missing and no default for {exc}") from None
    if not isinstance(acc, list) or len(acc) != len(risks):
        raise InputError(src, "field 'accuracy' must list one value per risk")
    sens = data.get("sensitivities")
    if sens is not None:
        if not isinstance(sens, dict):
            raise InputError(src, "field 'sensitivities' must be an object keyed by risk")
        for r in risks:
            row = sens.get(r)
            if not isinstance(row, list) or len(row) != len(ids):
                raise InputError(src, f"field 'sensitivities.{r}' must list one value per bond")
        sens = {r: tuple(float(x) for x in sens[r]) for r in risks}

    def optional_row(key: str) -> tuple[float, ...] | None:
        row = data.get(key)
        if row is None:
            return None
        if not isinstance(row, list) or len(row) != len(ids):
            raise InputError(src, f"field '{key}' must list one value per bond")
        return tuple(float(x) for x in row)

    prices = optional_row("clean_price_per100")
    return HedgeSpec(
        bond_ids=ids,
        risks=tuple(str(r) for r in risks),
        accuracy=tuple(float(a) for a in acc),
        sensitivities=sens,
        prices=None if prices is None else tuple(p / PER100 for p in prices),
        mod_durations=optional_row("mod_duration"),
        long=data.get("long"),
    )


def _fmt(value: Any, precision: int) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return f"{value:.{precision}f}"
    return str(value)


def format_rows(
    rows: Sequence[dict],
    fmt: str,
    columns: Sequence[str] | None = None,
    precision: int = 6,
) -> str:
    """Render dict rows as ``json``, ``csv`` or an aligned ``table``."""
    if columns is None:
        columns = list(rows[0].keys()) if rows else []
    if fmt == "json":
        clean = [
            {c: (None if isinstance(r.get(c), float) and math.isnan(r[c]) else r.get(c)) for c in columns}
            for r in rows
        ]
        return json.dumps(clean, indent=2) + "\n"
    cells = [[_fmt(r.get(c, ""), precision) for c in columns] for r in rows]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(cells)
        return buf.getvalue()
    if fmt == "table":
        widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(columns)]
        lines = ["  ".join(c.rjust(w) for c, w in zip(columns, widths))]
        lines.append("  ".join("-" * w for w in widths))
        lines += ["  ".join(x.rjust(w) for x, w in zip(row, widths)) for row in cells]
        return "\n".join(lines) + "\n"
    raise DomainError(f"unknown output format {fmt!r}")
