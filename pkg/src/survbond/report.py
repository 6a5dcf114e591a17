"""Matplotlib figures written next to the delimited CLI output."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = ["plot_scan", "plot_hedge", "plot_bias"]

_RC = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "figure.dpi": 120,
}


def _save(fig, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_scan(rows: Sequence[dict], path: str | Path) -> Path:
    """Durations (left axis) and price/VOD (right axis) against BCDS.

    The hazard rate is shown on a secondary top axis. Prices are expected
    per 100 face, BCDS in basis points.
    """
    h = np.array([r["hazard"] for r in rows])
    spread = np.array([r["bcds_bp"] for r in rows])
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6.4, 4.0))
        for key, label, style in (
            ("d_r", "Interest rate duration", "-"),
            ("d_h", "Hazard rate duration", "--"),
            ("d_recovery", "Recovery duration", "-."),
            ("rpv01", "RPV01", ":"),
        ):
            ax.plot(spread, [r[key] for r in rows], style, color="k", lw=1.2, label=label)
        ax.set_xlabel("BCDS (bp)")
        ax.set_ylabel("Duration (years)")
        right = ax.twinx()
        right.plot(spread, [r["price"] for r in rows], color="tab:blue", lw=1.2, label="Price")
        right.plot(spread, [100.0 * r["vod"] for r in rows], color="tab:red", lw=1.2, label="VOD (%)")
        right.set_ylabel("Price, VOD (%)")
        if len(rows) > 1 and np.all(np.diff(spread) > 0):
            top = ax.secondary_xaxis(
                "top",
                functions=(
                    lambda s: np.interp(s, spread, h * 100.0),
                    lambda x: np.interp(x, h * 100.0, spread),
                ),
            )
            top.set_xlabel("Hazard rate (%)")
        lines = ax.get_legend_handles_labels()
        more = right.get_legend_handles_labels()
        ax.legend(lines[0] + more[0], lines[1] + more[1], loc="upper right", frameon=False)
        return _save(fig, path)


def plot_hedge(
    bond_ids: Sequence[str],
    weights: Sequence[float],
    cash: float,
    path: str | Path,
    comparison: Sequence[float] | None = None,
    labels: tuple[str, str] = ("Survival-based", "Spread-based"),
) -> Path:
    """Bar chart of trade weights (percent of notional), cash leg last."""
    names = list(bond_ids) + ["Cash"]
    x = np.arange(len(names))
    main = 100.0 * np.append(np.asarray(weights, dtype=float), cash)
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6.4, 3.6))
        width = 0.38 if comparison is not None else 0.6
        offset = width / 2 if comparison is not None else 0.0
        ax.bar(x - offset, main, width, color="0.3", label=labels[0])
        if comparison is not None:
            other = 100.0 * np.append(np.asarray(comparison, dtype=float), 0.0)
            ax.bar(x + offset, other, width, color="0.7", label=labels[1])
            ax.legend(frameon=False)
        ax.axhline(0.0, color="k", lw=0.8)
        ax.set_xticks(x)
        ax.set_xticklabels(names, rotation=15, ha="right")
        ax.set_ylabel("Portfolio MV (%)")
        return _save(fig, path)


def plot_bias(rows: Sequence[dict], path: str | Path) -> Path:
    """Exact and approximate conventional spread against the rate, one line per hazard."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6.4, 4.0))
        hazards = sorted({r["h"] for r in rows})
        cmap = plt.get_cmap("viridis", max(len(hazards), 2))
        for i, h in enumerate(hazards):
            sub = sorted((r for r in rows if r["h"] == h), key=lambda r: r["r"])
            r = [100.0 * s["r"] for s in sub]
            ax.plot(r, [s["s_exact_bp"] for s in sub], "-", color=cmap(i), lw=1.2, label=f"h={h:.2%}")
            ax.plot(r, [s["s_approx_bp"] for s in sub], "--", color=cmap(i), lw=1.0)
        ax.set_xlabel("Interest rate (%)")
        ax.set_ylabel("Conventional spread (bp)")
        ax.set_title("solid: exact root, dashed: first-order approximation", fontsize=8)
        ax.legend(frameon=False, ncol=2)
        return _save(fig, path)
