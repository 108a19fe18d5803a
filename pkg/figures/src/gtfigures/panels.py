"""Render the curve and benchmark panels from the twostagegt CSV files.

Rendering is a pure function of the input CSV: the plotted data points
are exactly the parsed columns, with no recomputation.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

PanelKind = Literal["aspect_ratio", "rate", "rate_zoom", "table1_bars"]

PANEL_KINDS: tuple[PanelKind, ...] = (
    "aspect_ratio",
    "rate",
    "rate_zoom",
    "table1_bars",
)

SCHEME_COLUMNS = ("individual", "dorfman", "bernoulli", "ctpi", "doubly_constant")
BOUND_COLUMNS = ("counting", "lower_bound")

CURVE_COLUMNS: dict[str, tuple[str, ...]] = {
    "aspect_ratio": SCHEME_COLUMNS + BOUND_COLUMNS,
    "rate": SCHEME_COLUMNS + BOUND_COLUMNS,
    "rate_zoom": ("doubly_constant", "lower_bound"),
}

SUMMARY_COLUMNS = ("scheme", "mean", "decile10", "decile90")

LABELS = {
    "individual": "individual testing",
    "dorfman": "Dorfman",
    "bernoulli": "Bernoulli",
    "ctpi": "constant tests-per-item",
    "doubly_constant": "doubly constant",
    "counting": "counting bound",
    "lower_bound": "lower bound",
}


@dataclass(frozen=True)
class PanelSpec:
    kind: PanelKind
    source: Path
    output: Path


def load_series(path: Path, columns: tuple[str, ...]) -> tuple[list[float], dict[str, list[float]]]:
    """Parse a curve CSV into (p grid, column -> values)."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = {"p", *columns} - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        ps: list[float] = []
        series: dict[str, list[float]] = {c: [] for c in columns}
        for row in reader:
            ps.append(float(row["p"]))
            for c in columns:
                series[c].append(float(row[c]))
    return ps, series


def load_summary(path: Path) -> list[dict[str, str]]:
    """Parse a simulation summary CSV (one row per scheme)."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = set(SUMMARY_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        return list(reader)


def build_panel(spec: PanelSpec) -> plt.Figure:
    """Build the figure for ``spec`` without writing it."""
    if spec.kind == "table1_bars":
        return _build_bars(spec)
    if spec.kind not in CURVE_COLUMNS:
        raise ValueError(f"unknown panel kind {spec.kind!r}")
    return _build_curves(spec)


def _build_curves(spec: PanelSpec) -> plt.Figure:
    columns = CURVE_COLUMNS[spec.kind]
    ps, series = load_series(spec.source, columns)
    fig, ax = plt.subplots(figsize=(8, 4.5))
    for name in columns:
        style = "--" if name in BOUND_COLUMNS else "-"
        ax.plot(ps, series[name], style, label=LABELS[name], linewidth=1.4)
    if spec.kind == "aspect_ratio":
        ax.set_ylabel("expected tests per item")
    else:
        # lower bounds on tests become upper bounds on the rate
        ax.set_xscale("log")
        ax.set_ylabel("rate (bits per test)")
    ax.set_xlabel("prevalence")
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return fig


def _build_bars(spec: PanelSpec) -> plt.Figure:
    rows = load_summary(spec.source)
    schemes = [r["scheme"] for r in rows]
    means = [float(r["mean"]) for r in rows]
    lo = [m - float(r["decile10"]) for m, r in zip(means, rows)]
    hi = [float(r["decile90"]) - m for m, r in zip(means, rows)]
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.bar(
        range(len(schemes)),
        means,
        yerr=[lo, hi],
        capsize=5,
        color="tab:blue",
        alpha=0.8,
    )
    ax.set_xticks(range(len(schemes)))
    ax.set_xticklabels([LABELS.get(s, s) for s in schemes], rotation=20, ha="right")
    ax.set_ylabel("total tests (mean, 10-90% deciles)")
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    return fig


def render_panel(spec: PanelSpec) -> list[Path]:
    """Render ``spec`` and write both PNG and SVG next to ``spec.output``."""
    fig = build_panel(spec)
    stem = spec.output.with_suffix("")
    stem.parent.mkdir(parents=True, exist_ok=True)
    written = []
    try:
        for suffix in (".png", ".svg"):
            target = stem.with_suffix(suffix)
            fig.savefig(target)
            written.append(target)
    finally:
        plt.close(fig)
    return written
