"""Render experiment-result CSV files into the standard figure shapes.

The input contract is the harness CSV schema
(mechanism,n,n1,epsilon,m_max,p,rho,trials,seed,mse,are,var_closed,
are_p10,are_p50,are_p90,ri); figures never recompute statistics from raw
data, with one documented exception: the r-curve reduces each input file's
two MSE-vs-ratio curves to the width of the contiguous ratio interval around
0.5 where the correlated mechanism is worse, since that width is not a CSV
column.

Rendering is deterministic: a fixed style, no timestamps, and stripped
image metadata make identical inputs produce identical bytes.
"""

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

HEADER = (
    "mechanism,n,n1,epsilon,m_max,p,rho,trials,seed,"
    "mse,are,var_closed,are_p10,are_p50,are_p90,ri"
).split(",")

KINDS = (
    "mse-vs-epsilon",
    "are-vs-epsilon",
    "mse-vs-n",
    "are-vs-n",
    "mse-vs-m",
    "mse-vs-ratio",
    "are-percentiles",
    "ri-curve",
    "r-curve",
)

# x column and y column per simple line-plot kind
_XY = {
    "mse-vs-epsilon": ("epsilon", "mse"),
    "are-vs-epsilon": ("epsilon", "are"),
    "mse-vs-n": ("n", "mse"),
    "are-vs-n": ("n", "are"),
    "mse-vs-m": ("m_max", "mse"),
    "mse-vs-ratio": ("ratio", "mse"),
}

_STYLE = {
    "figure.figsize": (6.0, 4.0),
    "figure.dpi": 100,
    "savefig.dpi": 150,
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.6,
    "lines.markersize": 5,
}


class PlotError(ValueError):
    """Input CSV cannot be rendered."""


class SchemaError(PlotError):
    """A required column is missing or unparseable."""


@dataclass(frozen=True)
class FigureSpec:
    """What to draw: a kind, the input CSVs, the output path, axis scales."""

    kind: str
    inputs: tuple[str, ...]
    out: str
    log_x: bool = False
    log_y: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PlotError(f"unknown figure kind {self.kind!r}; choose from {KINDS}")
        if not self.inputs:
            raise PlotError("at least one input CSV is required")


def read_rows(path) -> list[dict]:
    """Parse one harness CSV; numeric fields become floats, blanks None."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in HEADER if c not in (reader.fieldnames or [])]
        if missing:
            raise SchemaError(f"{path}: missing column(s) {', '.join(missing)}")
        rows = []
        for raw in reader:
            row = {"mechanism": raw["mechanism"]}
            for col in HEADER[1:]:
                cell = (raw[col] or "").strip()
                row[col] = float(cell) if cell else None
            rows.append(row)
    if not rows:
        raise PlotError(f"{path}: no data rows")
    return rows


def _series_key(row) -> tuple[str, float]:
    return row["mechanism"], round(row["n1"] / row["n"], 4)


def _series_label(key) -> str:
    mechanism, ratio = key
    return f"{mechanism}, n1/n={ratio:g}"


def _require(row, col, path):
    if row[col] is None:
        raise SchemaError(f"{path}: empty value in required column {col}")
    return row[col]


def _group_series(rows, path, x_col, y_col):
    series = {}
    for row in rows:
        if row[y_col] is None:
            continue
        x = row["n1"] / row["n"] if x_col == "ratio" else _require(row, x_col, path)
        series.setdefault(_series_key(row), []).append((x, row[y_col]))
    if not series:
        raise PlotError(f"{path}: no rows carry a value for {y_col}")
    return {k: sorted(v) for k, v in sorted(series.items())}


def _underperforming_width(ratios, mse_jrr, mse_rr) -> float:
    """Width of the contiguous run around ratio 0.5 where jrr MSE exceeds rr
    MSE; each grid point counts one grid step. Mirrors the harness-side
    definition so both packages report the same number."""
    order = np.argsort(ratios)
    ratios = np.asarray(ratios)[order]
    worse = np.asarray(mse_jrr)[order] > np.asarray(mse_rr)[order]
    center = int(np.argmin(np.abs(ratios - 0.5)))
    if not worse[center]:
        return 0.0
    lo = center
    while lo > 0 and worse[lo - 1]:
        lo -= 1
    hi = center
    while hi < len(ratios) - 1 and worse[hi + 1]:
        hi += 1
    step = float(np.median(np.diff(ratios)))
    return float(ratios[hi] - ratios[lo]) + step


def _draw_line_kind(ax, spec):
    x_col, y_col = _XY[spec.kind]
    for path in spec.inputs:
        rows = read_rows(path)
        for key, points in _group_series(rows, path, x_col, y_col).items():
            xs, ys = zip(*points)
            ax.plot(xs, ys, marker="o", label=_series_label(key))
    ax.set_xlabel("n1/n" if x_col == "ratio" else x_col)
    ax.set_ylabel(y_col.upper())


def _draw_are_percentiles(ax, spec):
    percentiles = (10, 50, 90)
    for path in spec.inputs:
        rows = read_rows(path)
        plotted = False
        for row in rows:
            decile_cols = ("are_p10", "are_p50", "are_p90")
            if any(row[c] is None for c in decile_cols):
                continue
            ys = [row[c] for c in decile_cols]
            ax.plot(percentiles, ys, marker="o", label=_series_label(_series_key(row)))
            plotted = True
        if not plotted:
            raise PlotError(f"{path}: no rows carry ARE percentiles")
    ax.set_xlabel("percentile")
    ax.set_ylabel("ARE")
    ax.set_xticks(percentiles)


def _draw_ri_curve(ax, spec):
    for path in spec.inputs:
        rows = [r for r in read_rows(path) if r["ri"] is not None]
        if not rows:
            raise PlotError(f"{path}: no rows carry a relative-increase value")
        # the x axis is whichever experiment parameter the sweep varied
        for x_col in ("epsilon", "n", "m_max"):
            if len({r[x_col] for r in rows}) > 1:
                break
        else:
            x_col = "epsilon"
        for key, points in _group_series(rows, path, x_col, "ri").items():
            xs, ys = zip(*points)
            ax.plot(xs, ys, marker="o", label=_series_label(key))
        ax.set_xlabel(x_col)
    ax.axhline(1e-4, color="black", linestyle="--", linewidth=1.0, label="1e-4")
    ax.set_ylabel("RI")


def _draw_r_curve(ax, spec):
    points = []
    for path in spec.inputs:
        rows = read_rows(path)
        ns = {r["n"] for r in rows}
        if len(ns) != 1:
            raise PlotError(f"{path}: an r-curve input must be a single-n ratio sweep")
        n = ns.pop()
        by_mech = {"rr": {}, "jrr": {}}
        for row in rows:
            if row["mse"] is not None:
                by_mech[row["mechanism"]][row["n1"] / row["n"]] = row["mse"]
        common = sorted(set(by_mech["rr"]) & set(by_mech["jrr"]))
        if len(common) < 3:
            raise PlotError(f"{path}: need both mechanisms on a shared ratio grid")
        width = _underperforming_width(
            common,
            [by_mech["jrr"][r] for r in common],
            [by_mech["rr"][r] for r in common],
        )
        points.append((n, width))
    points.sort()
    xs, ys = zip(*points)
    ax.plot(xs, ys, marker="o", label="measured R")
    ref = np.linspace(min(xs), max(xs), 200)
    ax.plot(ref, 1 / np.sqrt(ref), linestyle="--", color="black",
            linewidth=1.0, label="1/sqrt(n)")
    ax.set_xlabel("n")
    ax.set_ylabel("R")


def render(spec: FigureSpec) -> Path:
    """Render one figure; returns the written path.

    Raises before creating the file when an input is empty or does not match
    the CSV schema.
    """
    out = Path(spec.out)
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        try:
            if spec.kind in _XY:
                _draw_line_kind(ax, spec)
            elif spec.kind == "are-percentiles":
                _draw_are_percentiles(ax, spec)
            elif spec.kind == "ri-curve":
                _draw_ri_curve(ax, spec)
            else:
                _draw_r_curve(ax, spec)
            if spec.log_x:
                ax.set_xscale("log")
            if spec.log_y:
                ax.set_yscale("log")
            ax.legend(loc="best", fontsize=8)
            ax.set_title(spec.kind)
            fig.tight_layout()
            # strip the writer's software tag so output bytes depend only on
            # the data and the style
            fig.savefig(out, metadata={"Software": None})
        finally:
            plt.close(fig)
    return out
