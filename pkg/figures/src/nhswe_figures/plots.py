"""Figure builders: gauge grids, snapshot stacks, closure overlays.

All functions take RunData objects and return a matplotlib Figure; the
save helper makes SVG output byte-stable so regenerated figures can be
compared with a plain diff.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .io import FigureDataError, RunData, read_external, resample  # noqa: E402

COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
          "#8c564b")
EXTERNAL_STYLE = dict(color="black", linestyle="none", marker="o",
                      markersize=2.5, label="reference")


def save_figure(fig, path) -> None:
    """Write the figure deterministically (fixed hashsalt, no date)."""
    with matplotlib.rc_context({"svg.hashsalt": "nhswe-figures"}):
        fig.savefig(path, metadata={"Date": None}
                    if str(path).endswith(".svg") else None)
    plt.close(fig)


def _style(i):
    return dict(color=COLORS[i % len(COLORS)],
                linestyle=["-", "--", "-.", ":"][i % 4], linewidth=1.2)


def plot_gauges(runs: list[RunData], gauge_indices=None,
                external=None, title=None):
    """One panel per gauge, one curve per run (time series of eta)."""
    tables = [(run, run.gauges()) for run in runs]
    n_gauges = tables[0][1].n_gauges
    for run, tab in tables:
        if tab.n_gauges != n_gauges:
            raise FigureDataError(
                f"{run.path}: gauge count {tab.n_gauges} differs from "
                f"{n_gauges}")
    if gauge_indices is None:
        gauge_indices = list(range(n_gauges))
    if not gauge_indices:
        raise FigureDataError("no gauges selected")
    for g in gauge_indices:
        if not 0 <= g < n_gauges:
            raise FigureDataError(f"gauge index {g} out of range "
                                  f"(run has {n_gauges})")
    nrows = len(gauge_indices)
    fig, axes = plt.subplots(nrows, 1, figsize=(7.0, 1.9 * nrows),
                             sharex=True, squeeze=False)
    for row, g in enumerate(gauge_indices):
        ax = axes[row, 0]
        for i, (run, tab) in enumerate(tables):
            ax.plot(tab.t, tab.eta[g], label=run.label, **_style(i))
        if external is not None:
            xr, yr = read_external(external)
            ax.plot(xr, yr, **EXTERNAL_STYLE)
        pos = tables[0][1].positions
        tag = f"x = {pos[g]:g} m" if g < len(pos) else f"gauge {g + 1}"
        ax.set_ylabel("eta [m]")
        ax.annotate(tag, xy=(0.985, 0.92), xycoords="axes fraction",
                    ha="right", va="top", fontsize=9)
        ax.grid(True, alpha=0.3)
    axes[-1, 0].set_xlabel("t [s]")
    axes[0, 0].legend(loc="upper left", fontsize=8, ncol=2)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    return fig


def plot_snapshots(runs: list[RunData], times, column="eta",
                   show_bed=True, external=None, title=None):
    """Stacked panels, one per requested time, one curve per run."""
    times = list(times)
    if not times:
        raise FigureDataError("empty snapshot time list")
    fig, axes = plt.subplots(len(times), 1,
                             figsize=(7.0, 2.0 * len(times)),
                             sharex=True, squeeze=False)
    for row, ts in enumerate(times):
        ax = axes[row, 0]
        for i, run in enumerate(runs):
            snap = run.snapshot(ts)
            if column not in snap:
                raise FigureDataError(
                    f"{run.path}: snapshot at t={ts} has no column "
                    f"{column!r}")
            ax.plot(snap["x"], snap[column], label=run.label, **_style(i))
        if show_bed and "d" in runs[0].snapshot(ts):
            snap0 = runs[0].snapshot(ts)
            ax.plot(snap0["x"], -snap0["d"], color="0.45", linewidth=0.9,
                    label="bed" if row == 0 else None)
        if external is not None:
            xr, yr = read_external(external)
            ax.plot(xr, yr, **EXTERNAL_STYLE)
        ax.set_ylabel(f"{column} [m]")
        ax.annotate(f"t = {ts:g} s", xy=(0.985, 0.92),
                    xycoords="axes fraction", ha="right", va="top",
                    fontsize=9)
        ax.grid(True, alpha=0.3)
    axes[-1, 0].set_xlabel("x [m]")
    axes[0, 0].legend(loc="upper left", fontsize=8, ncol=2)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    return fig


def plot_closure_overlay(runs: list[RunData], time, column="eta",
                         external=None, title=None):
    """All closures at one snapshot time in a single panel, plus the
    pointwise spread between the first run and each of the others."""
    fig, (ax, axd) = plt.subplots(
        2, 1, figsize=(7.0, 5.0), sharex=True,
        gridspec_kw={"height_ratios": [2.2, 1.0]})
    base = runs[0].snapshot(time)
    if column not in base:
        raise FigureDataError(
            f"{runs[0].path}: snapshot at t={time} has no column "
            f"{column!r}")
    for i, run in enumerate(runs):
        snap = run.snapshot(time)
        ax.plot(snap["x"], snap[column], label=run.label, **_style(i))
        if i > 0:
            diff = resample(snap["x"], snap[column], base["x"]) \
                - base[column]
            axd.plot(base["x"], diff,
                     label=f"{run.label} - {runs[0].label}", **_style(i))
    if external is not None:
        xr, yr = read_external(external)
        ax.plot(xr, yr, **EXTERNAL_STYLE)
    ax.set_ylabel(f"{column} [m]")
    ax.annotate(f"t = {time:g} s", xy=(0.985, 0.92),
                xycoords="axes fraction", ha="right", va="top", fontsize=9)
    ax.grid(True, alpha=0.3)
    ax.legend(loc="upper left", fontsize=8, ncol=2)
    axd.set_ylabel("difference [m]")
    axd.set_xlabel("x [m]")
    axd.grid(True, alpha=0.3)
    if len(runs) > 1:
        axd.legend(loc="upper left", fontsize=8)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    return fig


def max_overlay_difference(runs: list[RunData], time,
                           column="eta") -> float:
    """Max pointwise difference between the first run and all others at
    one snapshot time (identical runs must give exactly zero)."""
    base = runs[0].snapshot(time)
    worst = 0.0
    for run in runs[1:]:
        snap = run.snapshot(time)
        y = resample(snap["x"], snap[column], base["x"])
        worst = max(worst, float(np.abs(y - base[column]).max()))
    return worst
