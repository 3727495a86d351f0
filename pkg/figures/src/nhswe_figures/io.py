"""Readers for the solver's run-directory CSV contract.

A run directory contains config.txt (flat key = value), gauges.csv
(t,eta_g1,...), runlog.csv and snapshots/t_<time>.csv with columns
x,h,hu,hw,p,d,eta.  Everything here is a read-only consumer of those
files; no physics is recomputed.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field

import numpy as np


class FigureDataError(ValueError):
    """Raised for missing or malformed input files."""


def _read_table(path) -> tuple[list[str], np.ndarray]:
    """Read a headed CSV into (column names, float matrix)."""
    if not os.path.exists(path):
        raise FigureDataError(f"missing input file {path}")
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r and any(c.strip() for c in r)]
    if len(rows) < 2:
        raise FigureDataError(f"{path}: need a header and at least one row")
    header = [c.strip() for c in rows[0]]
    ncol = len(header)
    data = np.empty((len(rows) - 1, ncol))
    for i, row in enumerate(rows[1:]):
        if len(row) != ncol:
            raise FigureDataError(
                f"{path}: row {i + 2} has {len(row)} fields, "
                f"expected {ncol}")
        try:
            data[i] = [float(c) for c in row]
        except ValueError as exc:
            raise FigureDataError(f"{path}: row {i + 2}: {exc}") from None
    return header, data


@dataclass
class GaugeTable:
    t: np.ndarray
    eta: np.ndarray          # shape (n_gauges, n_times)
    positions: tuple         # gauge x locations from config, may be ()

    @property
    def n_gauges(self) -> int:
        return self.eta.shape[0]


@dataclass
class RunData:
    """One solver run directory."""

    path: str
    label: str
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        cfg_path = os.path.join(self.path, "config.txt")
        if os.path.exists(cfg_path):
            with open(cfg_path) as fh:
                for line in fh:
                    line = line.strip()
                    if not line or line.startswith("#"):
                        continue
                    key, _, val = line.partition("=")
                    self.config[key.strip()] = val.strip()

    def gauges(self) -> GaugeTable:
        header, data = _read_table(os.path.join(self.path, "gauges.csv"))
        if header[0] != "t":
            raise FigureDataError(
                f"{self.path}/gauges.csv: first column must be t")
        positions = tuple(
            float(v) for v in self.config.get("gauges", "").split(",")
            if v.strip())
        return GaugeTable(data[:, 0], data[:, 1:].T, positions)

    def snapshot_times(self) -> list[float]:
        sdir = os.path.join(self.path, "snapshots")
        if not os.path.isdir(sdir):
            return []
        times = []
        for name in os.listdir(sdir):
            if name.startswith("t_") and name.endswith(".csv"):
                times.append(float(name[2:-4]))
        return sorted(times)

    def snapshot(self, time: float) -> dict:
        path = os.path.join(self.path, "snapshots", f"t_{time:.6f}.csv")
        header, data = _read_table(path)
        return {name: data[:, i] for i, name in enumerate(header)}


def load_runs(paths, labels=None) -> list[RunData]:
    if labels is not None and len(labels) != len(paths):
        raise FigureDataError("need one label per run directory")
    runs = []
    for i, p in enumerate(paths):
        label = labels[i] if labels else \
            os.path.basename(os.path.normpath(p))
        runs.append(RunData(str(p), label))
    return runs


def read_external(path) -> tuple[np.ndarray, np.ndarray]:
    """Read a digitized reference curve: two numeric columns (x, y).

    A one-line header is allowed and skipped; anything else that fails
    to parse raises FigureDataError.
    """
    if not os.path.exists(path):
        raise FigureDataError(f"missing external curve {path}")
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh)
                if r and any(c.strip() for c in r)]
    if not rows:
        raise FigureDataError(f"{path}: empty external curve")
    start = 0
    try:
        [float(c) for c in rows[0][:2]]
    except ValueError:
        start = 1                      # header line
    xs, ys = [], []
    for i, row in enumerate(rows[start:]):
        if len(row) < 2:
            raise FigureDataError(
                f"{path}: row {start + i + 1} has fewer than 2 columns")
        try:
            xs.append(float(row[0]))
            ys.append(float(row[1]))
        except ValueError as exc:
            raise FigureDataError(
                f"{path}: row {start + i + 1}: {exc}") from None
    if len(xs) < 2:
        raise FigureDataError(f"{path}: need at least 2 data points")
    x = np.asarray(xs)
    if np.any(np.diff(x) <= 0):
        order = np.argsort(x, kind="stable")
        x = x[order]
        ys = np.asarray(ys)[order]
    return x, np.asarray(ys)


def resample(x_ref: np.ndarray, y_ref: np.ndarray,
             x_new: np.ndarray) -> np.ndarray:
    """Linear interpolation of a reference curve onto a plot grid."""
    return np.interp(x_new, x_ref, y_ref)
