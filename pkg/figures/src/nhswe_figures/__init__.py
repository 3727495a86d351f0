"""Figure scripts for nhswe run-directory CSV outputs."""

from .io import (FigureDataError, GaugeTable, RunData, load_runs,
                 read_external, resample)
from .plots import (max_overlay_difference, plot_closure_overlay,
                    plot_gauges, plot_snapshots, save_figure)

__all__ = [
    "FigureDataError", "GaugeTable", "RunData", "load_runs",
    "read_external", "resample", "max_overlay_difference",
    "plot_closure_overlay", "plot_gauges", "plot_snapshots",
    "save_figure",
]

__version__ = "0.1.0"
