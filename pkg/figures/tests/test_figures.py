import os
import subprocess
import sys

import numpy as np
import pytest

from nhswe_figures import (FigureDataError, load_runs,
                           max_overlay_difference, plot_closure_overlay,
                           plot_gauges, plot_snapshots, read_external,
                           resample, save_figure)
from nhswe_figures.cli import main


def fmt(values):
    return ",".join(f"{v:.17g}" for v in values)


def write_run(path, gauges=(0.61, 1.61, 9.61, 20.61),
              times=(1.51, 3.0, 4.51, 5.86), n_x=40, shift=0.0):
    """Write a synthetic run directory in the solver's CSV layout."""
    os.makedirs(os.path.join(path, "snapshots"), exist_ok=True)
    with open(os.path.join(path, "config.txt"), "w") as fh:
        fh.write("scenario = synthetic\n")
        fh.write(f"gauges = {fmt(gauges)}\n")
        fh.write(f"snapshot_times = {fmt(times)}\n")
    t = np.linspace(0.0, 10.0, 101)
    with open(os.path.join(path, "gauges.csv"), "w") as fh:
        head = ",".join(["t"] + [f"eta_g{i + 1}"
                                 for i in range(len(gauges))])
        fh.write(head + "\n")
        for ti in t:
            eta = [1e-3 * np.sin(ti - xg / 0.7 + shift) for xg in gauges]
            fh.write(fmt([ti] + eta) + "\n")
    x = np.linspace(0.0, 30.0, n_x)
    for ts in times:
        fname = os.path.join(path, "snapshots", f"t_{ts:.6f}.csv")
        with open(fname, "w") as fh:
            fh.write("x,h,hu,hw,p,d,eta\n")
            for xi in x:
                d = 0.05
                eta = 1e-3 * np.exp(-(xi - 0.7 * ts) ** 2) + shift
                fh.write(fmt([xi, d + eta, 0.0, 0.0, 0.0, d, eta]) + "\n")
    return path


@pytest.fixture()
def run_dir(tmp_path):
    return write_run(str(tmp_path / "run-a"))


def test_gauge_grid_byte_stable_svg(run_dir, tmp_path):
    runs = load_runs([run_dir], ["quad-full"])
    outs = []
    for name in ("a.svg", "b.svg"):
        fig = plot_gauges(runs)
        out = str(tmp_path / name)
        save_figure(fig, out)
        outs.append(out)
    data = [open(p, "rb").read() for p in outs]
    assert data[0].startswith(b"<?xml")
    assert data[0] == data[1]
    # four gauges -> four panels: count the axes groups
    assert data[0].count(b'id="axes_') == 4


def test_gauge_grid_two_run_overlay(run_dir, tmp_path):
    other = write_run(str(tmp_path / "run-b"), shift=0.3)
    runs = load_runs([run_dir, other], ["quad-full", "hydrostatic"])
    fig = plot_gauges(runs, gauge_indices=[0, 3])
    out = str(tmp_path / "two.svg")
    save_figure(fig, out)
    assert os.path.getsize(out) > 0


def test_gauge_index_out_of_range(run_dir):
    runs = load_runs([run_dir])
    with pytest.raises(FigureDataError):
        plot_gauges(runs, gauge_indices=[7])
    with pytest.raises(FigureDataError):
        plot_gauges(runs, gauge_indices=[])


def test_snapshot_stack_four_times(run_dir, tmp_path):
    runs = load_runs([run_dir])
    assert runs[0].snapshot_times() == [1.51, 3.0, 4.51, 5.86]
    fig = plot_snapshots(runs, runs[0].snapshot_times())
    out = str(tmp_path / "stack.svg")
    save_figure(fig, out)
    content = open(out, "rb").read()
    assert content.count(b'id="axes_') == 4


def test_snapshot_empty_time_list_errors(run_dir):
    runs = load_runs([run_dir])
    with pytest.raises(FigureDataError):
        plot_snapshots(runs, [])


def test_identical_runs_overlay_zero_difference(run_dir, tmp_path):
    # the same directory listed twice must coincide exactly
    runs = load_runs([run_dir, run_dir], ["a", "b"])
    assert max_overlay_difference(runs, 5.86) == 0.0
    fig = plot_closure_overlay(runs, 5.86)
    save_figure(fig, str(tmp_path / "overlay.svg"))


def test_distinct_runs_nonzero_difference(run_dir, tmp_path):
    other = write_run(str(tmp_path / "run-c"), shift=1e-4)
    runs = load_runs([run_dir, other])
    assert max_overlay_difference(runs, 3.0) == pytest.approx(1e-4)


def test_external_curve_roundtrip(tmp_path):
    path = tmp_path / "ref.csv"
    path.write_text("t,eta\n0.0,1.0\n1.0,3.0\n2.0,2.0\n")
    x, y = read_external(str(path))
    assert x.tolist() == [0.0, 1.0, 2.0]
    # linear resampling hits the endpoints exactly
    grid = np.array([0.0, 0.25, 1.5, 2.0])
    out = resample(x, y, grid)
    assert out[0] == 1.0 and out[-1] == 2.0
    assert out[1] == pytest.approx(1.5)
    assert out[2] == pytest.approx(2.5)


def test_external_malformed_raises(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("t,eta\n0.0,1.0\nnot,a number\n")
    with pytest.raises(FigureDataError):
        read_external(str(bad))
    short = tmp_path / "short.csv"
    short.write_text("x,y\n1.0\n2.0,3.0\n")
    with pytest.raises(FigureDataError):
        read_external(str(short))
    with pytest.raises(FigureDataError):
        read_external(str(tmp_path / "missing.csv"))


def test_malformed_gauge_table(tmp_path):
    run = write_run(str(tmp_path / "run-m"))
    with open(os.path.join(run, "gauges.csv"), "a") as fh:
        fh.write("1.0,2.0\n")         # wrong field count
    with pytest.raises(FigureDataError):
        load_runs([run])[0].gauges()


def test_cli_gauge_grid(run_dir, tmp_path):
    out = str(tmp_path / "fig" / "grid.svg")
    rc = main(["gauge-grid", "--run", run_dir, "--labels", "sim",
               "--out", out])
    assert rc == 0 and os.path.exists(out)


def test_cli_snapshot_stack_and_overlay(run_dir, tmp_path):
    out1 = str(tmp_path / "s.svg")
    assert main(["snapshot-stack", "--run", run_dir, "--times", "1.51",
                 "3.0", "--out", out1]) == 0
    out2 = str(tmp_path / "o.svg")
    assert main(["closure-overlay", "--run", run_dir, run_dir,
                 "--time", "5.86", "--out", out2]) == 0


def test_cli_reports_data_errors(run_dir, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\nx,y\n")
    with pytest.raises(SystemExit):
        main(["gauge-grid", "--run", run_dir, "--external", str(bad),
              "--out", str(tmp_path / "x.svg")])
    with pytest.raises(SystemExit):
        main(["snapshot-stack", "--run", str(tmp_path / "nope"),
              "--times", "1.0", "--out", str(tmp_path / "y.svg")])


def test_real_solver_run_integration(tmp_path):
    """Render a grid from an actual solver run directory (CSV contract)."""
    pytest.importorskip("nhswe")
    out = tmp_path / "solver-out"
    cmd = [sys.executable, "-m", "nhswe.cli", "run", "--scenario",
           "standing-wave", "--tend", "0.2", "--out", str(out)]
    subprocess.run(cmd, check=True)
    rundir = str(out / "standing-wave-quad-full")
    fig_out = str(tmp_path / "real.svg")
    assert main(["gauge-grid", "--run", rundir, "--out", fig_out]) == 0
    assert os.path.getsize(fig_out) > 0
