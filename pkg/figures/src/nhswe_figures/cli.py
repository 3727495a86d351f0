"""Command line entry: render figures from solver run directories.

    nhswe-figures gauge-grid --run out/a out/b --labels full hydro
    nhswe-figures snapshot-stack --run out/lynett --times 1.51 3.00
    nhswe-figures closure-overlay --run out/full out/simple --time 5.86
"""

from __future__ import annotations

import argparse
import os
import sys

from .io import FigureDataError, load_runs
from .plots import (plot_closure_overlay, plot_gauges, plot_snapshots,
                    save_figure)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nhswe-figures",
        description="Render figures from nhswe CSV run directories.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--run", nargs="+", required=True,
                       help="run directories (each with config.txt etc.)")
        p.add_argument("--labels", nargs="+", default=None,
                       help="series labels, one per run directory")
        p.add_argument("--out", default=None,
                       help="output image path (default: derived, .svg)")
        p.add_argument("--external", default=None,
                       help="optional 2-column CSV reference curve")
        p.add_argument("--title", default=None)

    p = sub.add_parser("gauge-grid",
                       help="one panel per gauge, one curve per run")
    common(p)
    p.add_argument("--gauges", nargs="*", type=int, default=None,
                   help="gauge indices (0-based; default: all)")

    p = sub.add_parser("snapshot-stack",
                       help="stacked panels at several snapshot times")
    common(p)
    p.add_argument("--times", nargs="+", type=float, required=True)
    p.add_argument("--column", default="eta")
    p.add_argument("--no-bed", action="store_true",
                   help="do not draw the bed profile")

    p = sub.add_parser("closure-overlay",
                       help="all runs at one time, with differences")
    common(p)
    p.add_argument("--time", type=float, required=True)
    p.add_argument("--column", default="eta")
    return parser


def _outpath(args, stem: str) -> str:
    if args.out:
        return args.out
    return stem + ".svg"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        runs = load_runs(args.run, args.labels)
        if args.command == "gauge-grid":
            fig = plot_gauges(runs, args.gauges, external=args.external,
                              title=args.title)
            out = _outpath(args, "gauges")
        elif args.command == "snapshot-stack":
            fig = plot_snapshots(runs, args.times, column=args.column,
                                 show_bed=not args.no_bed,
                                 external=args.external, title=args.title)
            out = _outpath(args, "snapshots")
        else:
            fig = plot_closure_overlay(runs, args.time,
                                       column=args.column,
                                       external=args.external,
                                       title=args.title)
            out = _outpath(args, f"overlay_t{args.time:g}")
        outdir = os.path.dirname(out)
        if outdir:
            os.makedirs(outdir, exist_ok=True)
        save_figure(fig, out)
        print(out)
    except FigureDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        raise SystemExit(2)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
