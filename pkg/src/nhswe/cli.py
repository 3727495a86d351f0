"""Command-line front end: run scenarios, convergence and closure studies."""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .closure import CLOSURES
from .dgmesh import Mesh1D, write_csv
from .presets import PRESETS, get_preset
from .stepper import RunConfig, Simulation, make_bed, write_outputs


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    flat = cfg.to_flat()
    if args.closure:
        flat["closure"] = args.closure
    if args.dt is not None:
        flat["dt"] = repr(args.dt)
    if args.dx is not None:
        n = int(round((cfg.x_r - cfg.x_l) / args.dx))
        flat["n"] = str(n)
    if args.tend is not None:
        flat["t_end"] = repr(args.tend)
    for item in args.set or []:
        key, sep, val = item.partition("=")
        if not sep:
            raise SystemExit(f"--set expects key=value, got {item!r}")
        if key not in flat and not key.startswith(("bed.", "init.")):
            known = ", ".join(sorted(flat))
            raise SystemExit(f"unknown config key {key!r}; valid keys: "
                             f"{known} (plus bed.* / init.*)")
        flat[key] = val
    try:
        return RunConfig.from_flat(flat)
    except (KeyError, ValueError) as exc:
        raise SystemExit(f"invalid configuration: {exc}")


def _outdir(args, default_name: str) -> str:
    root = args.out or os.environ.get("NHSWE_OUT", "out")
    return os.path.join(root, default_name)


def _load_config(args) -> RunConfig:
    try:
        cfg = get_preset(args.scenario)
    except KeyError as exc:
        raise SystemExit(str(exc))
    return _apply_overrides(cfg, args)


def cmd_run(args) -> str:
    cfg = _load_config(args)
    result = Simulation(cfg).run()
    outdir = _outdir(args, f"{cfg.scenario}-{cfg.closure}")
    write_outputs(result, outdir)
    print(f"wrote {outdir} (steps={result.state and len(result.runlog)} "
          f"logged, t_end={cfg.t_end:g})")
    return outdir


def _restrict(means: np.ndarray, factor: int) -> np.ndarray:
    return means.reshape(-1, factor).mean(axis=1)


def cmd_converge(args) -> str:
    cfg = _load_config(args)
    levels = args.levels
    runs = []
    for lev in range(levels):
        flat = cfg.to_flat()
        flat["n"] = str(cfg.n * 2 ** lev)
        flat["dt"] = repr(cfg.dt / 2 ** lev)
        flat["gauges"] = ""
        flat["snapshot_times"] = ""
        sub = RunConfig.from_flat(flat)
        sim = Simulation(sub)
        res = sim.run()
        runs.append((sub, res.state.h.coef[:, 0].copy()))
        print(f"level {lev}: n={sub.n} dt={sub.dt:g} done")
    errs = []
    for lev in range(levels - 1):
        coarse = runs[lev][1]
        fine = _restrict(runs[lev + 1][1], 2)
        dx = (cfg.x_r - cfg.x_l) / runs[lev][0].n
        errs.append(float(np.sqrt(np.sum((fine - coarse) ** 2) * dx)))
    orders = [np.log2(errs[i] / errs[i + 1]) for i in range(len(errs) - 1)]
    outdir = _outdir(args, f"converge-{cfg.scenario}-{cfg.closure}")
    os.makedirs(outdir, exist_ok=True)
    ns = [runs[i][0].n for i in range(levels - 1)]
    write_csv(os.path.join(outdir, "orders.csv"),
              ["n", "err_h", "order"],
              [np.asarray(ns, dtype=float),
               np.asarray(errs),
               np.asarray([np.nan] + orders)])
    for n, e in zip(ns, errs):
        print(f"n={n:6d}  err_h={e:.6e}")
    for o in orders:
        print(f"observed order: {o:.3f}")
    return outdir


def cmd_compare_closures(args) -> str:
    cfg = _load_config(args)
    closures = args.closures or ["hydrostatic", "quad-full"]
    for c in closures:
        if c not in CLOSURES:
            raise SystemExit(f"unknown closure {c!r}; choose from "
                             f"{CLOSURES}")
    outdir = _outdir(args, f"compare-{cfg.scenario}")
    os.makedirs(outdir, exist_ok=True)
    snaps = {}
    for c in closures:
        flat = cfg.to_flat()
        flat["closure"] = c
        sub = RunConfig.from_flat(flat)
        res = Simulation(sub).run()
        write_outputs(res, os.path.join(outdir, c))
        snaps[c] = res.snapshots
        print(f"closure {c}: done")
    for ts in cfg.snapshot_times:
        cols = [snaps[closures[0]][ts]["x"]]
        names = ["x"]
        for c in closures:
            names.append(f"eta_{c}")
            cols.append(snaps[c][ts]["eta"])
        write_csv(os.path.join(outdir, f"compare_t_{ts:.6f}.csv"),
                  names, cols)
    return outdir


def cmd_bed_dump(args) -> str:
    cfg = _load_config(args)
    bed = make_bed(cfg)
    mesh = Mesh1D(cfg.x_l, cfg.x_r, cfg.n)
    x = mesh.interfaces()
    times = [float(v) for v in (args.times or "0").split(",")]
    outdir = _outdir(args, f"bed-{cfg.scenario}")
    os.makedirs(outdir, exist_ok=True)
    for t in times:
        s = bed.sample(x, t)
        write_csv(os.path.join(outdir, f"bed_t_{t:.6f}.csv"),
                  ["x", "d", "d_x", "d_t"], [x, s.d, s.d_x, s.d_t])
    print(f"wrote {outdir}")
    return outdir


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="nhswe",
        description="1D non-hydrostatic shallow-water solver with moving "
                    "bottom")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--scenario", required=True,
                       help=f"one of: {', '.join(sorted(PRESETS))}")
        p.add_argument("--closure", default=None, choices=CLOSURES)
        p.add_argument("--dx", type=float, default=None)
        p.add_argument("--dt", type=float, default=None)
        p.add_argument("--tend", type=float, default=None)
        p.add_argument("--out", default=None,
                       help="output root (default $NHSWE_OUT or ./out)")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override any config key")

    p = sub.add_parser("run", help="run one scenario")
    common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("converge", help="self-convergence study")
    common(p)
    p.add_argument("--levels", type=int, default=3)
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("compare-closures",
                       help="run several closures on one scenario")
    common(p)
    p.add_argument("--closures", nargs="+", default=None)
    p.set_defaults(func=cmd_compare_closures)

    p = sub.add_parser("bed-dump", help="write bed geometry tables")
    common(p)
    p.add_argument("--times", default="0",
                   help="comma-separated sample times")
    p.set_defaults(func=cmd_bed_dump)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    args.func(args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
