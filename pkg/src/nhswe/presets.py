"""Named scenario presets bundling bed parameters with run defaults.

Each preset returns a fresh RunConfig; callers may override any field
before running.  The benchmark presets use the time step and mesh width
quoted for the corresponding laboratory comparison.
"""

from __future__ import annotations

import numpy as np

from .stepper import RunConfig

G = 9.81


def hammack(case: str) -> RunConfig:
    zeta0 = 0.005 if case == "up" else -0.005
    return RunConfig(
        scenario=f"hammack-{case}",
        x_l=0.0, x_r=31.6, n=1264,
        dt=0.001, t_end=40.0,
        bc_left="wall", bc_right="sponge",
        gauges=(0.61, 1.61, 9.61, 20.61),
        gauge_stride=10, runlog_stride=200,
        bed_params={"h0": 0.05, "b": 0.61, "zeta0": zeta0, "case": case,
                    "ramp_width": 0.05},
    )


def whittaker(run_id: int) -> RunConfig:
    table = {
        6: (0.163, 0.109, 2.109, 2.218),
        12: (0.327, 0.218, 2.218, 2.436),
        18: (0.491, 0.327, 2.327, 2.654),
    }
    u_t, t1, t2, t3 = table[run_id]
    t_snap = 8.0 / np.sqrt(G / 0.5)
    return RunConfig(
        scenario=f"whittaker-{run_id}",
        x_l=-7.33, x_r=7.33, n=196,
        dt=0.005, t_end=2.0,
        bc_left="wall", bc_right="wall",
        snapshot_times=(round(t_snap, 3),),
        runlog_stride=20,
        bed_params={"h0": 0.175, "hs": 0.026, "ls": 0.5, "a0": 1.5,
                    "u_t": u_t, "t1": t1, "t2": t2, "t3": t3},
    )


def lynett() -> RunConfig:
    return RunConfig(
        scenario="lynett",
        x_l=-2.0, x_r=40.0, n=420,
        dt=0.005, t_end=6.0,
        bc_left="wall", bc_right="sponge",
        snapshot_times=(1.51, 3.00, 4.51, 5.86),
        runlog_stride=20,
        bed_params={"theta_deg": 6.0, "dh": 0.05, "b": 1.0,
                    "s0": 4.712, "t0": 3.713, "x0": 2.379},
    )


def lake_at_rest() -> RunConfig:
    cfg = lynett()
    cfg.scenario = "lake-at-rest"
    cfg.bed_params["family"] = "lynett"
    cfg.freeze_bed = True
    cfg.t_end = 1.0
    cfg.bc_right = "wall"
    cfg.sponge_frac = 0.0
    cfg.snapshot_times = (1.0,)
    return cfg


def standing_wave() -> RunConfig:
    return RunConfig(
        scenario="standing-wave",
        x_l=0.0, x_r=2.0 * np.pi, n=64,
        dt=0.002, t_end=4.0,
        bc_left="wall", bc_right="wall",
        gauges=(0.0,),
        runlog_stride=100,
        init_kind="standing-wave",
        bed_params={"h0": 1.0},
        init_params={"amplitude": 1e-3, "kh": 0.5},
    )


def solitary_sanity() -> RunConfig:
    return RunConfig(
        scenario="solitary-sanity",
        x_l=0.0, x_r=40.0, n=400,
        dt=0.005, t_end=4.0,
        bc_left="wall", bc_right="wall",
        gauges=(30.0,),
        runlog_stride=50,
        init_kind="hump",
        bed_params={"h0": 1.0},
        init_params={"amplitude": 0.1, "center": 10.0},
    )


PRESETS = {
    "hammack-up": lambda: hammack("up"),
    "hammack-down": lambda: hammack("down"),
    "whittaker-6": lambda: whittaker(6),
    "whittaker-12": lambda: whittaker(12),
    "whittaker-18": lambda: whittaker(18),
    "lynett": lynett,
    "lake-at-rest": lake_at_rest,
    "standing-wave": standing_wave,
    "solitary-sanity": solitary_sanity,
}


def get_preset(name: str) -> RunConfig:
    try:
        return PRESETS[name]()
    except KeyError:
        known = ", ".join(sorted(PRESETS))
        raise KeyError(f"unknown scenario {name!r}; choose from: {known}") \
            from None
