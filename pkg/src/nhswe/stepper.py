"""Projection time loop: predictor -> elliptic solve -> momentum correction.

Per step the hydrostatic RKDG2 predictor advances (h, hu, hw); the
non-hydrostatic pressure and the corrected hu are then obtained from the
LDG elliptic solve and hw is updated with the bottom-pressure terms.  With
the hydrostatic closure the correction stages are skipped entirely.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from . import bathymetry
from .bathymetry import BedModel, BedSample, FrozenBed
from .closure import PhysParams, closure_beta_gamma, phi as phi_forcing, \
    validate_closure
from .dgmesh import GAUSS2, Field, Mesh1D, write_csv
from .elliptic import EllipticSolution, build_coefficients, solve_correction
from .predictor import H, HU, HW, BoundarySpec, HydroState, Predictor

SQRT3 = np.sqrt(3.0)


@dataclass
class RunConfig:
    scenario: str
    x_l: float
    x_r: float
    n: int
    dt: float
    t_end: float
    closure: str = "quad-full"
    g: float = 9.81
    rho: float = 1000.0
    h_min: float = 1e-6
    cfl_max: float = 0.45
    limiter_threshold: float = 1.0
    tau_p: float = 1.0
    tau_u: float = 1.0
    sponge_frac: float = 0.1
    sponge_sigma0: float = 0.0   # 0 means the 2/dt default
    bc_left: str = "wall"
    bc_right: str = "wall"
    gauges: tuple = ()
    snapshot_times: tuple = ()
    gauge_stride: int = 1
    runlog_stride: int = 50
    check_residual: bool = False
    freeze_bed: bool = False
    init_kind: str = "still"
    bed_params: dict = field(default_factory=dict)
    init_params: dict = field(default_factory=dict)

    def __post_init__(self):
        validate_closure(self.closure)
        if self.dt <= 0 or self.t_end < 0:
            raise ValueError("dt must be positive, t_end non-negative")
        if self.n < 2:
            raise ValueError("need at least 2 elements")
        for xg in self.gauges:
            if not (self.x_l <= xg <= self.x_r):
                raise ValueError(f"gauge {xg} outside domain")

    @property
    def dx(self) -> float:
        return (self.x_r - self.x_l) / self.n

    @property
    def phys(self) -> PhysParams:
        return PhysParams(self.g, self.rho)

    # -- flat key=value round trip ------------------------------------

    def to_flat(self) -> dict:
        out = {}
        for name in ("scenario", "closure", "bc_left", "bc_right",
                     "init_kind"):
            out[name] = getattr(self, name)
        for name in ("x_l", "x_r", "dt", "t_end", "g", "rho", "h_min",
                     "cfl_max", "limiter_threshold", "tau_p", "tau_u",
                     "sponge_frac", "sponge_sigma0"):
            out[name] = f"{getattr(self, name):.17g}"
        for name in ("n", "gauge_stride", "runlog_stride"):
            out[name] = str(getattr(self, name))
        for name in ("check_residual", "freeze_bed"):
            out[name] = str(getattr(self, name)).lower()
        out["gauges"] = ",".join(f"{v:.17g}" for v in self.gauges)
        out["snapshot_times"] = ",".join(f"{v:.17g}"
                                         for v in self.snapshot_times)
        for key, val in sorted(self.bed_params.items()):
            out[f"bed.{key}"] = val if isinstance(val, str) \
                else f"{val:.17g}"
        for key, val in sorted(self.init_params.items()):
            out[f"init.{key}"] = val if isinstance(val, str) \
                else f"{val:.17g}"
        return out

    @classmethod
    def from_flat(cls, flat: dict) -> "RunConfig":
        flat = dict(flat)
        kwargs = {}
        floats = ("x_l", "x_r", "dt", "t_end", "g", "rho", "h_min",
                  "cfl_max", "limiter_threshold", "tau_p", "tau_u",
                  "sponge_frac", "sponge_sigma0")
        ints = ("n", "gauge_stride", "runlog_stride")
        bools = ("check_residual", "freeze_bed")
        strings = ("scenario", "closure", "bc_left", "bc_right", "init_kind")
        bed_params = {}
        init_params = {}
        for key, val in flat.items():
            if key in floats:
                kwargs[key] = float(val)
            elif key in ints:
                kwargs[key] = int(val)
            elif key in bools:
                kwargs[key] = val.strip().lower() in ("1", "true", "yes")
            elif key in strings:
                kwargs[key] = val
            elif key in ("gauges", "snapshot_times"):
                kwargs[key] = tuple(float(v) for v in val.split(",")
                                    if v.strip())
            elif key.startswith("bed."):
                bed_params[key[4:]] = _maybe_float(val)
            elif key.startswith("init."):
                init_params[key[5:]] = _maybe_float(val)
            else:
                raise KeyError(f"unknown config key {key!r}")
        kwargs["bed_params"] = bed_params
        kwargs["init_params"] = init_params
        return cls(**kwargs)

    def save(self, path) -> None:
        with open(path, "w") as fh:
            for key, val in sorted(self.to_flat().items()):
                fh.write(f"{key} = {val}\n")

    @classmethod
    def load(cls, path) -> "RunConfig":
        flat = {}
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                key, _, val = line.partition("=")
                flat[key.strip()] = val.strip()
        return cls.from_flat(flat)


def _maybe_float(v: str):
    try:
        return float(v)
    except ValueError:
        return v


@dataclass
class GaugeSeries:
    x: float
    t: np.ndarray
    eta: np.ndarray


@dataclass
class RunResult:
    config: RunConfig
    gauges: list
    snapshots: dict           # time -> dict of column arrays
    runlog: list              # rows (step, t, mass, max_u, max_p, cfl)
    state: HydroState
    max_corrector_residual: float = 0.0
    max_solver_residual: float = 0.0


def make_bed(config: RunConfig) -> BedModel:
    p = config.bed_params
    s = p.get("family") or config.scenario.split("-")[0]
    if s in ("flat", "standing", "solitary"):
        bed = bathymetry.FlatBed(p["h0"]) if "h0" in p else None
        if bed is None:
            raise KeyError("flat bed needs bed.h0")
    elif s == "hammack":
        alpha = p.get("alpha", 0.0)
        if not alpha:
            alpha = bathymetry.hammack_alpha(p["case"], p["h0"], p["b"],
                                             config.g)
        bed = bathymetry.HammackBed(p["h0"], p["b"], p["zeta0"], alpha,
                                    p.get("ramp_width", 0.05))
    elif s == "whittaker":
        bed = bathymetry.WhittakerBed(p["h0"], p["hs"], p["ls"], p["a0"],
                                      p["u_t"], p["t1"], p["t2"], p["t3"])
    elif s == "lynett":
        bed = bathymetry.LynettBed(p["theta_deg"], p["dh"], p["b"],
                                   p["s0"], p["t0"], p["x0"])
    else:
        raise KeyError(f"unknown scenario {config.scenario!r}")
    bed.x_l = config.x_l
    bed.x_r = config.x_r
    if config.freeze_bed:
        bed = FrozenBed(bed, p.get("freeze_time", 0.0))
    return bed


def initial_state(config: RunConfig, bed: BedModel,
                  mesh: Mesh1D) -> np.ndarray:
    """Initial modal state (3, n, 2) for the configured scenario."""
    q = np.zeros((3, mesh.n, 2))
    ip = config.init_params
    if config.init_kind == "still":
        s = bed.sample(mesh.interfaces(), 0.0)
        hv = np.clip(s.d, 0.0, None)
        q[H, :, 0] = 0.5 * (hv[:-1] + hv[1:])
        q[H, :, 1] = 0.5 * (hv[1:] - hv[:-1])
        if not bed.static:
            nod = q[H, :, :1] + q[H, :, 1:] * GAUSS2.nodes[None, :]
            sq = bed.sample(mesh.quad_points(), 0.0)
            hwq = -np.clip(nod, 0.0, None) * sq.d_t
            q[HW, :, 0] = 0.5 * (hwq[:, 0] + hwq[:, 1])
            q[HW, :, 1] = 0.5 * SQRT3 * (hwq[:, 1] - hwq[:, 0])
    elif config.init_kind == "standing-wave":
        h0 = config.bed_params["h0"]
        a = ip.get("amplitude", 1e-3)
        kh = ip.get("kh", 0.5)
        k = kh / h0
        xq = mesh.quad_points()
        hq = h0 + a * np.cos(k * (xq - mesh.x_l))
        q[H, :, 0] = 0.5 * (hq[:, 0] + hq[:, 1])
        q[H, :, 1] = 0.5 * SQRT3 * (hq[:, 1] - hq[:, 0])
    elif config.init_kind == "hump":
        h0 = config.bed_params["h0"]
        a = ip.get("amplitude", 0.1)
        xc = ip.get("center", 0.5 * (mesh.x_l + mesh.x_r))
        width = np.sqrt(4.0 * h0 ** 3 / (3.0 * max(a, 1e-12)))
        xq = mesh.quad_points()
        eta = a / np.cosh((xq - xc) / width) ** 2
        c = np.sqrt(config.g * (h0 + a))
        hq = h0 + eta
        uq = c * eta / hq
        q[H, :, 0] = 0.5 * (hq[:, 0] + hq[:, 1])
        q[H, :, 1] = 0.5 * SQRT3 * (hq[:, 1] - hq[:, 0])
        huq = hq * uq
        q[HU, :, 0] = 0.5 * (huq[:, 0] + huq[:, 1])
        q[HU, :, 1] = 0.5 * SQRT3 * (huq[:, 1] - huq[:, 0])
    else:
        raise KeyError(f"unknown initial condition {config.init_kind!r}")
    return q


def correct_momentum(q_pred: np.ndarray, sol: EllipticSolution,
                     phi_nodal: np.ndarray, bed_q: BedSample, dt: float,
                     params: PhysParams, kind: str, wet: np.ndarray,
                     dx: float) -> np.ndarray:
    """Apply the implicit momentum correction to the predicted state.

    h is adopted from the predictor; hu is taken from the elliptic
    solution; hw gains dt/rho times the bottom-pressure bracket.
    """
    q = q_pred.copy()
    q[HU] = sol.hu.coef
    pm = sol.p.coef
    p_nodal = pm[:, :1] + pm[:, 1:] * GAUSS2.nodes[None, :]
    p_x = (2.0 * pm[:, 1] / dx)[:, None]
    h_nodal = q_pred[H, :, :1] + q_pred[H, :, 1:] * GAUSS2.nodes[None, :]
    h_x = (2.0 * q_pred[H, :, 1] / dx)[:, None]
    hp_x = h_x * p_nodal + h_nodal * p_x
    beta, gamma = closure_beta_gamma(kind, bed_q.d_x)
    bracket = beta * p_nodal + gamma * hp_x
    if kind == "quad-full":
        bracket = bracket + phi_nodal
    hw_nodal = q_pred[HW, :, :1] + q_pred[HW, :, 1:] * GAUSS2.nodes[None, :]
    hw_new = hw_nodal + dt / params.rho * bracket
    w = wet
    q[HW, w, 0] = 0.5 * (hw_new[w, 0] + hw_new[w, 1])
    q[HW, w, 1] = 0.5 * SQRT3 * (hw_new[w, 1] - hw_new[w, 0])
    return q


class Simulation:
    """Owns the state of one run and advances it step by step."""

    def __init__(self, config: RunConfig, bed: BedModel | None = None):
        self.config = config
        self.mesh = Mesh1D(config.x_l, config.x_r, config.n)
        self.bed = bed if bed is not None else make_bed(config)
        self.boundary = BoundarySpec(config.bc_left, config.bc_right)
        self.phys = config.phys
        self.pred = Predictor(
            self.mesh, self.bed, self.boundary, g=config.g,
            h_min=config.h_min, cfl_max=config.cfl_max,
            limiter_threshold=config.limiter_threshold,
            sponge_frac=config.sponge_frac,
            sponge_sigma0=config.sponge_sigma0 or None)
        self.q = initial_state(config, self.bed, self.mesh)
        self.pred.limit(self.q, 0.0)
        self.t = 0.0
        self.step_index = 0
        self.p = np.zeros((self.mesh.n, 2))
        self.max_corrector_residual = 0.0
        self.max_solver_residual = 0.0
        self.on_coefficients = None   # optional hook(co, step_index)
        self._gauge_t: list[float] = []
        self._gauge_eta: list[list[float]] = [[] for _ in config.gauges]
        self.runlog: list[tuple] = []
        self._quad_x = self.mesh.quad_points()
        self._record_gauges()
        self._log(0.0)

    # -- helpers ------------------------------------------------------

    @property
    def state(self) -> HydroState:
        return HydroState.from_array(self.mesh, self.q, self.t)

    def mass(self) -> float:
        return float(self.q[H, :, 0].sum() * self.mesh.dx)

    def mass_in(self, x_lo: float, x_hi: float) -> float:
        xc = self.mesh.centers()
        sel = (xc >= x_lo) & (xc <= x_hi)
        return float(self.q[H, sel, 0].sum() * self.mesh.dx)

    def _record_gauges(self):
        if not self.config.gauges:
            return
        if self.step_index % self.config.gauge_stride:
            return
        hf = Field(self.mesh, self.q[H])
        self._gauge_t.append(self.t)
        for i, xg in enumerate(self.config.gauges):
            d = float(self.bed.sample(np.array([xg]), self.t).d[0])
            self._gauge_eta[i].append(float(hf(np.array([xg]))[0]) - d)

    def _log(self, cfl: float):
        if self.step_index % self.config.runlog_stride:
            return
        nod = self.q[:, :, :1] + self.q[:, :, 1:] * GAUSS2.nodes[None, None, :]
        hq = np.clip(nod[H], 0.0, None)
        wet = hq > self.config.h_min
        u = np.where(wet, nod[HU] / np.where(wet, hq, 1.0), 0.0)
        pn = self.p[:, :1] + self.p[:, 1:] * GAUSS2.nodes[None, :]
        self.runlog.append((self.step_index, self.t, self.mass(),
                            float(np.abs(u).max()),
                            float(np.abs(pn).max()), cfl))

    # -- stepping -----------------------------------------------------

    def step(self) -> None:
        cfg = self.config
        dt = cfg.dt
        t_new = self.t + dt
        q_pred = self.pred.step(self.q, self.t, dt)

        if cfg.closure == "hydrostatic":
            self.q = q_pred
        else:
            bed_q = self.bed.sample(self._quad_x, t_new)
            h0 = q_pred[H, :, 0]
            h1 = q_pred[H, :, 1]
            # fully wet cells only: the correction is dropped in the thin
            # partially-wet front cells, which stay hydrostatic
            wet = (h0 > cfg.h_min) & (h0 - np.abs(h1) > cfg.h_min)
            h_nodal = q_pred[H, :, :1] + q_pred[H, :, 1:] * GAUSS2.nodes
            hu_nodal = q_pred[HU, :, :1] + q_pred[HU, :, 1:] * GAUSS2.nodes
            hw_nodal = q_pred[HW, :, :1] + q_pred[HW, :, 1:] * GAUSS2.nodes
            h_slope = 2.0 * h1 / self.mesh.dx
            bed_modal = self.pred.bed_modal(t_new)
            eta_x = (h_slope - 2.0 * bed_modal[:, 1] / self.mesh.dx)[:, None]
            eta_x = np.broadcast_to(eta_x, h_nodal.shape)
            phi_nodal = phi_forcing(h_nodal, hu_nodal, eta_x, bed_q,
                                    self.phys, wet[:, None])
            co = build_coefficients(cfg.closure, h_nodal, h_slope, hu_nodal,
                                    hw_nodal, bed_q, phi_nodal, dt,
                                    self.phys, wet)
            if self.on_coefficients is not None:
                self.on_coefficients(co, self.step_index + 1)
            sol = solve_correction(co, self.mesh,
                                   (cfg.bc_left, cfg.bc_right),
                                   cfg.tau_p, cfg.tau_u,
                                   hu_fallback=q_pred[HU],
                                   track_residual=cfg.check_residual)
            self.max_solver_residual = max(self.max_solver_residual,
                                           sol.residual)
            if cfg.check_residual:
                self.max_corrector_residual = max(
                    self.max_corrector_residual, sol.eq1_residual)
            self.q = correct_momentum(q_pred, sol, phi_nodal, bed_q, dt,
                                      self.phys, cfg.closure, wet,
                                      self.mesh.dx)
            self.p = sol.p.coef
            self.pred.limit(self.q, t_new, positivity_only=True)

        self.t = t_new
        self.step_index += 1
        self._record_gauges()
        self._log(self._cfl_estimate())

    def _cfl_estimate(self) -> float:
        h0 = np.clip(self.q[H, :, 0], 0.0, None)
        wet = h0 > self.config.h_min
        u = np.where(wet, self.q[HU, :, 0] / np.where(wet, h0, 1.0), 0.0)
        lam = (np.abs(u) + np.sqrt(self.config.g * h0)).max()
        return float(lam * self.config.dt / self.mesh.dx)

    def snapshot(self) -> dict:
        nod = self.q[:, :, :1] + self.q[:, :, 1:] * GAUSS2.nodes[None, None, :]
        pn = self.p[:, :1] + self.p[:, 1:] * GAUSS2.nodes[None, :]
        d = self.bed.sample(self._quad_x, self.t).d
        return {
            "x": self._quad_x.ravel(),
            "h": nod[H].ravel(),
            "hu": nod[HU].ravel(),
            "hw": nod[HW].ravel(),
            "p": pn.ravel(),
            "d": d.ravel(),
            "eta": (nod[H] - d).ravel(),
        }

    def run(self) -> RunResult:
        cfg = self.config
        n_steps = int(round(cfg.t_end / cfg.dt))
        snap_steps = {int(round(ts / cfg.dt)): ts
                      for ts in cfg.snapshot_times}
        snapshots = {}
        if 0 in snap_steps:
            snapshots[snap_steps[0]] = self.snapshot()
        for _ in range(n_steps):
            self.step()
            if self.step_index in snap_steps:
                snapshots[snap_steps[self.step_index]] = self.snapshot()
        gauges = [GaugeSeries(xg, np.asarray(self._gauge_t),
                              np.asarray(self._gauge_eta[i]))
                  for i, xg in enumerate(cfg.gauges)]
        return RunResult(cfg, gauges, snapshots, self.runlog, self.state,
                         self.max_corrector_residual,
                         self.max_solver_residual)


def run(config: RunConfig, bed: BedModel | None = None) -> RunResult:
    return Simulation(config, bed).run()


# -- output writers -----------------------------------------------------


def write_outputs(result: RunResult, outdir) -> None:
    os.makedirs(outdir, exist_ok=True)
    result.config.save(os.path.join(outdir, "config.txt"))
    if result.gauges:
        header = ["t"] + [f"eta_g{i + 1}" for i in range(len(result.gauges))]
        cols = [result.gauges[0].t] + [g.eta for g in result.gauges]
        write_csv(os.path.join(outdir, "gauges.csv"), header, cols)
    if result.snapshots:
        sdir = os.path.join(outdir, "snapshots")
        os.makedirs(sdir, exist_ok=True)
        for ts, snap in sorted(result.snapshots.items()):
            path = os.path.join(sdir, f"t_{ts:.6f}.csv")
            names = list(snap.keys())
            write_csv(path, names, [snap[k] for k in names])
    rows = result.runlog
    write_csv(os.path.join(outdir, "runlog.csv"),
              ["step", "t", "mass", "max_u", "max_p", "cfl"],
              [np.asarray([r[i] for r in rows]) for i in range(6)])
