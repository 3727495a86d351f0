"""Hydrostatic shallow-water predictor: RKDG2 with Rusanov fluxes.

State q = (h, hu, hw); hw is advected passively by the predictor.  The bed
enters the momentum source through a continuous piecewise-linear (vertex
interpolated) representation, which makes the lake-at-rest state an exact
discrete steady state on wet elements.  Wetting and drying follows a
mean-depth dry threshold with a positivity slope clip and velocity-based
slope limiting; partially wet (semidry) front elements use the depth slope
itself in the source so that a ponding state stays at rest.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bathymetry import BedModel
from .dgmesh import GAUSS2, Field, Mesh1D

H = 0
HU = 1
HW = 2


class CFLError(RuntimeError):
    pass


@dataclass(frozen=True)
class BoundarySpec:
    left: str = "wall"
    right: str = "wall"

    def __post_init__(self):
        for side in (self.left, self.right):
            if side not in ("wall", "sponge"):
                raise ValueError(f"unknown boundary condition {side!r}")


@dataclass
class HydroState:
    h: Field
    hu: Field
    hw: Field
    t: float

    @property
    def mesh(self) -> Mesh1D:
        return self.h.mesh

    def as_array(self) -> np.ndarray:
        return np.stack([self.h.coef, self.hu.coef, self.hw.coef])

    @classmethod
    def from_array(cls, mesh: Mesh1D, q: np.ndarray, t: float) -> "HydroState":
        return cls(Field(mesh, q[H].copy()), Field(mesh, q[HU].copy()),
                   Field(mesh, q[HW].copy()), t)


def _velocity(h, hu, eps):
    """Desingularized velocity: exactly hu/h for h >= eps, bounded below.

    Thin layers (h < eps) get the smooth cap u = sqrt(2) h hu /
    sqrt(h^4 + eps^4), preventing velocity blow-up at wet/dry fronts.
    """
    h = np.clip(h, 0.0, None)
    thin = h < eps
    if not np.any(thin):
        return hu / np.where(h > 0.0, h, 1.0) if np.all(h > 0.0) \
            else np.where(h > 0.0, hu, 0.0) / np.where(h > 0.0, h, 1.0)
    hs = np.where(h > 0.0, h, 1.0)
    plain = np.where(h > 0.0, hu, 0.0) / hs
    capped = np.sqrt(2.0) * h * hu / np.sqrt(h ** 4 + eps ** 4)
    return np.where(thin, capped, plain)


def rusanov_flux(qL, qR, g, h_min=1e-6):
    """Rusanov (local Lax-Friedrichs) flux for stacked states (3, m).

    Returns (flux (3, m), signal speed (m,)).
    """
    qL = np.asarray(qL, dtype=float)
    qR = np.asarray(qR, dtype=float)
    scalar = qL.ndim == 1
    if scalar:
        qL = qL[:, None]
        qR = qR[:, None]
    assert qL[H].min() > -1e-10 and qR[H].min() > -1e-10, "negative depth"
    hL = np.clip(qL[H], 0.0, None)
    hR = np.clip(qR[H], 0.0, None)
    uL = _velocity(hL, qL[HU], h_min)
    uR = _velocity(hR, qR[HU], h_min)
    fL = np.stack([qL[HU], qL[HU] * uL + 0.5 * g * hL * hL, uL * qL[HW]])
    fR = np.stack([qR[HU], qR[HU] * uR + 0.5 * g * hR * hR, uR * qR[HW]])
    lam = np.maximum(np.abs(uL) + np.sqrt(g * hL),
                     np.abs(uR) + np.sqrt(g * hR))
    flux = 0.5 * (fL + fR) - 0.5 * lam * (qR - qL)
    if scalar:
        return flux[:, 0], lam[0]
    return flux, lam


def _minmod(a, b, c):
    s = np.sign(a)
    agree = (s == np.sign(b)) & (s == np.sign(c))
    return np.where(agree, s * np.minimum(np.abs(a),
                                          np.minimum(np.abs(b), np.abs(c))), 0.0)


class Predictor:
    """Carries the mesh, bed and numerical settings for predictor steps."""

    def __init__(self, mesh: Mesh1D, bed: BedModel, boundary: BoundarySpec,
                 g: float = 9.81, h_min: float = 1e-6, cfl_max: float = 0.45,
                 limiter_threshold: float = 1.0, sponge_frac: float = 0.1,
                 sponge_sigma0: float | None = None,
                 h_eps: float | None = None):
        self.mesh = mesh
        self.bed = bed
        self.boundary = boundary
        self.g = g
        self.h_min = h_min
        self.cfl_max = cfl_max
        self.limiter_threshold = limiter_threshold
        self.sponge_frac = sponge_frac
        self.sponge_sigma0 = sponge_sigma0
        # velocity desingularization depth for thin wet/dry front layers
        self.h_eps = h_eps if h_eps is not None \
            else max(h_min, mesh.dx ** 2)
        self._bed_cache: tuple[float, np.ndarray] | None = None

    # -- bed helpers --------------------------------------------------

    def bed_vertices(self, t: float) -> np.ndarray:
        if self._bed_cache is not None and self._bed_cache[0] == t:
            return self._bed_cache[1]
        d = self.bed.sample(self.mesh.interfaces(), t).d
        self._bed_cache = (t, d)
        return d

    def bed_modal(self, t: float) -> np.ndarray:
        """Modal coefficients (n, 2) of the continuous bed interpolant."""
        dv = self.bed_vertices(t)
        return np.stack([0.5 * (dv[:-1] + dv[1:]),
                         0.5 * (dv[1:] - dv[:-1])], axis=1)

    def still_state(self, t: float) -> np.ndarray:
        """Lake-at-rest state over the bed at time t (eta = 0 where wet)."""
        dv = np.clip(self.bed_vertices(t), 0.0, None)
        h = np.stack([0.5 * (dv[:-1] + dv[1:]),
                      0.5 * (dv[1:] - dv[:-1])], axis=1)
        q = np.zeros((3, self.mesh.n, 2))
        q[H] = h
        return q

    # -- classification ----------------------------------------------

    def wet_mask(self, q: np.ndarray) -> np.ndarray:
        return q[H, :, 0] > self.h_min

    def semidry_mask(self, q: np.ndarray) -> np.ndarray:
        h0, h1 = q[H, :, 0], q[H, :, 1]
        return self.wet_mask(q) & (h0 - np.abs(h1) <= self.h_min)

    # -- spatial operator ---------------------------------------------

    def interface_fluxes(self, q: np.ndarray, t: float):
        n = self.mesh.n
        el = q[:, :, 0] - q[:, :, 1]
        er = q[:, :, 0] + q[:, :, 1]
        wet = self.wet_mask(q)

        qLs = np.empty((3, n + 1))
        qRs = np.empty((3, n + 1))
        qLs[:, 1:] = er
        qRs[:, :-1] = el
        # ghost states: wall mirrors the interior trace, sponge copies it
        gl = el[:, 0].copy()
        if self.boundary.left == "wall":
            gl[HU] = -gl[HU]
        qLs[:, 0] = gl
        gr = er[:, -1].copy()
        if self.boundary.right == "wall":
            gr[HU] = -gr[HU]
        qRs[:, -1] = gr

        wetL = np.concatenate([wet[:1], wet])
        wetR = np.concatenate([wet, wet[-1:]])
        # a dry side enters the Riemann problem as vacuum
        qLs = np.where(wetL[None, :], qLs, 0.0)
        qRs = np.where(wetR[None, :], qRs, 0.0)
        np.clip(qLs[H], 0.0, None, out=qLs[H])
        np.clip(qRs[H], 0.0, None, out=qRs[H])

        flux, lam = rusanov_flux(qLs, qRs, self.g, self.h_eps)

        one_dry = wetL ^ wetR
        h_wet = np.where(wetL, qLs[H], qRs[H])
        wall = one_dry & (h_wet <= self.h_min)
        if np.any(wall):
            flux[:, wall] = 0.0
            flux[HU, wall] = 0.5 * self.g * h_wet[wall] ** 2
        both_dry = ~wetL & ~wetR
        flux[:, both_dry] = 0.0
        lam = np.where(both_dry, 0.0, lam)
        return flux, lam

    def rhs(self, q: np.ndarray, t: float):
        """Galerkin residual; returns (tendency (3, n, 2), max signal speed)."""
        mesh = self.mesh
        dx = mesh.dx
        flux, lam = self.interface_fluxes(q, t)

        nod = q[:, :, :1] + q[:, :, 1:] * GAUSS2.nodes[None, None, :]
        hq = np.clip(nod[H], 0.0, None)
        uq = _velocity(hq, nod[HU], self.h_eps)
        fq = np.stack([nod[HU], nod[HU] * uq + 0.5 * self.g * hq * hq,
                       uq * nod[HW]])

        dmod = self.bed_modal(t)
        src_slope = 2.0 * dmod[:, 1] / dx
        semidry = self.semidry_mask(q)
        if np.any(semidry):
            # ponding front elements balance against their own depth slope
            src_slope = np.where(semidry, 2.0 * q[H, :, 1] / dx, src_slope)
        s_mom = self.g * hq * src_slope[:, None]

        dq = np.empty_like(q)
        dq[:, :, 0] = -(flux[:, 1:] - flux[:, :-1]) / dx
        dq[HU, :, 0] += 0.5 * (s_mom[:, 0] + s_mom[:, 1])
        vol = fq.sum(axis=2)
        dq[:, :, 1] = 3.0 * (vol - (flux[:, 1:] + flux[:, :-1])) / dx
        dq[HU, :, 1] += 3.0 * 0.5 * (s_mom[:, 0] * GAUSS2.nodes[0]
                                     + s_mom[:, 1] * GAUSS2.nodes[1])
        return dq, float(lam.max())

    # -- limiter ------------------------------------------------------

    def _shock_slopes(self, v0, v1, active):
        """Jump-detector limiting; returns (triggered mask, new slopes)."""
        n = v0.shape[0]
        jl = np.zeros(n)
        jr = np.zeros(n)
        pair = active[1:] & active[:-1]
        jump = np.abs((v0[1:] - v1[1:]) - (v0[:-1] + v1[:-1]))
        jr[:-1] = np.where(pair, jump, 0.0)
        jl[1:] = np.where(pair, jump, 0.0)
        norm = np.maximum(np.abs(v0 - v1), np.abs(v0 + v1))
        # normalize jumps by the global field scale: a local norm would
        # keep flagging smooth cells where the field crosses zero (their
        # indicator does not decay under refinement), while shock jumps
        # are O(field scale) and stay detected
        vmax = norm[active].max() if np.any(active) else 0.0
        scale = 0.5 * self.mesh.dx * max(vmax, 1e-300)
        ds = np.maximum(jl, jr) / scale
        trig = active & (ds > self.limiter_threshold) & (norm > 0)
        fwd = np.zeros(n)
        bwd = np.zeros(n)
        fwd[:-1] = np.where(pair, 0.5 * (v0[1:] - v0[:-1]), 0.0)
        bwd[1:] = np.where(pair, 0.5 * (v0[1:] - v0[:-1]), 0.0)
        return trig, _minmod(v1, fwd, bwd)

    def limit(self, q: np.ndarray, t: float,
              positivity_only: bool = False) -> np.ndarray:
        h_min = self.h_min
        h0, h1 = q[H, :, 0], q[H, :, 1]
        h0[h0 < 0.0] = 0.0
        wet = h0 > h_min
        dry = ~wet

        if not positivity_only and np.any(wet):
            dmod = self.bed_modal(t)
            eta0 = h0 - dmod[:, 0]
            eta1 = h1 - dmod[:, 1]
            nod = q[:, :, :1] + q[:, :, 1:] * GAUSS2.nodes[None, None, :]
            hq = np.clip(nod[H], 0.0, None)
            uq = _velocity(hq, nod[HU], self.h_eps)
            wq = _velocity(hq, nod[HW], self.h_eps)
            u0 = 0.5 * (uq[:, 0] + uq[:, 1])
            u1 = 0.5 * np.sqrt(3.0) * (uq[:, 1] - uq[:, 0])
            w0 = 0.5 * (wq[:, 0] + wq[:, 1])
            w1 = 0.5 * np.sqrt(3.0) * (wq[:, 1] - wq[:, 0])
            te, se = self._shock_slopes(eta0, eta1, wet)
            tu, su = self._shock_slopes(u0, u1, wet)
            tw, sw = self._shock_slopes(w0, w1, wet)
            trig = te | tu | tw
            if np.any(trig):
                eta1 = np.where(trig, se, eta1)
                u1 = np.where(trig, su, u1)
                w1 = np.where(trig, sw, w1)
                h1[trig] = eta1[trig] + dmod[trig, 1]
                hq_new = (h0[:, None] + h1[:, None] * GAUSS2.nodes[None, :])
                uq_new = u0[:, None] + u1[:, None] * GAUSS2.nodes[None, :]
                wq_new = w0[:, None] + w1[:, None] * GAUSS2.nodes[None, :]
                huq = np.clip(hq_new, 0.0, None) * uq_new
                hwq = np.clip(hq_new, 0.0, None) * wq_new
                q[HU, trig, 0] = 0.5 * (huq[trig, 0] + huq[trig, 1])
                q[HU, trig, 1] = (0.5 * np.sqrt(3.0)
                                  * (huq[trig, 1] - huq[trig, 0]))
                q[HW, trig, 0] = 0.5 * (hwq[trig, 0] + hwq[trig, 1])
                q[HW, trig, 1] = (0.5 * np.sqrt(3.0)
                                  * (hwq[trig, 1] - hwq[trig, 0]))

        # positivity: clip the depth slope so nodal h >= 0 (min at vertices)
        over = wet & (np.abs(h1) > h0)
        h1[over] = np.sign(h1[over]) * h0[over]

        # semidry elements carry a constant velocity profile
        semi = wet & (h0 - np.abs(h1) <= h_min)
        if np.any(semi):
            uc = _velocity(h0[semi], q[HU, semi, 0], self.h_eps)
            wc = _velocity(h0[semi], q[HW, semi, 0], self.h_eps)
            q[HU, semi, 0] = uc * h0[semi]
            q[HU, semi, 1] = uc * h1[semi]
            q[HW, semi, 0] = wc * h0[semi]
            q[HW, semi, 1] = wc * h1[semi]

        h1[dry] = 0.0
        q[HU, dry] = 0.0
        q[HW, dry] = 0.0
        return q

    # -- sponge -------------------------------------------------------

    def apply_sponge(self, q: np.ndarray, t: float, dt: float) -> np.ndarray:
        sides = [s for s, bc in (("left", self.boundary.left),
                                 ("right", self.boundary.right))
                 if bc == "sponge"]
        if not sides or self.sponge_frac <= 0.0:
            return q
        cache = getattr(self, "_sponge_cache", None)
        if cache is None or cache[0] != dt:
            mesh = self.mesh
            width = self.sponge_frac * (mesh.x_r - mesh.x_l)
            sigma0 = self.sponge_sigma0 if self.sponge_sigma0 is not None \
                else 2.0 / dt
            xq = mesh.quad_points()
            xi = np.zeros_like(xq)
            for side in sides:
                if side == "right":
                    xi = np.maximum(xi, (xq - (mesh.x_r - width)) / width)
                else:
                    xi = np.maximum(xi, ((mesh.x_l + width) - xq) / width)
            xi = np.clip(xi, 0.0, 1.0)
            gamma = np.minimum(1.0, dt * sigma0 * xi * xi)
            active = np.flatnonzero(gamma.max(axis=1) > 0.0)
            cache = (dt, active, gamma[active])
            self._sponge_cache = cache
        _, active, gamma = cache
        if active.size == 0:
            return q
        ref = self.still_state(t)[:, active]
        qs = q[:, active]
        nod = qs[:, :, :1] + qs[:, :, 1:] * GAUSS2.nodes[None, None, :]
        rnod = ref[:, :, :1] + ref[:, :, 1:] * GAUSS2.nodes[None, None, :]
        nod -= gamma[None] * (nod - rnod)
        q[:, active, 0] = 0.5 * (nod[:, :, 0] + nod[:, :, 1])
        q[:, active, 1] = 0.5 * np.sqrt(3.0) * (nod[:, :, 1] - nod[:, :, 0])
        return q

    # -- time step ----------------------------------------------------

    def step(self, q: np.ndarray, t: float, dt: float) -> np.ndarray:
        """One Heun (TVD-RK2) predictor step with per-stage limiting."""
        if dt <= 0:
            raise ValueError("dt must be positive")
        dx = self.mesh.dx
        l1, lam = self.rhs(q, t)
        if lam * dt / dx > self.cfl_max:
            raise CFLError(f"CFL {lam * dt / dx:.3f} > {self.cfl_max} "
                           f"at t={t:.6g} (lambda={lam:.4g})")
        q1 = q + dt * l1
        self.limit(q1, t + dt)
        self.apply_sponge(q1, t + dt, dt)
        l2, lam2 = self.rhs(q1, t + dt)
        if lam2 * dt / dx > self.cfl_max:
            raise CFLError(f"CFL {lam2 * dt / dx:.3f} > {self.cfl_max} "
                           f"at t={t:.6g} (stage 2)")
        q2 = 0.5 * q + 0.5 * (q1 + dt * l2)
        self.limit(q2, t + dt)
        self.apply_sponge(q2, t + dt, dt)
        return q2


# -- functional wrappers over HydroState --------------------------------


def hydrostatic_rhs(state: HydroState, bed: BedModel, boundary: BoundarySpec,
                    g: float = 9.81, h_min: float = 1e-6):
    pred = Predictor(state.mesh, bed, boundary, g=g, h_min=h_min)
    dq, lam = pred.rhs(state.as_array(), state.t)
    return HydroState.from_array(state.mesh, dq, state.t), lam


def limit_and_dry(state: HydroState, bed: BedModel,
                  boundary: BoundarySpec | None = None, g: float = 9.81,
                  h_min: float = 1e-6) -> HydroState:
    pred = Predictor(state.mesh, bed, boundary or BoundarySpec(), g=g,
                     h_min=h_min)
    q = state.as_array()
    pred.limit(q, state.t)
    return HydroState.from_array(state.mesh, q, state.t)


def rk2_step(state: HydroState, dt: float, bed: BedModel,
             boundary: BoundarySpec, g: float = 9.81, h_min: float = 1e-6,
             cfl_max: float = 0.45) -> HydroState:
    pred = Predictor(state.mesh, bed, boundary, g=g, h_min=h_min,
                     cfl_max=cfl_max)
    q = pred.step(state.as_array(), state.t, dt)
    return HydroState.from_array(state.mesh, q, state.t + dt)
