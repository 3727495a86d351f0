"""Analytic time-dependent bed models for all benchmark scenarios.

The bed is described by the still-water referenced depth d(x, t), positive
downward, together with every derivative the pressure closure needs.  All
models are smooth enough for those derivatives to exist (the plate edges of
the vertical-thrust scenario are smoothed with tanh ramps; the sliding-bump
scenario has slope jumps only at the bump edges, where one-sided interior
values are returned).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class BedSample:
    """Depth and derivatives at a set of points (arrays share one shape)."""

    d: np.ndarray
    d_x: np.ndarray
    d_t: np.ndarray
    d_tt: np.ndarray
    d_xt: np.ndarray
    d_xx: np.ndarray


class BedModel:
    """Base class: sample(x, t) evaluates the bed at points x, time t."""

    #: True when d_t = d_tt = d_xt = 0 identically.
    static = False

    x_l: float = 0.0
    x_r: float = 1.0

    def sample(self, x, t: float) -> BedSample:
        raise NotImplementedError

    def depth(self, x, t: float) -> np.ndarray:
        return self.sample(x, t).d


class FlatBed(BedModel):
    static = True

    def __init__(self, h0: float):
        self.h0 = h0

    def sample(self, x, t: float) -> BedSample:
        x = np.asarray(x, dtype=float)
        z = np.zeros_like(x)
        return BedSample(np.full_like(x, self.h0), z, z.copy(), z.copy(),
                         z.copy(), z.copy())


def hammack_alpha(case: str, h0: float, b: float, g: float) -> float:
    """Plate motion rate alpha = 1.11 / t_c for the vertical-thrust tank.

    The characteristic times satisfy t_c * sqrt(g h0) / b = 0.148 (uplift)
    and 0.093 (downdraft).
    """
    if h0 <= 0 or b <= 0 or g <= 0:
        raise ValueError("h0, b, g must be positive")
    c = {"up": 0.148, "down": 0.093}[case]
    t_c = c * b / np.sqrt(g * h0)
    return 1.11 / t_c


class HammackBed(BedModel):
    """Exponentially moving plate next to a reflecting wall at x = 0.

    d(x, t) = h0 - zeta0 * (1 - exp(-alpha t)) * R(x), where R is a smooth
    tanh ramp approximating the indicator of the plate support |x| < b.
    zeta0 > 0 is uplift, zeta0 < 0 downdraft.
    """

    def __init__(self, h0: float, b: float, zeta0: float, alpha: float,
                 ramp_width: float = 0.05):
        if h0 <= 0 or b <= 0 or alpha <= 0 or ramp_width <= 0:
            raise ValueError("h0, b, alpha, ramp_width must be positive")
        self.h0 = h0
        self.b = b
        self.zeta0 = zeta0
        self.alpha = alpha
        self.w = ramp_width

    def _ramp(self, x):
        w = self.w
        tp = np.tanh((x + self.b) / w)
        tm = np.tanh((x - self.b) / w)
        r = 0.25 * (1.0 + tp) * (1.0 - tm)
        # d/dx tanh(u) = (1 - tanh^2 u) / w etc.
        dtp = (1.0 - tp * tp) / w
        dtm = (1.0 - tm * tm) / w
        r1 = 0.25 * (dtp * (1.0 - tm) - (1.0 + tp) * dtm)
        ddtp = -2.0 * tp * dtp / w
        ddtm = -2.0 * tm * dtm / w
        r2 = 0.25 * (ddtp * (1.0 - tm) - 2.0 * dtp * dtm - (1.0 + tp) * ddtm)
        return r, r1, r2

    def sample(self, x, t: float) -> BedSample:
        x = np.asarray(x, dtype=float)
        r, r1, r2 = self._ramp(x)
        e = np.exp(-self.alpha * t)
        a = self.zeta0 * (1.0 - e)
        at = self.zeta0 * self.alpha * e
        att = -self.zeta0 * self.alpha ** 2 * e
        return BedSample(
            d=self.h0 - a * r,
            d_x=-a * r1,
            d_t=-at * r,
            d_tt=-att * r,
            d_xt=-at * r1,
            d_xx=-a * r2,
        )


def _piecewise_slide(t: float, a0: float, u_t: float, t1: float, t2: float,
                     t3: float) -> tuple[float, float, float]:
    """Accelerate / coast / decelerate displacement law: (S, S', S'')."""
    if t <= 0.0:
        return 0.0, 0.0, a0
    if t <= t1:
        return 0.5 * a0 * t * t, a0 * t, a0
    s1 = 0.5 * a0 * t1 * t1
    if t <= t2:
        return s1 + u_t * (t - t1), u_t, 0.0
    if t <= t3:
        return (s1 + u_t * (t - t1) - 0.5 * a0 * (t - t2) ** 2,
                u_t - a0 * (t - t2), -a0)
    return s1 + u_t * (t3 - t1) - 0.5 * a0 * (t3 - t2) ** 2, 0.0, 0.0


class WhittakerBed(BedModel):
    """Quartic bump of height H_s sliding over a flat bottom of depth h0.

    The bump support is exactly |x - S(t)| < L_s / 2; the bump value
    vanishes at the edges (C0 bed) while its slope jumps there.
    """

    def __init__(self, h0: float, hs: float, ls: float, a0: float,
                 u_t: float, t1: float, t2: float, t3: float):
        if not (t3 > t2 > t1 > 0):
            raise ValueError("need t3 > t2 > t1 > 0")
        self.h0 = h0
        self.hs = hs
        self.ls = ls
        self.a0 = a0
        self.u_t = u_t
        self.t1, self.t2, self.t3 = t1, t2, t3

    def slide(self, t: float) -> tuple[float, float, float]:
        return _piecewise_slide(t, self.a0, self.u_t, self.t1, self.t2,
                                self.t3)

    def sample(self, x, t: float) -> BedSample:
        x = np.asarray(x, dtype=float)
        s, sp, spp = self.slide(t)
        r = 2.0 * (x - s) / self.ls
        inside = np.abs(r) < 1.0
        r = np.where(inside, r, 0.0)
        k = 8.0 * self.hs / self.ls
        d = np.where(inside, self.h0 - self.hs * (1.0 - r ** 4), self.h0)
        d_x = np.where(inside, k * r ** 3, 0.0)
        d_xx = np.where(inside, 3.0 * k * r * r * (2.0 / self.ls), 0.0)
        # translation: d_t = -S' d_x and so on by the chain rule
        d_t = -sp * d_x
        d_xt = -sp * d_xx
        d_tt = -spp * d_x + sp * sp * d_xx
        return BedSample(d, d_x, d_t, d_tt, d_xt, d_xx)


class LynettBed(BedModel):
    """Translating tanh-bounded slide on a planar beach of angle theta."""

    def __init__(self, theta_deg: float, dh: float, b: float, s0: float,
                 t0: float, x0: float):
        if not 0.0 < theta_deg < 90.0:
            raise ValueError("theta must lie in (0, 90) degrees")
        self.theta = np.deg2rad(theta_deg)
        self.dh = dh
        self.b = b
        self.s0 = s0
        self.t0 = t0
        self.x0 = x0

    def slide(self, t: float) -> tuple[float, float, float]:
        z = t / self.t0
        s = self.s0 * np.log(np.cosh(z))
        sp = self.s0 / self.t0 * np.tanh(z)
        spp = self.s0 / self.t0 ** 2 / np.cosh(z) ** 2
        return s, sp, spp

    def sample(self, x, t: float) -> BedSample:
        x = np.asarray(x, dtype=float)
        cth = np.cos(self.theta)
        s, sp, spp = self.slide(t)
        xc = self.x0 + s * cth
        xl = xc - 0.5 * self.b * cth
        xr = xc + 0.5 * self.b * cth
        c = 2.0 * cth
        t1 = np.tanh(c * (x - xl))
        t2 = np.tanh(c * (x - xr))
        a = 1.0 + t1
        bb = 1.0 - t2
        a_x = c * (1.0 - t1 * t1)
        b_x = -c * (1.0 - t2 * t2)
        a_xx = -2.0 * c * t1 * a_x
        b_xx = -2.0 * c * t2 * b_x
        q = 0.25 * self.dh
        g = q * a * bb
        g_x = q * (a_x * bb + a * b_x)
        g_xx = q * (a_xx * bb + 2.0 * a_x * b_x + a * b_xx)
        v = sp * cth
        vp = spp * cth
        return BedSample(
            d=x * np.tan(self.theta) - g,
            d_x=np.tan(self.theta) - g_x,
            d_t=v * g_x,
            d_xt=v * g_xx,
            d_tt=vp * g_x - v * v * g_xx,
            d_xx=-g_xx,
        )


class FrozenBed(BedModel):
    """Wraps another bed, pinned at a fixed time; all time derivatives 0."""

    static = True

    def __init__(self, inner: BedModel, t_freeze: float = 0.0):
        self.inner = inner
        self.t_freeze = t_freeze
        self.x_l = inner.x_l
        self.x_r = inner.x_r

    def sample(self, x, t: float) -> BedSample:
        s = self.inner.sample(x, self.t_freeze)
        z = np.zeros_like(s.d)
        return BedSample(s.d, s.d_x, z, z.copy(), z.copy(), s.d_xx)
