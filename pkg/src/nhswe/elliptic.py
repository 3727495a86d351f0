"""Coupled first-order elliptic system in (p, hu), solved per time step.

The corrector's implicit equations are brought into the general form

    p_x  + g1 p + h1 hu = f1
    hu_x + h2 p + g2 hu = f2

on the wet part of the domain, discretized with a local discontinuous
Galerkin method (stabilized alternating fluxes) and solved with a direct
banded LU factorization.  Unknowns are interleaved per element as
(p-mean, p-slope, hu-mean, hu-slope), giving bandwidth 7.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .bathymetry import BedSample
from .closure import PhysParams, validate_closure
from .dgmesh import GAUSS2, Field, Mesh1D

XI1, XI2 = GAUSS2.nodes


class EllipticError(RuntimeError):
    pass


class SingularSystemError(EllipticError):
    pass


@dataclass
class EllipticCoefficients:
    """Per-quadrature-node coefficient fields on shape (n, 2) arrays."""

    g1: np.ndarray
    g2: np.ndarray
    h1: np.ndarray
    h2: np.ndarray
    f1: np.ndarray
    f2: np.ndarray
    wet: np.ndarray
    skew_exact: bool = True  # g1 + g2 == 0 holds for this closure

    def validate(self) -> None:
        if self.skew_exact:
            s = np.abs(self.g1[self.wet] + self.g2[self.wet])
            if s.size and s.max() > 1e-14 * max(1.0,
                                                np.abs(self.g1[self.wet]).max()):
                raise EllipticError("g1 + g2 != 0 on wet nodes")
        for name, arr in (("h1", self.h1), ("h2", self.h2)):
            if arr[self.wet].size and arr[self.wet].min() <= 0.0:
                raise EllipticError(f"{name} not positive on wet nodes")


def build_coefficients(kind: str, h_nodal, h_slope, hu_nodal, hw_nodal,
                       bed_q: BedSample, phi_nodal, dt: float,
                       params: PhysParams, wet) -> EllipticCoefficients:
    """Coefficients of the (p, hu) system from the predicted state.

    All inputs are per-quadrature-node arrays of shape (n, 2) except
    h_slope (n,), the DG slope of the predicted depth.  Dry elements get
    zero coefficients and are excluded from assembly.
    """
    validate_closure(kind)
    if kind == "hydrostatic":
        raise ValueError("hydrostatic closure needs no elliptic solve")
    wet = np.asarray(wet, dtype=bool)
    if np.any(h_nodal[wet] <= 0.0):
        raise EllipticError("non-positive depth inside wet region")
    h = np.where(wet[:, None], h_nodal, 1.0)
    hx = np.broadcast_to(np.asarray(h_slope)[:, None], h.shape)
    dx_b = bed_q.d_x
    rho, dt_ = params.rho, dt

    if kind == "quad-full":
        den = 4.0 + dx_b * dx_b
        s = (2.0 * hx - 3.0 * dx_b) / (2.0 * h)
        g1, g2 = s, -s
        h1 = rho * den / (4.0 * dt_ * h)
        h2 = 3.0 * dt_ / (rho * h)
        f1 = den / (4.0 * h) * (phi_nodal * dx_b + rho / dt_ * hu_nodal)
        f2 = (-2.0 * bed_q.d_t - 2.0 * hw_nodal / h
              - dx_b * hu_nodal / (2.0 * h)
              - dt_ * den / (2.0 * rho * h) * phi_nodal)
        skew = True
    elif kind == "linear":
        s = (hx - 2.0 * dx_b) / h
        g1, g2 = s, -s
        h1 = rho / (dt_ * h)
        h2 = 4.0 * dt_ / (rho * h)
        f1 = rho * hu_nodal / (dt_ * h)
        f2 = -2.0 * bed_q.d_t - 2.0 * hw_nodal / h
        skew = True
    else:  # quad-simple: skew symmetry holds only on flat bed sections
        g1 = (2.0 * hx - 3.0 * dx_b) / (2.0 * h)
        g2 = (2.0 * dx_b - hx) / h
        h1 = rho / (dt_ * h)
        h2 = 3.0 * dt_ / (rho * h)
        f1 = rho * hu_nodal / (dt_ * h)
        f2 = -2.0 * bed_q.d_t - 2.0 * hw_nodal / h
        skew = False

    m = wet[:, None]
    zero = lambda a: np.where(m, a, 0.0)
    co = EllipticCoefficients(zero(g1), zero(g2), zero(np.where(m, h1, 0.0)),
                              zero(h2), zero(f1), zero(f2), wet, skew)
    return co


@dataclass
class BandedSystem:
    """Square banded system over interleaved (p, hu) DG unknowns.

    Storage is the LAPACK gbsv layout (k fill-in rows on top of the
    diagonal-ordered band), Fortran-ordered so the solver works in place.
    """

    abp: np.ndarray         # padded storage, shape (3k+1, dim)
    rhs: np.ndarray
    k: int                  # half bandwidth

    @property
    def ab(self) -> np.ndarray:
        """Diagonal-ordered band view, shape (2k+1, dim)."""
        return self.abp[self.k:]

    @property
    def dim(self) -> int:
        return self.rhs.shape[0]

    def matvec(self, x: np.ndarray) -> np.ndarray:
        y = np.zeros_like(x)
        n = self.dim
        for o in range(-self.k, self.k + 1):
            diag = self.ab[self.k + o]
            if o >= 0:
                y[o:] += diag[: n - o] * x[: n - o]
            else:
                y[: n + o] += diag[-o:] * x[-o:]
        return y

    def residual(self, x: np.ndarray) -> float:
        b = np.abs(self.rhs).max()
        return float(np.abs(self.matvec(x) - self.rhs).max() / max(b, 1e-300))

    def triplets(self):
        """(row, col, value) triples of the stored nonzeros, for dumps."""
        out = []
        n = self.dim
        for o in range(-self.k, self.k + 1):
            for j in range(n):
                i = j + o
                if 0 <= i < n and self.ab[self.k + o, j] != 0.0:
                    out.append((i, j, self.ab[self.k + o, j]))
        return out


_STRUCTURE_CACHE: dict = {}


def _structure(m: int, bc: tuple[str, str], tau_p: float,
               tau_u: float) -> np.ndarray:
    """State-independent part of the banded matrix (traces, penalties,
    boundary closures, derivative volume terms); cached per shape/bc."""
    key = (m, bc, tau_p, tau_u)
    hit = _STRUCTURE_CACHE.get(key)
    if hit is not None:
        return hit
    k = 7
    abp = np.zeros((3 * k + 1, 4 * m), order="F")
    ab = abp[k:]

    def add(rows, cols, vals):
        # one (row, col) pair per position within a single call
        ab[k + rows - cols, cols] += vals

    e = np.arange(m)
    # derivative volume contribution -2 * mean on the slope-test rows
    add(4 * e + 1, 4 * e, np.full(m, -2.0))
    add(4 * e + 3, 4 * e + 2, np.full(m, -2.0))

    # interior interfaces i = 1..m-1: alternating traces with jump penalties
    #   p_hat  = p_left  - tau_p * [hu]
    #   hu_hat = hu_right - tau_u * [p]
    if m > 1:
        L = np.arange(m - 1)       # left element of each interior interface
        R = L + 1
        phat = [(4 * L, 1.0), (4 * L + 1, 1.0),
                (4 * R + 2, -tau_p), (4 * R + 3, tau_p),
                (4 * L + 2, tau_p), (4 * L + 3, tau_p)]
        uhat = [(4 * R + 2, 1.0), (4 * R + 3, -1.0),
                (4 * R, -tau_u), (4 * R + 1, tau_u),
                (4 * L, tau_u), (4 * L + 1, tau_u)]
        p_rows = [(4 * L, 1.0), (4 * L + 1, 1.0), (4 * R, -1.0),
                  (4 * R + 1, 1.0)]
        u_rows = [(4 * L + 2, 1.0), (4 * L + 3, 1.0), (4 * R + 2, -1.0),
                  (4 * R + 3, 1.0)]
        for rows, rsign in p_rows:
            for cols, csign in phat:
                add(rows, cols, np.full(m - 1, rsign * csign))
        for rows, rsign in u_rows:
            for cols, csign in uhat:
                add(rows, cols, np.full(m - 1, rsign * csign))

    # boundary interfaces
    def add1(r, c, v):
        ab[k + r - c, c] += v

    last = m - 1
    if bc[0] == "wall":
        # hu_hat = 0; p_hat = interior trace p0 - p1
        add1(0, 0, -1.0)
        add1(0, 1, 1.0)
        add1(1, 0, 1.0)
        add1(1, 1, -1.0)
    else:
        # p_hat = 0; hu_hat = interior trace hu0 - hu1
        add1(2, 2, -1.0)
        add1(2, 3, 1.0)
        add1(3, 2, 1.0)
        add1(3, 3, -1.0)
    if bc[1] == "wall":
        add1(4 * last, 4 * last, 1.0)
        add1(4 * last, 4 * last + 1, 1.0)
        add1(4 * last + 1, 4 * last, 1.0)
        add1(4 * last + 1, 4 * last + 1, 1.0)
    else:
        add1(4 * last + 2, 4 * last + 2, 1.0)
        add1(4 * last + 2, 4 * last + 3, 1.0)
        add1(4 * last + 3, 4 * last + 2, 1.0)
        add1(4 * last + 3, 4 * last + 3, 1.0)

    _STRUCTURE_CACHE[key] = abp
    return abp


def assemble_ldg(co: EllipticCoefficients, dx: float, bc: tuple[str, str],
                 tau_p: float = 1.0, tau_u: float = 1.0,
                 elements: np.ndarray | None = None,
                 validate: bool = True) -> BandedSystem:
    """Assemble the LDG system for one contiguous wet element run.

    bc entries are 'wall' (hu = 0) or 'open' (p = 0).  `elements` selects
    the run (defaults to all elements, which must then all be wet).
    """
    if validate:
        co.validate()
    if elements is None:
        elements = np.arange(co.g1.shape[0])
    if len(elements) == 0:
        raise SingularSystemError("empty wet region")
    for side in bc:
        if side not in ("wall", "open"):
            raise ValueError(f"unknown elliptic boundary condition {side!r}")

    m = len(elements)
    k = 7
    abp = _structure(m, bc, tau_p, tau_u).copy(order="F")
    ab = abp[k:]
    b = np.zeros(4 * m)

    def add(rows, cols, vals):
        ab[k + rows - cols, cols] += vals

    g1 = co.g1[elements]
    g2 = co.g2[elements]
    h1 = co.h1[elements]
    h2 = co.h2[elements]

    def s0(c):
        return 0.5 * dx * (c[:, 0] + c[:, 1])

    def s1(c):
        return 0.5 * dx * (c[:, 0] * XI1 + c[:, 1] * XI2)

    e = np.arange(m)
    P0, P1, U0, U1 = 4 * e, 4 * e + 1, 4 * e + 2, 4 * e + 3
    R1a, R1b, R2a, R2b = 4 * e, 4 * e + 1, 4 * e + 2, 4 * e + 3

    # reaction volume terms against both test functions
    add(R1a, P0, s0(g1))
    add(R1a, P1, s1(g1))
    add(R1a, U0, s0(h1))
    add(R1a, U1, s1(h1))
    add(R1b, P0, s1(g1))
    add(R1b, P1, s0(g1) / 3.0)
    add(R1b, U0, s1(h1))
    add(R1b, U1, s0(h1) / 3.0)
    add(R2a, U0, s0(g2))
    add(R2a, U1, s1(g2))
    add(R2a, P0, s0(h2))
    add(R2a, P1, s1(h2))
    add(R2b, U0, s1(g2))
    add(R2b, U1, s0(g2) / 3.0)
    add(R2b, P0, s1(h2))
    add(R2b, P1, s0(h2) / 3.0)

    f1 = co.f1[elements]
    f2 = co.f2[elements]
    b[R1a] = s0(f1)
    b[R1b] = s1(f1)
    b[R2a] = s0(f2)
    b[R2b] = s1(f2)

    return BandedSystem(abp=abp, rhs=b, k=k)


@dataclass
class EllipticSolution:
    p: Field
    hu: Field
    residual: float = 0.0
    eq1_residual: float = 0.0
    runs: list = field(default_factory=list)


def _solve_raw(system: BandedSystem,
               preserve: bool = False) -> np.ndarray:
    k = system.k
    abp = system.abp.copy(order="F") if preserve else system.abp
    _, _, x, info = scipy.linalg.lapack.dgbsv(k, k, abp, system.rhs,
                                              overwrite_ab=True)
    if info != 0:
        raise SingularSystemError(f"banded LU failed (info={info})")
    if not np.all(np.isfinite(x)):
        bad = int(np.flatnonzero(~np.isfinite(x))[0] // 4)
        raise SingularSystemError(f"non-finite solution at element {bad}")
    return x


def solve(system: BandedSystem) -> tuple[np.ndarray, float]:
    """Direct banded LU solve; returns (solution, relative residual)."""
    x = _solve_raw(system, preserve=True)
    return x, system.residual(x)


def wet_runs(wet: np.ndarray) -> list[tuple[int, int]]:
    """Half-open (start, stop) index ranges of contiguous wet elements."""
    runs = []
    n = len(wet)
    i = 0
    while i < n:
        if wet[i]:
            j = i
            while j < n and wet[j]:
                j += 1
            runs.append((i, j))
            i = j
        else:
            i += 1
    return runs


def solve_correction(co: EllipticCoefficients, mesh: Mesh1D,
                     domain_bc: tuple[str, str], tau_p: float = 1.0,
                     tau_u: float = 1.0,
                     hu_fallback: np.ndarray | None = None,
                     track_residual: bool = True) -> EllipticSolution:
    """Assemble and solve the system on every contiguous wet subdomain.

    Interior wet/dry interfaces act as walls (hu = 0).  p is zero on dry
    elements; hu there keeps the fallback (predictor) value.
    """
    n = mesh.n
    p = np.zeros((n, 2))
    hu = np.zeros((n, 2)) if hu_fallback is None else hu_fallback.copy()
    runs = wet_runs(co.wet)
    if not runs:
        raise SingularSystemError("all elements dry")
    worst = 0.0
    worst_eq1 = 0.0
    for start, stop in runs:
        elements = np.arange(start, stop)
        bc_l = domain_bc[0] if start == 0 else "wall"
        bc_r = domain_bc[1] if stop == n else "wall"
        bc_l = "open" if bc_l == "sponge" else bc_l
        bc_r = "open" if bc_r == "sponge" else bc_r
        system = assemble_ldg(co, mesh.dx, (bc_l, bc_r), tau_p, tau_u,
                              elements, validate=track_residual)
        x = _solve_raw(system, preserve=track_residual)
        if track_residual:
            worst = max(worst, system.residual(x))
            r_full = system.matvec(x) - system.rhs
            eq1 = np.zeros(len(x), dtype=bool)
            eq1[0::4] = True
            eq1[1::4] = True
            bnorm = max(np.abs(system.rhs[eq1]).max(), 1e-300)
            worst_eq1 = max(worst_eq1,
                            float(np.abs(r_full[eq1]).max() / bnorm))
        sol = x.reshape(-1, 4)
        p[elements] = sol[:, 0:2]
        hu[elements] = sol[:, 2:4]
    return EllipticSolution(p=Field(mesh, p), hu=Field(mesh, hu),
                            residual=worst, eq1_residual=worst_eq1,
                            runs=runs)
