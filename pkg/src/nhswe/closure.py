"""Bottom-pressure closures relating P^nh at the bed to the averaged p^nh.

Every closure is written in the common form

    P^nh|_bed = beta * p + gamma * (h p)_x + phi_term,

with (beta, gamma, phi_term):
    linear            (2, 0, 0)
    quad-simple       (3/2, 0, 0)
    quad-full         (6/(4+d_x^2), d_x/(4+d_x^2), phi)

where phi collects the geometric forcing of the reformulated quadratic
closure,

    phi = rho h / (4 + d_x^2) * (g d_x eta_x - d_tt - 2 u d_xt - u^2 d_xx).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bathymetry import BedSample

CLOSURES = ("hydrostatic", "linear", "quad-simple", "quad-full")


@dataclass(frozen=True)
class PhysParams:
    g: float = 9.81
    rho: float = 1000.0

    def __post_init__(self):
        if self.g <= 0 or self.rho <= 0:
            raise ValueError("g and rho must be positive")


def validate_closure(kind: str) -> str:
    if kind not in CLOSURES:
        raise ValueError(f"unknown closure {kind!r}; expected one of "
                         f"{CLOSURES}")
    return kind


def closure_beta_gamma(kind: str, d_x):
    """(beta, gamma) coefficient arrays of the common closure form."""
    validate_closure(kind)
    d_x = np.asarray(d_x, dtype=float)
    if kind == "linear":
        return np.full_like(d_x, 2.0), np.zeros_like(d_x)
    if kind == "quad-simple":
        return np.full_like(d_x, 1.5), np.zeros_like(d_x)
    if kind == "quad-full":
        den = 4.0 + d_x * d_x
        return 6.0 / den, d_x / den
    raise ValueError("hydrostatic closure has no bottom-pressure relation")


def phi(h, hu, eta_x, bed: BedSample, params: PhysParams,
        wet=None) -> np.ndarray:
    """Geometric forcing of the reformulated quadratic closure, in Pa.

    Evaluated pointwise; eta_x is the discrete free-surface gradient.
    Dry points (wet mask False) return 0.
    """
    h = np.asarray(h, dtype=float)
    hu = np.asarray(hu, dtype=float)
    if wet is None:
        wet = np.ones_like(h, dtype=bool)
    hs = np.where(wet, h, 1.0)
    u = np.where(wet, hu / hs, 0.0)
    val = (params.rho * h / (4.0 + bed.d_x ** 2)
           * (params.g * bed.d_x * eta_x - bed.d_tt - 2.0 * u * bed.d_xt
              - u * u * bed.d_xx))
    return np.where(wet, val, 0.0)


def bottom_pressure(kind: str, p, hp_x, bed: BedSample, phi_val):
    """Bottom non-hydrostatic pressure for the given closure, in Pa."""
    beta, gamma = closure_beta_gamma(kind, bed.d_x)
    if kind == "quad-full":
        return beta * p + gamma * np.asarray(hp_x) + phi_val
    return beta * p
