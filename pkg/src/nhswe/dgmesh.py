"""Uniform 1D mesh with a piecewise-linear modal DG basis.

A field on the mesh is stored as per-element modal coefficients (c0, c1)
of the reference-element basis {1, xi} with xi in [-1, 1], so the element
mean is c0 and the interface traces are c0 -/+ c1.  All quadrature uses
the 2-point Gauss-Legendre rule, which integrates cubics exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SQRT3 = np.sqrt(3.0)


@dataclass(frozen=True)
class Quadrature:
    """Reference-element nodes and weights on [-1, 1]."""

    nodes: np.ndarray
    weights: np.ndarray


GAUSS2 = Quadrature(nodes=np.array([-1.0 / SQRT3, 1.0 / SQRT3]),
                    weights=np.array([1.0, 1.0]))


@dataclass(frozen=True)
class Mesh1D:
    x_l: float
    x_r: float
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("mesh needs at least 2 elements")
        if self.x_r <= self.x_l:
            raise ValueError("empty domain")

    @property
    def dx(self) -> float:
        return (self.x_r - self.x_l) / self.n

    def interfaces(self) -> np.ndarray:
        """The n+1 element interface abscissae."""
        return self.x_l + self.dx * np.arange(self.n + 1)

    def centers(self) -> np.ndarray:
        return self.x_l + self.dx * (np.arange(self.n) + 0.5)

    def quad_points(self) -> np.ndarray:
        """Physical quadrature abscissae, shape (n, 2)."""
        return self.centers()[:, None] + 0.5 * self.dx * GAUSS2.nodes[None, :]

    def locate(self, x):
        """Element index containing x; raises for out-of-domain points."""
        x = np.asarray(x, dtype=float)
        if np.any(x < self.x_l) or np.any(x > self.x_r):
            raise ValueError(f"point outside domain [{self.x_l}, {self.x_r}]")
        idx = np.floor((x - self.x_l) / self.dx).astype(int)
        return np.clip(idx, 0, self.n - 1)


class Field:
    """One scalar DG unknown: modal (mean, slope) coefficients per element."""

    __slots__ = ("mesh", "coef")

    def __init__(self, mesh: Mesh1D, coef: np.ndarray | None = None):
        self.mesh = mesh
        if coef is None:
            coef = np.zeros((mesh.n, 2))
        coef = np.asarray(coef, dtype=float)
        if coef.shape != (mesh.n, 2):
            raise ValueError("coefficient array must have shape (n, 2)")
        self.coef = coef

    # -- constructors -------------------------------------------------

    @classmethod
    def from_nodal(cls, mesh: Mesh1D, values: np.ndarray) -> "Field":
        """From values at the two Gauss nodes of each element.

        For 2-point Gauss data this coincides with the element-wise L2
        projection, exactly for polynomials up to degree 3.
        """
        values = np.asarray(values, dtype=float)
        c0 = 0.5 * (values[:, 0] + values[:, 1])
        c1 = 0.5 * SQRT3 * (values[:, 1] - values[:, 0])
        return cls(mesh, np.stack([c0, c1], axis=1))

    @classmethod
    def from_function(cls, mesh: Mesh1D, f) -> "Field":
        return cls.from_nodal(mesh, f(mesh.quad_points()))

    @classmethod
    def from_vertex(cls, mesh: Mesh1D, values: np.ndarray) -> "Field":
        """Continuous piecewise-linear interpolant of interface values."""
        values = np.asarray(values, dtype=float)
        c0 = 0.5 * (values[:-1] + values[1:])
        c1 = 0.5 * (values[1:] - values[:-1])
        return cls(mesh, np.stack([c0, c1], axis=1))

    # -- evaluation ---------------------------------------------------

    def nodal(self) -> np.ndarray:
        """Values at the Gauss nodes, shape (n, 2)."""
        return self.coef[:, :1] + self.coef[:, 1:] * GAUSS2.nodes[None, :]

    def traces(self) -> tuple[np.ndarray, np.ndarray]:
        """One-sided limits at each element's own (left, right) edge."""
        left = self.coef[:, 0] - self.coef[:, 1]
        right = self.coef[:, 0] + self.coef[:, 1]
        return left, right

    def deriv(self) -> np.ndarray:
        """Element-wise spatial derivative (constant per element)."""
        return 2.0 * self.coef[:, 1] / self.mesh.dx

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        idx = self.mesh.locate(x)
        xc = self.mesh.centers()[idx]
        xi = 2.0 * (x - xc) / self.mesh.dx
        return self.coef[idx, 0] + self.coef[idx, 1] * xi

    def copy(self) -> "Field":
        return Field(self.mesh, self.coef.copy())

    @property
    def means(self) -> np.ndarray:
        return self.coef[:, 0]


def project(f, mesh: Mesh1D) -> Field:
    """Element-wise L2 projection of a pointwise function onto the DG space."""
    return Field.from_function(mesh, f)


def eval_field(field: Field, x):
    return field(x)


def interface_traces(field: Field) -> tuple[np.ndarray, np.ndarray]:
    """(left, right) one-sided limits at the n-1 interior interfaces."""
    el, er = field.traces()
    return er[:-1], el[1:]


def fmt(v: float) -> str:
    """Deterministic 17-significant-digit formatting for CSV output."""
    return f"{v:.17g}"


def write_csv(path, header: list[str], columns: list[np.ndarray]) -> None:
    rows = len(columns[0])
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(rows):
            fh.write(",".join(fmt(c[i]) for c in columns) + "\n")
