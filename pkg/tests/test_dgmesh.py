import numpy as np
import pytest
from hypothesis import given, strategies as st

from nhswe.dgmesh import (GAUSS2, Field, Mesh1D, fmt, interface_traces,
                          project)


def test_quadrature_exact_for_cubics():
    # independent check: integrate x^k over [-1, 1] for k = 0..3
    for k, exact in ((0, 2.0), (1, 0.0), (2, 2.0 / 3.0), (3, 0.0)):
        approx = np.sum(GAUSS2.weights * GAUSS2.nodes ** k)
        assert approx == pytest.approx(exact, abs=1e-15)


def test_mesh_geometry():
    mesh = Mesh1D(0.0, 1.0, 4)
    assert mesh.dx == 0.25
    assert np.allclose(mesh.interfaces(), [0, 0.25, 0.5, 0.75, 1.0])
    assert np.allclose(mesh.centers(), [0.125, 0.375, 0.625, 0.875])
    xq = mesh.quad_points()
    assert xq.shape == (4, 2)
    assert np.all(np.diff(xq, axis=1) > 0)


def test_mesh_validation():
    with pytest.raises(ValueError):
        Mesh1D(0.0, 1.0, 1)
    with pytest.raises(ValueError):
        Mesh1D(1.0, 0.0, 4)


def test_locate_and_out_of_domain():
    mesh = Mesh1D(0.0, 1.0, 4)
    assert mesh.locate(0.3) == 1
    assert mesh.locate(1.0) == 3  # right endpoint belongs to last element
    f = Field(mesh)
    with pytest.raises(ValueError):
        f(np.array([1.5]))


def test_projection_reproduces_linears_exactly():
    mesh = Mesh1D(-1.0, 3.0, 7)
    f = project(lambda x: 2.0 * x - 0.5, mesh)
    x = np.linspace(-1.0, 3.0, 101)
    assert np.abs(f(x) - (2.0 * x - 0.5)).max() < 1e-13


def test_projection_idempotent():
    mesh = Mesh1D(0.0, 2.0, 5)
    f = project(np.sin, mesh)
    g = Field.from_nodal(mesh, f.nodal())
    assert np.abs(f.coef - g.coef).max() < 1e-14


def test_mean_is_c0():
    # the element mean of the projection equals the projected c0
    mesh = Mesh1D(0.0, 1.0, 10)
    f = project(lambda x: x ** 2, mesh)
    # exact element means of x^2
    xi = mesh.interfaces()
    exact = (xi[1:] ** 3 - xi[:-1] ** 3) / (3.0 * mesh.dx)
    assert np.abs(f.means - exact).max() < 1e-14


def test_step_jump_traces():
    mesh = Mesh1D(0.0, 1.0, 2)
    f = Field(mesh, np.array([[0.0, 0.0], [1.0, 0.0]]))
    left, right = interface_traces(f)
    assert left[0] == 0.0 and right[0] == 1.0


def test_deriv_of_linear():
    mesh = Mesh1D(0.0, 4.0, 8)
    f = project(lambda x: 3.0 * x + 1.0, mesh)
    assert np.abs(f.deriv() - 3.0).max() < 1e-13


def test_vertex_interpolant_is_continuous():
    mesh = Mesh1D(0.0, 1.0, 6)
    rng = np.random.default_rng(7)
    v = rng.standard_normal(mesh.n + 1)
    f = Field.from_vertex(mesh, v)
    left, right = interface_traces(f)
    assert np.abs(left - right).max() < 1e-14
    # endpoint values reproduced
    el, er = f.traces()
    assert el[0] == pytest.approx(v[0])
    assert er[-1] == pytest.approx(v[-1])


@given(st.lists(st.floats(-1e3, 1e3), min_size=4, max_size=4),
       st.floats(-0.99, 0.99))
def test_nodal_roundtrip_property(c, xi):
    coef = np.array(c).reshape(2, 2)
    mesh = Mesh1D(0.0, 1.0, 2)
    f = Field(mesh, coef)
    g = Field.from_nodal(mesh, f.nodal())
    assert np.abs(f.coef - g.coef).max() <= 1e-9 * (1 + np.abs(coef).max())


def test_fmt_roundtrip():
    vals = [0.1, -1.0 / 3.0, 1e-300, 12345.6789]
    for v in vals:
        assert float(fmt(v)) == v
